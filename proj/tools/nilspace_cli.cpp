// nilspace: construct maximal nilpotent spaces of structured endomorphisms
// over small odd-characteristic fields, verify their invariants, and run
// exhaustive censuses against the claimed dimension bounds.
//
// Exit codes: 0 all assertions passed, 1 assertion failure, 2 budget
// refusal, 3 bad input.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "nilspace/acceptance.hpp"
#include "nilspace/nilspace.hpp"

namespace {

using namespace nilspace;

struct JobSpec {
    std::string command;
    int64_t p = 3;
    int degree = 1;
    std::string form_source;
    std::string form_kind = "auto";
    std::string kind; // structure; defaults to the resolved form kind
    int dim = -1;     // census-only override
    std::string format = "text";
    SearchBudget budget;
};

Json job_to_json(const JobSpec& job) {
    Json j{{"command", job.command},
           {"field", Json{{"p", job.p}, {"degree", job.degree}}},
           {"form", job.form_source},
           {"form_kind", job.form_kind},
           {"kind", job.kind},
           {"format", job.format},
           {"budget", budget_to_json(job.budget)}};
    if (job.dim >= 0) j["dim"] = job.dim;
    return j;
}

void parse_field(const std::string& text, JobSpec& job) {
    auto comma = text.find(',');
    if (comma == std::string::npos) {
        const FieldSpec& f = make_field_from_order(std::stoll(text));
        job.p = f.characteristic();
        job.degree = f.degree();
    } else {
        job.p = std::stoll(text.substr(0, comma));
        job.degree = std::stoi(text.substr(comma + 1));
        make_field(job.p, job.degree); // validate now
    }
}

std::vector<int64_t> parse_int_list(const std::string& text) {
    std::vector<int64_t> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(std::stoll(cell));
    return out;
}

FormKind infer_form_kind(const Mat& gram) {
    bool skew = gram == -gram.transpose();
    if (skew)
        for (int i = 0; i < gram.rows() && skew; ++i)
            if (!gram.at(i, i).is_zero()) skew = false;
    bool sym = gram == gram.transpose();
    if (skew && !gram.is_zero() && !sym) return FormKind::alternating;
    if (gram.field().degree() == 2 && gram == conj_transpose(gram)) return FormKind::hermitian;
    if (sym) return FormKind::symmetric;
    if (skew) return FormKind::alternating;
    throw std::invalid_argument("gram matrix is neither symmetric, alternating nor Hermitian");
}

Form resolve_form(const JobSpec& job) {
    const FieldSpec& f = make_field(job.p, job.degree);
    const std::string& src = job.form_source;
    auto colon = src.find(':');
    std::string name = colon == std::string::npos ? src : src.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : src.substr(colon + 1);

    auto forced_kind = [&](FormKind natural) {
        return job.form_kind == "auto" ? natural : kind_from_name(job.form_kind);
    };

    if (name == "hyperbolic") return hyperbolic_form(f, std::stoi(arg));
    if (name == "Kn") return kn_form(f, std::stoi(arg));
    if (name == "hyperbolic-hermitian") return hyperbolic_hermitian_form(f, std::stoi(arg));
    if (name == "diag") {
        Mat gram = diag_matrix(f, parse_int_list(arg));
        FormKind natural = f.degree() == 2 ? FormKind::hermitian : FormKind::symmetric;
        return Form(forced_kind(natural), gram);
    }
    if (name == "gram") {
        Mat gram = mat_from_text(f, arg);
        return Form(forced_kind(infer_form_kind(gram)), gram);
    }
    throw std::invalid_argument("unknown form '" + src +
                                "' (expected hyperbolic:n, Kn:n, hyperbolic-hermitian:n, "
                                "diag:a,b,..., or gram:rows)");
}

FormKind resolve_structure(const JobSpec& job, const Form& form) {
    if (job.kind.empty()) return form.kind();
    return kind_from_name(job.kind);
}

struct Resolved {
    Form form;
    FormKind structure;
    int n, r, nu;
};

Resolved resolve(JobSpec& job) {
    Form form = resolve_form(job);
    FormKind structure = resolve_structure(job, form);
    job.form_kind = kind_name(form.kind());
    job.kind = kind_name(structure);
    int n = form.dim();
    int r = rank(form.gram());
    int nu = witt_index(form);
    return Resolved{std::move(form), structure, n, r, nu};
}

// ---------------------------------------------------------------------------

int cmd_construct(JobSpec job) {
    Resolved rv = resolve(job);
    Json out{{"job", job_to_json(job)}};
    out["n"] = rv.n;
    out["r"] = rv.r;
    out["nu"] = rv.nu;
    out["formula"] = claimed_formula(rv.n, rv.r, rv.structure);
    out["claimed_dim"] = claimed_dimension(rv.n, rv.r, rv.nu, rv.structure);

    if (rv.r < rv.n) {
        MatSubspace space = general_max_space(rv.form, rv.structure);
        out["space"] = subspace_to_json(space);
    } else {
        Flag flag = maximal_singular_flag(rv.form);
        MatSubspace space = flag_space(rv.form, flag, rv.structure);
        out["flag"] = flag_to_json(flag);
        out["space"] = subspace_to_json(space);
    }

    if (job.format == "json") {
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "job: " << job_to_json(job).dump() << "\n"
                  << "field: GF(" << detail::sat_pow(job.p, job.degree) << ")  form: "
                  << job.form_source << " (" << job.form_kind << ")  structure: " << job.kind
                  << "\n"
                  << "n=" << rv.n << " r=" << rv.r << " nu=" << rv.nu << "\n"
                  << "formula " << out["formula"].get<std::string>() << " = "
                  << out["claimed_dim"].get<int64_t>() << ", constructed k_dim = "
                  << out["space"]["k_dim"].get<int>() << "\n";
        for (const Json& b : out["space"]["basis"])
            std::cout << "  " << to_text(mat_from_json(make_field(job.p, job.degree), b, rv.n))
                      << "\n";
    }
    return 0;
}

int cmd_verify(JobSpec job) {
    Resolved rv = resolve(job);
    std::vector<std::pair<std::string, bool>> checks;
    auto check = [&](const std::string& name, bool ok) { checks.push_back({name, ok}); };

    if (rv.r == rv.n) {
        WittData w = witt_decompose(rv.form); // congruence verified inside
        check("witt-congruence", true);
        Flag flag = maximal_singular_flag(rv.form);
        check("flag-maximal-singular", flag_is_maximal(rv.form, flag));

        std::vector<FormKind> structures =
            rv.form.is_bilinear()
                ? std::vector<FormKind>{FormKind::symmetric, FormKind::alternating}
                : std::vector<FormKind>{FormKind::hermitian};
        for (FormKind st : structures) {
            MatSubspace space = flag_space(rv.form, flag, st);
            std::string tag = kind_name(st);
            check("dim-" + tag,
                  space.k_dim() == claimed_dimension(rv.n, rv.r, rv.nu, st));
            bool basis_ok = true;
            for (const Mat& u : space.basis()) {
                bool structured = st == FormKind::symmetric ? is_b_symmetric(u, rv.form)
                                  : st == FormKind::alternating ? is_b_alternating(u, rv.form)
                                                                : is_b_hermitian(u, rv.form);
                basis_ok = basis_ok && structured && is_nilpotent(u) && stabilizes_flag(u, flag);
            }
            check("basis-" + tag, basis_ok);
            AdaptedBasis plain = adapted_basis(rv.form, flag);
            check("adapted-path-equality-" + tag,
                  structured_flag_space(rv.form, plain, st, flag) == space);
            if (space.element_count() <= job.budget.max_point_evals)
                check("exhaustive-nilpotent-" + tag, exhaustive_nilpotent(space, job.budget));
            if (rv.form.is_bilinear() && st == rv.form.kind() &&
                space.element_count() <= job.budget.max_point_evals)
                check("square-stability", square_stability_check(space, rv.form));
        }
        (void)w;
    } else {
        if (!rv.form.is_bilinear())
            throw std::invalid_argument("verify: degenerate Hermitian forms are out of scope");
        for (FormKind st : {FormKind::symmetric, FormKind::alternating}) {
            MatSubspace space = general_max_space(rv.form, st);
            check("general-dim-" + kind_name(st),
                  space.k_dim() == claimed_dimension(rv.n, rv.r, rv.nu, st));
        }
    }

    bool all_ok = true;
    Json lines = Json::array();
    for (const auto& [name, ok] : checks) {
        all_ok = all_ok && ok;
        lines.push_back(Json{{"check", name}, {"ok", ok}});
    }
    if (job.format == "json") {
        Json out{{"job", job_to_json(job)},
                 {"n", rv.n},
                 {"r", rv.r},
                 {"nu", rv.nu},
                 {"checks", lines},
                 {"ok", all_ok}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << "job: " << job_to_json(job).dump() << "\n"
                  << "verify  n=" << rv.n << " r=" << rv.r << " nu=" << rv.nu << "\n";
        for (const auto& [name, ok] : checks)
            std::cout << (ok ? "ok   " : "FAIL ") << name << "\n";
    }
    return all_ok ? 0 : 1;
}

void print_census(const JobSpec& job, const CensusReport& rep) {
    if (job.format == "json") {
        Json out{{"job", job_to_json(job)}, {"census", census_to_json(rep)}};
        std::cout << out.dump(2) << "\n";
    } else if (job.format == "csv") {
        std::cout << "# job: " << job_to_json(job).dump() << "\n"
                  << census_csv_header() << "\n"
                  << census_to_csv_row(rep) << "\n";
    } else {
        std::cout << "job: " << job_to_json(job).dump() << "\n"
                  << "census (" << rep.label << "): q=" << rep.q << " n=" << rep.n
                  << " form=" << kind_name(rep.form_kind) << " space=" << kind_name(rep.space_kind)
                  << " nu=" << rep.nu << "\n"
                  << "bound " << rep.formula << " = " << rep.bound_claimed << ", max found "
                  << rep.max_found << ", "
                  << rep.count_max_spaces << " spaces at the bound, flags "
                  << rep.flags_enumerated << ", all match: "
                  << (rep.all_match_flag ? "yes" : "no") << "\n"
                  << "candidates: " << rep.candidates_at_bound << " at bound, "
                  << rep.candidates_above_bound << " above\n";
    }
}

int cmd_census(JobSpec job) {
    Resolved rv = resolve(job);
    if (job.dim >= 0) {
        std::vector<MatSubspace> found =
            enumerate_nilpotent_subspaces(rv.form, rv.structure, job.dim, job.budget);
        Json arr = Json::array();
        for (const MatSubspace& s : found) arr.push_back(subspace_to_json(s));
        Json out{{"job", job_to_json(job)},
                 {"dim", job.dim},
                 {"count", found.size()},
                 {"spaces", std::move(arr)}};
        if (job.format == "json")
            std::cout << out.dump(2) << "\n";
        else
            std::cout << "job: " << job_to_json(job).dump() << "\n"
                      << "census at dim " << job.dim << ": " << found.size()
                      << " nilpotent subspaces\n";
        return 0;
    }
    CensusReport rep = verify_bound_and_classify(rv.form, rv.structure, job.budget);
    print_census(job, rep);
    bool ok = rep.max_found == rep.bound_claimed && rep.all_match_flag;
    return ok ? 0 : 1;
}

int cmd_probe(JobSpec job) {
    Resolved rv = resolve(job);
    (void)rv.structure; // the probe pairs the opposite structure itself
    CensusReport rep = probe_conjectures(rv.form, job.budget);
    job.kind = kind_name(rep.space_kind);
    print_census(job, rep);
    return rep.max_found <= rep.bound_claimed ? 0 : 1;
}

int cmd_selftest(const JobSpec& job) {
    auto results = nilspace::acceptance::run_all();
    bool all = true;
    Json lines = Json::array();
    int index = 1;
    for (const auto& r : results) {
        all = all && r.passed;
        if (job.format == "json") {
            lines.push_back(Json{{"criterion", r.name}, {"passed", r.passed}, {"detail", r.detail}});
        } else {
            std::printf("%s  %2d %-28s (%.2fs)  %s\n", r.passed ? "PASS" : "FAIL", index,
                        r.name.c_str(), r.seconds, r.detail.c_str());
        }
        ++index;
    }
    if (job.format == "json")
        std::cout << Json{{"job", job_to_json(job)}, {"criteria", lines}, {"ok", all}}.dump(2)
                  << "\n";
    else
        std::cout << (all ? "selftest: all criteria passed" : "selftest: FAILURES present") << "\n";
    return all ? 0 : 1;
}

std::string csv_field(const std::string& s) {
    if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

int cmd_table(const JobSpec& base, const std::vector<std::string>& jobs, bool with_census) {
    std::cout << "q,n,form,form_kind,space_kind,r,nu,formula,claimed_dim,constructed_dim,census,"
                 "status\n";
    bool any_failed = false;
    for (const std::string& text : jobs) {
        JobSpec job = base;
        std::string census = "-", status = "ok";
        std::ostringstream row;
        try {
            auto first = text.find('/');
            auto second = text.find('/', first + 1);
            if (first == std::string::npos)
                throw std::invalid_argument("table job must look like FIELD/FORM[/KIND]");
            parse_field(text.substr(0, first), job);
            if (second == std::string::npos) {
                job.form_source = text.substr(first + 1);
            } else {
                job.form_source = text.substr(first + 1, second - first - 1);
                job.kind = text.substr(second + 1);
            }
            Resolved rv = resolve(job);
            int64_t claimed = claimed_dimension(rv.n, rv.r, rv.nu, rv.structure);
            MatSubspace space =
                rv.r < rv.n ? general_max_space(rv.form, rv.structure)
                            : flag_space(rv.form, maximal_singular_flag(rv.form), rv.structure);
            if (space.k_dim() != claimed) status = "MISMATCH";
            if (with_census && rv.r == rv.n) {
                try {
                    CensusReport rep =
                        rv.structure == rv.form.kind()
                            ? verify_bound_and_classify(rv.form, rv.structure, job.budget)
                            : probe_conjectures(rv.form, job.budget);
                    bool census_ok = rv.structure == rv.form.kind()
                                         ? (rep.max_found == rep.bound_claimed && rep.all_match_flag)
                                         : rep.max_found <= rep.bound_claimed;
                    census = rep.label + (census_ok ? ":confirmed" : ":FAILED");
                    if (!census_ok) status = "CENSUS-FAILED";
                } catch (const BudgetExceeded&) {
                    census = "skipped(budget)";
                }
            }
            row << detail::sat_pow(job.p, job.degree) << ',' << rv.n << ','
                << csv_field(job.form_source) << ',' << job.form_kind << ',' << job.kind << ','
                << rv.r << ',' << rv.nu << ',' << claimed_formula(rv.n, rv.r, rv.structure) << ','
                << claimed << ',' << space.k_dim() << ',' << census << ',' << status;
        } catch (const std::exception& e) {
            row.str("");
            row << ",," << csv_field(text) << ",,,,,,,," << census << ','
                << csv_field(std::string("error: ") + e.what());
            status = "error";
        }
        std::cout << row.str() << "\n";
        if (status != "ok") any_failed = true;
    }
    return any_failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximal nilpotent spaces of structured endomorphisms over small fields"};
    app.require_subcommand(1);

    JobSpec job;
    if (const char* env = std::getenv("NILSPACE_BUDGET")) {
        int64_t b = std::stoll(env);
        job.budget.max_point_evals = b;
        job.budget.max_subspaces = b;
    }

    std::string field_text = "3";
    int64_t budget_override = -1;
    std::vector<std::string> table_jobs;
    bool table_census = false;

    auto add_common = [&](CLI::App* sub, bool with_form) {
        sub->add_option("--field", field_text, "field: p, p,deg or q (e.g. 3 or 3,2 or 9)");
        if (with_form)
            sub->add_option("--form", job.form_source,
                            "hyperbolic:n | Kn:n | hyperbolic-hermitian:n | diag:a,b,... | gram:rows")
                ->required();
        sub->add_option("--form-kind", job.form_kind,
                        "auto|symmetric|alternating|hermitian (inline grams)");
        sub->add_option("--kind", job.kind, "structure: symmetric|alternating|hermitian");
        sub->add_option("--budget", budget_override, "max candidates / point evaluations");
        sub->add_option("--workers", job.budget.workers, "worker threads for censuses");
        sub->add_option("--format", job.format, "text|json|csv")
            ->check(CLI::IsMember({"text", "json", "csv"}));
    };

    CLI::App* construct = app.add_subcommand("construct", "build a maximal nilpotent space");
    add_common(construct, true);
    CLI::App* verify = app.add_subcommand("verify", "run the instance invariant suite");
    add_common(verify, true);
    CLI::App* census = app.add_subcommand("census", "exhaustive bound and classification census");
    add_common(census, true);
    census->add_option("--dim", job.dim, "enumerate one dimension instead of the full census");
    CLI::App* probe = app.add_subcommand("probe", "census for the open (form, structure) pairings");
    add_common(probe, true);
    CLI::App* selftest = app.add_subcommand("selftest", "full desk-scale acceptance suite");
    add_common(selftest, false);
    CLI::App* table = app.add_subcommand("table", "CSV sweep over FIELD/FORM[/KIND] jobs");
    table->add_option("jobs", table_jobs, "job specs like 3/hyperbolic:4/symmetric");
    table->add_flag("--census", table_census, "also run a census per row when affordable");
    table->add_option("--budget", budget_override, "max candidates / point evaluations");
    table->add_option("--workers", job.budget.workers, "worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        parse_field(field_text, job);
        if (budget_override >= 0) {
            job.budget.max_point_evals = budget_override;
            job.budget.max_subspaces = budget_override;
        }
        if (construct->parsed()) {
            job.command = "construct";
            return cmd_construct(job);
        }
        if (verify->parsed()) {
            job.command = "verify";
            return cmd_verify(job);
        }
        if (census->parsed()) {
            job.command = "census";
            return cmd_census(job);
        }
        if (probe->parsed()) {
            job.command = "probe";
            return cmd_probe(job);
        }
        if (selftest->parsed()) {
            job.command = "selftest";
            return cmd_selftest(job);
        }
        if (table->parsed()) {
            job.command = "table";
            return cmd_table(job, table_jobs, table_census);
        }
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget refused: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "bad input: " << e.what() << "\n";
        return 3;
    } catch (const std::logic_error& e) {
        std::cerr << "assertion failed: " << e.what() << "\n";
        return 1;
    }
    return 3;
}
