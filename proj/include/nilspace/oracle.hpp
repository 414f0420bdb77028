#ifndef NILSPACE_ORACLE_HPP
#define NILSPACE_ORACLE_HPP

#include <atomic>
#include <functional>
#include <set>
#include <thread>

#include "nilspace/nilspaces.hpp"

namespace nilspace {

struct SearchBudget {
    int64_t max_point_evals = 10'000'000;
    int64_t max_subspaces = 2'000'000;
    int workers = 1;
};

/// Census outcome; a report always carries the budget it was obtained under
/// and the label that separates theorem checks from conjecture probes.
struct CensusReport {
    int64_t q = 0;
    int n = 0;
    FormKind form_kind = FormKind::symmetric;
    FormKind space_kind = FormKind::symmetric;
    int nu = 0;
    int64_t bound_claimed = 0;
    int64_t max_found = 0;
    int64_t count_max_spaces = 0;
    bool all_match_flag = false;
    int64_t flags_enumerated = 0;
    int64_t candidates_at_bound = 0;
    int64_t candidates_above_bound = 0;
    std::string formula; // the dimension formula the bound instantiates
    std::string label;   // "theorem" | "conjecture-probe"
    SearchBudget budget;
};

/// Number of d-dimensional subspaces of a D-dimensional space over GF(q),
/// saturating instead of overflowing.
inline int64_t gaussian_binomial(int D, int d, int64_t q) {
    if (d < 0 || d > D) return 0;
    std::vector<std::vector<int64_t>> g(D + 1, std::vector<int64_t>(d + 1, 0));
    for (int i = 0; i <= D; ++i) g[i][0] = 1;
    for (int i = 1; i <= D; ++i)
        for (int j = 1; j <= std::min(i, d); ++j) {
            int64_t qj = detail::sat_pow(q, j);
            int64_t t = detail::sat_mul(qj, g[i - 1][j]);
            g[i][j] = (g[i - 1][j - 1] > detail::kSaturated - t) ? detail::kSaturated
                                                                 : g[i - 1][j - 1] + t;
        }
    return g[D][d];
}

/// Checks the hypotheses (>= k+2 pairwise independent pairs, each combination
/// nilpotent) and returns whether tr(a^k b) = 0. Hypothesis violations throw;
/// a false return means the conclusion itself failed.
inline bool verify_trace_lemma(const Mat& a, const Mat& b, int k,
                               const std::vector<std::pair<Scalar, Scalar>>& pairs) {
    if (!a.is_square() || a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("verify_trace_lemma: need square matrices of equal size");
    if (k < 0) throw std::invalid_argument("verify_trace_lemma: k must be non-negative");
    if (static_cast<int>(pairs.size()) < k + 2)
        throw std::invalid_argument("verify_trace_lemma: hypothesis needs at least k+2 pairs");
    for (size_t i = 0; i < pairs.size(); ++i)
        for (size_t j = i + 1; j < pairs.size(); ++j)
            if ((pairs[i].first * pairs[j].second - pairs[i].second * pairs[j].first).is_zero())
                throw std::invalid_argument("verify_trace_lemma: pairs are not pairwise independent");
    for (const auto& [lambda, mu] : pairs)
        if (!is_nilpotent(a * lambda + b * mu))
            throw std::invalid_argument("verify_trace_lemma: a combination is not nilpotent");
    return (detail::mat_power(a, k) * b).trace().is_zero();
}

/// Every K-linear combination of the basis is nilpotent. Scalar multiples
/// share nilpotency, so only projectively normalized combinations are tried.
inline bool exhaustive_nilpotent(const MatSubspace& s, const SearchBudget& budget = {}) {
    int64_t count = s.element_count();
    if (count > budget.max_point_evals)
        throw BudgetExceeded("exhaustive_nilpotent: too many elements", count, budget.max_point_evals);
    int d = s.k_dim();
    const FieldSpec& k = s.base_field();
    std::vector<Scalar> coords(d, Scalar::zero(k));
    // odometer over normalized tuples: first nonzero coordinate equals 1
    std::function<bool(int, bool)> walk = [&](int pos, bool free_tail) -> bool {
        if (pos == d) return is_nilpotent(s.element(coords));
        if (!free_tail) {
            coords[pos] = Scalar::zero(k);
            if (!walk(pos + 1, false)) return false;
            coords[pos] = Scalar::one(k);
            return walk(pos + 1, true);
        }
        for (int64_t i = 0; i < k.order(); ++i) {
            coords[pos] = Scalar::from_index(k, i);
            if (!walk(pos + 1, true)) return false;
        }
        return true;
    };
    return walk(0, false);
}

namespace detail {

/// Enumerates all d-by-D reduced echelon matrices over `field` in
/// deterministic order: pivot-column combinations lexicographically, free
/// entries as base-q digits with the last free slot moving fastest. The
/// callback returns false to stop.
template <class Fn> // Fn: bool(const Mat& rows)
void for_each_rref(const FieldSpec& field, int d, int D, Fn&& fn) {
    if (d > D || d < 0) return;
    std::vector<int> pivots(d);
    for (int i = 0; i < d; ++i) pivots[i] = i;
    auto next_combination = [&]() {
        int i = d - 1;
        while (i >= 0 && pivots[i] == D - d + i) --i;
        if (i < 0) return false;
        ++pivots[i];
        for (int j = i + 1; j < d; ++j) pivots[j] = pivots[j - 1] + 1;
        return true;
    };
    if (d == 0) {
        fn(Mat(field, 0, D));
        return;
    }
    while (true) {
        std::vector<std::pair<int, int>> free_slots;
        std::vector<bool> is_pivot(D, false);
        for (int p : pivots) is_pivot[p] = true;
        for (int i = 0; i < d; ++i)
            for (int j = pivots[i] + 1; j < D; ++j)
                if (!is_pivot[j]) free_slots.push_back({i, j});
        int64_t combos = sat_pow(field.order(), static_cast<int64_t>(free_slots.size()));
        for (int64_t c = 0; c < combos; ++c) {
            Mat rows(field, d, D);
            for (int i = 0; i < d; ++i) rows.at(i, pivots[i]) = Scalar::one(field);
            int64_t rest = c;
            for (auto it = free_slots.rbegin(); it != free_slots.rend(); ++it) {
                rows.at(it->first, it->second) = Scalar::from_index(field, rest % field.order());
                rest /= field.order();
            }
            if (!fn(rows)) return;
        }
        if (!next_combination()) break;
    }
}

} // namespace detail

/// All d-dimensional K-subspaces of the structured ambient space (S_b, A_b
/// or H_b) consisting of nilpotent matrices only, in deterministic order.
/// The number of candidates visited is exactly the Gaussian binomial; going
/// over budget aborts with the refused count.
inline std::vector<MatSubspace> enumerate_nilpotent_subspaces(const Form& f, FormKind structure,
                                                              int d, const SearchBudget& budget = {}) {
    MatSubspace ambient = structured_ambient(f, structure);
    const FieldSpec& k = ambient.base_field();
    int D = ambient.k_dim();
    if (d < 0) throw std::invalid_argument("enumerate_nilpotent_subspaces: negative dimension");
    if (d > D) return {};

    int64_t count = gaussian_binomial(D, d, k.order());
    if (count > budget.max_subspaces)
        throw BudgetExceeded("enumerate_nilpotent_subspaces: too many candidate subspaces", count,
                             budget.max_subspaces);
    int64_t per_subspace = detail::sat_pow(k.order(), d);
    if (per_subspace > budget.max_point_evals)
        throw BudgetExceeded("enumerate_nilpotent_subspaces: subspace enumeration too large",
                             per_subspace, budget.max_point_evals);

    auto gens_of = [&](const Mat& rows) {
        std::vector<Mat> gens;
        for (int i = 0; i < d; ++i) {
            Mat g(f.field(), f.dim(), f.dim());
            for (int j = 0; j < D; ++j) {
                const Scalar& c = rows.at(i, j);
                if (c.is_zero()) continue;
                g += ambient.basis()[j] * detail::lift_scalar(f.field(), k, c);
            }
            gens.push_back(std::move(g));
        }
        return gens;
    };

    auto all_nilpotent = [&](const Mat& rows) {
        std::vector<Mat> gens = gens_of(rows);
        // scalar multiples share nilpotency, so it is enough to test the
        // combinations whose first nonzero coordinate is 1
        std::vector<Scalar> coords(d, Scalar::zero(k));
        std::function<bool(int, bool)> walk = [&](int pos, bool free_tail) -> bool {
            if (pos == d) {
                Mat u(f.field(), f.dim(), f.dim());
                for (int i = 0; i < d; ++i) {
                    if (coords[i].is_zero()) continue;
                    u += gens[i] * detail::lift_scalar(f.field(), k, coords[i]);
                }
                return is_nilpotent(u);
            }
            if (!free_tail) {
                coords[pos] = Scalar::zero(k);
                if (!walk(pos + 1, false)) return false;
                coords[pos] = Scalar::one(k);
                return walk(pos + 1, true);
            }
            for (int64_t i = 0; i < k.order(); ++i) {
                coords[pos] = Scalar::from_index(k, i);
                if (!walk(pos + 1, true)) return false;
            }
            return true;
        };
        return walk(0, false);
    };

    // stream candidates through fixed-size blocks: memory stays bounded and
    // survivors keep the deterministic enumeration order for any worker count
    constexpr size_t kBlock = 4096;
    int workers = std::max(1, budget.workers);
    std::vector<MatSubspace> out;
    std::vector<Mat> block;
    block.reserve(kBlock);
    int64_t visited = 0;

    auto flush = [&]() {
        if (block.empty()) return;
        std::vector<char> keep(block.size(), 0);
        if (workers == 1 || block.size() < 64) {
            for (size_t i = 0; i < block.size(); ++i) keep[i] = all_nilpotent(block[i]);
        } else {
            std::atomic<size_t> next{0};
            auto work = [&]() {
                while (true) {
                    size_t i = next.fetch_add(1);
                    if (i >= block.size()) return;
                    keep[i] = all_nilpotent(block[i]);
                }
            };
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w) pool.emplace_back(work);
            for (auto& t : pool) t.join();
        }
        for (size_t i = 0; i < block.size(); ++i)
            if (keep[i]) out.push_back(MatSubspace::span(f.field(), k, f.dim(), gens_of(block[i])));
        visited += static_cast<int64_t>(block.size());
        block.clear();
    };

    detail::for_each_rref(k, d, D, [&](const Mat& rows) {
        block.push_back(rows);
        if (block.size() == kBlock) flush();
        return true;
    });
    flush();
    if (visited != count)
        throw std::logic_error("enumerate_nilpotent_subspaces: candidate count mismatch");
    return out;
}

/// All maximal b-singular flags: every totally singular nu-subspace paired
/// with each of its complete flags, deduplicated by the subspace chain.
inline std::vector<Flag> enumerate_max_singular_flags(const Form& f, const SearchBudget& budget = {}) {
    if (f.is_degenerate())
        throw std::invalid_argument("enumerate_max_singular_flags: degenerate form");
    const FieldSpec& fl = f.field();
    int n = f.dim();
    int nu = witt_index(f);

    int64_t count = gaussian_binomial(n, nu, fl.order());
    if (count > budget.max_subspaces)
        throw BudgetExceeded("enumerate_max_singular_flags: too many subspaces", count,
                             budget.max_subspaces);

    // chains of nested subspaces, built top-down through hyperplanes
    std::function<std::vector<std::vector<Mat>>(const Mat&)> chains =
        [&](const Mat& space) -> std::vector<std::vector<Mat>> {
        int m = space.cols();
        if (m == 0) return {{}};
        std::vector<std::vector<Mat>> out;
        detail::for_each_projective_point(fl, m, [&](const Vec& row) {
            Mat hyper = space * kernel_basis(row.transpose());
            for (auto& chain : chains(hyper)) {
                chain.push_back(space);
                out.push_back(std::move(chain));
            }
            return false;
        });
        return out;
    };

    std::set<std::vector<std::vector<int64_t>>> seen;
    std::vector<Flag> flags;
    detail::for_each_rref(fl, nu, n, [&](const Mat& rows) {
        Mat basis = rows.transpose();
        if (!is_totally_singular(f, basis)) return true;
        for (const auto& chain : chains(basis)) {
            // canonical key: echelonized row space per level
            std::vector<std::vector<int64_t>> key;
            for (const Mat& level : chain) {
                RrefResult rr = rref(level.transpose());
                std::vector<int64_t> flat;
                for (int i = 0; i < rr.rank; ++i)
                    for (int j = 0; j < rr.rref.cols(); ++j) flat.push_back(rr.rref.at(i, j).index());
                key.push_back(std::move(flat));
            }
            if (!seen.insert(key).second) continue;
            // nested basis via pivot completion along the chain
            Mat cols(fl, n, 0);
            for (const Mat& level : chain) cols = hstack(cols, complement_in(cols, level));
            flags.push_back(Flag(cols));
        }
        return true;
    });
    return flags;
}

namespace detail {

inline CensusReport census_impl(const Form& f, FormKind structure, const SearchBudget& budget,
                                const std::string& label) {
    if (f.is_degenerate()) throw std::invalid_argument("census: degenerate form (reduce first)");
    CensusReport rep;
    rep.q = f.field().order();
    rep.n = f.dim();
    rep.form_kind = f.kind();
    rep.space_kind = structure;
    rep.nu = witt_index(f);
    rep.label = label;
    rep.budget = budget;
    rep.bound_claimed = claimed_dimension(rep.n, rep.n, rep.nu, structure);
    rep.formula = claimed_formula(rep.n, rep.n, structure);

    const FieldSpec& base = f.base_field();
    int64_t above_candidates = gaussian_binomial(structured_ambient(f, structure).k_dim(),
                                                 static_cast<int>(rep.bound_claimed) + 1, base.order());
    std::vector<MatSubspace> above =
        enumerate_nilpotent_subspaces(f, structure, static_cast<int>(rep.bound_claimed) + 1, budget);
    rep.candidates_above_bound = above_candidates;

    std::vector<MatSubspace> at_bound =
        enumerate_nilpotent_subspaces(f, structure, static_cast<int>(rep.bound_claimed), budget);
    rep.candidates_at_bound = gaussian_binomial(structured_ambient(f, structure).k_dim(),
                                                static_cast<int>(rep.bound_claimed), base.order());

    rep.max_found = !above.empty() ? rep.bound_claimed + 1
                    : !at_bound.empty() ? rep.bound_claimed
                                        : -1;
    rep.count_max_spaces = static_cast<int64_t>(at_bound.size());

    std::vector<Flag> flags = enumerate_max_singular_flags(f, budget);
    rep.flags_enumerated = static_cast<int64_t>(flags.size());
    std::vector<MatSubspace> flag_spaces;
    for (const Flag& flag : flags) flag_spaces.push_back(flag_space(f, flag, structure));

    bool all_match = true;
    for (const MatSubspace& s : at_bound) {
        bool matched = false;
        for (const MatSubspace& fs : flag_spaces)
            if (s == fs) {
                matched = true;
                break;
            }
        if (!matched) all_match = false;
    }
    // soundness in the other direction: every flag space is a nilpotent
    // subspace of the bound dimension, so the census must have found it
    for (const MatSubspace& fs : flag_spaces) {
        bool found = false;
        for (const MatSubspace& s : at_bound)
            if (s == fs) {
                found = true;
                break;
            }
        if (!found) throw std::logic_error("census: flag space missing from the enumeration");
    }
    rep.all_match_flag = all_match;
    return rep;
}

} // namespace detail

/// Full census for the pairings the classification theorems cover:
/// (symmetric, S_b), (alternating, A_b), (hermitian, H_b).
inline CensusReport verify_bound_and_classify(const Form& f, FormKind structure,
                                              const SearchBudget& budget = {}) {
    if (structure != f.kind())
        throw std::invalid_argument(
            "verify_bound_and_classify: mismatched (form, structure) pairs are conjecture probes");
    return detail::census_impl(f, structure, budget, "theorem");
}

/// The open pairings (alternating form, S_b) and (symmetric form, A_b):
/// the same census, labeled as a probe; nothing beyond the dimension bound
/// is asserted.
inline CensusReport probe_conjectures(const Form& f, const SearchBudget& budget = {}) {
    if (!f.is_bilinear())
        throw std::invalid_argument("probe_conjectures: Hermitian classification is a theorem, not a probe");
    FormKind opposite =
        f.kind() == FormKind::symmetric ? FormKind::alternating : FormKind::symmetric;
    return detail::census_impl(f, opposite, budget, "conjecture-probe");
}

} // namespace nilspace

#endif
