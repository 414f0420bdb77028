#ifndef NILSPACE_IO_HPP
#define NILSPACE_IO_HPP

#include <json.hpp>

#include "nilspace/flag.hpp"
#include "nilspace/oracle.hpp"

namespace nilspace {

using Json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

inline Json field_to_json(const FieldSpec& f) {
    return Json{{"p", f.characteristic()}, {"degree", f.degree()}};
}

inline const FieldSpec& field_from_json(const Json& j) {
    return make_field(j.at("p").get<int64_t>(), j.at("degree").get<int>());
}

/// Matrices serialize as arrays of arrays of scalar strings; plain integers
/// are accepted on input.
inline Json mat_to_json(const Mat& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).str());
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat mat_from_json(const FieldSpec& f, const Json& j, int forced_cols = -1) {
    if (!j.is_array()) throw std::invalid_argument("matrix JSON: expected an array of rows");
    int r = static_cast<int>(j.size());
    int c = r == 0 ? std::max(forced_cols, 0) : static_cast<int>(j.at(0).size());
    Mat m(f, r, c);
    for (int i = 0; i < r; ++i) {
        const Json& row = j.at(i);
        if (static_cast<int>(row.size()) != c)
            throw std::invalid_argument("matrix JSON: ragged rows");
        for (int k = 0; k < c; ++k) {
            const Json& cell = row.at(k);
            if (cell.is_number_integer())
                m.at(i, k) = Scalar(f, cell.get<int64_t>());
            else
                m.at(i, k) = Scalar::parse(f, cell.get<std::string>());
        }
    }
    return m;
}

inline Json form_to_json(const Form& f) {
    return Json{{"kind", kind_name(f.kind())},
                {"p", f.field().characteristic()},
                {"degree", f.field().degree()},
                {"gram", mat_to_json(f.gram())}};
}

inline Form form_from_json(const Json& j) {
    const FieldSpec& f = make_field(j.at("p").get<int64_t>(), j.at("degree").get<int>());
    return Form(kind_from_name(j.at("kind").get<std::string>()), mat_from_json(f, j.at("gram")));
}

inline Json witt_to_json(const WittData& w) {
    return Json{{"nu", w.nu},
                {"basis", mat_to_json(w.change_of_basis)},
                {"residual", mat_to_json(w.residual)},
                {"rank", w.rank}};
}

inline Json flag_to_json(const Flag& flag) {
    Json out = Json::array();
    for (int i = 1; i <= flag.length(); ++i) out.push_back(mat_to_json(flag.subspace(i)));
    return out;
}

inline Flag flag_from_json(const FieldSpec& f, int ambient, const Json& j) {
    Mat cols(f, ambient, 0);
    for (const Json& level : j) {
        Mat basis = mat_from_json(f, level);
        if (basis.cols() != cols.cols() + 1)
            throw std::invalid_argument("flag JSON: dimensions must grow one at a time");
        for (int jc = 0; jc < cols.cols(); ++jc)
            if (basis.col(jc) != cols.col(jc))
                throw std::invalid_argument("flag JSON: each basis must extend the previous one");
        cols = basis;
    }
    return Flag(cols);
}

inline Json adapted_to_json(const AdaptedBasis& ab) {
    return Json{{"basis", mat_to_json(ab.basis)},
                {"nu", ab.nu},
                {"P", mat_to_json(ab.P)},
                {"Q", mat_to_json(ab.Q)},
                {"strong", ab.strong}};
}

inline Json subspace_to_json(const MatSubspace& s) {
    Json basis = Json::array();
    for (const Mat& b : s.basis()) basis.push_back(mat_to_json(b));
    return Json{{"n", s.ambient_n()},
                {"field", field_to_json(s.field())},
                {"base_field", field_to_json(s.base_field())},
                {"k_dim", s.k_dim()},
                {"basis", std::move(basis)}};
}

inline MatSubspace subspace_from_json(const Json& j) {
    const FieldSpec& f = field_from_json(j.at("field"));
    const FieldSpec& k = field_from_json(j.at("base_field"));
    int n = j.at("n").get<int>();
    std::vector<Mat> gens;
    for (const Json& b : j.at("basis")) gens.push_back(mat_from_json(f, b, n));
    MatSubspace s = MatSubspace::span(f, k, n, gens);
    if (s.k_dim() != j.at("k_dim").get<int>())
        throw std::invalid_argument("subspace JSON: k_dim does not match the basis");
    return s;
}

inline Json budget_to_json(const SearchBudget& b) {
    return Json{{"max_point_evals", b.max_point_evals},
                {"max_subspaces", b.max_subspaces},
                {"workers", b.workers}};
}

inline Json census_to_json(const CensusReport& r) {
    return Json{{"schema_version", kSchemaVersion},
                {"label", r.label},
                {"q", r.q},
                {"n", r.n},
                {"form_kind", kind_name(r.form_kind)},
                {"space_kind", kind_name(r.space_kind)},
                {"nu", r.nu},
                {"formula", r.formula},
                {"bound_claimed", r.bound_claimed},
                {"max_found", r.max_found},
                {"count_max_spaces", r.count_max_spaces},
                {"all_match_flag", r.all_match_flag},
                {"flags_enumerated", r.flags_enumerated},
                {"candidates_at_bound", r.candidates_at_bound},
                {"candidates_above_bound", r.candidates_above_bound},
                {"budget", budget_to_json(r.budget)}};
}

inline std::string census_csv_header() {
    return "schema_version,label,q,n,form_kind,space_kind,nu,formula,bound_claimed,max_found,"
           "count_max_spaces,all_match_flag,flags_enumerated,candidates_at_bound,"
           "candidates_above_bound,max_point_evals,max_subspaces,workers";
}

inline std::string census_to_csv_row(const CensusReport& r) {
    std::ostringstream os;
    os << kSchemaVersion << ',' << r.label << ',' << r.q << ',' << r.n << ','
       << kind_name(r.form_kind) << ',' << kind_name(r.space_kind) << ',' << r.nu << ','
       << r.formula << ',' << r.bound_claimed << ',' << r.max_found << ','
       << r.count_max_spaces << ',' << (r.all_match_flag ? "true" : "false") << ','
       << r.flags_enumerated << ',' << r.candidates_at_bound << ',' << r.candidates_above_bound
       << ',' << r.budget.max_point_evals << ',' << r.budget.max_subspaces << ','
       << r.budget.workers;
    return os.str();
}

} // namespace nilspace

#endif
