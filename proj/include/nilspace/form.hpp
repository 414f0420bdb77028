#ifndef NILSPACE_FORM_HPP
#define NILSPACE_FORM_HPP

#include <optional>

#include "nilspace/budget.hpp"
#include "nilspace/matrix.hpp"

namespace nilspace {

enum class FormKind { symmetric, alternating, hermitian };

inline std::string kind_name(FormKind k) {
    switch (k) {
        case FormKind::symmetric: return "symmetric";
        case FormKind::alternating: return "alternating";
        case FormKind::hermitian: return "hermitian";
    }
    throw std::logic_error("kind_name: bad enum");
}

inline FormKind kind_from_name(const std::string& s) {
    if (s == "symmetric") return FormKind::symmetric;
    if (s == "alternating") return FormKind::alternating;
    if (s == "hermitian") return FormKind::hermitian;
    throw std::invalid_argument("unknown form kind '" + s + "'");
}

/// A symmetric, alternating or Hermitian form given by its Gram matrix.
/// Shape and kind/field compatibility are checked at construction.
class Form {
public:
    Form(FormKind kind, Mat gram) : kind_(kind), gram_(std::move(gram)) {
        if (!gram_.is_square()) throw std::invalid_argument("Form: Gram matrix must be square");
        switch (kind_) {
            case FormKind::symmetric:
                if (gram_ != gram_.transpose())
                    throw std::invalid_argument("Form: Gram is not symmetric");
                break;
            case FormKind::alternating: {
                if (gram_ != -gram_.transpose())
                    throw std::invalid_argument("Form: Gram is not skew");
                for (int i = 0; i < gram_.rows(); ++i)
                    if (!gram_.at(i, i).is_zero())
                        throw std::invalid_argument("Form: alternating Gram has a nonzero diagonal entry");
                break;
            }
            case FormKind::hermitian:
                if (gram_.field().degree() != 2)
                    throw std::invalid_argument("Form: Hermitian form needs a degree-2 field");
                if (gram_ != conj_transpose(gram_))
                    throw std::invalid_argument("Form: Gram is not Hermitian");
                break;
        }
    }

    FormKind kind() const { return kind_; }
    const Mat& gram() const { return gram_; }
    const FieldSpec& field() const { return gram_.field(); }
    int dim() const { return gram_.rows(); }
    bool is_bilinear() const { return kind_ != FormKind::hermitian; }
    int epsilon() const { return kind_ == FormKind::alternating ? -1 : 1; }

    /// The field over which spaces of structured endomorphisms are linear.
    const FieldSpec& base_field() const {
        return is_bilinear() ? field() : fixed_field(field());
    }

    Scalar eval(const Vec& x, const Vec& y) const {
        Mat lhs = is_bilinear() ? x.transpose() : conj_transpose(x);
        return (lhs * gram_ * y).at(0, 0);
    }

    /// Row constraints expressing orthogonality to the columns of X:
    /// z is orthogonal to every column iff ortho_rows(X) * z = 0.
    Mat ortho_rows(const Mat& x) const {
        Mat lhs = is_bilinear() ? x.transpose() : conj_transpose(x);
        return lhs * gram_;
    }

    /// Gram of the restriction of the form to the column space of X, in the
    /// coordinates given by those columns.
    Mat restrict_gram(const Mat& x) const { return ortho_rows(x) * x; }

    bool is_degenerate() const { return rank(gram_) < dim(); }

private:
    FormKind kind_;
    Mat gram_;
};

/// Canonical Gram with nu hyperbolic pairs around a non-isotropic block P:
/// [[0,0,I],[0,P,0],[eps I,0,0]] (eps = +1 except for alternating forms).
inline Mat canonical_gram(const FieldSpec& f, FormKind kind, int nu, const Mat& p) {
    int pb = p.rows();
    Mat id = Mat::identity(f, nu);
    Mat eps_id = (kind == FormKind::alternating) ? -id : id;
    return block_matrix(f, {{Mat(f, nu, nu), Mat(f, nu, pb), id},
                            {Mat(f, pb, nu), p, Mat(f, pb, nu)},
                            {eps_id, Mat(f, nu, pb), Mat(f, nu, nu)}});
}

inline Form hyperbolic_form(const FieldSpec& f, int n) {
    if (n % 2) throw std::invalid_argument("hyperbolic_form: dimension must be even");
    return Form(FormKind::symmetric, canonical_gram(f, FormKind::symmetric, n / 2, Mat(f, 0, 0)));
}

inline Form kn_form(const FieldSpec& f, int n) {
    if (n % 2) throw std::invalid_argument("kn_form: dimension must be even");
    return Form(FormKind::alternating, canonical_gram(f, FormKind::alternating, n / 2, Mat(f, 0, 0)));
}

inline Form hyperbolic_hermitian_form(const FieldSpec& f, int n) {
    if (n % 2) throw std::invalid_argument("hyperbolic_hermitian_form: dimension must be even");
    return Form(FormKind::hermitian, canonical_gram(f, FormKind::hermitian, n / 2, Mat(f, 0, 0)));
}

/// Basis of Rad(b) = V-perp; n - rank(gram) columns.
inline Mat radical(const Form& f) { return kernel_basis(f.gram()); }

inline bool is_totally_singular(const Form& f, const Mat& x) {
    return f.restrict_gram(x).is_zero();
}

/// Columns of `sup` that extend the column space of `sub` to the column
/// space of [sub | sup]; deterministic pivot completion.
inline Mat complement_in(const Mat& sub, const Mat& sup) {
    RrefResult base = rref(hstack(sub, sup));
    Mat out(sub.field(), sub.rows(), 0);
    for (int p : base.pivots)
        if (p >= sub.cols()) out = out.with_col_appended(sup.col(p - sub.cols()));
    return out;
}

struct QuotientForm {
    Form form;        // induced non-degenerate form on V/Rad(b)
    Mat projection;   // r-by-n: coordinates on the complement, modulo the radical
    Mat complement;   // n-by-r: section of the projection
};

/// The induced form on V/Rad(b), materialized on a deterministic complement
/// of the radical.
inline QuotientForm quotient_form(const Form& f) {
    const FieldSpec& fl = f.field();
    Mat rad = radical(f);
    Mat comp = complement_in(rad, Mat::identity(fl, f.dim()));
    Mat gram_bar = f.restrict_gram(comp);
    Form form_bar(f.kind(), gram_bar);
    if (form_bar.dim() > 0 && form_bar.is_degenerate())
        throw std::logic_error("quotient_form: induced form is degenerate");
    // x = comp*a + rad*b; the class of x has coordinates a, so the
    // projection is the top block of [comp | rad]^-1.
    Mat inv = inverse(hstack(comp, rad));
    Mat proj(fl, comp.cols(), f.dim());
    for (int i = 0; i < comp.cols(); ++i)
        for (int j = 0; j < f.dim(); ++j) proj.at(i, j) = inv.at(i, j);
    return QuotientForm{std::move(form_bar), std::move(proj), std::move(comp)};
}

namespace detail {

/// Walks projective points in deterministic order: leading coordinate 1 at
/// position i, zeros before it, and the tail enumerated as base-q digits
/// with the last coordinate moving fastest.
template <class Fn> // Fn: bool(const Vec&) -> stop?
void for_each_projective_point(const FieldSpec& f, int n, Fn&& fn) {
    for (int lead = 0; lead < n; ++lead) {
        int tail = n - lead - 1;
        int64_t combos = sat_pow(f.order(), tail);
        for (int64_t c = 0; c < combos; ++c) {
            Vec x(f, n, 1);
            x.at(lead, 0) = Scalar::one(f);
            int64_t rest = c;
            for (int t = tail - 1; t >= 0; --t) {
                x.at(lead + 1 + t, 0) = Scalar::from_index(f, rest % f.order());
                rest /= f.order();
            }
            if (fn(x)) return;
        }
    }
}

} // namespace detail

/// First nonzero vector with b(x,x) = 0, or nullopt when the form is
/// non-isotropic (certified by exhausting every projective point). A
/// degenerate form short-circuits to a radical vector.
inline std::optional<Vec> find_isotropic(const Form& f, int64_t max_point_evals = 10'000'000) {
    if (f.dim() == 0) return std::nullopt;
    Mat rad = radical(f);
    if (rad.cols() > 0) return rad.col(0);
    int64_t points = detail::sat_pow(f.field().order(), f.dim());
    if (points > max_point_evals)
        throw BudgetExceeded("find_isotropic: projective search too large", points, max_point_evals);
    std::optional<Vec> found;
    detail::for_each_projective_point(f.field(), f.dim(), [&](const Vec& x) {
        if (f.eval(x, x).is_zero()) {
            found = x;
            return true;
        }
        return false;
    });
    return found;
}

/// Witt decomposition data for a non-degenerate form: change_of_basis
/// carries the congruence gram -> canonical_gram(nu, residual).
struct WittData {
    int nu;
    Mat change_of_basis;
    Mat residual;
    int rank;
};

/// Peels hyperbolic pairs off a non-degenerate form until the leftover block
/// is non-isotropic. Deterministic; the congruence identity is checked
/// exactly before returning.
inline WittData witt_decompose(const Form& f, int64_t max_point_evals = 10'000'000) {
    if (f.is_degenerate())
        throw std::invalid_argument("witt_decompose: degenerate form (reduce by the radical first)");
    const FieldSpec& fl = f.field();
    int n = f.dim();

    Mat embed = Mat::identity(fl, n); // current subspace basis, original coordinates
    Mat gram = f.gram();
    std::vector<Vec> xs, ys;

    while (true) {
        Form g(f.kind(), gram);
        std::optional<Vec> iso = find_isotropic(g, max_point_evals);
        if (!iso) break;
        const Vec& x = *iso;
        // first basis vector with b(x, e_j) != 0, scaled to a hyperbolic partner
        Mat row = g.ortho_rows(x);
        int j = -1;
        for (int k = 0; k < g.dim(); ++k)
            if (!row.at(0, k).is_zero()) {
                j = k;
                break;
            }
        if (j < 0) throw std::logic_error("witt_decompose: isotropic vector fell in the radical");
        Vec y(fl, g.dim(), 1);
        y.at(j, 0) = Scalar::one(fl);
        y = y * g.eval(x, y).inverse();
        Scalar half = Scalar(fl, 2).inverse();
        y = y - x * (g.eval(y, y) * half);

        xs.push_back(embed * x);
        ys.push_back(embed * y);

        Mat pair = hstack(x, y);
        Mat perp = kernel_basis(g.ortho_rows(pair));
        gram = g.restrict_gram(perp);
        embed = embed * perp;
        if (embed.cols() == 0) break;
    }

    int nu = static_cast<int>(xs.size());
    Mat basis(fl, n, 0);
    for (const Vec& x : xs) basis = basis.with_col_appended(x);
    basis = hstack(basis, embed);
    for (const Vec& y : ys) basis = basis.with_col_appended(y);

    Mat lhs = f.is_bilinear() ? basis.transpose() : conj_transpose(basis);
    if (lhs * f.gram() * basis != canonical_gram(fl, f.kind(), nu, gram))
        throw std::logic_error("witt_decompose: congruence identity failed");
    return WittData{nu, std::move(basis), std::move(gram), n};
}

/// gram*m is symmetric, i.e. (x,y) -> b(x,m(y)) is a symmetric form.
inline bool is_b_symmetric(const Mat& m, const Form& f) {
    if (!f.is_bilinear())
        throw std::invalid_argument("is_b_symmetric: use is_b_hermitian for Hermitian forms");
    Mat sm = f.gram() * m;
    return sm == sm.transpose();
}

/// gram*m is alternating (skew with zero diagonal).
inline bool is_b_alternating(const Mat& m, const Form& f) {
    if (!f.is_bilinear())
        throw std::invalid_argument("is_b_alternating: use is_b_hermitian for Hermitian forms");
    Mat sm = f.gram() * m;
    if (sm != -sm.transpose()) return false;
    for (int i = 0; i < sm.rows(); ++i)
        if (!sm.at(i, i).is_zero()) return false;
    return true;
}

/// gram*m equals its conjugate transpose.
inline bool is_b_hermitian(const Mat& m, const Form& f) {
    if (f.kind() != FormKind::hermitian)
        throw std::invalid_argument("is_b_hermitian: form is not Hermitian");
    Mat sm = f.gram() * m;
    return sm == conj_transpose(sm);
}

/// Witt index; handles degenerate forms through the radical reduction.
inline int witt_index(const Form& f, int64_t max_point_evals = 10'000'000) {
    if (f.dim() == 0) return 0;
    if (f.is_degenerate()) {
        QuotientForm q = quotient_form(f);
        int rad_dim = f.dim() - q.form.dim();
        return rad_dim + witt_index(q.form, max_point_evals);
    }
    return witt_decompose(f, max_point_evals).nu;
}

} // namespace nilspace

#endif
