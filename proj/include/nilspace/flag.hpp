#ifndef NILSPACE_FLAG_HPP
#define NILSPACE_FLAG_HPP

#include "nilspace/form.hpp"

namespace nilspace {

/// A partially complete flag F_0 c F_1 c ... c F_p with dim F_i = i, stored
/// as one n-by-p matrix whose column prefixes are the subspace bases. Each
/// basis extends the previous one by construction.
class Flag {
public:
    explicit Flag(Mat columns) : cols_(std::move(columns)) {
        if (rank(cols_) != cols_.cols())
            throw std::invalid_argument("Flag: columns are not independent");
    }
    static Flag trivial(const FieldSpec& f, int ambient) { return Flag(Mat(f, ambient, 0)); }

    int length() const { return cols_.cols(); }
    int ambient_dim() const { return cols_.rows(); }
    const FieldSpec& field() const { return cols_.field(); }
    const Mat& full() const { return cols_; }
    Mat subspace(int i) const { return cols_.cols_range(0, i); }

    bool operator==(const Flag& o) const { return cols_ == o.cols_; }
    bool operator!=(const Flag& o) const { return !(*this == o); }

private:
    Mat cols_;
};

inline bool is_singular_flag(const Form& f, const Flag& flag) {
    return is_totally_singular(f, flag.full());
}

inline bool flag_is_maximal(const Form& f, const Flag& flag) {
    return is_singular_flag(f, flag) && flag.length() == witt_index(f);
}

inline bool stabilizes_flag(const Mat& u, const Flag& flag) {
    for (int i = 1; i <= flag.length(); ++i) {
        Mat fi = flag.subspace(i);
        if (rank(hstack(fi, u * fi)) != i) return false;
    }
    return true;
}

/// A maximal b-singular flag: a complete flag of the totally singular block
/// of the Witt decomposition.
inline Flag maximal_singular_flag(const Form& f) {
    WittData w = witt_decompose(f);
    return Flag(w.change_of_basis.cols_range(0, w.nu));
}

/// Basis realizing the bordered Gram [[0,0,I],[0,P,0],[eps I,0,Q]] relative
/// to a maximal singular flag; strongly adapted means Q = 0.
struct AdaptedBasis {
    Mat basis;   // columns e_1..e_nu, g_1..g_p, f_1..f_nu
    int nu;
    int p_block;
    Mat P;
    Mat Q;
    bool strong;
};

inline Mat adapted_gram(const FieldSpec& f, FormKind kind, int nu, const Mat& p, const Mat& q) {
    int pb = p.rows();
    Mat id = Mat::identity(f, nu);
    Mat eps_id = (kind == FormKind::alternating) ? -id : id;
    return block_matrix(f, {{Mat(f, nu, nu), Mat(f, nu, pb), id},
                            {Mat(f, pb, nu), p, Mat(f, pb, nu)},
                            {eps_id, Mat(f, nu, pb), q}});
}

/// Splits V along the flag: F_nu-perp = F_nu + G, G-perp = F_nu + H, then
/// rescales a basis of H against the flag vectors. All choice points are
/// resolved by deterministic pivot completion.
inline AdaptedBasis adapted_basis(const Form& f, const Flag& flag) {
    if (f.is_degenerate()) throw std::invalid_argument("adapted_basis: degenerate form");
    if (!flag_is_maximal(f, flag))
        throw std::invalid_argument("adapted_basis: flag is not a maximal singular flag");
    const FieldSpec& fl = f.field();
    int nu = flag.length();
    Mat e = flag.full();

    Mat f_perp = kernel_basis(f.ortho_rows(e));
    Mat g = complement_in(e, f_perp);
    Mat g_perp = kernel_basis(f.ortho_rows(g));
    Mat h0 = complement_in(e, g_perp);

    // unique basis f_j of H with b(e_i, f_j) = delta_ij
    Mat pairing = f.ortho_rows(e) * h0; // nu-by-nu, invertible
    Mat fb = h0 * inverse(pairing);

    Mat basis = hstack(hstack(e, g), fb);
    Mat p = f.restrict_gram(g);
    Mat q = f.restrict_gram(fb);
    Mat lhs = f.is_bilinear() ? basis.transpose() : conj_transpose(basis);
    if (lhs * f.gram() * basis != adapted_gram(fl, f.kind(), nu, p, q))
        throw std::logic_error("adapted_basis: Gram did not come out in adapted shape");
    bool strong = q.is_zero();
    return AdaptedBasis{std::move(basis), nu, g.cols(), std::move(p), std::move(q), strong};
}

/// Corrects the H block of an adapted basis to a totally singular complement,
/// killing Q. Needs characteristic != 2, which every supported field has.
inline AdaptedBasis strongly_adapted_basis(const Form& f, const Flag& flag) {
    AdaptedBasis ab = adapted_basis(f, flag);
    if (ab.strong) return ab;
    const FieldSpec& fl = f.field();
    Scalar half = Scalar(fl, 2).inverse();
    // f_j <- f_j - sum_k lambda_kj e_k with lambda = eps*Q/2 (Q/2 Hermitian)
    Scalar coeff = f.is_bilinear() ? Scalar(fl, f.epsilon()) * half : half;
    Mat lambda = ab.Q * coeff;
    Mat e = ab.basis.cols_range(0, ab.nu);
    Mat g = ab.basis.cols_range(ab.nu, ab.nu + ab.p_block);
    Mat fb = ab.basis.cols_range(ab.nu + ab.p_block, ab.basis.cols());
    fb = fb - e * lambda;

    Mat basis = hstack(hstack(e, g), fb);
    Mat lhs = f.is_bilinear() ? basis.transpose() : conj_transpose(basis);
    Mat zero_q(fl, ab.nu, ab.nu);
    if (lhs * f.gram() * basis != adapted_gram(fl, f.kind(), ab.nu, ab.P, zero_q))
        throw std::logic_error("strongly_adapted_basis: correction failed to kill Q");
    return AdaptedBasis{std::move(basis), ab.nu, ab.p_block, ab.P, std::move(zero_q), true};
}

namespace detail {

/// Canonical echelon generators of the intersection of two column spaces.
inline Mat column_space_intersection(const Mat& a, const Mat& b) {
    const FieldSpec& f = a.field();
    if (a.cols() == 0 || b.cols() == 0) return Mat(f, a.rows(), 0);
    Mat rel = kernel_basis(hstack(a, -b)); // (s; t) with A s = B t
    Mat gens(f, a.rows(), rel.cols());
    for (int j = 0; j < rel.cols(); ++j) {
        Vec s(f, a.cols(), 1);
        for (int i = 0; i < a.cols(); ++i) s.at(i, 0) = rel.at(i, j);
        Vec v = a * s;
        for (int i = 0; i < a.rows(); ++i) gens.at(i, j) = v.at(i, 0);
    }
    // canonical form: echelonize the transposed generators
    RrefResult rr = rref(gens.transpose());
    Mat out(f, a.rows(), rr.rank);
    for (int i = 0; i < rr.rank; ++i)
        for (int j = 0; j < a.rows(); ++j) out.at(j, i) = rr.rref.at(i, j);
    return out;
}

inline bool structured_for(const Mat& u, const Form& f) {
    if (f.is_bilinear()) return is_b_symmetric(u, f) || is_b_alternating(u, f);
    return is_b_hermitian(u, f);
}

} // namespace detail

/// A maximal singular flag stable under u, built by recursing on the
/// quotient {x}-perp / Fx for a canonical x in Ker u and im u.
inline Flag stable_flag_for(const Mat& u, const Form& f) {
    if (f.is_degenerate()) throw std::invalid_argument("stable_flag_for: degenerate form");
    if (u.rows() != f.dim() || !u.is_square() || u.field() != f.field())
        throw std::invalid_argument("stable_flag_for: endomorphism does not match the form");
    if (!detail::structured_for(u, f))
        throw std::invalid_argument("stable_flag_for: endomorphism is not structured for the form");
    if (!is_nilpotent(u)) throw std::invalid_argument("stable_flag_for: endomorphism is not nilpotent");

    if (u.is_zero()) return maximal_singular_flag(f);

    const FieldSpec& fl = f.field();
    // column space of u: original columns at the pivot positions
    RrefResult ru = rref(u);
    Mat image(fl, u.rows(), 0);
    for (int p : ru.pivots) image = image.with_col_appended(u.col(p));
    Mat inter = detail::column_space_intersection(kernel_basis(u), image);
    if (inter.cols() == 0) throw std::logic_error("stable_flag_for: Ker u and im u do not meet");
    Vec x = inter.col(0);
    if (!f.eval(x, x).is_zero())
        throw std::logic_error("stable_flag_for: canonical vector is not isotropic");

    Mat x_perp = kernel_basis(f.ortho_rows(x));
    Mat d = complement_in(x, x_perp); // coordinates for {x}-perp / Fx
    Form f_bar(f.kind(), f.restrict_gram(d));

    // induced endomorphism on the quotient coordinates
    Mat lift = hstack(x, d);
    auto coords = solve(lift, u * d);
    if (!coords) throw std::logic_error("stable_flag_for: u does not stabilize {x}-perp");
    Mat u_bar(fl, d.cols(), d.cols());
    for (int i = 0; i < d.cols(); ++i)
        for (int j = 0; j < d.cols(); ++j) u_bar.at(i, j) = coords->at(i + 1, j);
    if (!detail::structured_for(u_bar, f_bar))
        throw std::logic_error("stable_flag_for: induced endomorphism lost its structure");

    Flag sub = stable_flag_for(u_bar, f_bar);
    Mat cols = x;
    for (int i = 0; i < sub.length(); ++i) cols = cols.with_col_appended(d * sub.full().col(i));
    Flag result(cols);

    if (!is_singular_flag(f, result) || !stabilizes_flag(u, result))
        throw std::logic_error("stable_flag_for: constructed flag failed its checks");
    return result;
}

} // namespace nilspace

#endif
