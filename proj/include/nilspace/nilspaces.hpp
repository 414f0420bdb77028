#ifndef NILSPACE_NILSPACES_HPP
#define NILSPACE_NILSPACES_HPP

#include "nilspace/flag.hpp"
#include "nilspace/subspace.hpp"

namespace nilspace {

// ---------------------------------------------------------------------------
// rank <= 2 structured tensors

/// z -> b(y,z) x + b(x,z) y. Symmetric bilinear in (x, y); lands in S_b.
inline Mat sym_tensor(const Vec& x, const Vec& y, const Form& f) {
    if (!f.is_bilinear()) throw std::invalid_argument("sym_tensor: form must be bilinear");
    Mat m = x * f.ortho_rows(y) + y * f.ortho_rows(x);
    if (!is_b_symmetric(m, f)) throw std::logic_error("sym_tensor: result is not b-symmetric");
    return m;
}

/// z -> b(y,z) x - b(x,z) y. Alternating bilinear in (x, y); lands in A_b.
inline Mat alt_tensor(const Vec& x, const Vec& y, const Form& f) {
    if (!f.is_bilinear()) throw std::invalid_argument("alt_tensor: form must be bilinear");
    Mat m = x * f.ortho_rows(y) - y * f.ortho_rows(x);
    if (!is_b_alternating(m, f)) throw std::logic_error("alt_tensor: result is not b-alternating");
    return m;
}

/// z -> b(y,z) x + b(x,z) y for a Hermitian form; K-bilinear symmetric in
/// (x, y), lands in H_b.
inline Mat herm_tensor(const Vec& x, const Vec& y, const Form& f) {
    if (f.kind() != FormKind::hermitian)
        throw std::invalid_argument("herm_tensor: form must be Hermitian");
    Mat m = x * f.ortho_rows(y) + y * f.ortho_rows(x);
    if (!is_b_hermitian(m, f)) throw std::logic_error("herm_tensor: result is not b-Hermitian");
    return m;
}

namespace detail {

/// K-basis of F as a K-space: 1, and t when F is a quadratic extension.
inline std::vector<Scalar> base_field_units(const FieldSpec& field, const FieldSpec& base) {
    std::vector<Scalar> units{Scalar::one(field)};
    if (field != base) units.push_back(Scalar::t(field));
    return units;
}

/// A base-field coordinate viewed inside F.
inline Scalar lift_scalar(const FieldSpec& field, const FieldSpec& base, const Scalar& s) {
    if (field == base) return s;
    return Scalar(field, s.coeff0());
}

} // namespace detail

/// Recovers y with u = x (x)_b y (or x /\_b y in the alternating case) from a
/// structured u that kills x and squeezes {x}-perp into the line F x.
/// Recognition solves the K-linear system "tensor(x, y) = u, b(x, y) = 0"
/// and verifies the reconstruction; an alternating u of rank 1 has no
/// solution and is reported as the contradiction it is.
inline Vec tensor_recognize(const Mat& u, const Vec& x, const Form& f) {
    const FieldSpec& fl = f.field();
    const FieldSpec& base = f.base_field();
    int n = f.dim();
    if (x.is_zero() || !f.eval(x, x).is_zero())
        throw std::invalid_argument("tensor_recognize: x must be nonzero isotropic");
    enum { sym, alt, herm } kind;
    if (!f.is_bilinear()) {
        if (!is_b_hermitian(u, f)) throw std::invalid_argument("tensor_recognize: u not b-Hermitian");
        kind = herm;
    } else if (is_b_symmetric(u, f)) {
        kind = sym;
    } else if (is_b_alternating(u, f)) {
        kind = alt;
    } else {
        throw std::invalid_argument("tensor_recognize: u is not structured for the form");
    }
    if (!(u * x).is_zero()) throw std::invalid_argument("tensor_recognize: u(x) != 0");
    Mat x_perp = kernel_basis(f.ortho_rows(x));
    Mat image = u * x_perp;
    if (!image.is_zero() && rank(hstack(x, image)) != 1)
        throw std::invalid_argument("tensor_recognize: u({x}-perp) is not inside Fx");

    auto make_tensor = [&](const Vec& y) {
        switch (kind) {
            case sym: return sym_tensor(x, y, f);
            case alt: return alt_tensor(x, y, f);
            default: return herm_tensor(x, y, f);
        }
    };

    // unknowns: K-coordinates of y; equations: flattened tensor match plus
    // orthogonality of y to x
    std::vector<Scalar> units = detail::base_field_units(fl, base);
    int unknowns = n * static_cast<int>(units.size());
    int fw = MatSubspace::flat_width(fl, base, n);
    int ow = static_cast<int>(units.size());
    Mat a(base, fw + ow, unknowns);
    Mat rhs(base, fw + ow, 1);
    int col = 0;
    for (int i = 0; i < n; ++i)
        for (const Scalar& unit : units) {
            Vec e(fl, n, 1);
            e.at(i, 0) = unit;
            std::vector<Scalar> tf = MatSubspace::flatten(make_tensor(e), base);
            for (int r = 0; r < fw; ++r) a.at(r, col) = tf[r];
            Scalar pairing = f.eval(x, e);
            if (ow == 1) {
                a.at(fw, col) = pairing; // K = F: the constraint lives in the same field
            } else {
                a.at(fw, col) = Scalar(base, pairing.coeff0());
                a.at(fw + 1, col) = Scalar(base, pairing.coeff1());
            }
            ++col;
        }
    std::vector<Scalar> uf = MatSubspace::flatten(u, base);
    for (int r = 0; r < fw; ++r) rhs.at(r, 0) = uf[r];

    auto sol = solve(a, rhs);
    if (!sol)
        throw std::invalid_argument("tensor_recognize: no tensor representation (rank-1 alternating input?)");
    Vec y(fl, n, 1);
    col = 0;
    for (int i = 0; i < n; ++i)
        for (const Scalar& unit : units) {
            y.at(i, 0) += unit * detail::lift_scalar(fl, base, sol->at(col, 0));
            ++col;
        }
    if (make_tensor(y) != u) throw std::logic_error("tensor_recognize: reconstruction mismatch");
    if (!f.eval(x, y).is_zero()) throw std::logic_error("tensor_recognize: y is not orthogonal to x");
    return y;
}

// ---------------------------------------------------------------------------
// ambient structured spaces

/// S_b, A_b or H_b as a canonical MatSubspace over the base field.
inline MatSubspace structured_ambient(const Form& f, FormKind structure) {
    const FieldSpec& fl = f.field();
    const FieldSpec& base = f.base_field();
    int n = f.dim();
    if ((structure == FormKind::hermitian) != (f.kind() == FormKind::hermitian))
        throw std::invalid_argument("structured_ambient: structure does not match the form");

    std::vector<Scalar> units = detail::base_field_units(fl, base);
    int unknowns = n * n * static_cast<int>(units.size());
    int fw = MatSubspace::flat_width(fl, base, n);
    int extra = (structure == FormKind::alternating) ? n : 0; // explicit zero-diagonal rows
    Mat cond(base, fw + extra, unknowns);
    int col = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (const Scalar& unit : units) {
                Mat e(fl, n, n);
                e.at(i, j) = unit;
                Mat se = f.gram() * e;
                Mat residue = (structure == FormKind::symmetric) ? se - se.transpose()
                              : (structure == FormKind::alternating) ? se + se.transpose()
                                                                     : se - conj_transpose(se);
                std::vector<Scalar> rf = MatSubspace::flatten(residue, base);
                for (int r = 0; r < fw; ++r) cond.at(r, col) = rf[r];
                // zero-diagonal rows only arise in the bilinear case, where K = F
                for (int d = 0; d < extra; ++d) cond.at(fw + d, col) = se.at(d, d);
                ++col;
            }
    Mat ker = kernel_basis(cond);
    std::vector<Mat> gens;
    for (int k = 0; k < ker.cols(); ++k) {
        Mat g(fl, n, n);
        int c = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (const Scalar& unit : units) {
                    g.at(i, j) += unit * detail::lift_scalar(fl, base, ker.at(c, k));
                    ++c;
                }
        gens.push_back(std::move(g));
    }
    return MatSubspace::span(fl, base, n, gens);
}

// ---------------------------------------------------------------------------
// maximal nilpotent spaces attached to a flag

namespace detail {

/// Block generators [[A, *, *],[0,0,C],[0,0,*]] in adapted coordinates,
/// conjugated back to the original ones. `structure` selects the coupling:
///   b-symmetric:   [[A,  eps (PC)^T, E - Q A^T],[0,0,C],[0,0,  eps A^T]]
///   b-alternating: [[A, -eps (PC)^T, E + Q A^T],[0,0,C],[0,0, -eps A^T]]
///   b-Hermitian:   [[A,      (PC)*,  E - Q A* ],[0,0,C],[0,0,      A* ]]
inline MatSubspace structured_flag_space_impl(const Form& f, const AdaptedBasis& ab,
                                              FormKind structure, const Flag& flag) {
    const FieldSpec& fl = f.field();
    const FieldSpec& base = f.base_field();
    int n = f.dim(), nu = ab.nu, p = ab.p_block;
    bool herm = structure == FormKind::hermitian;
    if (herm != (f.kind() == FormKind::hermitian))
        throw std::invalid_argument("structured flag space: structure does not match the form");

    Scalar eps(fl, herm ? 1 : f.epsilon());
    Scalar sign(fl, structure == FormKind::alternating ? -1 : 1);
    auto star = [&](const Mat& m) { return herm ? conj_transpose(m) : m.transpose(); };

    Mat binv = inverse(ab.basis);
    std::vector<Mat> gens;
    auto push = [&](const Mat& a, const Mat& c, const Mat& e) {
        Mat top_right = e - ab.Q * star(a) * sign;
        Mat mid = star(ab.P * c) * (eps * sign);
        Mat block = block_matrix(fl, {{a, mid, top_right},
                                      {Mat(fl, p, nu), Mat(fl, p, p), c},
                                      {Mat(fl, nu, nu), Mat(fl, nu, p), star(a) * (eps * sign)}});
        Mat g = ab.basis * block * binv;
        bool structured = herm ? is_b_hermitian(g, f)
                          : structure == FormKind::symmetric ? is_b_symmetric(g, f)
                                                             : is_b_alternating(g, f);
        if (!structured || !is_nilpotent(g) || !stabilizes_flag(g, flag))
            throw std::logic_error("structured flag space: generator failed its checks");
        gens.push_back(std::move(g));
    };

    std::vector<Scalar> units = detail::base_field_units(fl, base);
    Mat zero_a(fl, nu, nu), zero_c(fl, p, nu), zero_e(fl, nu, nu);
    // strictly upper triangular block
    for (int i = 0; i < nu; ++i)
        for (int j = i + 1; j < nu; ++j)
            for (const Scalar& unit : units) {
                Mat a(fl, nu, nu);
                a.at(i, j) = unit;
                push(a, zero_c, zero_e);
            }
    // p-by-nu block
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < nu; ++j)
            for (const Scalar& unit : units) {
                Mat c(fl, p, nu);
                c.at(i, j) = unit;
                push(zero_a, c, zero_e);
            }
    // E block: symmetric, alternating or Hermitian units
    if (structure == FormKind::symmetric) {
        for (int i = 0; i < nu; ++i)
            for (int j = i; j < nu; ++j) {
                Mat e(fl, nu, nu);
                e.at(i, j) = Scalar::one(fl);
                e.at(j, i) = Scalar::one(fl);
                push(zero_a, zero_c, e);
            }
    } else if (structure == FormKind::alternating) {
        for (int i = 0; i < nu; ++i)
            for (int j = i + 1; j < nu; ++j) {
                Mat e(fl, nu, nu);
                e.at(i, j) = Scalar::one(fl);
                e.at(j, i) = -Scalar::one(fl);
                push(zero_a, zero_c, e);
            }
    } else {
        for (int i = 0; i < nu; ++i)
            for (int j = i; j < nu; ++j) {
                if (i == j) {
                    Mat e(fl, nu, nu);
                    e.at(i, i) = Scalar::one(fl);
                    push(zero_a, zero_c, e);
                    continue;
                }
                for (const Scalar& unit : units) {
                    Mat e(fl, nu, nu);
                    e.at(i, j) = unit;
                    e.at(j, i) = unit.conj();
                    push(zero_a, zero_c, e);
                }
            }
    }

    MatSubspace space = MatSubspace::span(fl, base, n, gens);
    int expected = herm ? nu * (2 * n - 2 * nu - 1)
                   : structure == FormKind::symmetric ? nu * (n - nu)
                                                      : nu * (n - nu - 1);
    if (space.k_dim() != expected)
        throw std::logic_error("structured flag space: dimension does not match the formula");
    return space;
}

} // namespace detail

/// Space construction from an explicit adapted basis; used to cross-check
/// that the Q != 0 and Q = 0 paths build the same space.
inline MatSubspace structured_flag_space(const Form& f, const AdaptedBasis& ab,
                                         FormKind structure, const Flag& flag) {
    return detail::structured_flag_space_impl(f, ab, structure, flag);
}

/// All nilpotent b-symmetric endomorphisms stabilizing the flag; dimension
/// nu(n-nu).
inline MatSubspace ws_space(const Form& f, const Flag& flag) {
    if (!f.is_bilinear()) throw std::invalid_argument("ws_space: form must be bilinear");
    return detail::structured_flag_space_impl(f, strongly_adapted_basis(f, flag),
                                              FormKind::symmetric, flag);
}

/// All nilpotent b-alternating endomorphisms stabilizing the flag; dimension
/// nu(n-nu-1).
inline MatSubspace wa_space(const Form& f, const Flag& flag) {
    if (!f.is_bilinear()) throw std::invalid_argument("wa_space: form must be bilinear");
    return detail::structured_flag_space_impl(f, strongly_adapted_basis(f, flag),
                                              FormKind::alternating, flag);
}

/// All nilpotent b-Hermitian endomorphisms stabilizing the flag; K-dimension
/// nu(2n-2nu-1).
inline MatSubspace wh_space(const Form& f, const Flag& flag) {
    if (f.kind() != FormKind::hermitian)
        throw std::invalid_argument("wh_space: form must be Hermitian");
    return detail::structured_flag_space_impl(f, strongly_adapted_basis(f, flag),
                                              FormKind::hermitian, flag);
}

/// Dispatch on the structure kind.
inline MatSubspace flag_space(const Form& f, const Flag& flag, FormKind structure) {
    switch (structure) {
        case FormKind::symmetric: return ws_space(f, flag);
        case FormKind::alternating: return wa_space(f, flag);
        case FormKind::hermitian: return wh_space(f, flag);
    }
    throw std::logic_error("flag_space: bad enum");
}

/// Claimed maximal dimension for a nilpotent space of structured
/// endomorphisms: nu(n-nu) or nu(n-nu-1) in the non-degenerate bilinear
/// cases, nu(2n-2nu-1) in the Hermitian one, and the bordered
/// C(n-r,2) + r(n-r) + (nu-n+r)(n-nu[-1]) formula when b degenerates.
inline int64_t claimed_dimension(int n, int r, int nu, FormKind structure) {
    int64_t rad = n - r;
    int64_t nu_bar = nu - rad;
    switch (structure) {
        case FormKind::symmetric:
            return rad * (rad - 1) / 2 + r * rad + nu_bar * (n - nu);
        case FormKind::alternating:
            return rad * (rad - 1) / 2 + r * rad + nu_bar * (n - nu - 1);
        case FormKind::hermitian:
            if (r != n) throw std::invalid_argument("claimed_dimension: degenerate Hermitian case is out of scope");
            return static_cast<int64_t>(nu) * (2 * n - 2 * nu - 1);
    }
    throw std::logic_error("claimed_dimension: bad enum");
}

inline std::string claimed_formula(int n, int r, FormKind structure) {
    if (structure == FormKind::hermitian) return "nu*(2n-2nu-1)";
    std::string tail = structure == FormKind::symmetric ? "(n-nu)" : "(n-nu-1)";
    if (r == n) return "nu*" + tail;
    return "C(n-r,2)+r*(n-r)+(nu-n+r)*" + tail;
}

/// Maximal nilpotent space for a possibly degenerate bilinear form: strict
/// upper-triangular action on the radical, arbitrary maps V/Rad -> Rad, and
/// the flag space of the reduced form, assembled in a basis whose first
/// n - r vectors are the canonical radical basis.
inline MatSubspace general_max_space(const Form& f, FormKind structure) {
    if (!f.is_bilinear())
        throw std::invalid_argument("general_max_space: form must be bilinear");
    if (structure == FormKind::hermitian)
        throw std::invalid_argument("general_max_space: structure must be symmetric or alternating");
    const FieldSpec& fl = f.field();
    int n = f.dim();

    Mat rad = radical(f);
    QuotientForm q = quotient_form(f);
    int nrad = rad.cols(), r = q.form.dim();
    Mat basis = hstack(rad, q.complement);
    Mat binv = inverse(basis);

    std::vector<Mat> gens;
    auto push = [&](const Mat& block) {
        Mat g = basis * block * binv;
        bool structured = structure == FormKind::symmetric ? is_b_symmetric(g, f)
                                                           : is_b_alternating(g, f);
        if (!structured || !is_nilpotent(g))
            throw std::logic_error("general_max_space: generator failed its checks");
        gens.push_back(std::move(g));
    };

    // strict upper triangular on the radical flag
    for (int i = 0; i < nrad; ++i)
        for (int j = i + 1; j < nrad; ++j) {
            Mat block(fl, n, n);
            block.at(i, j) = Scalar::one(fl);
            push(block);
        }
    // anything from the complement into the radical
    for (int i = 0; i < nrad; ++i)
        for (int j = 0; j < r; ++j) {
            Mat block(fl, n, n);
            block.at(i, nrad + j) = Scalar::one(fl);
            push(block);
        }
    // the reduced form's flag space, lifted
    if (r > 0) {
        Flag rflag = maximal_singular_flag(q.form);
        MatSubspace reduced = structure == FormKind::symmetric ? ws_space(q.form, rflag)
                                                               : wa_space(q.form, rflag);
        for (const Mat& w : reduced.basis()) {
            Mat block = block_matrix(fl, {{Mat(fl, nrad, nrad), Mat(fl, nrad, r)},
                                          {Mat(fl, r, nrad), w}});
            push(block);
        }
    }

    MatSubspace space = MatSubspace::span(fl, fl, n, gens);
    int64_t expected = claimed_dimension(n, r, witt_index(f), structure);
    if (space.k_dim() != expected)
        throw std::logic_error("general_max_space: dimension does not match the formula");
    return space;
}

/// Exhaustively checks u^2-membership for every element of s; the matching
/// (form kind, structure) pairing is validated on the basis first.
inline bool square_stability_check(const MatSubspace& s, const Form& f,
                                   int64_t max_point_evals = 10'000'000) {
    if (!f.is_bilinear())
        throw std::invalid_argument("square_stability_check: pair the bilinear kinds only");
    for (const Mat& b : s.basis()) {
        bool ok = f.kind() == FormKind::symmetric ? is_b_symmetric(b, f) : is_b_alternating(b, f);
        if (!ok)
            throw std::invalid_argument("square_stability_check: space is not structured to match the form");
    }
    int64_t count = s.element_count();
    if (count > max_point_evals)
        throw BudgetExceeded("square_stability_check: enumeration too large", count, max_point_evals);
    for (int64_t i = 0; i < count; ++i) {
        Mat u = s.element_by_index(i);
        if (!s.contains(u * u)) return false;
    }
    return true;
}

} // namespace nilspace

#endif
