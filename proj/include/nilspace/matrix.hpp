#ifndef NILSPACE_MATRIX_HPP
#define NILSPACE_MATRIX_HPP

#include <initializer_list>
#include <optional>
#include <sstream>
#include <vector>

#include "nilspace/field.hpp"

namespace nilspace {

/// Dense row-major matrix over one field. Entries are Scalar or DualScalar;
/// only the division-free operations are available generically. 0-by-0 and
/// empty-block matrices are legal.
template <class R>
class MatT {
public:
    MatT(const FieldSpec& f, int rows, int cols)
        : f_(&f), rows_(rows), cols_(cols),
          e_(static_cast<size_t>(rows) * cols, R::zero(f)) {
        if (rows < 0 || cols < 0) throw std::invalid_argument("MatT: negative size");
    }

    static MatT identity(const FieldSpec& f, int n) {
        MatT m(f, n, n);
        for (int i = 0; i < n; ++i) m.at(i, i) = R::one(f);
        return m;
    }

    const FieldSpec& field() const { return *f_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    R& at(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
    const R& at(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }

    bool is_zero() const {
        for (const R& x : e_)
            if (!x.is_zero()) return false;
        return true;
    }
    bool is_square() const { return rows_ == cols_; }

    MatT operator-() const {
        MatT r = *this;
        for (R& x : r.e_) x = -x;
        return r;
    }
    MatT operator+(const MatT& o) const {
        check_shape(o);
        MatT r = *this;
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] += o.e_[k];
        return r;
    }
    MatT operator-(const MatT& o) const {
        check_shape(o);
        MatT r = *this;
        for (size_t k = 0; k < e_.size(); ++k) r.e_[k] -= o.e_[k];
        return r;
    }
    MatT operator*(const MatT& o) const {
        if (f_ != o.f_) throw std::invalid_argument("MatT: mixed fields");
        if (cols_ != o.rows_) throw std::invalid_argument("MatT: inner dimensions differ");
        MatT r(*f_, rows_, o.cols_);
        for (int i = 0; i < rows_; ++i)
            for (int k = 0; k < cols_; ++k) {
                const R& a = at(i, k);
                if (a.is_zero()) continue;
                for (int j = 0; j < o.cols_; ++j)
                    r.at(i, j) += a * o.at(k, j);
            }
        return r;
    }
    MatT operator*(const R& c) const {
        MatT r = *this;
        for (R& x : r.e_) x = x * c;
        return r;
    }
    MatT& operator+=(const MatT& o) { return *this = *this + o; }
    bool operator==(const MatT& o) const {
        if (f_ != o.f_) throw std::invalid_argument("MatT: comparing across fields");
        return rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
    }
    bool operator!=(const MatT& o) const { return !(*this == o); }

    MatT transpose() const {
        MatT r(*f_, cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
        return r;
    }

    R trace() const {
        if (!is_square()) throw std::invalid_argument("MatT::trace: not square");
        R t = R::zero(*f_);
        for (int i = 0; i < rows_; ++i) t += at(i, i);
        return t;
    }

    MatT col(int j) const {
        MatT r(*f_, rows_, 1);
        for (int i = 0; i < rows_; ++i) r.at(i, 0) = at(i, j);
        return r;
    }
    MatT row(int i) const {
        MatT r(*f_, 1, cols_);
        for (int j = 0; j < cols_; ++j) r.at(0, j) = at(i, j);
        return r;
    }
    /// Columns [j0, j1).
    MatT cols_range(int j0, int j1) const {
        MatT r(*f_, rows_, j1 - j0);
        for (int i = 0; i < rows_; ++i)
            for (int j = j0; j < j1; ++j) r.at(i, j - j0) = at(i, j);
        return r;
    }

    MatT with_col_appended(const MatT& c) const {
        if (c.cols_ != 1 || c.rows_ != rows_) throw std::invalid_argument("with_col_appended: shape");
        MatT r(*f_, rows_, cols_ + 1);
        for (int i = 0; i < rows_; ++i) {
            for (int j = 0; j < cols_; ++j) r.at(i, j) = at(i, j);
            r.at(i, cols_) = c.at(i, 0);
        }
        return r;
    }

private:
    void check_shape(const MatT& o) const {
        if (f_ != o.f_) throw std::invalid_argument("MatT: mixed fields");
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument("MatT: shape mismatch");
    }

    const FieldSpec* f_;
    int rows_, cols_;
    std::vector<R> e_;
};

using Mat = MatT<Scalar>;
using DualMat = MatT<DualScalar>;
using Vec = Mat; // column vectors are n-by-1 matrices

inline Mat hstack(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("hstack: row counts differ");
    Mat r(a.field(), a.rows(), a.cols() + b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) r.at(i, j) = a.at(i, j);
        for (int j = 0; j < b.cols(); ++j) r.at(i, a.cols() + j) = b.at(i, j);
    }
    return r;
}

inline Mat vstack(const Mat& a, const Mat& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("vstack: column counts differ");
    Mat r(a.field(), a.rows() + b.rows(), a.cols());
    for (int j = 0; j < a.cols(); ++j) {
        for (int i = 0; i < a.rows(); ++i) r.at(i, j) = a.at(i, j);
        for (int i = 0; i < b.rows(); ++i) r.at(a.rows() + i, j) = b.at(i, j);
    }
    return r;
}

/// Assembles a matrix from a grid of blocks. Rows of blocks must agree in
/// height, columns in width; explicitly sized zero blocks keep void pieces
/// unambiguous.
inline Mat block_matrix(const FieldSpec& f, const std::vector<std::vector<Mat>>& blocks) {
    if (blocks.empty()) return Mat(f, 0, 0);
    std::vector<int> row_h, col_w;
    for (const auto& brow : blocks) row_h.push_back(brow.at(0).rows());
    for (const auto& b : blocks[0]) col_w.push_back(b.cols());
    int rows = 0, cols = 0;
    for (int h : row_h) rows += h;
    for (int w : col_w) cols += w;
    Mat r(f, rows, cols);
    int i0 = 0;
    for (size_t bi = 0; bi < blocks.size(); ++bi) {
        int j0 = 0;
        for (size_t bj = 0; bj < blocks[bi].size(); ++bj) {
            const Mat& b = blocks[bi][bj];
            if (b.rows() != row_h[bi] || b.cols() != col_w[bj])
                throw std::invalid_argument("block_matrix: inconsistent block sizes");
            for (int i = 0; i < b.rows(); ++i)
                for (int j = 0; j < b.cols(); ++j) r.at(i0 + i, j0 + j) = b.at(i, j);
            j0 += col_w[bj];
        }
        i0 += row_h[bi];
    }
    return r;
}

inline Mat from_ints(const FieldSpec& f, std::initializer_list<std::initializer_list<int64_t>> rows) {
    int r = static_cast<int>(rows.size());
    int c = r == 0 ? 0 : static_cast<int>(rows.begin()->size());
    Mat m(f, r, c);
    int i = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c) throw std::invalid_argument("from_ints: ragged rows");
        int j = 0;
        for (int64_t v : row) m.at(i, j++) = Scalar(f, v);
        ++i;
    }
    return m;
}

inline Mat diag_matrix(const FieldSpec& f, const std::vector<int64_t>& d) {
    Mat m(f, static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m.at(static_cast<int>(i), static_cast<int>(i)) = Scalar(f, d[i]);
    return m;
}

/// Entrywise involution followed by transpose; plain transpose on prime fields.
inline Mat conj_transpose(const Mat& m) {
    Mat r(m.field(), m.cols(), m.rows());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r.at(j, i) = m.at(i, j).conj();
    return r;
}

inline Mat conj_entries(const Mat& m) {
    Mat r = m;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r.at(i, j) = m.at(i, j).conj();
    return r;
}

struct RrefResult {
    Mat rref;
    std::vector<int> pivots; // 0-based pivot column per pivot row
    int rank = 0;
};

/// Reduced row echelon form; scans columns left to right, picks the first
/// nonzero entry top to bottom, so the result is deterministic.
inline RrefResult rref(const Mat& m) {
    RrefResult res{m, {}, 0};
    Mat& a = res.rref;
    int r = 0;
    for (int j = 0; j < a.cols() && r < a.rows(); ++j) {
        int piv = -1;
        for (int i = r; i < a.rows(); ++i)
            if (!a.at(i, j).is_zero()) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        if (piv != r)
            for (int k = 0; k < a.cols(); ++k) std::swap(a.at(piv, k), a.at(r, k));
        Scalar inv = a.at(r, j).inverse();
        for (int k = 0; k < a.cols(); ++k) a.at(r, k) *= inv;
        for (int i = 0; i < a.rows(); ++i) {
            if (i == r || a.at(i, j).is_zero()) continue;
            Scalar c = a.at(i, j);
            for (int k = 0; k < a.cols(); ++k) a.at(i, k) -= c * a.at(r, k);
        }
        res.pivots.push_back(j);
        ++r;
    }
    res.rank = r;
    return res;
}

inline int rank(const Mat& m) { return rref(m).rank; }

/// Columns form a basis of the null space {x : m x = 0}; there are
/// cols - rank of them, in the deterministic free-column order.
inline Mat kernel_basis(const Mat& m) {
    RrefResult rr = rref(m);
    const FieldSpec& f = m.field();
    std::vector<bool> is_pivot(m.cols(), false);
    for (int p : rr.pivots) is_pivot[p] = true;
    Mat basis(f, m.cols(), m.cols() - rr.rank);
    int out = 0;
    for (int j = 0; j < m.cols(); ++j) {
        if (is_pivot[j]) continue;
        basis.at(j, out) = Scalar::one(f);
        for (int i = 0; i < rr.rank; ++i) basis.at(rr.pivots[i], out) = -rr.rref.at(i, j);
        ++out;
    }
    return basis;
}

/// One solution x of a x = b, or nullopt when inconsistent.
inline std::optional<Mat> solve(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("solve: shape mismatch");
    RrefResult rr = rref(hstack(a, b));
    // any pivot inside the b-columns means an inconsistent row
    for (int p : rr.pivots)
        if (p >= a.cols()) return std::nullopt;
    Mat x(a.field(), a.cols(), b.cols());
    for (int i = 0; i < static_cast<int>(rr.pivots.size()); ++i)
        for (int j = 0; j < b.cols(); ++j) x.at(rr.pivots[i], j) = rr.rref.at(i, a.cols() + j);
    return x;
}

inline Mat inverse(const Mat& m) {
    if (!m.is_square()) throw std::invalid_argument("inverse: not square");
    RrefResult rr = rref(hstack(m, Mat::identity(m.field(), m.rows())));
    if (rr.rank < m.rows()) throw std::invalid_argument("inverse: singular matrix");
    return rr.rref.cols_range(m.cols(), 2 * m.cols());
}

/// Coefficients c_0..c_n of det(tI - M) = sum c_k t^(n-k), computed by the
/// Berkowitz division-free recurrence so nothing breaks when the
/// characteristic divides small integers.
template <class R>
std::vector<R> berkowitz_coeffs(const MatT<R>& m) {
    if (!m.is_square()) throw std::invalid_argument("char_poly: not square");
    const FieldSpec& f = m.field();
    int n = m.rows();
    std::vector<R> c{R::one(f)};
    for (int r = 1; r <= n; ++r) {
        // Toeplitz column: 1, -a_rr, -(R C), -(R M C), -(R M^2 C), ...
        std::vector<R> t(static_cast<size_t>(r) + 1, R::zero(f));
        t[0] = R::one(f);
        t[1] = -m.at(r - 1, r - 1);
        if (r >= 2) {
            MatT<R> w(f, r - 1, 1);
            for (int i = 0; i < r - 1; ++i) w.at(i, 0) = m.at(i, r - 1);
            for (int j = 2; j <= r; ++j) {
                R dot = R::zero(f);
                for (int i = 0; i < r - 1; ++i) dot += m.at(r - 1, i) * w.at(i, 0);
                t[j] = -dot;
                if (j < r) {
                    MatT<R> nw(f, r - 1, 1);
                    for (int i = 0; i < r - 1; ++i) {
                        R s = R::zero(f);
                        for (int k = 0; k < r - 1; ++k) s += m.at(i, k) * w.at(k, 0);
                        nw.at(i, 0) = s;
                    }
                    w = nw;
                }
            }
        }
        std::vector<R> nc(static_cast<size_t>(r) + 1, R::zero(f));
        for (int i = 0; i <= r; ++i)
            for (int j = 0; j <= i && j <= r; ++j)
                if (i - j < static_cast<int>(c.size())) nc[i] += t[j] * c[i - j];
        c = std::move(nc);
    }
    return c;
}

/// Characteristic polynomial with the convention c_0 = 1, c_k = 0 for k > n.
struct CharPoly {
    std::vector<Scalar> coeffs;

    Scalar c(int k) const {
        if (k < static_cast<int>(coeffs.size())) return coeffs[k];
        return Scalar::zero(coeffs.at(0).field());
    }
    int n() const { return static_cast<int>(coeffs.size()) - 1; }
};

inline CharPoly char_poly(const Mat& m) { return CharPoly{berkowitz_coeffs(m)}; }

namespace detail {
inline Mat mat_power(const Mat& m, int64_t e) {
    Mat acc = Mat::identity(m.field(), m.rows());
    Mat base = m;
    while (e > 0) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}
} // namespace detail

/// True iff m^n = 0. Computed twice, by powering and via the characteristic
/// polynomial; disagreement means the char-poly code is broken and is a hard
/// internal error.
inline bool is_nilpotent(const Mat& m) {
    if (!m.is_square()) throw std::invalid_argument("is_nilpotent: not square");
    if (m.rows() == 0) return true;
    bool by_power = detail::mat_power(m, m.rows()).is_zero();
    CharPoly cp = char_poly(m);
    bool by_poly = true;
    for (int k = 1; k <= cp.n(); ++k)
        if (!cp.coeffs[k].is_zero()) {
            by_poly = false;
            break;
        }
    if (by_power != by_poly)
        throw std::logic_error("is_nilpotent: power and char-poly routes disagree");
    return by_power;
}

/// d/ds c_k(a + s b) at s = 0, evaluated exactly by running the
/// characteristic polynomial over F[s]/(s^2).
inline Scalar ck_derivative(const Mat& a, const Mat& b, int k) {
    if (!a.is_square() || a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("ck_derivative: need square matrices of equal size");
    if (k < 1) throw std::invalid_argument("ck_derivative: k must be positive");
    const FieldSpec& f = a.field();
    if (k > a.rows()) return Scalar::zero(f); // c_k = 0 identically
    DualMat d(f, a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            d.at(i, j) = DualScalar(a.at(i, j), b.at(i, j));
    return berkowitz_coeffs(d)[k].slope();
}

/// Text format: rows separated by ';', entries by ','.
inline std::string to_text(const Mat& m) {
    std::ostringstream os;
    for (int i = 0; i < m.rows(); ++i) {
        if (i) os << ';';
        for (int j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << m.at(i, j).str();
        }
    }
    return os.str();
}

inline Mat mat_from_text(const FieldSpec& f, const std::string& text) {
    std::vector<std::vector<Scalar>> rows;
    std::stringstream ss(text);
    std::string row;
    while (std::getline(ss, row, ';')) {
        std::vector<Scalar> entries;
        std::stringstream rs(row);
        std::string cell;
        while (std::getline(rs, cell, ',')) entries.push_back(Scalar::parse(f, cell));
        rows.push_back(std::move(entries));
    }
    int r = static_cast<int>(rows.size());
    int c = r == 0 ? 0 : static_cast<int>(rows[0].size());
    Mat m(f, r, c);
    for (int i = 0; i < r; ++i) {
        if (static_cast<int>(rows[i].size()) != c)
            throw std::invalid_argument("mat_from_text: ragged rows");
        for (int j = 0; j < c; ++j) m.at(i, j) = rows[i][j];
    }
    return m;
}

} // namespace nilspace

#endif
