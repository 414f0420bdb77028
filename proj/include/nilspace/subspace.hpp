#ifndef NILSPACE_SUBSPACE_HPP
#define NILSPACE_SUBSPACE_HPP

#include <algorithm>

#include "nilspace/budget.hpp"
#include "nilspace/matrix.hpp"

namespace nilspace {

/// A finite-dimensional space of n-by-n matrices over F, linear over the
/// base field K (K = F for bilinear settings, the fixed field of the
/// involution for Hermitian ones). Stored as a canonical echelonized basis
/// of flattened coordinate rows over K, so two spaces are equal exactly when
/// their representations coincide.
///
/// Flattening is row-major; over a degree-2 extension with K the prime
/// field, every entry contributes its two coordinates in the (1, t) basis.
class MatSubspace {
public:
    static MatSubspace span(const FieldSpec& field, const FieldSpec& base, int n,
                            const std::vector<Mat>& generators) {
        check_base(field, base);
        int width = flat_width(field, base, n);
        Mat rows(base, static_cast<int>(generators.size()), width);
        for (size_t g = 0; g < generators.size(); ++g) {
            if (generators[g].rows() != n || generators[g].cols() != n ||
                generators[g].field() != field)
                throw std::invalid_argument("MatSubspace: generator shape/field mismatch");
            std::vector<Scalar> row = flatten(generators[g], base);
            for (int j = 0; j < width; ++j) rows.at(static_cast<int>(g), j) = row[j];
        }
        RrefResult rr = rref(rows);
        Mat flat(base, rr.rank, width);
        for (int i = 0; i < rr.rank; ++i)
            for (int j = 0; j < width; ++j) flat.at(i, j) = rr.rref.at(i, j);
        return MatSubspace(field, base, n, std::move(flat), std::move(rr.pivots));
    }

    const FieldSpec& field() const { return *field_; }
    const FieldSpec& base_field() const { return *base_; }
    int ambient_n() const { return n_; }
    int k_dim() const { return flat_.rows(); }
    const std::vector<Mat>& basis() const { return basis_; }
    const Mat& flat_rows() const { return flat_; }

    bool contains(const Mat& m) const {
        if (m.rows() != n_ || m.cols() != n_ || m.field() != *field_) return false;
        std::vector<Scalar> row = reduce(flatten(m, *base_));
        for (const Scalar& x : row)
            if (!x.is_zero()) return false;
        return true;
    }

    /// Coordinates of m against the canonical basis; nullopt if m is outside.
    std::optional<std::vector<Scalar>> coordinates(const Mat& m) const {
        if (m.rows() != n_ || m.cols() != n_ || m.field() != *field_) return std::nullopt;
        std::vector<Scalar> row = flatten(m, *base_);
        std::vector<Scalar> coords;
        for (int i = 0; i < flat_.rows(); ++i) {
            Scalar c = row[pivots_[i]];
            coords.push_back(c);
            if (c.is_zero()) continue;
            for (int j = 0; j < flat_.cols(); ++j) row[j] -= c * flat_.at(i, j);
        }
        for (const Scalar& x : row)
            if (!x.is_zero()) return std::nullopt;
        return coords;
    }

    /// The K-linear combination of the canonical basis with these coordinates.
    Mat element(const std::vector<Scalar>& coords) const {
        if (static_cast<int>(coords.size()) != k_dim())
            throw std::invalid_argument("MatSubspace::element: coordinate count");
        Mat m(*field_, n_, n_);
        for (int i = 0; i < k_dim(); ++i) {
            if (coords[i].is_zero()) continue;
            m += basis_[i] * lift(coords[i]);
        }
        return m;
    }

    int64_t element_count() const { return detail::sat_pow(base_->order(), k_dim()); }

    /// Element 0..q_K^dim - 1, last coordinate fastest.
    Mat element_by_index(int64_t idx) const {
        std::vector<Scalar> coords;
        coords.reserve(k_dim());
        int64_t rest = idx;
        for (int i = k_dim() - 1; i >= 0; --i) {
            coords.push_back(Scalar::from_index(*base_, rest % base_->order()));
            rest /= base_->order();
        }
        std::reverse(coords.begin(), coords.end());
        return element(coords);
    }

    bool operator==(const MatSubspace& o) const {
        return field_ == o.field_ && base_ == o.base_ && n_ == o.n_ && flat_ == o.flat_;
    }
    bool operator!=(const MatSubspace& o) const { return !(*this == o); }
    /// Deterministic ordering for canonical report output.
    bool operator<(const MatSubspace& o) const {
        if (k_dim() != o.k_dim()) return k_dim() < o.k_dim();
        for (int i = 0; i < flat_.rows(); ++i)
            for (int j = 0; j < flat_.cols(); ++j) {
                int64_t a = flat_.at(i, j).index(), b = o.flat_.at(i, j).index();
                if (a != b) return a < b;
            }
        return false;
    }

    static int flat_width(const FieldSpec& field, const FieldSpec& base, int n) {
        return n * n * (field == base ? 1 : 2);
    }

    static std::vector<Scalar> flatten(const Mat& m, const FieldSpec& base) {
        std::vector<Scalar> out;
        bool split = m.field() != base;
        out.reserve(static_cast<size_t>(m.rows()) * m.cols() * (split ? 2 : 1));
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) {
                const Scalar& x = m.at(i, j);
                if (split) {
                    out.push_back(Scalar(base, x.coeff0()));
                    out.push_back(Scalar(base, x.coeff1()));
                } else {
                    out.push_back(x);
                }
            }
        return out;
    }

    static Mat unflatten(const FieldSpec& field, const FieldSpec& base, int n,
                         const std::vector<Scalar>& row) {
        bool split = field != base;
        Mat m(field, n, n);
        size_t k = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (split) {
                    m.at(i, j) = Scalar::from_coeffs(field, row[k].coeff0(), row[k + 1].coeff0());
                    k += 2;
                } else {
                    m.at(i, j) = row[k++];
                }
            }
        return m;
    }

private:
    MatSubspace(const FieldSpec& field, const FieldSpec& base, int n, Mat flat,
                std::vector<int> pivots)
        : field_(&field), base_(&base), n_(n), flat_(std::move(flat)), pivots_(std::move(pivots)) {
        for (int i = 0; i < flat_.rows(); ++i) {
            std::vector<Scalar> row;
            for (int j = 0; j < flat_.cols(); ++j) row.push_back(flat_.at(i, j));
            basis_.push_back(unflatten(*field_, *base_, n_, row));
        }
    }

    static void check_base(const FieldSpec& field, const FieldSpec& base) {
        if (field == base) return;
        if (field.degree() == 2 && base == fixed_field(field)) return;
        throw std::invalid_argument("MatSubspace: base field must be the field or its fixed field");
    }

    std::vector<Scalar> reduce(std::vector<Scalar> row) const {
        for (int i = 0; i < flat_.rows(); ++i) {
            Scalar c = row[pivots_[i]];
            if (c.is_zero()) continue;
            for (int j = 0; j < flat_.cols(); ++j) row[j] -= c * flat_.at(i, j);
        }
        return row;
    }

    /// K-scalar viewed inside F.
    Scalar lift(const Scalar& k) const {
        if (field_ == base_) return k;
        return Scalar(*field_, k.coeff0());
    }

    const FieldSpec* field_;
    const FieldSpec* base_;
    int n_;
    Mat flat_;                // canonical rref rows over K
    std::vector<int> pivots_;
    std::vector<Mat> basis_;  // unflattened canonical basis, over F
};

} // namespace nilspace

#endif
