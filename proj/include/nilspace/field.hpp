#ifndef NILSPACE_FIELD_HPP
#define NILSPACE_FIELD_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace nilspace {

/// Exact arithmetic in GF(p) and GF(p^2) for odd primes p.
///
/// Elements of GF(p^2) are residues of GF(p)[t] modulo a fixed monic
/// irreducible quadratic t^2 + m1*t + m0, chosen deterministically so that
/// serialized scalars are reproducible across runs. The non-identity
/// involution of GF(p^2) is the Frobenius x -> x^p; its fixed field is GF(p).
class FieldSpec {
public:
    int64_t characteristic() const { return p_; }
    int degree() const { return degree_; }
    int64_t order() const { return q_; }

    /// Modulus coefficients (t^2 + mod1*t + mod0); only meaningful for degree 2.
    int64_t mod0() const { return mod0_; }
    int64_t mod1() const { return mod1_; }

    /// t^p = frob0 + frob1*t, precomputed at construction.
    int64_t frob0() const { return frob0_; }
    int64_t frob1() const { return frob1_; }

    bool operator==(const FieldSpec& o) const { return this == &o; }
    bool operator!=(const FieldSpec& o) const { return this != &o; }

    friend const FieldSpec& make_field(int64_t p, int degree);

private:
    FieldSpec(int64_t p, int degree);

    int64_t p_ = 0;
    int degree_ = 1;
    int64_t q_ = 0;
    int64_t mod0_ = 0, mod1_ = 0;
    int64_t frob0_ = 0, frob1_ = 0;
};

namespace detail {

inline bool is_prime(int64_t n) {
    if (n < 2) return false;
    for (int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline int64_t mod_reduce(int64_t v, int64_t p) {
    int64_t r = v % p;
    return r < 0 ? r + p : r;
}

// Extended Euclid; returns a^-1 mod p for a != 0.
inline int64_t mod_inverse(int64_t a, int64_t p) {
    int64_t t = 0, new_t = 1, r = p, new_r = mod_reduce(a, p);
    while (new_r != 0) {
        int64_t q = r / new_r;
        t = std::exchange(new_t, t - q * new_t);
        r = std::exchange(new_r, r - q * new_r);
    }
    if (r != 1) throw std::domain_error("mod_inverse: not invertible");
    return mod_reduce(t, p);
}

} // namespace detail

/// A field element: c0 + c1*t, with c1 = 0 on prime fields.
class Scalar {
public:
    Scalar(const FieldSpec& f, int64_t value)
        : f_(&f), c0_(detail::mod_reduce(value, f.characteristic())), c1_(0) {}

    static Scalar from_coeffs(const FieldSpec& f, int64_t a, int64_t b) {
        if (b != 0 && f.degree() == 1)
            throw std::invalid_argument("Scalar: t-coefficient on a prime field");
        Scalar s(f, a);
        s.c1_ = detail::mod_reduce(b, f.characteristic());
        return s;
    }

    static Scalar zero(const FieldSpec& f) { return Scalar(f, 0); }
    static Scalar one(const FieldSpec& f) { return Scalar(f, 1); }

    /// The generator t of GF(p^2) over GF(p).
    static Scalar t(const FieldSpec& f) { return from_coeffs(f, 0, 1); }

    const FieldSpec& field() const { return *f_; }
    int64_t coeff0() const { return c0_; }
    int64_t coeff1() const { return c1_; }
    bool is_zero() const { return c0_ == 0 && c1_ == 0; }
    bool is_one() const { return c0_ == 1 && c1_ == 0; }

    /// Position in the canonical enumeration 0..q-1 (c0 + c1*p).
    int64_t index() const { return c0_ + c1_ * f_->characteristic(); }
    static Scalar from_index(const FieldSpec& f, int64_t idx) {
        return from_coeffs(f, idx % f.characteristic(), idx / f.characteristic());
    }

    Scalar operator-() const {
        Scalar r = *this;
        int64_t p = f_->characteristic();
        r.c0_ = detail::mod_reduce(-c0_, p);
        r.c1_ = detail::mod_reduce(-c1_, p);
        return r;
    }
    Scalar operator+(const Scalar& o) const {
        check_same(o);
        int64_t p = f_->characteristic();
        return raw(*f_, detail::mod_reduce(c0_ + o.c0_, p), detail::mod_reduce(c1_ + o.c1_, p));
    }
    Scalar operator-(const Scalar& o) const { return *this + (-o); }
    Scalar operator*(const Scalar& o) const {
        check_same(o);
        int64_t p = f_->characteristic();
        if (f_->degree() == 1)
            return raw(*f_, detail::mod_reduce(c0_ * o.c0_, p), 0);
        // (a + b t)(c + d t) with t^2 = -(m1 t + m0)
        int64_t a = c0_, b = c1_, c = o.c0_, d = o.c1_;
        int64_t bd = detail::mod_reduce(b * d, p);
        int64_t e0 = detail::mod_reduce(a * c - bd * f_->mod0(), p);
        int64_t e1 = detail::mod_reduce(a * d + b * c - bd * f_->mod1(), p);
        return raw(*f_, e0, e1);
    }
    Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
    Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    Scalar inverse() const {
        if (is_zero()) throw std::domain_error("Scalar: division by zero");
        int64_t p = f_->characteristic();
        if (f_->degree() == 1 || c1_ == 0) {
            Scalar r = *this;
            r.c0_ = detail::mod_inverse(c0_, p);
            return r;
        }
        // x^-1 = conj(x) / norm(x), with norm(x) = x * conj(x) in GF(p).
        Scalar cj = conj();
        Scalar nrm = *this * cj;
        if (nrm.c1_ != 0) throw std::logic_error("Scalar: norm left the prime field");
        return raw(*f_, detail::mod_inverse(nrm.c0_, p), 0) * cj;
    }
    Scalar operator/(const Scalar& o) const { return *this * o.inverse(); }

    /// Frobenius involution x -> x^p (identity on prime fields).
    Scalar conj() const {
        if (f_->degree() == 1 || c1_ == 0) return *this;
        // (a + b t)^p = a + b t^p
        Scalar tp = from_coeffs(*f_, f_->frob0(), f_->frob1());
        return Scalar(*f_, c0_) + Scalar(*f_, c1_) * tp;
    }

    bool operator==(const Scalar& o) const {
        check_same(o);
        return c0_ == o.c0_ && c1_ == o.c1_;
    }
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    /// Text form: decimal residue on prime fields, "a+b*t" on extensions.
    std::string str() const {
        if (f_->degree() == 1) return std::to_string(c0_);
        return std::to_string(c0_) + "+" + std::to_string(c1_) + "*t";
    }
    static Scalar parse(const FieldSpec& f, const std::string& text);

private:
    static Scalar raw(const FieldSpec& f, int64_t a, int64_t b) {
        Scalar s(f, a);
        s.c1_ = b;
        return s;
    }
    void check_same(const Scalar& o) const {
        if (f_ != o.f_) throw std::invalid_argument("Scalar: operands from different fields");
    }

    const FieldSpec* f_;
    int64_t c0_, c1_;
};

inline Scalar involution(const Scalar& x) { return x.conj(); }

/// Relative trace Tr(x) = x + x^p of GF(p^2) over GF(p).
inline Scalar tr_rel(const Scalar& x) {
    if (x.field().degree() != 2)
        throw std::invalid_argument("tr_rel: field has no non-identity involution");
    return x + x.conj();
}

inline FieldSpec::FieldSpec(int64_t p, int degree) : p_(p), degree_(degree) {
    q_ = (degree == 2) ? p * p : p;
    if (degree == 2) {
        // Smallest monic irreducible quadratic t^2 + m1 t + m0, coefficients
        // compared as (m1, m0). Degree-2 irreducibility = no root in GF(p).
        bool found = false;
        for (int64_t m1 = 0; m1 < p && !found; ++m1) {
            for (int64_t m0 = 0; m0 < p && !found; ++m0) {
                bool has_root = false;
                for (int64_t x = 0; x < p; ++x) {
                    if (detail::mod_reduce(x * x + m1 * x + m0, p) == 0) {
                        has_root = true;
                        break;
                    }
                }
                if (!has_root) {
                    mod0_ = m0;
                    mod1_ = m1;
                    found = true;
                }
            }
        }
        if (!found) throw std::logic_error("FieldSpec: no irreducible quadratic found");
        // t^p by square-and-multiply in the quotient ring.
        Scalar acc = Scalar::one(*this);
        Scalar base = Scalar::t(*this);
        int64_t e = p;
        while (e > 0) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        frob0_ = acc.coeff0();
        frob1_ = acc.coeff1();
    }
}

/// Interned field lookup; the returned reference stays valid for the
/// lifetime of the process.
inline const FieldSpec& make_field(int64_t p, int degree) {
    if (p == 2) throw std::invalid_argument("make_field: characteristic 2 is not supported");
    if (!detail::is_prime(p)) throw std::invalid_argument("make_field: characteristic must be prime");
    if (degree != 1 && degree != 2) throw std::invalid_argument("make_field: degree must be 1 or 2");

    static std::mutex mu;
    static std::map<std::pair<int64_t, int>, std::unique_ptr<FieldSpec>> registry;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = registry[{p, degree}];
    if (!slot) slot.reset(new FieldSpec(p, degree));
    return *slot;
}

/// Parses q itself: 3 -> GF(3), 9 -> GF(9). Rejects anything that is
/// neither an odd prime nor the square of one.
inline const FieldSpec& make_field_from_order(int64_t q) {
    if (detail::is_prime(q)) return make_field(q, 1);
    int64_t r = 1;
    while (r * r < q) ++r;
    if (r * r == q && detail::is_prime(r)) return make_field(r, 2);
    throw std::invalid_argument("make_field_from_order: order must be p or p^2 for an odd prime p");
}

inline Scalar Scalar::parse(const FieldSpec& f, const std::string& text) {
    auto parse_int = [](const std::string& s) {
        size_t pos = 0;
        int64_t v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("Scalar::parse: bad integer '" + s + "'");
        return v;
    };
    auto plus = text.find('+', 1);
    if (plus == std::string::npos) {
        auto star = text.find("*t");
        if (star != std::string::npos)
            return from_coeffs(f, 0, parse_int(text.substr(0, star)));
        return Scalar(f, parse_int(text));
    }
    std::string tail = text.substr(plus + 1);
    auto star = tail.find("*t");
    if (star == std::string::npos) throw std::invalid_argument("Scalar::parse: expected 'a+b*t'");
    return from_coeffs(f, parse_int(text.substr(0, plus)), parse_int(tail.substr(0, star)));
}

/// Element of F[s]/(s^2): value + slope*s. Projection onto `value` is a ring
/// morphism, which is what makes the exact derivative trick work.
class DualScalar {
public:
    DualScalar(Scalar value, Scalar slope) : v_(std::move(value)), s_(std::move(slope)) {
        if (v_.field() != s_.field())
            throw std::invalid_argument("DualScalar: mixed fields");
    }
    static DualScalar zero(const FieldSpec& f) { return {Scalar::zero(f), Scalar::zero(f)}; }
    static DualScalar one(const FieldSpec& f) { return {Scalar::one(f), Scalar::zero(f)}; }

    const Scalar& value() const { return v_; }
    const Scalar& slope() const { return s_; }
    const FieldSpec& field() const { return v_.field(); }
    bool is_zero() const { return v_.is_zero() && s_.is_zero(); }

    DualScalar operator-() const { return {-v_, -s_}; }
    DualScalar operator+(const DualScalar& o) const { return {v_ + o.v_, s_ + o.s_}; }
    DualScalar operator-(const DualScalar& o) const { return {v_ - o.v_, s_ - o.s_}; }
    DualScalar operator*(const DualScalar& o) const {
        return {v_ * o.v_, v_ * o.s_ + s_ * o.v_};
    }
    DualScalar& operator+=(const DualScalar& o) { return *this = *this + o; }
    DualScalar& operator-=(const DualScalar& o) { return *this = *this - o; }
    DualScalar& operator*=(const DualScalar& o) { return *this = *this * o; }
    bool operator==(const DualScalar& o) const { return v_ == o.v_ && s_ == o.s_; }
    bool operator!=(const DualScalar& o) const { return !(*this == o); }

private:
    Scalar v_, s_;
};

/// The base field K over which structured subspaces are linear: the fixed
/// field of the involution for extensions, the field itself otherwise.
inline const FieldSpec& fixed_field(const FieldSpec& f) {
    return f.degree() == 2 ? make_field(f.characteristic(), 1) : f;
}

} // namespace nilspace

#endif
