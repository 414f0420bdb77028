#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

#include "nilspace/matrix.hpp"
#include "test_support.hpp"

using namespace nilspace;
using nilspace::testing::Rng;

namespace {

// --- independent characteristic-polynomial oracle -------------------------
// det(tI - M) expanded with the Leibniz permutation formula over a tiny dense
// polynomial ring. Usable for n <= 5 or so; shares no code with Berkowitz.

using Poly = std::vector<Scalar>; // coefficients by ascending power of t

Poly poly_const(const Scalar& c) { return {c}; }

Poly poly_mul(const FieldSpec& f, const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, Scalar::zero(f));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

void poly_add_into(const FieldSpec& f, Poly& a, const Poly& b, bool negate) {
    if (a.size() < b.size()) a.resize(b.size(), Scalar::zero(f));
    for (size_t i = 0; i < b.size(); ++i) a[i] += negate ? -b[i] : b[i];
}

// coefficients c_0..c_n with det(tI - M) = sum c_k t^(n-k)
std::vector<Scalar> leibniz_char_poly(const Mat& m) {
    const FieldSpec& f = m.field();
    int n = m.rows();
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    Poly acc{Scalar::zero(f)};
    do {
        // parity of the permutation
        int inversions = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (perm[i] > perm[j]) ++inversions;
        Poly term{Scalar::one(f)};
        for (int i = 0; i < n; ++i) {
            if (perm[i] == i)
                term = poly_mul(f, term, Poly{-m.at(i, i), Scalar::one(f)}); // t - m_ii
            else
                term = poly_mul(f, term, poly_const(-m.at(i, perm[i])));
        }
        poly_add_into(f, acc, term, inversions % 2 != 0);
    } while (std::next_permutation(perm.begin(), perm.end()));
    acc.resize(n + 1, Scalar::zero(f));
    std::vector<Scalar> c;
    for (int k = 0; k <= n; ++k) c.push_back(acc[n - k]);
    return c;
}

} // namespace

TEST_CASE("rref on basic shapes") {
    const FieldSpec& f5 = make_field(5, 1);
    Mat zero(f5, 3, 3);
    RrefResult rz = rref(zero);
    CHECK(rz.rref == zero);
    CHECK(rz.pivots.empty());
    CHECK(rz.rank == 0);

    Mat id = Mat::identity(f5, 4);
    RrefResult ri = rref(id);
    CHECK(ri.rref == id);
    CHECK(ri.pivots == std::vector<int>{0, 1, 2, 3});
    CHECK(ri.rank == 4);

    Mat m = from_ints(f5, {{1, 2}, {2, 4}}); // second row is twice the first
    RrefResult rm = rref(m);
    CHECK(rm.rank == 1);
    CHECK(rm.pivots == std::vector<int>{0});
    CHECK(rm.rref == from_ints(f5, {{1, 2}, {0, 0}}));
}

TEST_CASE("rref is idempotent and rank-preserving") {
    Rng rng(42);
    for (int64_t q : {3, 5, 9}) {
        const FieldSpec& f = make_field_from_order(q);
        for (int trial = 0; trial < 30; ++trial) {
            Mat m = nilspace::testing::random_matrix(rng, f, 4, 5);
            RrefResult r1 = rref(m);
            RrefResult r2 = rref(r1.rref);
            CHECK(r2.rref == r1.rref);
            CHECK(r2.rank == r1.rank);
        }
    }
}

TEST_CASE("kernel basis") {
    const FieldSpec& f3 = make_field(3, 1);
    CHECK(kernel_basis(Mat::identity(f3, 3)).cols() == 0);

    Mat zero(f3, 3, 3);
    CHECK(kernel_basis(zero) == Mat::identity(f3, 3));

    Mat d = diag_matrix(f3, {1, 0});
    Mat k = kernel_basis(d);
    CHECK(k.cols() == 1);
    CHECK(k == from_ints(f3, {{0}, {1}}));

    Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const FieldSpec& f = make_field(5, 1);
        Mat m = nilspace::testing::random_matrix(rng, f, 3, 5);
        Mat ker = kernel_basis(m);
        CHECK(ker.cols() == 5 - rank(m));
        CHECK((m * ker).is_zero());
        CHECK(rank(ker) == ker.cols());
    }
}

TEST_CASE("solve and inverse") {
    Rng rng(11);
    const FieldSpec& f7 = make_field(7, 1);
    for (int trial = 0; trial < 25; ++trial) {
        Mat a = nilspace::testing::random_invertible(rng, f7, 4);
        Mat b = nilspace::testing::random_matrix(rng, f7, 4, 2);
        auto x = solve(a, b);
        REQUIRE(x.has_value());
        CHECK(a * *x == b);
        CHECK(a * inverse(a) == Mat::identity(f7, 4));
    }
    // inconsistent system
    Mat a = from_ints(f7, {{1, 0}, {1, 0}});
    Mat b = from_ints(f7, {{1}, {2}});
    CHECK(!solve(a, b).has_value());
}

TEST_CASE("characteristic polynomial, frozen values") {
    const FieldSpec& f3 = make_field(3, 1);
    const FieldSpec& f5 = make_field(5, 1);

    CharPoly z = char_poly(Mat(f5, 2, 2));
    CHECK(z.coeffs == std::vector<Scalar>{Scalar(f5, 1), Scalar(f5, 0), Scalar(f5, 0)});

    CharPoly id = char_poly(Mat::identity(f5, 2)); // (t-1)^2
    CHECK(id.coeffs == std::vector<Scalar>{Scalar(f5, 1), Scalar(f5, -2), Scalar(f5, 1)});

    CharPoly sw = char_poly(from_ints(f3, {{0, 1}, {1, 0}})); // t^2 - 1
    CHECK(sw.coeffs == std::vector<Scalar>{Scalar(f3, 1), Scalar(f3, 0), Scalar(f3, -1)});

    CHECK(char_poly(Mat(f3, 0, 0)).coeffs == std::vector<Scalar>{Scalar(f3, 1)});
    CHECK_THROWS_AS(char_poly(Mat(f3, 2, 3)), std::invalid_argument);

    // convention: c_0 = 1 and c_k = 0 beyond n
    CHECK(sw.c(0).is_one());
    CHECK(sw.c(5).is_zero());
}

TEST_CASE("Berkowitz agrees with the Leibniz oracle") {
    Rng rng(1234);
    for (int64_t q : {3, 5, 7, 9}) {
        const FieldSpec& f = make_field_from_order(q);
        for (int n = 1; n <= 4; ++n)
            for (int trial = 0; trial < 15; ++trial) {
                Mat m = nilspace::testing::random_matrix(rng, f, n, n);
                CHECK(char_poly(m).coeffs == leibniz_char_poly(m));
            }
    }
}

TEST_CASE("nilpotency, both routes") {
    const FieldSpec& f3 = make_field(3, 1);
    Rng rng(99);

    Mat strict = nilspace::testing::random_strict_upper(rng, f3, 4);
    CHECK(is_nilpotent(strict));
    CHECK(!is_nilpotent(Mat::identity(f3, 4)));
    CHECK(is_nilpotent(Mat(f3, 0, 0)));
    CHECK_THROWS_AS(is_nilpotent(Mat(f3, 2, 3)), std::invalid_argument);

    // nilpotent iff the characteristic polynomial is t^n, over random samples
    for (int64_t q : {3, 5, 9}) {
        const FieldSpec& f = make_field_from_order(q);
        for (int n = 1; n <= 6; ++n)
            for (int trial = 0; trial < 10; ++trial) {
                Mat m = nilspace::testing::random_matrix(rng, f, n, n);
                CharPoly cp = char_poly(m);
                bool trivial = true;
                for (int k = 1; k <= n; ++k)
                    if (!cp.coeffs[k].is_zero()) trivial = false;
                CHECK(is_nilpotent(m) == trivial);

                Mat g = nilspace::testing::random_invertible(rng, f, n);
                Mat nil = g * nilspace::testing::random_strict_upper(rng, f, n) * inverse(g);
                CHECK(is_nilpotent(nil));
            }
    }
}

TEST_CASE("trace commutes under cyclic exchange") {
    Rng rng(5);
    const FieldSpec& f9 = make_field(3, 2);
    for (int trial = 0; trial < 30; ++trial) {
        Mat m = nilspace::testing::random_matrix(rng, f9, 3, 4);
        Mat n = nilspace::testing::random_matrix(rng, f9, 4, 3);
        CHECK((m * n).trace() == (n * m).trace());
    }
}

TEST_CASE("ck_derivative: base cases") {
    const FieldSpec& f7 = make_field(7, 1);
    Rng rng(17);

    // c_1(sB) = -s tr(B), so the derivative at 0 is -tr(B)
    Mat zero(f7, 4, 4);
    for (int trial = 0; trial < 10; ++trial) {
        Mat b = nilspace::testing::random_matrix(rng, f7, 4, 4);
        CHECK(ck_derivative(zero, b, 1) == -b.trace());
    }

    // nilpotent a with tr(a^i b) = 0 for all i < k forces derivative 0
    Mat a(f7, 3, 3);
    a.at(0, 1) = Scalar(f7, 1);
    a.at(1, 2) = Scalar(f7, 1);
    Mat b(f7, 3, 3);
    b.at(0, 1) = Scalar(f7, 3); // tr(b) = tr(ab) = tr(a^2 b) = 0
    for (int i = 0; i < 3; ++i)
        REQUIRE((detail::mat_power(a, i) * b).trace().is_zero());
    for (int k = 1; k <= 3; ++k) CHECK(ck_derivative(a, b, k).is_zero());

    CHECK_THROWS_AS(ck_derivative(Mat(f7, 2, 2), Mat(f7, 3, 3), 1), std::invalid_argument);
    CHECK_THROWS_AS(ck_derivative(zero, zero, 0), std::invalid_argument);
    CHECK(ck_derivative(zero, zero, 9).is_zero()); // c_k = 0 for k > n
}

TEST_CASE("ck_derivative equals the trace expansion and the interpolation oracle") {
    Rng rng(31337);
    for (int64_t q : {5, 7, 9}) {
        const FieldSpec& f = make_field_from_order(q);
        for (int n = 2; n <= 4; ++n)
            for (int k = 1; k <= std::min(3, n); ++k)
                for (int trial = 0; trial < 8; ++trial) {
                    Mat a = nilspace::testing::random_matrix(rng, f, n, n);
                    Mat b = nilspace::testing::random_matrix(rng, f, n, n);
                    Scalar d = ck_derivative(a, b, k);

                    // -sum_{i<k} c_{k-1-i}(a) tr(a^i b)
                    CharPoly ca = char_poly(a);
                    Scalar rhs = Scalar::zero(f);
                    Mat apow = Mat::identity(f, n);
                    for (int i = 0; i < k; ++i) {
                        rhs += ca.c(k - 1 - i) * (apow * b).trace();
                        apow = apow * a;
                    }
                    CHECK(d == -rhs);

                    // interpolation oracle: c_k(a+sb) is a degree <= k
                    // polynomial in s; sample k+1 distinct points with the
                    // Leibniz char poly and read the linear coefficient.
                    // (from_index, not residues: over GF(9) the residues
                    // 0..3 would collide mod 3)
                    int pts = k + 1;
                    Mat vand(f, pts, pts);
                    Mat vals(f, pts, 1);
                    for (int r = 0; r < pts; ++r) {
                        Scalar s = Scalar::from_index(f, r);
                        Scalar pw = Scalar::one(f);
                        for (int c = 0; c < pts; ++c) {
                            vand.at(r, c) = pw;
                            pw *= s;
                        }
                        vals.at(r, 0) = leibniz_char_poly(a + b * s)[k];
                    }
                    auto coeffs = solve(vand, vals);
                    REQUIRE(coeffs.has_value());
                    CHECK(d == coeffs->at(1, 0));
                }
    }
}

TEST_CASE("conj_transpose") {
    const FieldSpec& f9 = make_field(3, 2);
    Scalar i = Scalar::t(f9);

    Mat m(f9, 1, 1);
    m.at(0, 0) = i;
    CHECK(conj_transpose(m).at(0, 0) == -i);

    CHECK(conj_transpose(Mat::identity(f9, 3)) == Mat::identity(f9, 3));

    // a Hermitian matrix is fixed
    Mat h(f9, 2, 2);
    h.at(0, 0) = Scalar(f9, 2);
    h.at(0, 1) = Scalar::from_coeffs(f9, 1, 2);
    h.at(1, 0) = Scalar::from_coeffs(f9, 1, -2);
    h.at(1, 1) = Scalar(f9, 1);
    CHECK(conj_transpose(h) == h);

    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Mat r = nilspace::testing::random_matrix(rng, f9, 3, 2);
        CHECK(conj_transpose(conj_transpose(r)) == r);
    }

    // reduces to transpose on prime fields
    const FieldSpec& f5 = make_field(5, 1);
    Mat p = from_ints(f5, {{1, 2}, {3, 4}});
    CHECK(conj_transpose(p) == p.transpose());
}

TEST_CASE("block assembly and empty blocks") {
    const FieldSpec& f3 = make_field(3, 1);
    Mat a = from_ints(f3, {{1}});
    Mat k2 = block_matrix(f3, {{Mat(f3, 1, 1), Mat::identity(f3, 1)},
                               {-Mat::identity(f3, 1), Mat(f3, 1, 1)}});
    CHECK(k2 == from_ints(f3, {{0, 1}, {2, 0}}));

    // void middle block, as in the bordered canonical Grams
    Mat s = block_matrix(f3, {{Mat(f3, 1, 1), Mat(f3, 1, 0), Mat::identity(f3, 1)},
                              {Mat(f3, 0, 1), Mat(f3, 0, 0), Mat(f3, 0, 1)},
                              {Mat::identity(f3, 1), Mat(f3, 1, 0), Mat(f3, 1, 1)}});
    CHECK(s == from_ints(f3, {{0, 1}, {1, 0}}));

    CHECK_THROWS_AS(block_matrix(f3, {{a, Mat(f3, 2, 2)}}), std::invalid_argument);
}

TEST_CASE("matrix text format round-trip") {
    const FieldSpec& f5 = make_field(5, 1);
    Mat m = from_ints(f5, {{1, 2}, {3, 4}});
    CHECK(to_text(m) == "1,2;3,4");
    CHECK(mat_from_text(f5, "1,2;3,4") == m);

    const FieldSpec& f9 = make_field(3, 2);
    Mat h(f9, 1, 2);
    h.at(0, 0) = Scalar::from_coeffs(f9, 1, 2);
    h.at(0, 1) = Scalar(f9, 2);
    CHECK(mat_from_text(f9, to_text(h)) == h);
}
