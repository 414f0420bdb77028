#include <catch2/catch_amalgamated.hpp>

#include "nilspace/nilspaces.hpp"
#include "test_support.hpp"

using namespace nilspace;
using nilspace::testing::Rng;

namespace {

Vec vec_of(const FieldSpec& f, std::initializer_list<int64_t> entries) {
    Vec v(f, static_cast<int>(entries.size()), 1);
    int i = 0;
    for (int64_t e : entries) v.at(i++, 0) = Scalar(f, e);
    return v;
}

} // namespace

TEST_CASE("structured predicates") {
    const FieldSpec& f3 = make_field(3, 1);
    const FieldSpec& f5 = make_field(5, 1);
    const FieldSpec& f9 = make_field(3, 2);

    Form sym = hyperbolic_form(f3, 4);
    Form alt = kn_form(f3, 4);

    CHECK(is_b_symmetric(Mat::identity(f3, 4), sym));
    CHECK(!is_b_symmetric(Mat::identity(f3, 4), alt)); // gram*I = gram is alternating, not symmetric
    CHECK(is_b_alternating(Mat(f3, 4, 4), alt));
    CHECK(!is_b_alternating(Mat::identity(f3, 4), sym));

    // K_n block shapes
    Rng rng(8);
    Mat a = nilspace::testing::random_matrix(rng, f3, 2, 2);
    Mat bs = nilspace::testing::random_matrix(rng, f3, 2, 2);
    Mat cs = nilspace::testing::random_matrix(rng, f3, 2, 2);
    Mat b_sym = bs + bs.transpose(), c_sym = cs + cs.transpose();
    Mat b_alt = bs - bs.transpose(), c_alt = cs - cs.transpose();
    CHECK(is_b_symmetric(block_matrix(f3, {{a, c_sym}, {b_sym, -a.transpose()}}), alt));
    CHECK(is_b_alternating(block_matrix(f3, {{a, c_alt}, {b_alt, a.transpose()}}), alt));

    Mat unstructured = from_ints(f5, {{1, 1, 0}, {0, 1, 0}, {0, 0, 1}});
    Form d5(FormKind::symmetric, diag_matrix(f5, {1, 2, 3}));
    CHECK(!is_b_symmetric(unstructured, d5));
    CHECK(!is_b_alternating(unstructured, d5));

    Form h = hyperbolic_hermitian_form(f9, 2);
    CHECK(is_b_hermitian(Mat::identity(f9, 2), h));
    CHECK(!is_b_hermitian(Mat::identity(f9, 2) * Scalar::t(f9), h)); // (iH)* = -iH
    CHECK_THROWS_AS(is_b_symmetric(Mat::identity(f9, 2), h), std::invalid_argument);
    CHECK_THROWS_AS(is_b_hermitian(Mat::identity(f3, 4), sym), std::invalid_argument);

    // Hermitian block shape [[A,(PC)*,E],[0,0,C],[0,0,A*]] for the bordered Gram
    Mat p1 = Mat::identity(f9, 1);
    Form h3(FormKind::hermitian, canonical_gram(f9, FormKind::hermitian, 1, p1));
    Mat am = nilspace::testing::random_matrix(rng, f9, 1, 1);
    Mat cm = nilspace::testing::random_matrix(rng, f9, 1, 1);
    Mat em(f9, 1, 1);
    em.at(0, 0) = Scalar(f9, 2); // Hermitian 1x1 = fixed-field entry
    Mat block = block_matrix(f9, {{am, conj_transpose(p1 * cm), em},
                                  {Mat(f9, 1, 1), Mat(f9, 1, 1), cm},
                                  {Mat(f9, 1, 1), Mat(f9, 1, 1), conj_transpose(am)}});
    CHECK(is_b_hermitian(block, h3));
}

TEST_CASE("symmetric tensor") {
    const FieldSpec& f3 = make_field(3, 1);
    Form dot(FormKind::symmetric, Mat::identity(f3, 2));

    Vec e1 = vec_of(f3, {1, 0}), e2 = vec_of(f3, {0, 1});
    CHECK(sym_tensor(e1, e2, dot) == from_ints(f3, {{0, 1}, {1, 0}}));

    // x (x) x doubles the rank-one projector z -> b(x,z) x
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        Vec x = nilspace::testing::random_matrix(rng, f3, 2, 1);
        CHECK(sym_tensor(x, x, dot) == x * dot.ortho_rows(x) * Scalar(f3, 2));
    }

    // bilinear and symmetric in (x, y)
    Form h4 = hyperbolic_form(f3, 4);
    for (int trial = 0; trial < 10; ++trial) {
        Vec x = nilspace::testing::random_matrix(rng, f3, 4, 1);
        Vec y = nilspace::testing::random_matrix(rng, f3, 4, 1);
        Vec z = nilspace::testing::random_matrix(rng, f3, 4, 1);
        CHECK(sym_tensor(x, y, h4) == sym_tensor(y, x, h4));
        CHECK(sym_tensor(x + z, y, h4) == sym_tensor(x, y, h4) + sym_tensor(z, y, h4));
    }

    // singular orthogonal pair gives a nilpotent tensor of index <= 3
    Vec x = vec_of(f3, {1, 0, 0, 0}), y = vec_of(f3, {0, 1, 0, 0});
    REQUIRE(h4.eval(x, x).is_zero());
    REQUIRE(h4.eval(x, y).is_zero());
    Mat u = sym_tensor(x, y, h4);
    CHECK(is_nilpotent(u));
    CHECK((u * u * u).is_zero());
}

TEST_CASE("alternating tensor") {
    const FieldSpec& f3 = make_field(3, 1);
    Form k2 = kn_form(f3, 2);

    Rng rng(14);
    for (int trial = 0; trial < 10; ++trial) {
        Vec x = nilspace::testing::random_matrix(rng, f3, 2, 1);
        CHECK(alt_tensor(x, x, k2).is_zero());
    }

    Vec e1 = vec_of(f3, {1, 0}), e2 = vec_of(f3, {0, 1});
    Mat t = alt_tensor(e1, e2, k2);
    CHECK(t == from_ints(f3, {{2, 0}, {0, 2}})); // -identity
    CHECK(is_b_alternating(t, k2));

    // kernel of y -> x /\ y is exactly the line F x
    Form k4 = kn_form(f3, 4);
    Vec x = vec_of(f3, {1, 2, 0, 1});
    int in_kernel = 0;
    for (int64_t idx = 0; idx < 81; ++idx) {
        Vec y(f3, 4, 1);
        int64_t rest = idx;
        for (int i = 0; i < 4; ++i) {
            y.at(i, 0) = Scalar(f3, rest % 3);
            rest /= 3;
        }
        bool zero_tensor = alt_tensor(x, y, k4).is_zero();
        bool on_line = rank(hstack(x, y)) <= 1;
        CHECK(zero_tensor == on_line);
        if (zero_tensor) ++in_kernel;
    }
    CHECK(in_kernel == 3);
}

TEST_CASE("hermitian tensor") {
    const FieldSpec& f9 = make_field(3, 2);
    Form h = hyperbolic_hermitian_form(f9, 2);

    Vec x = vec_of(f9, {1, 0});
    REQUIRE(h.eval(x, x).is_zero());
    CHECK(is_b_hermitian(herm_tensor(x, x, h), h));

    // kernel of y -> x (x) y is exactly {lambda x : Tr(lambda) = 0},
    // checked over every y in the plane
    for (int64_t yi = 0; yi < 81; ++yi) {
        Vec y(f9, 2, 1);
        y.at(0, 0) = Scalar::from_index(f9, yi % 9);
        y.at(1, 0) = Scalar::from_index(f9, yi / 9);
        bool killed = herm_tensor(x, y, h).is_zero();
        bool on_line = rank(hstack(x, y)) <= 1;
        Scalar lambda = y.at(0, 0); // x = e_1, so y = lambda x has lambda in slot 0
        CHECK(killed == (on_line && tr_rel(lambda).is_zero()));
    }

    // K-bilinearity and symmetry
    Rng rng(6);
    const FieldSpec& f3 = make_field(3, 1);
    for (int trial = 0; trial < 10; ++trial) {
        Vec a = nilspace::testing::random_matrix(rng, f9, 2, 1);
        Vec b = nilspace::testing::random_matrix(rng, f9, 2, 1);
        CHECK(herm_tensor(a, b, h) == herm_tensor(b, a, h));
        for (int64_t c = 0; c < 3; ++c)
            CHECK(herm_tensor(a, b * Scalar(f9, c), h) ==
                  herm_tensor(a, b, h) * Scalar(f9, c));
    }

    // singular orthogonal pair is nilpotent with index <= 3
    Form h4 = hyperbolic_hermitian_form(f9, 4);
    Vec xx = vec_of(f9, {1, 0, 0, 0}), yy = vec_of(f9, {0, 1, 0, 0});
    Mat u = herm_tensor(xx, yy, h4);
    CHECK(is_nilpotent(u));
    CHECK((u * u * u).is_zero());
    (void)f3;
}

TEST_CASE("tensor recognition") {
    const FieldSpec& f3 = make_field(3, 1);
    const FieldSpec& f9 = make_field(3, 2);
    Form h4 = hyperbolic_form(f3, 4);
    Vec x = vec_of(f3, {1, 0, 0, 0});

    // zero map recognizes to the zero vector
    CHECK(tensor_recognize(Mat(f3, 4, 4), x, h4).is_zero());

    // rank-one b-symmetric input: a multiple of x (x) x
    Mat u1 = sym_tensor(x, x * Scalar(f3, 2), h4);
    Vec y1 = tensor_recognize(u1, x, h4);
    CHECK(sym_tensor(x, y1, h4) == u1);

    // construct/recognize round-trips for all three kinds
    Rng rng(123);
    auto roundtrip = [&](const Form& f, auto&& make) {
        std::optional<Vec> iso = find_isotropic(f);
        REQUIRE(iso.has_value());
        Mat perp = kernel_basis(f.ortho_rows(*iso));
        for (int trial = 0; trial < 12; ++trial) {
            Vec coef = nilspace::testing::random_matrix(rng, f.field(), perp.cols(), 1);
            Vec y = perp * coef;
            Mat u = make(*iso, y, f);
            Vec got = tensor_recognize(u, *iso, f);
            CHECK(make(*iso, got, f) == u);
            CHECK(f.eval(*iso, got).is_zero());
        }
    };
    roundtrip(h4, [](const Vec& a, const Vec& b, const Form& f) { return sym_tensor(a, b, f); });
    roundtrip(kn_form(f3, 4), [](const Vec& a, const Vec& b, const Form& f) { return alt_tensor(a, b, f); });
    roundtrip(hyperbolic_hermitian_form(f9, 2),
              [](const Vec& a, const Vec& b, const Form& f) { return herm_tensor(a, b, f); });
    roundtrip(Form(FormKind::symmetric, diag_matrix(make_field(5, 1), {1, -1, 1})),
              [](const Vec& a, const Vec& b, const Form& f) { return sym_tensor(a, b, f); });

    // precondition violations are rejected
    CHECK_THROWS_AS(tensor_recognize(Mat(f3, 4, 4), Vec(f3, 4, 1), h4), std::invalid_argument);
    Vec nonsing = vec_of(f3, {1, 0, 1, 0}); // b(x,x) = 2
    CHECK_THROWS_AS(tensor_recognize(Mat(f3, 4, 4), nonsing, h4), std::invalid_argument);
    Mat moves_x = sym_tensor(vec_of(f3, {0, 1, 0, 0}), vec_of(f3, {0, 0, 1, 0}), h4);
    CHECK_THROWS_AS(tensor_recognize(moves_x, x, h4), std::invalid_argument);
}

TEST_CASE("structured ambient spaces") {
    const FieldSpec& f3 = make_field(3, 1);
    const FieldSpec& f9 = make_field(3, 2);

    Form h4 = hyperbolic_form(f3, 4);
    Form k4 = kn_form(f3, 4);
    CHECK(structured_ambient(h4, FormKind::symmetric).k_dim() == 10);  // n(n+1)/2
    CHECK(structured_ambient(h4, FormKind::alternating).k_dim() == 6); // n(n-1)/2
    CHECK(structured_ambient(k4, FormKind::symmetric).k_dim() == 10);
    CHECK(structured_ambient(k4, FormKind::alternating).k_dim() == 6);

    // model check: S_{K_4} = [[A,C],[B,-A^T]] with B, C symmetric
    std::vector<Mat> gens;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Mat a(f3, 2, 2);
            a.at(i, j) = Scalar::one(f3);
            gens.push_back(block_matrix(f3, {{a, Mat(f3, 2, 2)}, {Mat(f3, 2, 2), -a.transpose()}}));
            Mat s(f3, 2, 2);
            s.at(i, j) = Scalar::one(f3);
            s.at(j, i) = Scalar::one(f3);
            gens.push_back(block_matrix(f3, {{Mat(f3, 2, 2), s}, {Mat(f3, 2, 2), Mat(f3, 2, 2)}}));
            gens.push_back(block_matrix(f3, {{Mat(f3, 2, 2), Mat(f3, 2, 2)}, {s, Mat(f3, 2, 2)}}));
        }
    CHECK(MatSubspace::span(f3, f3, 4, gens) == structured_ambient(k4, FormKind::symmetric));

    Form hh2 = hyperbolic_hermitian_form(f9, 2);
    CHECK(structured_ambient(hh2, FormKind::hermitian).k_dim() == 4); // n^2 over K
    CHECK(structured_ambient(hh2, FormKind::hermitian).base_field() == make_field(3, 1));
    CHECK_THROWS_AS(structured_ambient(hh2, FormKind::symmetric), std::invalid_argument);
    CHECK_THROWS_AS(structured_ambient(h4, FormKind::hermitian), std::invalid_argument);
}

TEST_CASE("ws space: frozen small case and the K_n model") {
    const FieldSpec& f3 = make_field(3, 1);

    Form h2 = hyperbolic_form(f3, 2);
    MatSubspace ws = ws_space(h2, maximal_singular_flag(h2));
    CHECK(ws.k_dim() == 1);
    CHECK(ws.basis()[0] == from_ints(f3, {{0, 1}, {0, 0}}));

    // WS_nu model for K_n: [[N,C],[0,-N^T]], N strict upper, C symmetric
    for (int n : {4, 6}) {
        int nu = n / 2;
        Form kn = kn_form(f3, n);
        std::vector<Mat> gens;
        for (int i = 0; i < nu; ++i)
            for (int j = i + 1; j < nu; ++j) {
                Mat nb(f3, nu, nu);
                nb.at(i, j) = Scalar::one(f3);
                gens.push_back(block_matrix(f3, {{nb, Mat(f3, nu, nu)},
                                                 {Mat(f3, nu, nu), -nb.transpose()}}));
            }
        for (int i = 0; i < nu; ++i)
            for (int j = i; j < nu; ++j) {
                Mat c(f3, nu, nu);
                c.at(i, j) = Scalar::one(f3);
                c.at(j, i) = Scalar::one(f3);
                gens.push_back(block_matrix(f3, {{Mat(f3, nu, nu), c},
                                                 {Mat(f3, nu, nu), Mat(f3, nu, nu)}}));
            }
        MatSubspace model = MatSubspace::span(f3, f3, n, gens);
        MatSubspace built = ws_space(kn, maximal_singular_flag(kn));
        CHECK(built.k_dim() == nu * (n - nu));
        CHECK(built == model);
    }

    // Witt index zero gives the zero space
    Form noniso(FormKind::symmetric, diag_matrix(f3, {1, 1}));
    CHECK(ws_space(noniso, Flag::trivial(f3, 2)).k_dim() == 0);
}

TEST_CASE("wa space: K_n model and the trivial hyperbolic case") {
    const FieldSpec& f3 = make_field(3, 1);

    Form h2 = hyperbolic_form(f3, 2);
    CHECK(wa_space(h2, maximal_singular_flag(h2)).k_dim() == 0); // nu(n-nu-1) = 0

    for (int n : {4, 6}) {
        int nu = n / 2;
        Form kn = kn_form(f3, n);
        std::vector<Mat> gens;
        for (int i = 0; i < nu; ++i)
            for (int j = i + 1; j < nu; ++j) {
                Mat nb(f3, nu, nu);
                nb.at(i, j) = Scalar::one(f3);
                gens.push_back(block_matrix(f3, {{nb, Mat(f3, nu, nu)},
                                                 {Mat(f3, nu, nu), nb.transpose()}}));
                Mat c(f3, nu, nu);
                c.at(i, j) = Scalar::one(f3);
                c.at(j, i) = -Scalar::one(f3);
                gens.push_back(block_matrix(f3, {{Mat(f3, nu, nu), c},
                                                 {Mat(f3, nu, nu), Mat(f3, nu, nu)}}));
            }
        MatSubspace model = MatSubspace::span(f3, f3, n, gens);
        MatSubspace built = wa_space(kn, maximal_singular_flag(kn));
        CHECK(built.k_dim() == nu * (n - nu - 1));
        CHECK(built == model);
    }

    // symmetric Witt-index-1 form in dimension 3: dimension 1*(3-1-1) = 1
    Form d(FormKind::symmetric, diag_matrix(f3, {1, -1, 1}));
    CHECK(wa_space(d, maximal_singular_flag(d)).k_dim() == 1);
}

TEST_CASE("wh space dimensions") {
    const FieldSpec& f9 = make_field(3, 2);

    Form h2 = hyperbolic_hermitian_form(f9, 2);
    MatSubspace wh2 = wh_space(h2, maximal_singular_flag(h2));
    CHECK(wh2.k_dim() == 1); // nu(2n-2nu-1) with nu=1, n=2
    CHECK(wh2.basis()[0] == from_ints(f9, {{0, 1}, {0, 0}}));

    Form h3(FormKind::hermitian, canonical_gram(f9, FormKind::hermitian, 1, Mat::identity(f9, 1)));
    CHECK(wh_space(h3, maximal_singular_flag(h3)).k_dim() == 3); // 1*(6-2-1)

    Form h4 = hyperbolic_hermitian_form(f9, 4);
    CHECK(wh_space(h4, maximal_singular_flag(h4)).k_dim() == 2 * (8 - 4 - 1));

    Form noniso(FormKind::hermitian, diag_matrix(f9, {1}));
    CHECK(wh_space(noniso, Flag::trivial(f9, 1)).k_dim() == 0);
}

TEST_CASE("adapted (Q != 0) and strongly adapted paths build the same space") {
    const FieldSpec& f5 = make_field(5, 1);
    Form d(FormKind::symmetric, diag_matrix(f5, {1, -1, 1}));
    Flag flag = maximal_singular_flag(d);
    AdaptedBasis plain = adapted_basis(d, flag);
    REQUIRE(!plain.strong);
    CHECK(structured_flag_space(d, plain, FormKind::symmetric, flag) == ws_space(d, flag));
    CHECK(structured_flag_space(d, plain, FormKind::alternating, flag) == wa_space(d, flag));

    const FieldSpec& f9 = make_field(3, 2);
    Form h(FormKind::hermitian, diag_matrix(f9, {1, 2}));
    Flag hf = maximal_singular_flag(h);
    AdaptedBasis hplain = adapted_basis(h, hf);
    REQUIRE(!hplain.strong);
    CHECK(structured_flag_space(h, hplain, FormKind::hermitian, hf) == wh_space(h, hf));
}

TEST_CASE("every constructed basis element is structured, nilpotent and flag-stabilizing") {
    Rng rng(55);
    const FieldSpec& f3 = make_field(3, 1);
    const FieldSpec& f9 = make_field(3, 2);

    auto inspect = [](const Form& f, const Flag& flag, const MatSubspace& s, FormKind structure) {
        for (const Mat& u : s.basis()) {
            bool structured = structure == FormKind::symmetric ? is_b_symmetric(u, f)
                              : structure == FormKind::alternating ? is_b_alternating(u, f)
                                                                   : is_b_hermitian(u, f);
            CHECK(structured);
            CHECK(is_nilpotent(u));
            CHECK(stabilizes_flag(u, flag));
        }
    };

    for (const Form& f : {hyperbolic_form(f3, 4), kn_form(f3, 4),
                          Form(FormKind::symmetric, diag_matrix(f3, {1, -1, 1}))}) {
        Flag flag = maximal_singular_flag(f);
        inspect(f, flag, ws_space(f, flag), FormKind::symmetric);
        inspect(f, flag, wa_space(f, flag), FormKind::alternating);
    }
    Form hh = hyperbolic_hermitian_form(f9, 4);
    Flag hflag = maximal_singular_flag(hh);
    inspect(hh, hflag, wh_space(hh, hflag), FormKind::hermitian);
}

TEST_CASE("trace orthogonality against flag tensors") {
    const FieldSpec& f3 = make_field(3, 1);
    const FieldSpec& f9 = make_field(3, 2);

    // tensors of flag vectors live in the constructed space, and pair to zero
    Form h4 = hyperbolic_form(f3, 4);
    Flag flag = maximal_singular_flag(h4);
    MatSubspace ws = ws_space(h4, flag);
    for (int i = 1; i <= flag.length(); ++i)
        for (int j = 1; j <= flag.length(); ++j) {
            Vec x = flag.full().col(i - 1), y = flag.full().col(j - 1);
            Mat t = sym_tensor(x, y, h4);
            CHECK(ws.contains(t));
            for (const Mat& u : ws.basis()) CHECK(h4.eval(u * x, y).is_zero());
        }

    Form k4 = kn_form(f3, 4);
    Flag kflag = maximal_singular_flag(k4);
    MatSubspace wa = wa_space(k4, kflag);
    for (int i = 1; i <= kflag.length(); ++i)
        for (int j = 1; j <= kflag.length(); ++j) {
            Vec x = kflag.full().col(i - 1), y = kflag.full().col(j - 1);
            if (i == j) continue; // x /\ x = 0
            Mat t = alt_tensor(x, y, k4);
            CHECK(wa.contains(t));
            for (const Mat& u : wa.basis()) CHECK(k4.eval(u * x, y).is_zero());
        }

    Form hh = hyperbolic_hermitian_form(f9, 4);
    Flag hflag = maximal_singular_flag(hh);
    MatSubspace wh = wh_space(hh, hflag);
    for (int i = 1; i <= hflag.length(); ++i)
        for (int j = 1; j <= hflag.length(); ++j) {
            Vec x = hflag.full().col(i - 1), y = hflag.full().col(j - 1);
            Mat t = herm_tensor(x, y, hh);
            CHECK(wh.contains(t));
            for (const Mat& u : wh.basis()) CHECK(tr_rel(hh.eval(y, u * x)).is_zero());
        }
}

TEST_CASE("general max space") {
    const FieldSpec& f3 = make_field(3, 1);
    const FieldSpec& f5 = make_field(5, 1);

    // non-degenerate input reduces to the flag space
    Form h4 = hyperbolic_form(f3, 4);
    CHECK(general_max_space(h4, FormKind::symmetric) == ws_space(h4, maximal_singular_flag(h4)));
    Form k4 = kn_form(f3, 4);
    CHECK(general_max_space(k4, FormKind::alternating) == wa_space(k4, maximal_singular_flag(k4)));

    // zero form: the whole strictly upper-triangular algebra
    Form zero3(FormKind::symmetric, Mat(f3, 3, 3));
    MatSubspace z = general_max_space(zero3, FormKind::symmetric);
    CHECK(z.k_dim() == 3);
    std::vector<Mat> nt;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            Mat e(f3, 3, 3);
            e.at(i, j) = Scalar::one(f3);
            nt.push_back(e);
        }
    CHECK(z == MatSubspace::span(f3, f3, 3, nt));

    // rank-2 and rank-1 degenerate diagonals over GF(5)
    Form d2(FormKind::symmetric, diag_matrix(f5, {1, -1, 0}));
    MatSubspace g2s = general_max_space(d2, FormKind::symmetric);
    CHECK(g2s.k_dim() == 3); // C(1,2) + 2*1 + 1*1
    MatSubspace g2a = general_max_space(d2, FormKind::alternating);
    CHECK(g2a.k_dim() == 2); // C(1,2) + 2*1 + 1*0

    Form d1(FormKind::symmetric, diag_matrix(f5, {1, 0, 0}));
    CHECK(general_max_space(d1, FormKind::symmetric).k_dim() == 3); // C(2,2) + 1*2 + 0
    CHECK(general_max_space(d1, FormKind::alternating).k_dim() == 3);

    // degenerate alternating form: K_2 bordered by a zero line
    Mat kg(f3, 3, 3);
    kg.at(0, 1) = Scalar::one(f3);
    kg.at(1, 0) = -Scalar::one(f3);
    Form kdeg(FormKind::alternating, kg); // n=3, r=2, nu=2
    CHECK(witt_index(kdeg) == 2);
    CHECK(general_max_space(kdeg, FormKind::symmetric).k_dim() == 3);   // 0 + 2 + 1*1
    CHECK(general_max_space(kdeg, FormKind::alternating).k_dim() == 2); // 0 + 2 + 1*0

    // exhaustive sample: every element is structured and nilpotent
    for (int64_t i = 0; i < g2s.element_count(); ++i) {
        Mat u = g2s.element_by_index(i);
        CHECK(is_b_symmetric(u, d2));
        CHECK(is_nilpotent(u));
    }
    for (int64_t i = 0; i < g2a.element_count(); ++i) {
        Mat u = g2a.element_by_index(i);
        CHECK(is_b_alternating(u, d2));
        CHECK(is_nilpotent(u));
    }

    CHECK_THROWS_AS(general_max_space(hyperbolic_hermitian_form(make_field(3, 2), 2), FormKind::hermitian),
                    std::invalid_argument);
}

TEST_CASE("square stability") {
    const FieldSpec& f3 = make_field(3, 1);
    const FieldSpec& f5 = make_field(5, 1);

    Form h4 = hyperbolic_form(f3, 4);
    MatSubspace ws = ws_space(h4, maximal_singular_flag(h4));
    CHECK(square_stability_check(ws, h4));

    Form k4 = kn_form(f3, 4);
    MatSubspace wa = wa_space(k4, maximal_singular_flag(k4));
    CHECK(square_stability_check(wa, k4));

    // zero space is trivially stable
    Form noniso(FormKind::symmetric, diag_matrix(f3, {1, 1}));
    CHECK(square_stability_check(ws_space(noniso, Flag::trivial(f3, 2)), noniso));

    // corrupted space: E_12 and E_21 are both b-symmetric for the hyperbolic
    // plane but their sum squares to the identity
    Form h2 = hyperbolic_form(f3, 2);
    Mat e12(f3, 2, 2), e21(f3, 2, 2);
    e12.at(0, 1) = Scalar::one(f3);
    e21.at(1, 0) = Scalar::one(f3);
    MatSubspace corrupted = MatSubspace::span(f3, f3, 2, {e12, e21});
    CHECK(!square_stability_check(corrupted, h2));

    // perturbing one block of a good basis is detected too
    std::vector<Mat> bad = ws.basis();
    Mat lower(f3, 4, 4);
    lower.at(2, 0) = Scalar::one(f3);
    lower.at(3, 1) = Scalar::one(f3); // [[0,0],[B,0]] with B = I, still b-symmetric
    REQUIRE(is_b_symmetric(lower, h4));
    bad[0] = bad[0] + lower;
    CHECK(!square_stability_check(MatSubspace::span(f3, f3, 4, bad), h4));

    CHECK_THROWS_AS(square_stability_check(ws, h4, 3), BudgetExceeded);
    CHECK_THROWS_AS(square_stability_check(ws, k4), std::invalid_argument); // mismatched pair

    // cube stability holds once |F| > 3; over GF(3) it is informational only
    Form h4_5 = hyperbolic_form(f5, 4);
    MatSubspace ws5 = ws_space(h4_5, maximal_singular_flag(h4_5));
    bool cubes5 = true;
    for (int64_t i = 0; i < ws5.element_count(); ++i) {
        Mat u = ws5.element_by_index(i);
        if (!ws5.contains(u * u * u)) cubes5 = false;
    }
    CHECK(cubes5);
    bool cubes3 = true;
    for (int64_t i = 0; i < ws.element_count(); ++i) {
        Mat u = ws.element_by_index(i);
        if (!ws.contains(u * u * u)) cubes3 = false;
    }
    CHECK_NOFAIL(cubes3); // |F| = 3 sits below the threshold; recorded, not asserted
}
