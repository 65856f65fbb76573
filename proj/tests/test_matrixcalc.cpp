#include <catch2/catch_amalgamated.hpp>

#include "pidelab/matrixcalc.hpp"
#include "support.hpp"

using namespace pidelab;

TEST_CASE("block inequality margin anchors", "[matrixcalc]") {
    SymMatrix zero2(2);
    CHECK(check_block_inequality(zero2, zero2, zero2) == Catch::Approx(0.0).margin(1e-14));
    SymMatrix id = SymMatrix::identity(2);
    CHECK(check_block_inequality(id.scaled(-1.0), id, zero2) == Catch::Approx(1.0).margin(1e-12));
    CHECK(check_block_inequality(id, id.scaled(-1.0), zero2) == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("extract_blocks: identity split and strict checking", "[matrixcalc]") {
    Rng rng(11);
    BlockTriple t = make_valid_triple(rng, 3, 0, false);
    auto [a, b] = extract_blocks(t);
    CHECK(a.X.m == t.X.m);
    CHECK(b.X.dim() == 0);

    BlockTriple bad = make_valid_triple(rng, 2, 1, false);  // generically not block diagonal
    bad.X.set(0, 2, 0.5);
    CHECK_THROWS_AS(extract_blocks(bad), std::invalid_argument);
}

TEST_CASE("extracted sub-triples never violate the inequality", "[matrixcalc]") {
    Rng rng(42);
    for (int i = 0; i < 300; ++i) {
        BlockTriple t = make_valid_triple(rng, 2, 1, true);
        double parent = check_block_inequality(t);
        REQUIRE(parent >= -1e-9);
        auto [a, b] = extract_blocks(t);
        double ma = check_block_inequality(a);
        double mb = check_block_inequality(b);
        CHECK(ma >= -1e-9);
        CHECK(mb >= -1e-9);
        // interlacing: sub-block spectra sit inside the parent spectrum
        CHECK(ma >= parent - 1e-9);
        CHECK(mb >= parent - 1e-9);
    }
}

TEST_CASE("sup convolution anchors and the xi-grid oracle", "[matrixcalc]") {
    SymMatrix zero(3);
    CHECK(sup_convolve(zero, 0.7).m.cwiseAbs().maxCoeff() < 1e-14);

    SymMatrix X(2);
    X.set(0, 0, 1.0);
    X.set(1, 1, -1.0);
    auto S = sup_convolve(X, 0.5);
    CHECK(S(0, 0) == Catch::Approx(2.0).margin(1e-12));
    CHECK(S(1, 1) == Catch::Approx(-2.0 / 3.0).margin(1e-12));
    CHECK(std::abs(S(0, 1)) < 1e-14);

    // direct maximization on a xi grid must reproduce the eigen map
    for (const auto& z : {Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(0.6, -0.8)}) {
        double oracle = testsupport::grid_sup_convolution(X.m, 0.5, z);
        double mapped = z.dot(S.m * z);
        CHECK(oracle == Catch::Approx(mapped).margin(2e-5));
    }
}

TEST_CASE("divergent convolution throws", "[matrixcalc]") {
    CHECK_THROWS_AS(sup_convolve(SymMatrix::identity(2), 1.0), DivergentConvolution);
    CHECK_THROWS_AS(inf_convolve(SymMatrix::identity(2).scaled(-3.0), 0.5), DivergentConvolution);
}

TEST_CASE("monotone-convolution bounds (eq_mon_conv)", "[matrixcalc]") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        SymMatrix X = random_sym(rng, 3);
        double eps = 0.5 / std::max(X.spectral_norm(), 1e-9);
        auto Xs = sup_convolve(X, eps);
        CHECK((Xs - X).min_eigenvalue() >= -1e-10);                       // X <= X^eps
        CHECK((SymMatrix::identity(3).scaled(1.0 / eps) - Xs).min_eigenvalue() >= -1e-10);
        auto Yi = inf_convolve(X, eps);
        CHECK((X - Yi).min_eigenvalue() >= -1e-10);                       // Y_eps <= Y
        CHECK((Yi + SymMatrix::identity(3).scaled(1.0 / eps)).min_eigenvalue() >= -1e-10);
    }
}

TEST_CASE("sup convolution is monotone in the PSD order", "[matrixcalc]") {
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        SymMatrix X = random_sym(rng, 3);
        SymMatrix Xp = SymMatrix::from(X.m + random_psd(rng, 3, 0.3).m);
        double eps = 0.4 / std::max({X.spectral_norm(), Xp.spectral_norm(), 1e-9});
        CHECK((sup_convolve(Xp, eps) - sup_convolve(X, eps)).min_eigenvalue() >= -1e-9);
    }
}

TEST_CASE("convolution preserves the block inequality", "[matrixcalc]") {
    Rng rng(100);
    for (int i = 0; i < 200; ++i) {
        BlockTriple t = make_valid_triple(rng, 2, 1, false);
        double eps0 = convolution_epsilon0(t.X, t.Y, t.Z);
        double eps = rng.uniform(0.1, 0.9) * eps0;
        double m = check_block_inequality(sup_convolve(t.X, eps), inf_convolve(t.Y, eps),
                                          sup_convolve(t.Z, 2.0 * eps));
        CHECK(m >= -1e-9);
    }
}

TEST_CASE("closed-form convolution anchors", "[matrixcalc]") {
    auto A = conv_closed_form(1.0, 0.0, Vec::of(1, 0));
    CHECK(A(0, 0) == Catch::Approx(2.0).margin(1e-14));
    CHECK(A(1, 1) == Catch::Approx(2.0).margin(1e-14));

    auto B = conv_closed_form(1.0, 1.0, Vec::of(1, 0));
    CHECK(B(0, 0) == Catch::Approx(0.0).margin(1e-14));
    CHECK(B(1, 1) == Catch::Approx(2.0).margin(1e-14));

    auto C = conv_closed_form(2.0, 1.5, Vec::of(0, 1));
    CHECK(C(0, 0) == Catch::Approx(1.0).margin(1e-14));
    CHECK(C(1, 1) == Catch::Approx(-0.2).margin(1e-14));
}

TEST_CASE("closed form equals sup_convolve(Z, alpha/2)", "[matrixcalc]") {
    Rng rng(7);
    for (int i = 0; i < 200; ++i) {
        int d = 2 + rng.below(5);  // dims up to 6
        double alpha = rng.uniform(0.4, 3.0);
        double omega = rng.uniform(0.0, 1.95);
        Eigen::VectorXd a(d);
        for (int j = 0; j < d; ++j) a(j) = rng.normal();
        a.normalize();
        SymMatrix Z(d);
        for (int r = 0; r < d; ++r)
            for (int c = r; c < d; ++c)
                Z.set(r, c, (1.0 / alpha) * ((r == c ? 1.0 : 0.0) - omega * a(r) * a(c)));
        double diff =
            (sup_convolve(Z, 0.5 * alpha).m - conv_closed_form(alpha, omega, a).m).cwiseAbs().maxCoeff();
        CHECK(diff < 1e-10);
    }
}

TEST_CASE("closed form guards", "[matrixcalc]") {
    CHECK_THROWS_AS(conv_closed_form(0.0, 1.0, Vec::of(1, 0)), std::invalid_argument);
    CHECK_THROWS_AS(conv_closed_form(1.0, -0.5, Vec::of(1, 0)), std::invalid_argument);
}

TEST_CASE("trace bound anchors", "[matrixcalc]") {
    auto r0 = trace_bound_check(SymMatrix(2), SymMatrix(2), 1.0, 1.0, Vec::of(1, 0));
    CHECK(r0.bound == Catch::Approx(0.0).margin(1e-14));
    CHECK(r0.satisfied);

    SymMatrix X(2), Y(2);
    auto zc = conv_closed_form(1.0, 1.5, Vec::of(1, 0));
    X = SymMatrix::from(zc.m - Eigen::MatrixXd(zc.m * zc.m));  // valid by Schur with S2 = I
    // direct construction: S2 = I, S1 = Z I Z
    Y = SymMatrix::from(Eigen::MatrixXd::Identity(2, 2) - zc.m);
    auto r = trace_bound_check(X, Y, 1.0, 1.5, Vec::of(1, 0));
    CHECK(r.bound == Catch::Approx(-1.6).margin(1e-12));
    CHECK(r.satisfied);
}

TEST_CASE("trace bound on sampled valid pairs", "[matrixcalc]") {
    Rng rng(2024);
    for (int i = 0; i < 300; ++i) {
        double alpha = rng.uniform(0.5, 2.0);
        double omega = rng.uniform(1.0, 1.99);
        Vec ax = Vec::of(rng.normal(), rng.normal());
        if (norm(ax) < 1e-8) ax = Vec::of(1, 0);
        auto [X, Y] = make_trace_pair(rng, alpha, omega, ax);
        auto r = trace_bound_check(X, Y, alpha, omega, ax);
        CHECK(r.satisfied);
    }
}

TEST_CASE("trace precondition violation is invalid input", "[matrixcalc]") {
    SymMatrix X = SymMatrix::identity(2).scaled(10.0);
    SymMatrix Y = SymMatrix::identity(2).scaled(-10.0);
    CHECK_THROWS_AS(trace_bound_check(X, Y, 1.0, 1.5, Vec::of(1, 0)), std::invalid_argument);
}

TEST_CASE("trace bound is tight on the proof's construction", "[matrixcalc]") {
    for (double omega : {1.8, 1.9, 1.99}) {
        double alpha = 1.0;
        Vec ax = Vec::of(1, 0);
        auto Zc = conv_closed_form(alpha, omega, ax);
        double zaa = Zc(0, 0);
        SymMatrix X(2), Y(2);
        X.set(0, 0, 2.0 * zaa);
        Y.set(0, 0, -2.0 * zaa);
        auto r = trace_bound_check(X, Y, alpha, omega, ax);
        CHECK(r.satisfied);
        CHECK(std::abs(r.trace - r.bound) <= 0.05 * std::abs(r.bound));
    }
}

TEST_CASE("stable text form", "[matrixcalc]") {
    SymMatrix A(2);
    A.set(0, 0, 1.5);
    A.set(0, 1, -0.25);
    CHECK(A.to_text() == "2\n1.5 -0.25\n-0.25 0\n");
}
