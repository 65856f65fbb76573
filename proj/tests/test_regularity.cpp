#include <catch2/catch_amalgamated.hpp>

#include "pidelab/fields.hpp"
#include "pidelab/regularity.hpp"
#include "support.hpp"

using namespace pidelab;

TEST_CASE("modulus anchors on cosine", "[regularity]") {
    Geometry g(1, 0, 512);
    auto u = GridFunction::sample(g, [](const Vec& x) { return std::cos(2.0 * kPi * x[0]); });
    auto rep = modulus(u, 0);
    CHECK(rep.omega_at(0.25) == Catch::Approx(std::sqrt(2.0)).margin(1e-3));
    for (size_t i = 1; i < rep.omega.size(); ++i) CHECK(rep.omega[i] >= rep.omega[i - 1]);
    // omega(t) = 2 sin(pi t) at the recorded separations
    for (size_t i = 0; i < rep.t.size(); ++i) {
        if (rep.t[i] > 0.5) break;
        CHECK(rep.omega[i] == Catch::Approx(2.0 * std::sin(kPi * rep.t[i])).margin(2e-3));
    }
}

TEST_CASE("modulus of constants and block-constant fields", "[regularity]") {
    Geometry g(1, 1, 32);
    GridFunction c(g);
    for (auto& v : c.values()) v = 5.0;
    auto rep = modulus(c, 0);
    CHECK(rep.omega.back() == 0.0);

    auto u2 = GridFunction::sample(g, [](const Vec& x) { return std::cos(2.0 * kPi * x[1]); });
    auto rep1 = modulus(u2, 1);
    CHECK(rep1.omega.back() == 0.0);  // constant in block 1
    auto rep2 = modulus(u2, 2);
    CHECK(rep2.omega.back() > 1.0);
}

TEST_CASE("modulus invariances", "[regularity]") {
    Geometry g(1, 0, 64);
    Rng rng(5);
    auto u = random_trig_field(g, rng, 3, 1.0);
    auto base = modulus(u, 0);

    GridFunction shifted = u;
    for (auto& v : shifted.values()) v += 17.0;
    auto rep_s = modulus(shifted, 0);
    for (size_t i = 0; i < base.omega.size(); ++i)
        CHECK(rep_s.omega[i] == Catch::Approx(base.omega[i]).margin(1e-12));

    GridFunction scaled = u;
    scaled *= 3.0;
    auto rep_m = modulus(scaled, 0);
    for (size_t i = 0; i < base.omega.size(); ++i)
        CHECK(rep_m.omega[i] == Catch::Approx(3.0 * base.omega[i]).margin(1e-12));
}

TEST_CASE("partial modulus is bounded by the full modulus", "[regularity]") {
    Geometry g(1, 1, 24);
    Rng rng(9);
    auto u = random_trig_field(g, rng, 2, 1.0);
    auto full = modulus(u, 0);
    for (int which : {1, 2}) {
        auto part = modulus(u, which);
        for (size_t i = 0; i < part.t.size(); ++i)
            CHECK(part.omega[i] <= full.omega_at(part.t[i]) + 1e-12);
    }
}

TEST_CASE("exponent fits", "[regularity]") {
    Geometry g(1, 0, 512);
    auto u = GridFunction::sample(g, [](const Vec& x) { return std::cos(2.0 * kPi * x[0]); });
    auto rep = modulus(u, 0);
    auto [alpha, L] = fit_exponent(rep, 2.0 / 512, 0.1);
    CHECK(alpha == Catch::Approx(1.0).margin(0.02));
    CHECK(L == Catch::Approx(2.0 * kPi).epsilon(0.05));

    auto us = GridFunction::sample(
        g, [](const Vec& x) { return std::pow(std::abs(std::sin(kPi * x[0])), 0.5); });
    auto rep2 = modulus(us, 0);
    auto [alpha2, L2] = fit_exponent(rep2, 2.0 / 512, 0.1);
    (void)L2;
    CHECK(alpha2 == Catch::Approx(0.5).margin(0.03));

    GridFunction zero(g);
    auto rep3 = modulus(zero, 0);
    CHECK_THROWS_AS(fit_exponent(rep3, 2.0 / 512, 0.1), std::invalid_argument);
}

TEST_CASE("certifier anchors at n = 1024", "[regularity]") {
    Geometry g(1, 0, 1024);
    auto u = GridFunction::sample(g, [](const Vec& x) { return std::cos(2.0 * kPi * x[0]); });
    double L1 = certify(u, TestFunctionPhi::Family::holder, 1.0);
    CHECK(std::abs(L1 - 2.0 * kPi) <= 0.02 * 2.0 * kPi);
    double L05 = certify(u, TestFunctionPhi::Family::holder, 0.5);
    // stationarity tan(pi t) = 2 pi t at t* ~ 0.3710: max of 2 sin(pi t)/sqrt(t)
    CHECK(std::abs(L05 - 3.017) <= 0.02 * 3.017);
}

TEST_CASE("certifier equals the brute-force pairwise seminorm", "[regularity]") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        Geometry g(1, 0, 8 + 8 * (trial % 4));
        auto u = random_trig_field(g, rng, 3, 1.0);
        double alpha = 0.3 + 0.1 * (trial % 7);
        double cert = certify(u, TestFunctionPhi::Family::holder, alpha);
        double brute = testsupport::brute_force_seminorm(u, alpha);
        CHECK(cert == Catch::Approx(brute).margin(1e-9 * (1.0 + brute)));
    }
}

TEST_CASE("certifier is monotone in alpha for sub-unit separations", "[regularity]") {
    // torus separations never exceed sqrt(d)/2 < 1, so d(x,y)^alpha decreases
    // as alpha grows and the certified seminorm is nondecreasing in alpha
    Geometry g(1, 0, 64);
    Rng rng(12);
    auto u = random_trig_field(g, rng, 3, 1.0);
    double last = 0.0;
    for (double alpha : {0.3, 0.5, 0.7, 0.9, 1.0}) {
        double L = certify(u, TestFunctionPhi::Family::holder, alpha);
        CHECK(L >= last - 1e-9);
        last = L;
    }
}

TEST_CASE("certify of constants is zero; lipschitz family works", "[regularity]") {
    Geometry g(1, 0, 64);
    GridFunction c(g);
    for (auto& v : c.values()) v = 2.0;
    CHECK(certify(c, TestFunctionPhi::Family::holder, 0.5) == 0.0);

    auto u = GridFunction::sample(g, [](const Vec& x) { return std::cos(2.0 * kPi * x[0]); });
    double L = certify(u, TestFunctionPhi::Family::lipschitz_regularized, 0.5, 0, 3.0);
    CHECK(L > 0.0);
    // the certificate makes max psi <= 0 by construction
    auto phi = TestFunctionPhi::lipschitz_regularized(L, 0.5, 3.0);
    CHECK(locate_max(u, u, phi).M <= 1e-9);
}

TEST_CASE("regularity experiment: smooth forcing with full Laplacian", "[regularity]") {
    EquationSpec s;
    s.geo = Geometry(1, 1, 32);
    LocalTraceTerm lt;
    lt.block = 0;
    s.base.local_terms.push_back(std::move(lt));
    s.base.zeroth_order = 1.0;
    s.base.forcing = [](const Vec& x) {
        return std::cos(2.0 * kPi * x[0]) * std::cos(2.0 * kPi * x[1]);
    };
    s.profile_checked = true;
    auto v = regularity_experiment(s, RegularityPrediction::holder(1.0), 1, 1e-6, 400000);
    CHECK(v.outcome == RegularityVerdict::Outcome::pass);
    REQUIRE(v.evidence.size() == 2);
    CHECK(v.evidence[1].alpha_hat >= 0.85);  // elliptic smoothness: at least Lipschitz
}

TEST_CASE("regularity experiment: uncharacterized critical regime", "[regularity]") {
    auto s = catalogue::model_equation(32, 1, 1.0, nullptr, [](const Vec&) { return 1.0; },
                                       [](const Vec&) { return 0.5; }, 1.0, 0.0, 1.0,
                                       [](const Vec& x) { return std::cos(2.0 * kPi * x[0]); });
    auto v = regularity_experiment(s, RegularityPrediction::lipschitz(), 0);
    CHECK(v.outcome == RegularityVerdict::Outcome::uncharacterized);
    CHECK(v.label.find("uncharacterized") != std::string::npos);
}
