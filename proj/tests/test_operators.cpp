#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "pidelab/operators.hpp"

using namespace pidelab;

namespace {
GridFunction cos_field_1d(int n) {
    return GridFunction::sample(Geometry(1, 0, n),
                                [](const Vec& x) { return std::cos(2.0 * kPi * x[0]); });
}
}  // namespace

TEST_CASE("fractional multiplier anchors", "[operators]") {
    // int (1-cos t)/t^2 dt over R equals pi
    CHECK(multiplier_constant(1.0, 1) == Catch::Approx(kPi).epsilon(1e-7));
    CHECK(fractional_multiplier(1.0, 2.0 * kPi, 1) == Catch::Approx(2.0 * kPi * kPi).epsilon(1e-7));
    CHECK(fractional_multiplier(0.5, 0.0, 1) == 0.0);
}

TEST_CASE("eval_nonlocal reproduces the Fourier symbol on cosine fields", "[operators]") {
    auto u = cos_field_1d(512);
    for (double beta : {0.5, 1.0, 1.5}) {
        auto k = LevyKernel::fractional(1, beta);
        double got = eval_nonlocal(k, u, Vec::of(0.0));
        double want = -fractional_multiplier(beta, 2.0 * kPi, 1);
        INFO("beta = " << beta);
        CHECK(std::abs(got - want) <= 0.01 * std::abs(want));
    }
    auto k1 = LevyKernel::fractional(1, 1.0);
    CHECK(eval_nonlocal(k1, u, Vec::of(0.0)) == Catch::Approx(-2.0 * kPi * kPi).epsilon(0.01));
    CHECK(std::abs(eval_nonlocal(k1, u, Vec::of(0.25))) < 1e-8);
}

TEST_CASE("eval_nonlocal of a constant field vanishes", "[operators]") {
    Geometry g(1, 0, 64);
    GridFunction c(g);
    for (auto& v : c.values()) v = 2.5;
    CHECK(std::abs(eval_nonlocal(LevyKernel::fractional(1, 1.2), c, Vec::of(0.3))) < 1e-12);
}

TEST_CASE("identity jump reproduces eval_nonlocal", "[operators]") {
    auto u = cos_field_1d(256);
    auto k = LevyKernel::fractional(1, 1.0);
    for (double x : {0.0, 0.1, 0.37}) {
        double a = eval_nonlocal(k, u, Vec::of(x));
        double b = eval_levy_ito(JumpFunction::identity(1), k, u, Vec::of(x));
        CHECK(std::abs(a - b) < 1e-10);
    }
}

TEST_CASE("scaled jump halves the symbol", "[operators]") {
    auto u = cos_field_1d(512);
    auto k = LevyKernel::fractional(1, 1.0);
    double got = eval_levy_ito(JumpFunction::scaling(1, 0.5), k, u, Vec::of(0.0));
    CHECK(got == Catch::Approx(-kPi * kPi).epsilon(0.01));
}

TEST_CASE("directional evaluation freezes the other block", "[operators]") {
    Geometry g(1, 1, 64);
    auto k = LevyKernel::fractional(1, 1.0);
    auto u_x2 = GridFunction::sample(g, [](const Vec& x) { return std::cos(2.0 * kPi * x[1]); });
    CHECK(std::abs(eval_directional(k, u_x2, Vec::of(0.2, 0.4), 1)) < 1e-12);

    auto u = GridFunction::sample(
        g, [](const Vec& x) { return std::cos(2.0 * kPi * x[0]) * std::cos(2.0 * kPi * x[1]); });
    double at0 = eval_directional(k, u, Vec::of(0.0, 0.0), 2);
    CHECK(at0 == Catch::Approx(-2.0 * kPi * kPi).epsilon(0.01));
    CHECK(std::abs(eval_directional(k, u, Vec::of(0.25, 0.0), 2)) < 1e-8);
}

TEST_CASE("local jet anchors", "[operators]") {
    auto u = cos_field_1d(512);
    auto jet = eval_local(u, {0, 0, 0});
    CHECK(std::abs(jet.grad[0]) < 1e-12);
    CHECK(jet.hess[0][0] == Catch::Approx(-4.0 * kPi * kPi).epsilon(1e-3));

    Geometry g(1, 0, 64);
    GridFunction saw(g);
    for (int i = 0; i < 64; ++i) saw.at({i, 0, 0}) = i * g.h();
    auto sj = eval_local(saw, {10, 0, 0});
    CHECK(std::abs(sj.hess[0][0]) < 1e-10);  // away from the wrap seam
    CHECK(sj.grad[0] == Catch::Approx(1.0).epsilon(1e-12));

    GridFunction c(g);
    for (auto& v : c.values()) v = 1.0;
    auto cj = eval_local(c, {5, 0, 0});
    CHECK(cj.grad[0] == 0.0);
    CHECK(cj.hess[0][0] == 0.0);
}

TEST_CASE("block Hessian traces of the local jet", "[operators]") {
    Geometry g(1, 1, 64);
    auto u = GridFunction::sample(
        g, [](const Vec& x) { return std::cos(2.0 * kPi * x[0]) + 2.0 * std::cos(2.0 * kPi * x[1]); });
    auto jet = eval_local(u, {0, 0, 0});
    CHECK(jet.lap_block1 == Catch::Approx(-4.0 * kPi * kPi).epsilon(1e-2));
    CHECK(jet.lap_block2 == Catch::Approx(-8.0 * kPi * kPi).epsilon(1e-2));
    CHECK(jet.lap_full == Catch::Approx(jet.lap_block1 + jet.lap_block2).margin(1e-12));
}

TEST_CASE("spectral fractional Laplacian anchors", "[operators]") {
    auto u = cos_field_1d(128);
    auto L = fractional_laplacian_spectral(u, 1.0, 0);
    u.for_each_index([&](const std::array<int, 3>& idx, long f) {
        double want = 2.0 * kPi * kPi * u.values()[static_cast<size_t>(f)];
        CHECK(std::abs(L.values()[static_cast<size_t>(f)] - want) < 1e-6);
        (void)idx;
    });

    GridFunction c(u.geometry());
    for (auto& v : c.values()) v = 3.0;
    CHECK(fractional_laplacian_spectral(c, 1.0, 0).max_norm() < 1e-12);
}

TEST_CASE("spectral operator is linear to machine precision", "[operators]") {
    Geometry g(1, 0, 64);
    auto u = GridFunction::sample(g, [](const Vec& x) { return std::cos(2.0 * kPi * x[0]); });
    auto v = GridFunction::sample(g, [](const Vec& x) { return std::sin(4.0 * kPi * x[0]); });
    GridFunction w(g);
    for (size_t i = 0; i < w.values().size(); ++i)
        w.values()[i] = 2.0 * u.values()[i] - 3.0 * v.values()[i];
    auto Lw = fractional_laplacian_spectral(w, 0.7, 0);
    auto Lu = fractional_laplacian_spectral(u, 0.7, 0);
    auto Lv = fractional_laplacian_spectral(v, 0.7, 0);
    double worst = 0;
    for (size_t i = 0; i < w.values().size(); ++i)
        worst = std::max(worst,
                         std::abs(Lw.values()[i] - (2.0 * Lu.values()[i] - 3.0 * Lv.values()[i])));
    CHECK(worst < 1e-12);
}

TEST_CASE("direct and spectral paths agree (sign convention I = -(-Lap)^{b/2})",
          "[operators]") {
    auto u = cos_field_1d(512);
    for (double beta : {0.5, 1.0, 1.5}) {
        auto k = LevyKernel::fractional(1, beta);
        auto L = fractional_laplacian_spectral(u, beta, 0);
        for (double x : {0.0, 0.3}) {
            double direct = eval_nonlocal(k, u, Vec::of(x));
            double spectral = L.value_at(Vec::of(x));
            CHECK(std::abs(direct + spectral) <= 0.01 * (1.0 + std::abs(spectral)));
        }
    }
}

TEST_CASE("2d full consistency with a looser grid tolerance", "[operators]") {
    Geometry g(1, 1, 64);
    auto u = GridFunction::sample(
        g, [](const Vec& x) { return std::cos(2.0 * kPi * x[0]) * std::cos(2.0 * kPi * x[1]); });
    auto k = LevyKernel::fractional(2, 1.0);
    auto L = fractional_laplacian_spectral(u, 1.0, 0);
    double direct = eval_nonlocal(k, u, Vec::of(0.0, 0.0));
    CHECK(std::abs(direct + L.values()[0]) <= 0.03 * std::abs(L.values()[0]));
}

TEST_CASE("split invariance across truncation radii", "[operators]") {
    auto u = cos_field_1d(256);
    auto k = LevyKernel::fractional(1, 1.0);
    double ref = 0;
    bool first = true;
    for (double delta : {0.05, 0.1, 0.2}) {
        SplitSpec s;
        s.delta = delta;
        double v = eval_nonlocal(k, u, Vec::of(0.3), s);
        if (first) {
            ref = v;
            first = false;
        } else {
            CHECK(std::abs(v - ref) <= 1e-4 * (1.0 + std::abs(ref)));
        }
    }
}

TEST_CASE("translation equivariance for x-independent kernels", "[operators]") {
    Geometry g(1, 0, 128);
    auto u = GridFunction::sample(g, [](const Vec& x) {
        return std::cos(2.0 * kPi * x[0]) + 0.4 * std::sin(4.0 * kPi * x[0] + 0.7);
    });
    const int shift = 17;
    GridFunction v(g);
    for (int i = 0; i < g.n; ++i) v.at({i, 0, 0}) = u.at({i + shift, 0, 0});
    auto k = LevyKernel::fractional(1, 1.3);
    double a = eval_nonlocal(k, u, Vec::of((10 + shift) * g.h()));
    double b = eval_nonlocal(k, v, Vec::of(10 * g.h()));
    CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("grid function serialization round trips", "[operators]") {
    Geometry g(1, 1, 8);
    auto u = GridFunction::sample(
        g, [](const Vec& x) { return std::sin(2.0 * kPi * x[0]) + 0.25 * x[1]; });
    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_grid_binary(u, bin);
    auto v = read_grid_binary(bin);
    REQUIRE(v.geometry() == g);
    CHECK(v.values() == u.values());  // bit-exact

    std::stringstream csv;
    write_grid_csv(u, csv);
    std::string header;
    std::getline(csv, header);
    CHECK(header == "d1,d2,n");
}
