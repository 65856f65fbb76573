#pragma once

#include <functional>
#include <vector>

#include "pidelab/common.hpp"

namespace pidelab {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1,1]
    std::vector<double> w;
};

/// Gauss-Legendre rule by Newton iteration on P_k; cached per order.
inline const GaussRule& gauss_rule(int k) {
    static std::vector<GaussRule> cache(33);
    GaussRule& rule = cache[static_cast<size_t>(k)];
    if (!rule.x.empty()) return rule;
    rule.x.resize(static_cast<size_t>(k));
    rule.w.resize(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (k + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= k; ++j) {
                double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            double dp = k * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= k; ++j) {
            double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        double dp = k * (x * p1 - p0) / (x * x - 1.0);
        rule.x[static_cast<size_t>(k - 1 - i)] = x;
        rule.w[static_cast<size_t>(k - 1 - i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

template <class G>
double gauss_segment(G&& g, double a, double b, int k = 8) {
    const GaussRule& r = gauss_rule(k);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double s = 0;
    for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * g(mid + half * r.x[i]);
    return s * half;
}

struct RadialOptions {
    double rel_tol = 1e-10;   // early-stop threshold for cell contributions
    int max_levels = 400;     // geometric levels toward 0 / toward infinity
    double osc_width = 0.125; // cell-width cap away from the singularity
    int points = 8;           // Gauss points per radial cell
};

/// Geometric subdivision (ratio 2) toward r = 0 from r_hi. cell(a, b) returns
/// the cell's contribution; stops once cells are negligible. The integrand is
/// expected compensated (|z|^2 factor or Taylor remainder) so contributions
/// decay geometrically; if they do not, reports a quadrature failure.
template <class CellFn>
double radial_to_zero(double r_hi, const RadialOptions& opt, CellFn&& cell) {
    double acc = 0.0, acc_abs = 0.0;
    double b = r_hi;
    for (int m = 0; m < opt.max_levels; ++m) {
        double a = 0.5 * b;
        double c = cell(a, b);
        acc += c;
        acc_abs += std::abs(c);
        if (!std::isfinite(acc_abs))
            throw QuadratureError("radial quadrature toward 0 diverged (non-integrable integrand)",
                                  acc_abs, opt.rel_tol);
        if (m >= 4 && std::abs(c) <= opt.rel_tol * acc_abs) return acc;
        b = a;
    }
    double last = std::abs(cell(0.5 * b, b));
    if (!(last <= 64.0 * opt.rel_tol * (acc_abs + 1e-300)))
        throw QuadratureError("radial quadrature toward 0 did not converge", last,
                              opt.rel_tol * acc_abs);
    return acc;
}

/// Cells on [r_lo, r_hi] growing geometrically but width-capped at osc_width
/// so unit-period oscillation stays resolved.
template <class CellFn>
double radial_span(double r_lo, double r_hi, const RadialOptions& opt, CellFn&& cell) {
    double acc = 0.0;
    double a = r_lo;
    while (a < r_hi - 1e-300) {
        double width = std::min(std::max(a, 1e-3 * (r_hi - r_lo)), opt.osc_width);
        double b = std::min(a + width, r_hi);
        acc += cell(a, b);
        a = b;
    }
    return acc;
}

/// Geometric growth from r_lo outward; stops when cells are negligible.
template <class CellFn>
double radial_to_infinity(double r_lo, const RadialOptions& opt, CellFn&& cell) {
    double acc = 0.0, acc_abs = 0.0;
    double a = r_lo;
    for (int m = 0; m < opt.max_levels; ++m) {
        double b = 2.0 * a;
        double c = cell(a, b);
        acc += c;
        acc_abs += std::abs(c);
        if (m >= 3 && std::abs(c) <= opt.rel_tol * acc_abs) return acc;
        a = b;
    }
    throw QuadratureError("radial quadrature toward infinity did not converge",
                          acc_abs, opt.rel_tol);
}

// --- shells in dimension 1, 2, 3 --------------------------------------------

/// d=1: integral of g over { r_lo < |z| < r_hi }, z scalar.
template <class G>
double shell_integral_1d(G&& g, double r_lo, double r_hi, const RadialOptions& opt) {
    auto cell = [&](double a, double b) {
        return gauss_segment([&](double r) { return g(r) + g(-r); }, a, b, opt.points);
    };
    if (r_lo == 0.0) return radial_to_zero(r_hi, opt, cell);
    return radial_span(r_lo, r_hi, opt, cell);
}

/// Number of trapezoid points resolving angular oscillation at radius r for
/// fields with O(1) spatial frequencies.
inline int angular_points(double r, int n_min = 32, double per_unit_r = 24.0) {
    int n = static_cast<int>(std::ceil(per_unit_r * std::max(r, 1.0)));
    return std::max(n_min, n);
}

/// d=2 full shell: g takes the Cartesian point (r cos t, r sin t).
template <class G>
double shell_integral_2d(G&& g, double r_lo, double r_hi, const RadialOptions& opt) {
    auto ring = [&](double r) {
        const int na = angular_points(r);
        double s = 0;
        for (int i = 0; i < na; ++i) {
            double t = 2.0 * kPi * i / na;
            s += g(r * std::cos(t), r * std::sin(t));
        }
        return s * (2.0 * kPi / na) * r;
    };
    auto cell = [&](double a, double b) { return gauss_segment(ring, a, b, opt.points); };
    if (r_lo == 0.0) return radial_to_zero(r_hi, opt, cell);
    return radial_span(r_lo, r_hi, opt, cell);
}

/// d=2 angular arcs (e.g. a double cone): per-arc Gauss in the angle.
template <class G>
double arcs_integral_2d(G&& g, const std::vector<std::pair<double, double>>& arcs,
                        double r_lo, double r_hi, const RadialOptions& opt, int k_ang = 8) {
    auto ring = [&](double r) {
        double s = 0;
        for (const auto& [t0, t1] : arcs)
            s += gauss_segment(
                [&](double t) { return g(r * std::cos(t), r * std::sin(t)); }, t0, t1, k_ang);
        return s * r;
    };
    auto cell = [&](double a, double b) { return gauss_segment(ring, a, b, opt.points); };
    if (r_lo == 0.0) return radial_to_zero(r_hi, opt, cell);
    return radial_span(r_lo, r_hi, opt, cell);
}

/// d=3 spherical cap pair (double cone of polar half-angle theta_c about an
/// axis frame) or the full sphere when theta_c = pi/2.
template <class G>
double cone_integral_3d(G&& g, const Vec& axis, double theta_c, double r_lo, double r_hi,
                        const RadialOptions& opt, int k_polar = 8, int n_azimuth = 16) {
    // orthonormal frame around the axis
    Vec a = normalized(axis);
    Vec u(3), v(3);
    if (std::abs(a[0]) < 0.9) {
        u = Vec::of(0, -a[2], a[1]);
    } else {
        u = Vec::of(-a[1], a[0], 0);
    }
    u = normalized(u);
    v = Vec::of(a[1] * u[2] - a[2] * u[1], a[2] * u[0] - a[0] * u[2], a[0] * u[1] - a[1] * u[0]);
    auto sphere = [&](double r) {
        auto polar_band = [&](double phi0, double phi1) {
            return gauss_segment(
                [&](double phi) {
                    double sp = std::sin(phi), cp = std::cos(phi);
                    double s = 0;
                    for (int i = 0; i < n_azimuth; ++i) {
                        double psi = 2.0 * kPi * i / n_azimuth;
                        Vec z = (r * cp) * a + (r * sp * std::cos(psi)) * u +
                                (r * sp * std::sin(psi)) * v;
                        s += g(z);
                    }
                    return s * (2.0 * kPi / n_azimuth) * sp;
                },
                phi0, phi1, k_polar);
        };
        // double cone: the mirrored band touches at the equator when
        // theta_c == pi/2, so both bands together cover the sphere exactly
        double s = polar_band(0.0, theta_c) + polar_band(kPi - theta_c, kPi);
        return s * r * r;
    };
    auto cell = [&](double a_, double b_) { return gauss_segment(sphere, a_, b_, opt.points); };
    if (r_lo == 0.0) return radial_to_zero(r_hi, opt, cell);
    return radial_span(r_lo, r_hi, opt, cell);
}

}  // namespace pidelab
