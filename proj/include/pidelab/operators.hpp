#pragma once

#include <map>
#include <optional>

#include "pidelab/fft.hpp"
#include "pidelab/grid.hpp"
#include "pidelab/levy.hpp"

namespace pidelab {

/// Truncation radius of the I^1/I^2 split, with an optional gradient p used
/// in place of the centered-difference gradient of the field.
struct SplitSpec {
    double delta = 0.1;
    std::optional<Vec> gradient_override;
};

struct NonlocalOptions {
    RadialOptions radial;
    double r_far_1d = 32.0;  // beyond: exact constant-mode tail correction
    double r_far_2d = 8.0;
    double r_far_3d = 4.0;

    double r_far(int d) const { return d == 1 ? r_far_1d : (d == 2 ? r_far_2d : r_far_3d); }
};

/// Centered-difference gradient of the multilinear interpolant; lattice shifts
/// by exactly h commute with the interpolation, so this equals interpolating
/// the lattice centered-difference field.
inline Vec centered_gradient(const GridFunction& u, const Vec& x) {
    const int d = u.geometry().dim();
    const double h = u.geometry().h();
    Vec g(d);
    for (int a = 0; a < d; ++a) {
        Vec xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        g[a] = (u.value_at(xp) - u.value_at(xm)) / (2.0 * h);
    }
    return g;
}

/// Mean of u over the slice through x spanned by the given axes (all axes:
/// the global mean).
inline double slice_mean(const GridFunction& u, const Vec& x, const std::vector<int>& axes) {
    const Geometry& g = u.geometry();
    if (static_cast<int>(axes.size()) == g.dim()) return u.mean();
    const int m = static_cast<int>(axes.size());
    long count = 1;
    for (int i = 0; i < m; ++i) count *= g.n;
    double acc = 0.0;
    std::array<int, 3> it{0, 0, 0};
    for (long f = 0; f < count; ++f) {
        Vec p = x;
        for (int i = 0; i < m; ++i) p[axes[static_cast<size_t>(i)]] = it[static_cast<size_t>(i)] * g.h();
        acc += u.value_at(p);
        for (int i = m - 1; i >= 0; --i) {
            if (++it[static_cast<size_t>(i)] < g.n) break;
            it[static_cast<size_t>(i)] = 0;
        }
    }
    return acc / static_cast<double>(count);
}

/// Mass of |z|^2 against the measure inside radius r (analytic for
/// fractional shapes).
inline double kernel_variance_mass(const LevyKernel& k, const Vec& x, double r,
                                   const RadialOptions& opt = {}) {
    const int d = k.support_dim();
    if (k.fractional_radial) {
        double c = k.x_coeff ? k.x_coeff(x) : 1.0;
        return k.normalization * c * sphere_surface(d) * std::pow(r, 2.0 - k.beta) / (2.0 - k.beta);
    }
    return kernel_shell(k, x, 0.0, r, [](const Vec& z) { return dot(z, z); }, opt);
}

namespace detail {

/// Antipodally symmetric unit directions of the support space.
inline const std::vector<Vec>& symmetric_directions(int d) {
    static std::vector<Vec> sets[4];
    std::vector<Vec>& s = sets[d];
    if (!s.empty()) return s;
    std::vector<Vec> half = unit_directions(d, d == 1 ? 2 : (d == 2 ? 8 : 16));
    if (d == 1) {
        s = half;
    } else {
        for (const Vec& e : half) {
            s.push_back(e);
            s.push_back(-e);
        }
    }
    return s;
}

/// Shared core of the nonlocal evaluators. disp maps a support-space z to the
/// ambient displacement; the compensator p.disp(z) is applied for |z| <= 1
/// (the unit-ball indicator acts in z), the full difference beyond, and past
/// r_far the exact constant-mode term (slice mean - u(x)) * tail mass.
///
/// Below the grid scale the multilinear interpolant carries no curvature, so
/// the singular region |z| < min(h, delta/2) is closed with the discrete
/// second-difference quotient at that radius times the analytic |z|^2 mass.
template <class Disp>
double eval_core(const LevyKernel& k, const GridFunction& u, const Vec& x, const Vec& p,
                 double delta, Disp&& disp, const std::vector<int>& moved_axes,
                 const NonlocalOptions& opt) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("split delta must lie in (0,1)");
    const int sd = k.support_dim();
    const double u0 = u.value_at(x);
    const double rfar = opt.r_far(sd);

    auto compensated = [&](const Vec& z_sub) {
        Vec D = disp(z_sub);
        return u.value_at(x + D) - u0 - dot(p, D);
    };
    auto raw = [&](const Vec& z_sub) {
        Vec D = disp(z_sub);
        return u.value_at(x + D) - u0;
    };

    const double r_cut = std::min(u.geometry().h(), 0.5 * delta);
    double qavg = 0.0;
    for (const Vec& e : symmetric_directions(sd)) qavg += compensated(r_cut * e);
    qavg /= static_cast<double>(symmetric_directions(sd).size()) * r_cut * r_cut;
    double closure = qavg * kernel_variance_mass(k, x, r_cut, opt.radial);

    double inner = kernel_shell(k, x, r_cut, delta, compensated, opt.radial);
    double mid = kernel_shell(k, x, delta, 1.0, compensated, opt.radial);
    double far = kernel_shell(k, x, 1.0, rfar, raw, opt.radial);
    double tail = (slice_mean(u, x, moved_axes) - u0) * kernel_tail_mass(k, x, rfar, opt.radial);
    return closure + inner + mid + far + tail;
}

inline std::vector<int> embedding_axes(const LevyKernel& k) {
    if (k.kind == KernelKind::directional_embedding) return k.support_axes;
    std::vector<int> all(static_cast<size_t>(k.dim));
    for (int i = 0; i < k.dim; ++i) all[static_cast<size_t>(i)] = i;
    return all;
}

}  // namespace detail

/// I[x,p,u] = I^1_delta + I^2_delta against the kernel's measure; p is the
/// split's gradient override or the centered-difference gradient at x.
inline double eval_nonlocal(const LevyKernel& kernel, const GridFunction& u, const Vec& x,
                            const SplitSpec& split = {}, const NonlocalOptions& opt = {}) {
    if (kernel.dim != u.geometry().dim())
        throw std::invalid_argument("eval_nonlocal: kernel/grid dimension mismatch");
    Vec p = split.gradient_override ? *split.gradient_override : centered_gradient(u, x);
    auto disp = [&](const Vec& z_sub) { return kernel.embed(z_sub); };
    return detail::eval_core(kernel, u, x, p, split.delta, disp,
                             detail::embedding_axes(kernel), opt);
}

/// Levy-Ito operator: displacements j(x,z) against a fixed measure.
inline double eval_levy_ito(const JumpFunction& jump, const LevyKernel& kernel,
                            const GridFunction& u, const Vec& x, const SplitSpec& split = {},
                            const NonlocalOptions& opt = {}) {
    if (jump.dim != kernel.dim) throw std::invalid_argument("eval_levy_ito: dimension mismatch");
    if (kernel.dim != u.geometry().dim())
        throw std::invalid_argument("eval_levy_ito: kernel/grid dimension mismatch");
    Vec p = split.gradient_override ? *split.gradient_override : centered_gradient(u, x);
    auto disp = [&](const Vec& z_sub) { return jump.map(x, kernel.embed(z_sub)); };
    std::vector<int> all(static_cast<size_t>(kernel.dim));
    for (int i = 0; i < kernel.dim; ++i) all[static_cast<size_t>(i)] = i;
    return detail::eval_core(kernel, u, x, p, split.delta, disp, all, opt);
}

/// Directional operator: the integral acts on the selected coordinate block,
/// the other coordinates stay frozen.
inline double eval_directional(const LevyKernel& kernel, const GridFunction& u, const Vec& x,
                               int which, const SplitSpec& split = {},
                               const NonlocalOptions& opt = {}) {
    const Geometry& g = u.geometry();
    std::vector<int> axes = g.block_axes(which);
    if (kernel.dim != static_cast<int>(axes.size()))
        throw std::invalid_argument("eval_directional: kernel dim must equal block dim");
    Vec p_block(kernel.dim);
    if (split.gradient_override) {
        p_block = *split.gradient_override;
    } else {
        Vec full = centered_gradient(u, x);
        for (size_t i = 0; i < axes.size(); ++i) p_block[static_cast<int>(i)] = full[axes[i]];
    }
    Vec p_ambient(g.dim());
    for (size_t i = 0; i < axes.size(); ++i) p_ambient[axes[i]] = p_block[static_cast<int>(i)];
    auto disp = [&](const Vec& z_sub) {
        Vec zk = kernel.embed(z_sub);  // within the kernel's own space
        Vec D(g.dim());
        for (size_t i = 0; i < axes.size(); ++i) D[axes[i]] = zk[static_cast<int>(i)];
        return D;
    };
    return detail::eval_core(kernel, u, x, p_ambient, split.delta, disp, axes, opt);
}

/// Local derivative bundle at a lattice point.
struct LocalJet {
    Vec grad;                      // centered differences
    Vec grad_back, grad_fwd;       // one-sided pair
    std::array<std::array<double, 3>, 3> hess{};  // second differences
    double lap_block1 = 0.0;
    double lap_block2 = 0.0;
    double lap_full = 0.0;
};

inline LocalJet eval_local(const GridFunction& u, const std::array<int, 3>& idx) {
    const Geometry& g = u.geometry();
    const int d = g.dim();
    const double h = g.h();
    LocalJet jet;
    jet.grad = Vec(d);
    jet.grad_back = Vec(d);
    jet.grad_fwd = Vec(d);
    const double u0 = u.at(idx);
    for (int a = 0; a < d; ++a) {
        auto ip = idx, im = idx;
        ip[static_cast<size_t>(a)] += 1;
        im[static_cast<size_t>(a)] -= 1;
        const double up = u.at(ip), um = u.at(im);
        jet.grad[a] = (up - um) / (2.0 * h);
        jet.grad_fwd[a] = (up - u0) / h;
        jet.grad_back[a] = (u0 - um) / h;
        jet.hess[static_cast<size_t>(a)][static_cast<size_t>(a)] = (up - 2.0 * u0 + um) / (h * h);
    }
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            auto pp = idx, pm = idx, mp = idx, mm = idx;
            pp[static_cast<size_t>(a)] += 1;
            pp[static_cast<size_t>(b)] += 1;
            pm[static_cast<size_t>(a)] += 1;
            pm[static_cast<size_t>(b)] -= 1;
            mp[static_cast<size_t>(a)] -= 1;
            mp[static_cast<size_t>(b)] += 1;
            mm[static_cast<size_t>(a)] -= 1;
            mm[static_cast<size_t>(b)] -= 1;
            double v = (u.at(pp) - u.at(pm) - u.at(mp) + u.at(mm)) / (4.0 * h * h);
            jet.hess[static_cast<size_t>(a)][static_cast<size_t>(b)] = v;
            jet.hess[static_cast<size_t>(b)][static_cast<size_t>(a)] = v;
        }
    for (int a = 0; a < d; ++a) {
        double haa = jet.hess[static_cast<size_t>(a)][static_cast<size_t>(a)];
        jet.lap_full += haa;
        if (a < g.d1)
            jet.lap_block1 += haa;
        else
            jet.lap_block2 += haa;
    }
    return jet;
}

// --- spectral oracle ----------------------------------------------------------

/// Unnormalized symbol constant c_d(beta) = m(beta, 1): the full multiplier is
/// m(beta, kappa) = c_d(beta) kappa^beta by scaling. Computed once per
/// (beta, d) by compensated quadrature with analytic power tail.
inline double multiplier_constant(double beta, int d) {
    static std::map<std::pair<double, int>, double> cache;
    auto key = std::make_pair(beta, d);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (!(beta > 0.0 && beta < 2.0)) throw std::invalid_argument("multiplier: beta in (0,2)");
    RadialOptions opt;
    opt.points = 16;
    opt.osc_width = 0.75;  // cos / J0 have period 2 pi; Gauss-16 resolves this easily
    const double R = 8192.0;
    double value = 0.0;
    if (d == 1) {
        auto integrand = [beta](double t) { return (1.0 - std::cos(t)) * std::pow(t, -1.0 - beta); };
        double head = radial_to_zero(1.0, opt, [&](double a, double b) {
            return gauss_segment(integrand, a, b, opt.points);
        });
        double body = radial_span(1.0, R, opt, [&](double a, double b) {
            return gauss_segment(integrand, a, b, opt.points);
        });
        // tail by parts: power part exact, oscillatory part to O(R^{-2-beta})
        double tail = std::pow(R, -beta) / beta + std::sin(R) * std::pow(R, -1.0 - beta) -
                      (1.0 + beta) * std::cos(R) * std::pow(R, -2.0 - beta);
        value = 2.0 * (head + body + tail);
    } else if (d == 2) {
        auto integrand = [beta](double r) {
            return (1.0 - std::cyl_bessel_j(0.0, r)) * std::pow(r, -1.0 - beta);
        };
        double head = radial_to_zero(1.0, opt, [&](double a, double b) {
            return gauss_segment(integrand, a, b, opt.points);
        });
        double body = radial_span(1.0, R, opt, [&](double a, double b) {
            return gauss_segment(integrand, a, b, opt.points);
        });
        // J0 tail by parts via its cosine asymptotics
        double tail = std::pow(R, -beta) / beta +
                      std::sqrt(2.0 / kPi) * std::sin(R - 0.25 * kPi) * std::pow(R, -1.5 - beta);
        value = 2.0 * kPi * (head + body + tail);
    } else {
        throw std::invalid_argument("multiplier_constant: d in {1,2}");
    }
    cache.emplace(key, value);
    return value;
}

inline double fractional_multiplier(double beta, double kappa, int d) {
    if (kappa == 0.0) return 0.0;
    return multiplier_constant(beta, d) * std::pow(kappa, beta);
}

/// (-Delta_block)^{beta/2} u via the Fourier multiplier m(beta, |2 pi k|),
/// the reference oracle for the direct quadrature path.
inline GridFunction fractional_laplacian_spectral(const GridFunction& u, double beta,
                                                  int which = 0) {
    const Geometry& g = u.geometry();
    const std::vector<int> axes = g.block_axes(which);
    const int bd = static_cast<int>(axes.size());
    if (bd == 0) throw std::invalid_argument("spectral: empty block");
    const long total = g.size();
    std::vector<cdouble> a(static_cast<size_t>(total));
    for (long i = 0; i < total; ++i) a[static_cast<size_t>(i)] = u.values()[static_cast<size_t>(i)];

    const int d = g.dim();
    const int n = g.n;
    // strides of the row-major layout
    long stride[3] = {1, 1, 1};
    for (int ax = d - 2; ax >= 0; --ax) stride[ax] = stride[ax + 1] * n;

    auto transform_axis = [&](int ax, bool inverse) {
        std::vector<cdouble> line(static_cast<size_t>(n));
        for (long f = 0; f < total; ++f) {
            if ((f / stride[ax]) % n != 0) continue;  // line bases only
            for (int i = 0; i < n; ++i)
                line[static_cast<size_t>(i)] = a[static_cast<size_t>(f + i * stride[ax])];
            fft_inplace(line, inverse);
            for (int i = 0; i < n; ++i)
                a[static_cast<size_t>(f + i * stride[ax])] = line[static_cast<size_t>(i)];
        }
    };

    for (int ax : axes) transform_axis(ax, false);

    // per-mode multiplier table, cached per (beta, block, geometry)
    static std::map<std::tuple<double, int, int, int, int>, std::vector<double>> table_cache;
    auto key = std::make_tuple(beta, which, g.d1, g.d2, n);
    auto tit = table_cache.find(key);
    if (tit == table_cache.end()) {
        std::vector<double> table(static_cast<size_t>(total));
        std::array<int, 3> idx{0, 0, 0};
        for (long f = 0; f < total; ++f) {
            double k2 = 0.0;
            for (int ax : axes) {
                double kf = dft_frequency(idx[static_cast<size_t>(ax)], n);
                k2 += kf * kf;
            }
            table[static_cast<size_t>(f)] =
                fractional_multiplier(beta, 2.0 * kPi * std::sqrt(k2), bd);
            for (int aa = d - 1; aa >= 0; --aa) {
                if (++idx[static_cast<size_t>(aa)] < n) break;
                idx[static_cast<size_t>(aa)] = 0;
            }
        }
        tit = table_cache.emplace(key, std::move(table)).first;
    }
    const std::vector<double>& table = tit->second;
    for (long f = 0; f < total; ++f) a[static_cast<size_t>(f)] *= table[static_cast<size_t>(f)];

    for (int ax : axes) transform_axis(ax, true);

    GridFunction out(g);
    for (long i = 0; i < total; ++i) out.values()[static_cast<size_t>(i)] = a[static_cast<size_t>(i)].real();
    return out;
}

}  // namespace pidelab
