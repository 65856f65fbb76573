#pragma once

#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pidelab/common.hpp"
#include "pidelab/quadrature.hpp"

namespace pidelab {

inline double sphere_surface(int d) { return d == 1 ? 2.0 : (d == 2 ? 2.0 * kPi : 4.0 * kPi); }

enum class KernelKind { isotropic_fractional, x_modulated, directional_embedding, custom };

/// A Levy measure with singularity exponent beta, given by a density in its
/// support space. For directional embeddings the measure lives on a
/// coordinate subspace of the ambient dimension and the density takes the
/// subspace variable.
struct LevyKernel {
    int dim = 1;  // ambient dimension of z
    KernelKind kind = KernelKind::isotropic_fractional;
    double beta = 1.0;
    double tail_radius = 1.0;
    double normalization = 1.0;
    std::optional<double> holder_gamma;
    std::function<double(const Vec& x, const Vec& z)> density;
    std::vector<int> support_axes;  // directional_embedding only
    bool x_dependent = false;
    // density(x,z) == x_coeff(x) * |z|^(-support_dim-beta); enables analytic tails
    bool fractional_radial = true;
    std::function<double(const Vec&)> x_coeff;

    int support_dim() const {
        return kind == KernelKind::directional_embedding ? static_cast<int>(support_axes.size())
                                                         : dim;
    }

    double density_at(const Vec& x, const Vec& z_sub) const {
        return normalization * density(x, z_sub);
    }

    static LevyKernel fractional(int dim, double beta) {
        LevyKernel k;
        k.dim = dim;
        k.kind = KernelKind::isotropic_fractional;
        k.beta = beta;
        k.density = [dim, beta](const Vec&, const Vec& z) {
            return std::pow(norm(z), -(dim + beta));
        };
        k.x_coeff = [](const Vec&) { return 1.0; };
        return k;
    }

    /// c(x) * |z|^(-d-beta) with c Holder-gamma in x.
    static LevyKernel x_modulated_fractional(int dim, double beta,
                                             std::function<double(const Vec&)> c, double gamma) {
        LevyKernel k;
        k.dim = dim;
        k.kind = KernelKind::x_modulated;
        k.beta = beta;
        k.holder_gamma = gamma;
        k.x_dependent = true;
        k.x_coeff = c;
        k.density = [dim, beta, c](const Vec& x, const Vec& z) {
            return c(x) * std::pow(norm(z), -(dim + beta));
        };
        return k;
    }

    /// Fractional measure supported on the coordinate subspace spanned by axes.
    static LevyKernel directional_embedding_fractional(int ambient_dim, std::vector<int> axes,
                                                       double beta) {
        LevyKernel k;
        k.dim = ambient_dim;
        k.kind = KernelKind::directional_embedding;
        k.beta = beta;
        k.support_axes = std::move(axes);
        const int sd = static_cast<int>(k.support_axes.size());
        k.density = [sd, beta](const Vec&, const Vec& z) { return std::pow(norm(z), -(sd + beta)); };
        k.x_coeff = [](const Vec&) { return 1.0; };
        return k;
    }

    static LevyKernel custom(int dim, double beta,
                             std::function<double(const Vec&, const Vec&)> density,
                             bool x_dependent = false) {
        LevyKernel k;
        k.dim = dim;
        k.kind = KernelKind::custom;
        k.beta = beta;
        k.density = std::move(density);
        k.x_dependent = x_dependent;
        k.fractional_radial = false;
        return k;
    }

    /// Embed a support-space vector into the ambient space.
    Vec embed(const Vec& z_sub) const {
        if (kind != KernelKind::directional_embedding) return z_sub;
        Vec z(dim);
        for (size_t i = 0; i < support_axes.size(); ++i)
            z[support_axes[i]] = z_sub[static_cast<int>(i)];
        return z;
    }

    /// Project an ambient vector onto the support axes.
    Vec project(const Vec& a) const {
        if (kind != KernelKind::directional_embedding) return a;
        Vec p(static_cast<int>(support_axes.size()));
        for (size_t i = 0; i < support_axes.size(); ++i) p[static_cast<int>(i)] = a[support_axes[i]];
        return p;
    }
};

/// The double cone { z : |z| <= delta and (1-eta)|z| <= |axis . z| / |axis| }.
struct ConeSpec {
    Vec axis;  // need not be normalized; direction only
    double eta = 0.5;
    double delta = 1.0;

    ConeSpec() = default;
    ConeSpec(const Vec& a, double eta_, double delta_) : axis(a), eta(eta_), delta(delta_) {
        if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("cone: eta in (0,1]");
        if (!(delta > 0.0)) throw std::invalid_argument("cone: delta > 0");
    }

    bool contains(const Vec& z) const {
        double nz = norm(z);
        if (nz > delta) return false;
        return (1.0 - eta) * nz * norm(axis) <= std::abs(dot(axis, z)) + 1e-15 * nz;
    }
};

/// Levy-Ito jump map j(x,z) with two-sided bounds and Holder modulus in x.
struct JumpFunction {
    int dim = 1;
    std::function<Vec(const Vec& x, const Vec& z)> map;
    double c0 = 1.0;
    double C0 = 1.0;
    double gamma = 1.0;
    double tail_lipschitz = 0.0;

    static JumpFunction identity(int dim) {
        JumpFunction j;
        j.dim = dim;
        j.map = [](const Vec&, const Vec& z) { return z; };
        return j;
    }

    static JumpFunction scaling(int dim, double s) {
        JumpFunction j;
        j.dim = dim;
        j.map = [s](const Vec&, const Vec& z) { return s * z; };
        j.c0 = j.C0 = std::abs(s);
        return j;
    }

    /// j(x,z) = (1 + amp*sin(2 pi x.e1)) z; c0 = 1-amp, C0 = 1+amp, gamma = 1.
    static JumpFunction sinusoidal(int dim, double amp) {
        JumpFunction j;
        j.dim = dim;
        j.map = [amp](const Vec& x, const Vec& z) {
            return (1.0 + amp * std::sin(2.0 * kPi * x[0])) * z;
        };
        j.c0 = 1.0 - amp;
        j.C0 = 1.0 + amp;
        j.gamma = 1.0;
        j.tail_lipschitz = 2.0 * kPi * amp;  // |d/dx sin| factor on |z|<=1 tails
        return j;
    }
};

// --- kernel-weighted quadrature in the support space -------------------------

/// Integral of g(z) against the measure over { r_lo < |z| < r_hi } of the
/// support space. g receives the support-space vector.
template <class G>
double kernel_shell(const LevyKernel& k, const Vec& x, double r_lo, double r_hi, G&& g,
                    const RadialOptions& opt = {}) {
    const int d = k.support_dim();
    if (d == 1) {
        return shell_integral_1d(
            [&](double z) {
                Vec zv = Vec::of(z);
                return g(zv) * k.density_at(x, zv);
            },
            r_lo, r_hi, opt);
    }
    if (d == 2) {
        return shell_integral_2d(
            [&](double z0, double z1) {
                Vec zv = Vec::of(z0, z1);
                return g(zv) * k.density_at(x, zv);
            },
            r_lo, r_hi, opt);
    }
    return cone_integral_3d(
        [&](const Vec& zv) { return g(zv) * k.density_at(x, zv); }, Vec::axis(3, 0), 0.5 * kPi,
        r_lo, r_hi, opt);
}

/// Integral of g against the measure over the double cone of aperture eta
/// about axis_sub (support-space direction), radius delta.
template <class G>
double kernel_cone(const LevyKernel& k, const Vec& x, const Vec& axis_sub, double eta,
                   double delta, G&& g, const RadialOptions& opt = {}) {
    const int d = k.support_dim();
    if (d == 1) return kernel_shell(k, x, 0.0, delta, g, opt);  // 1d cone is the full ball
    const double theta_c = std::acos(std::clamp(1.0 - eta, -1.0, 1.0));
    if (d == 2) {
        const double phi = std::atan2(axis_sub[1], axis_sub[0]);
        std::vector<std::pair<double, double>> arcs = {
            {phi - theta_c, phi + theta_c}, {phi + kPi - theta_c, phi + kPi + theta_c}};
        return arcs_integral_2d(
            [&](double z0, double z1) {
                Vec zv = Vec::of(z0, z1);
                return g(zv) * k.density_at(x, zv);
            },
            arcs, 0.0, delta, opt);
    }
    return cone_integral_3d([&](const Vec& zv) { return g(zv) * k.density_at(x, zv); }, axis_sub,
                            theta_c, 0.0, delta, opt);
}

/// Integral over B_delta minus the cone (support space).
template <class G>
double kernel_ball_minus_cone(const LevyKernel& k, const Vec& x, const Vec& axis_sub, double eta,
                              double delta, G&& g, const RadialOptions& opt = {}) {
    const int d = k.support_dim();
    if (d == 1) return 0.0;  // the 1d cone is the whole ball
    if (d == 2) {
        const double theta_c = std::acos(std::clamp(1.0 - eta, -1.0, 1.0));
        const double phi = std::atan2(axis_sub[1], axis_sub[0]);
        std::vector<std::pair<double, double>> arcs = {
            {phi + theta_c, phi + kPi - theta_c},
            {phi + kPi + theta_c, phi + 2.0 * kPi - theta_c}};
        return arcs_integral_2d(
            [&](double z0, double z1) {
                Vec zv = Vec::of(z0, z1);
                return g(zv) * k.density_at(x, zv);
            },
            arcs, 0.0, delta, opt);
    }
    return kernel_shell(k, x, 0.0, delta, g, opt) - kernel_cone(k, x, axis_sub, eta, delta, g, opt);
}

/// Mass of the measure outside radius R (analytic for fractional shapes).
inline double kernel_tail_mass(const LevyKernel& k, const Vec& x, double R,
                               const RadialOptions& opt = {}) {
    const int d = k.support_dim();
    if (k.fractional_radial) {
        double c = k.x_coeff ? k.x_coeff(x) : 1.0;
        return k.normalization * c * sphere_surface(d) * std::pow(R, -k.beta) / k.beta;
    }
    auto one = [](const Vec&) { return 1.0; };
    double acc = 0.0;
    double a = R;
    for (int m = 0; m < opt.max_levels; ++m) {
        double b = 2.0 * a;
        double c = kernel_shell(k, x, a, b, one, opt);
        acc += c;
        if (m >= 3 && std::abs(c) <= opt.rel_tol * std::abs(acc)) return acc;
        a = b;
    }
    throw QuadratureError("kernel tail mass did not converge", acc, opt.rel_tol);
}

// --- operations ---------------------------------------------------------------

struct ConeMassResult {
    double value = 0.0;
    bool degenerate = false;
};

/// Quadrature of the |z|^2-compensated measure of the cone. For directional
/// embeddings the cone condition is rewritten on the support subspace; an
/// axis orthogonal to the support (or too far for the aperture) gives exact 0.
inline ConeMassResult cone_mass(const LevyKernel& kernel, const ConeSpec& cone,
                                const Vec& x = Vec(), const RadialOptions& opt = {}) {
    if (cone.axis.dim != kernel.dim)
        throw std::invalid_argument("cone_mass: axis dimension mismatch");
    if (cone.delta > kernel.tail_radius + 1e-12)
        throw std::invalid_argument("cone_mass: delta must not exceed tail_radius");
    Vec xx = x.dim ? x : Vec::zero(kernel.dim);
    Vec a = normalized(cone.axis);
    double eta_eff = cone.eta;
    Vec axis_sub = a;
    if (kernel.kind == KernelKind::directional_embedding) {
        Vec as = kernel.project(a);
        double na = norm(as);
        // condition (1-eta)|z| <= |a.z| restricted to the subspace: effective
        // threshold (1-eta)/|a_s| on the subspace direction
        if (na < 1e-14) return {0.0, true};
        double thresh = (1.0 - cone.eta) / na;
        if (thresh > 1.0) return {0.0, true};
        eta_eff = 1.0 - thresh;
        if (eta_eff <= 0.0) return {0.0, true};
        axis_sub = as * (1.0 / na);
    }
    auto zsq = [](const Vec& z) { return dot(z, z); };
    double v = (eta_eff >= 1.0 && kernel.support_dim() == 1)
                   ? kernel_shell(kernel, xx, 0.0, cone.delta, zsq, opt)
                   : kernel_cone(kernel, xx, axis_sub, eta_eff, cone.delta, zsq, opt);
    return {v, false};
}

/// Closed-form cone constant for the isotropic fractional kernel, d = 2 or 3:
/// polar reduction of the double cone. Oracle for cone_mass.
inline double cone_constant_example(int d, double beta, double eta, double delta) {
    if (d != 2 && d != 3) throw std::invalid_argument("cone_constant_example: d in {2,3}");
    if (!(beta > 0.0 && beta < 2.0)) throw std::invalid_argument("beta in (0,2)");
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("eta in [0,1]");
    if (!(delta > 0.0)) throw std::invalid_argument("delta > 0");
    const double radial = std::pow(delta, 2.0 - beta) / (2.0 - beta);
    if (d == 2) return 4.0 * std::acos(1.0 - eta) * radial;
    return 4.0 * kPi * eta * radial;
}

// --- structural-condition verification ---------------------------------------

struct SamplePlan {
    std::vector<Vec> points;
    std::vector<Vec> axes;
    std::vector<double> deltas;
    std::vector<double> etas;
    std::vector<double> z_radii;
    int z_directions = 12;

    bool empty() const { return points.empty() || axes.empty() || deltas.empty() || etas.empty(); }

    static SamplePlan standard(int dim) {
        SamplePlan p;
        for (double t : {0.0, 0.17, 0.39, 0.61, 0.83}) {
            Vec x(dim);
            for (int i = 0; i < dim; ++i) x[i] = t + 0.11 * i;
            p.points.push_back(x);
        }
        if (dim == 1) {
            p.axes = {Vec::of(1.0)};
        } else if (dim == 2) {
            p.axes = {Vec::of(1, 0), Vec::of(0, 1), normalized(Vec::of(1, 1)),
                      normalized(Vec::of(2, -1))};
        } else {
            p.axes = {Vec::axis(3, 0), Vec::axis(3, 1), Vec::axis(3, 2),
                      normalized(Vec::of(1, 1, 1))};
        }
        p.deltas = {0.25, 0.5, 1.0};
        p.etas = {0.1, 0.3, 0.6};
        p.z_radii = {1e-6, 1e-4, 1e-2, 0.1, 0.5, 0.9};
        return p;
    }
};

struct ConditionResult {
    std::string name;
    bool pass = false;
    std::vector<std::pair<std::string, double>> constants;
    std::string note;
};

struct ConditionReport {
    std::vector<ConditionResult> conditions;

    bool all_pass() const {
        for (const auto& c : conditions)
            if (!c.pass) return false;
        return true;
    }
    const ConditionResult& find(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return c;
        throw std::invalid_argument("no condition named " + name);
    }
    /// Flat key/value rows for CSV emission.
    std::vector<std::pair<std::string, std::string>> flatten() const {
        std::vector<std::pair<std::string, std::string>> rows;
        for (const auto& c : conditions) {
            rows.emplace_back(c.name + ".pass", c.pass ? "1" : "0");
            for (const auto& [k, v] : c.constants) rows.emplace_back(c.name + "." + k, format_double(v));
            if (!c.note.empty()) rows.emplace_back(c.name + ".note", c.note);
        }
        return rows;
    }
};

/// sup_x ( int_B |z|^2 mu_x + mu_x(R^d \ B) ) over the plan points (M1).
inline double m1_constant(const LevyKernel& k, const std::vector<Vec>& points,
                          const RadialOptions& opt = {}) {
    double best = 0.0;
    auto zsq = [](const Vec& z) { return dot(z, z); };
    std::vector<Vec> xs = points;
    if (!k.x_dependent && !xs.empty()) xs.resize(1);
    if (xs.empty()) xs.push_back(Vec::zero(k.dim));
    for (const Vec& x : xs) {
        double inner = kernel_shell(k, x, 0.0, k.tail_radius, zsq, opt);
        double tail = kernel_tail_mass(k, x, k.tail_radius, opt);
        best = std::max(best, inner + tail);
    }
    return best;
}

inline ConditionReport verify_measure_conditions(const LevyKernel& k, const SamplePlan& plan,
                                                 const RadialOptions& opt = {}) {
    if (plan.empty()) throw std::invalid_argument("verify_measure_conditions: empty sample plan");
    ConditionReport rep;
    const int d = k.support_dim();

    {  // (M1)
        ConditionResult r;
        r.name = "M1";
        r.constants.emplace_back("C_tilde_mu", m1_constant(k, plan.points, opt));
        r.pass = true;
        rep.conditions.push_back(std::move(r));
    }

    {  // (M2): per-axis fit of cone masses against eta^((d-1)/2) delta^(2-beta)
        ConditionResult r;
        r.name = "M2";
        bool all = true;
        double overall = std::numeric_limits<double>::infinity();
        for (size_t ai = 0; ai < plan.axes.size(); ++ai) {
            double cmin = std::numeric_limits<double>::infinity();
            double eta_at_min = plan.etas.front();
            bool degenerate = false;
            for (double eta : plan.etas)
                for (double delta : plan.deltas) {
                    if (delta > k.tail_radius) continue;
                    double denom = std::pow(eta, 0.5 * (d - 1)) * std::pow(delta, 2.0 - k.beta);
                    double worst = std::numeric_limits<double>::infinity();
                    for (const Vec& x : plan.points) {
                        auto cm = cone_mass(k, ConeSpec(plan.axes[ai], eta, delta), x, opt);
                        if (cm.degenerate) degenerate = true;
                        worst = std::min(worst, cm.value);
                        if (!k.x_dependent) break;
                    }
                    double ratio = worst / denom;
                    if (ratio < cmin) {
                        cmin = ratio;
                        eta_at_min = eta;
                    }
                }
            bool axis_pass = !degenerate && cmin > 1e-12;
            all = all && axis_pass;
            overall = std::min(overall, cmin);
            r.constants.emplace_back("C_mu.axis" + std::to_string(ai), degenerate ? 0.0 : cmin);
            r.constants.emplace_back("eta.axis" + std::to_string(ai), eta_at_min);
        }
        r.constants.emplace_back("C_mu", all ? overall : 0.0);
        r.pass = all;
        if (!all) r.note = "nondegeneracy fails on at least one axis";
        rep.conditions.push_back(std::move(r));
    }

    {  // (M3): Holder-in-x control of |mu_x - mu_y|, plan-relative constants
        ConditionResult r;
        r.name = "M3";
        if (!k.x_dependent) {
            r.pass = true;
            r.constants.emplace_back("C_ball", 0.0);
            r.constants.emplace_back("C_ring", 0.0);
            r.note = "x-independent kernel: zero difference";
        } else {
            const double gamma = k.holder_gamma.value_or(1.0);
            double cball = 0.0, cring = 0.0;
            bool scaling_ok = true;
            auto absdiff_density = [&](const Vec& x, const Vec& y) {
                return [&k, x, y](const Vec& z) {
                    return std::abs(k.density_at(x, z) - k.density_at(y, z));
                };
            };
            for (size_t i = 0; i + 1 < plan.points.size(); ++i) {
                const Vec& x = plan.points[i];
                const Vec& y = plan.points[i + 1];
                double dist = norm(x - y);
                if (dist < 1e-12) continue;
                std::vector<double> logd, logm;
                for (double delta : plan.deltas) {
                    if (delta > k.tail_radius) continue;
                    auto dd = absdiff_density(x, y);
                    LevyKernel kd = k;  // same support; density replaced by |difference|
                    kd.density = [dd](const Vec&, const Vec& z) { return dd(z); };
                    kd.normalization = 1.0;
                    kd.x_dependent = false;
                    double ball =
                        kernel_shell(kd, x, 0.0, delta, [](const Vec& z) { return dot(z, z); }, opt);
                    double ring = kernel_shell(kd, x, delta, k.tail_radius,
                                               [](const Vec& z) { return norm(z); }, opt);
                    cball = std::max(cball,
                                     ball / (std::pow(dist, gamma) * std::pow(delta, 2.0 - k.beta)));
                    double branch = (std::abs(k.beta - 1.0) > 1e-12)
                                        ? std::pow(delta, 1.0 - k.beta)
                                        : std::abs(std::log(delta));
                    if (branch > 1e-300)
                        cring = std::max(cring, ring / (std::pow(dist, gamma) * branch));
                    if (ball > 1e-300) {
                        logd.push_back(std::log(delta));
                        logm.push_back(std::log(ball));
                    }
                }
                if (logd.size() >= 2) {
                    // least-squares slope of log ball-mass vs log delta
                    double sx = 0, sy = 0, sxx = 0, sxy = 0;
                    for (size_t j = 0; j < logd.size(); ++j) {
                        sx += logd[j];
                        sy += logm[j];
                        sxx += logd[j] * logd[j];
                        sxy += logd[j] * logm[j];
                    }
                    double nn = static_cast<double>(logd.size());
                    double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
                    if (slope < (2.0 - k.beta) - 0.3) scaling_ok = false;
                }
            }
            r.constants.emplace_back("C_ball", cball);
            r.constants.emplace_back("C_ring", cring);
            r.constants.emplace_back("gamma", gamma);
            r.pass = scaling_ok && std::isfinite(cball) && std::isfinite(cring);
            if (!scaling_ok) r.note = "ball mass does not follow delta^(2-beta) scaling";
        }
        rep.conditions.push_back(std::move(r));
    }
    return rep;
}

inline std::vector<Vec> unit_directions(int dim, int count) {
    std::vector<Vec> dirs;
    if (dim == 1) {
        dirs = {Vec::of(1.0), Vec::of(-1.0)};
    } else if (dim == 2) {
        for (int i = 0; i < count; ++i) {
            double t = 2.0 * kPi * i / count;
            dirs.push_back(Vec::of(std::cos(t), std::sin(t)));
        }
    } else {
        for (int i = 0; i < count; ++i) {
            double t = 2.0 * kPi * i / count;
            double u = -1.0 + 2.0 * (i + 0.5) / count;
            double r = std::sqrt(std::max(0.0, 1.0 - u * u));
            dirs.push_back(Vec::of(r * std::cos(t), r * std::sin(t), u));
        }
    }
    return dirs;
}

inline ConditionReport verify_jump_conditions(const JumpFunction& j, const LevyKernel& k,
                                              const SamplePlan& plan,
                                              const RadialOptions& opt = {}) {
    if (j.dim != k.dim) throw std::invalid_argument("verify_jump_conditions: dimension mismatch");
    if (plan.empty()) throw std::invalid_argument("verify_jump_conditions: empty sample plan");
    ConditionReport rep;
    const int d = k.support_dim();
    const auto dirs = unit_directions(d, plan.z_directions);
    const double slack = 1e-9;

    {  // (J1)
        ConditionResult r;
        r.name = "J1";
        try {
            double best = 0.0;
            for (const Vec& x : plan.points) {
                double inner = kernel_shell(
                    k, x, 0.0, k.tail_radius,
                    [&](const Vec& z) {
                        Vec jz = j.map(x, k.embed(z));
                        return dot(jz, jz);
                    },
                    opt);
                double tail = kernel_tail_mass(k, x, k.tail_radius, opt);
                best = std::max(best, inner + tail);
                if (!k.x_dependent && j.c0 == j.C0) break;
            }
            r.constants.emplace_back("C_tilde_mu", best);
            r.pass = std::isfinite(best);
        } catch (const QuadratureError&) {
            r.pass = false;
            r.note = "quadrature failure: jump-weighted mass is not integrable";
        }
        rep.conditions.push_back(std::move(r));
    }

    {  // (J2): cone nondegeneracy in the image of the jump
        ConditionResult r;
        r.name = "J2";
        try {
            bool all = true;
            double overall = std::numeric_limits<double>::infinity();
            for (size_t ai = 0; ai < plan.axes.size(); ++ai) {
                const Vec a = normalized(plan.axes[ai]);
                double cmin = std::numeric_limits<double>::infinity();
                for (double eta : plan.etas)
                    for (double delta : plan.deltas) {
                        if (delta > k.tail_radius) continue;
                        double denom = std::pow(eta, 0.5 * (d - 1)) * std::pow(delta, 2.0 - k.beta);
                        for (const Vec& x : plan.points) {
                            auto member = [&](const Vec& z_sub) {
                                Vec jz = j.map(x, k.embed(z_sub));
                                double njz = norm(jz);
                                if (njz > delta) return 0.0;
                                if ((1.0 - eta) * njz > std::abs(dot(a, jz))) return 0.0;
                                return njz * njz;
                            };
                            double mass =
                                kernel_shell(k, x, 0.0, delta / std::max(j.c0, 1e-12), member, opt);
                            cmin = std::min(cmin, mass / denom);
                            if (!k.x_dependent) break;
                        }
                    }
                bool axis_pass = cmin > 1e-12;
                all = all && axis_pass;
                overall = std::min(overall, cmin);
                r.constants.emplace_back("C_mu.axis" + std::to_string(ai), cmin);
            }
            r.constants.emplace_back("C_mu", all ? overall : 0.0);
            r.pass = all;
        } catch (const QuadratureError&) {
            r.pass = false;
            r.note = "quadrature failure on the cone mass";
        }
        rep.conditions.push_back(std::move(r));
    }

    {  // (J3): ring integral of |z| in both branches
        ConditionResult r;
        r.name = "J3";
        try {
            const Vec x0 = plan.points.front();
            double c_power = 0.0, c_log = 0.0;
            for (double delta : plan.deltas) {
                if (delta >= k.tail_radius) continue;
                double ring = kernel_shell(k, x0, delta, k.tail_radius,
                                           [](const Vec& z) { return norm(z); }, opt);
                double pw = std::pow(delta, 1.0 - k.beta);
                if (pw > 1e-300) c_power = std::max(c_power, ring / pw);
                double lg = std::abs(std::log(delta));
                if (lg > 1e-300) c_log = std::max(c_log, ring / lg);
            }
            r.constants.emplace_back("C_power_branch", c_power);
            r.constants.emplace_back("C_log_branch", c_log);
            r.pass = std::isfinite(c_power) && std::isfinite(c_log);
        } catch (const QuadratureError&) {
            r.pass = false;
            r.note = "quadrature failure on the ring integral";
        }
        rep.conditions.push_back(std::move(r));
    }

    {  // (J4): two-sided bounds and Holder-in-x difference on the inner ball
        ConditionResult r;
        r.name = "J4";
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        double holder = 0.0;
        for (const Vec& x : plan.points)
            for (double rad : plan.z_radii)
                for (const Vec& e : dirs) {
                    Vec z = k.embed(rad * e);
                    double ratio = norm(j.map(x, z)) / rad;
                    lo = std::min(lo, ratio);
                    hi = std::max(hi, ratio);
                }
        for (size_t i = 0; i + 1 < plan.points.size(); ++i) {
            const Vec& x = plan.points[i];
            const Vec& y = plan.points[i + 1];
            double dist = norm(x - y);
            if (dist < 1e-12) continue;
            for (double rad : plan.z_radii) {
                if (rad > 1.0) continue;
                for (const Vec& e : dirs) {
                    Vec z = k.embed(rad * e);
                    double diff = norm(j.map(x, z) - j.map(y, z));
                    holder = std::max(holder, diff / (rad * std::pow(dist, j.gamma)));
                }
            }
        }
        r.constants.emplace_back("c0_empirical", lo);
        r.constants.emplace_back("C0_empirical", hi);
        r.constants.emplace_back("holder_quotient", holder);
        r.constants.emplace_back("gamma", j.gamma);
        r.pass = lo >= j.c0 * (1.0 - slack) - slack && hi <= j.C0 * (1.0 + slack) + slack &&
                 holder <= j.C0 * (1.0 + slack) + slack;
        rep.conditions.push_back(std::move(r));
    }

    {  // (J5): tail Holder-in-x difference
        ConditionResult r;
        r.name = "J5";
        double worst = 0.0;
        for (size_t i = 0; i + 1 < plan.points.size(); ++i) {
            const Vec& x = plan.points[i];
            const Vec& y = plan.points[i + 1];
            double dist = norm(x - y);
            if (dist < 1e-12) continue;
            for (double rad : {1.0, 2.0, 5.0, 25.0})
                for (const Vec& e : dirs) {
                    Vec z = k.embed(rad * e);
                    double diff = norm(j.map(x, z) - j.map(y, z));
                    worst = std::max(worst, diff / std::pow(dist, j.gamma));
                }
        }
        r.constants.emplace_back("C0_tilde_empirical", worst);
        r.pass = worst <= j.tail_lipschitz * (1.0 + slack) + slack;
        rep.conditions.push_back(std::move(r));
    }
    return rep;
}

}  // namespace pidelab
