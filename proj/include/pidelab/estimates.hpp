#pragma once

#include "pidelab/operators.hpp"

namespace pidelab {

/// Concave radial test function family used by the doubling argument.
struct TestFunctionPhi {
    enum class Family { holder, lipschitz_regularized };
    Family family = Family::holder;
    double L = 1.0;
    double alpha = 1.0;
    double rho = 0.0;  // lipschitz family only
    double t0 = 1.0;

    static TestFunctionPhi holder(double L, double alpha, double t0 = 1.0) {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("phi: alpha in (0,1]");
        if (!(L > 0.0) || !(t0 > 0.0)) throw std::invalid_argument("phi: L, t0 > 0");
        TestFunctionPhi p;
        p.family = Family::holder;
        p.L = L;
        p.alpha = alpha;
        p.t0 = t0;
        return p;
    }

    /// phi(t) = L (t - rho t^{1+alpha}) up to its maximum t0; requires the
    /// cone-compatibility constraint rho * alpha * 2^{alpha-1} > 1.
    static TestFunctionPhi lipschitz_regularized(double L, double alpha, double rho) {
        if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("phi: alpha in (0,1)");
        if (!(L > 0.0)) throw std::invalid_argument("phi: L > 0");
        if (!(rho * alpha * std::pow(2.0, alpha - 1.0) > 1.0))
            throw std::invalid_argument("phi: rho*alpha*2^(alpha-1) > 1 required");
        TestFunctionPhi p;
        p.family = Family::lipschitz_regularized;
        p.L = L;
        p.alpha = alpha;
        p.rho = rho;
        p.t0 = std::pow(1.0 / (rho * (1.0 + alpha)), 1.0 / alpha);
        return p;
    }

    TestFunctionPhi with_L(double newL) const {
        TestFunctionPhi p = *this;
        p.L = newL;
        return p;
    }

    double value(double t) const {
        double tt = std::min(t, t0);
        if (family == Family::holder) return L * std::pow(tt, alpha);
        return L * (tt - rho * std::pow(tt, 1.0 + alpha));
    }
    double dphi(double t) const {
        if (t >= t0) return 0.0;
        if (family == Family::holder) return L * alpha * std::pow(t, alpha - 1.0);
        return L * (1.0 - rho * (1.0 + alpha) * std::pow(t, alpha));
    }
    double d2phi(double t) const {
        if (t >= t0) return 0.0;
        if (family == Family::holder) return L * alpha * (alpha - 1.0) * std::pow(t, alpha - 2.0);
        return -L * rho * (1.0 + alpha) * alpha * std::pow(t, alpha - 1.0);
    }

    /// phi' > 0 and phi'' <= 0 on a sample grid of (0, t0).
    bool increasing_concave(int samples = 1000) const {
        for (int i = 1; i < samples; ++i) {
            double t = t0 * i / samples;
            if (!(dphi(t) > 0.0) && t < t0 * (1.0 - 1e-12)) {
                if (family == Family::lipschitz_regularized && dphi(t) >= -1e-12) continue;
                return false;
            }
            if (d2phi(t) > 1e-12) return false;
        }
        return true;
    }
};

/// Cone geometry of the doubled maximum: a = x-bar minus y-bar, aperture eta,
/// radius fraction delta0.
struct DoublingGeometry {
    Vec a;
    double eta = 0.1;
    double delta0 = 0.1;

    DoublingGeometry() = default;
    DoublingGeometry(const Vec& a_, double eta_, double delta0_) : a(a_), eta(eta_), delta0(delta0_) {
        if (!(eta > 0.0 && eta < 1.0) || !(delta0 > 0.0 && delta0 < 1.0))
            throw std::invalid_argument("doubling geometry: eta, delta0 in (0,1)");
        if (!(1.0 - eta - delta0 > 0.0))
            throw std::invalid_argument("doubling geometry: 1 - eta - delta0 > 0 required");
    }
    double eta_tilde() const { return (1.0 - eta - delta0) / (1.0 + delta0); }
    double delta() const { return norm(a) * delta0; }
};

// --- doubling maxima ------------------------------------------------------------

struct MaxPoint {
    Vec x, y;
    Vec a;  // torus-minimal x - y
    double M = 0.0;
    bool degenerate = true;
};

/// Per-offset table: maxdiff(o) = max_x [u(x) - v(x-o)] with its arg max.
/// psi maximization for any radial penalty reduces to a scan over offsets.
struct OffsetTable {
    Geometry geo;
    std::vector<double> maxdiff;
    std::vector<long> argbase;

    static OffsetTable build(const GridFunction& u, const GridFunction& v) {
        if (!(u.geometry() == v.geometry()))
            throw std::invalid_argument("offset table: geometry mismatch");
        OffsetTable t;
        t.geo = u.geometry();
        const long N = t.geo.size();
        t.maxdiff.assign(static_cast<size_t>(N), -1e300);
        t.argbase.assign(static_cast<size_t>(N), 0);
        const int d = t.geo.dim();
        const int n = t.geo.n;
        const auto& uv = u.values();
        const auto& vv = v.values();
        std::array<int, 3> off{0, 0, 0};
        for (long fo = 0; fo < N; ++fo) {
            double best = -1e300;
            long bestx = 0;
            std::array<int, 3> xi{0, 0, 0};
            for (long fx = 0; fx < N; ++fx) {
                // y = x - o
                long fy;
                if (d == 1) {
                    fy = t.geo.wrap(xi[0] - off[0]);
                } else if (d == 2) {
                    fy = static_cast<long>(t.geo.wrap(xi[0] - off[0])) * n +
                         t.geo.wrap(xi[1] - off[1]);
                } else {
                    fy = (static_cast<long>(t.geo.wrap(xi[0] - off[0])) * n +
                          t.geo.wrap(xi[1] - off[1])) *
                             n +
                         t.geo.wrap(xi[2] - off[2]);
                }
                double val = uv[static_cast<size_t>(fx)] - vv[static_cast<size_t>(fy)];
                if (val > best) {
                    best = val;
                    bestx = fx;
                }
                for (int a = d - 1; a >= 0; --a) {
                    if (++xi[static_cast<size_t>(a)] < n) break;
                    xi[static_cast<size_t>(a)] = 0;
                }
            }
            t.maxdiff[static_cast<size_t>(fo)] = best;
            t.argbase[static_cast<size_t>(fo)] = bestx;
            for (int a = d - 1; a >= 0; --a) {
                if (++off[static_cast<size_t>(a)] < n) break;
                off[static_cast<size_t>(a)] = 0;
            }
        }
        return t;
    }

    std::array<int, 3> unflatten(long f) const {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = geo.dim() - 1; a >= 0; --a) {
            idx[static_cast<size_t>(a)] = static_cast<int>(f % geo.n);
            f /= geo.n;
        }
        return idx;
    }

    /// Torus-minimal displacement vector of offset index f.
    Vec offset_vec(long f) const {
        auto idx = unflatten(f);
        Vec o(geo.dim());
        for (int a = 0; a < geo.dim(); ++a)
            o[a] = torus_delta(idx[static_cast<size_t>(a)] * geo.h());
        return o;
    }

    /// Maximize maxdiff(o) - penalty(o); returns the located pair.
    template <class Penalty>
    MaxPoint maximize(Penalty&& penalty) const {
        const long N = geo.size();
        double best = -1e300;
        long bo = 0;
        for (long f = 0; f < N; ++f) {
            double val = maxdiff[static_cast<size_t>(f)] - penalty(offset_vec(f));
            if (val > best) {
                best = val;
                bo = f;
            }
        }
        MaxPoint mp;
        mp.M = best;
        Vec o = offset_vec(bo);
        auto xb = unflatten(argbase[static_cast<size_t>(bo)]);
        Vec x(geo.dim());
        for (int a = 0; a < geo.dim(); ++a) x[a] = xb[static_cast<size_t>(a)] * geo.h();
        mp.x = x;
        Vec y = x - o;
        for (int a = 0; a < geo.dim(); ++a) y[a] -= std::floor(y[a]);
        mp.y = y;
        mp.a = o;
        mp.degenerate = (mp.M <= 0.0) || (norm(o) < 1e-15);
        return mp;
    }
};

/// Exhaustive lattice maximization of psi(x,y) = u(x) - v(y) - phi(|x-y|).
inline MaxPoint locate_max(const GridFunction& u, const GridFunction& v,
                           const TestFunctionPhi& phi) {
    OffsetTable t = OffsetTable::build(u, v);
    return t.maximize([&](const Vec& o) { return phi.value(norm(o)); });
}

struct PartialMax {
    MaxPoint point;
    double penalization_gap = 0.0;
};

/// Maximize u(x) - u(y) - phi(|x_w - y_w|) - |x_o - y_o|^2 / eps^2 where w is
/// the selected block and o the complementary one.
inline PartialMax partial_locate_max(const GridFunction& u, int which, const TestFunctionPhi& phi,
                                     double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("partial_locate_max: eps > 0");
    const Geometry& g = u.geometry();
    auto axes_w = g.block_axes(which);
    auto axes_o = g.block_axes(which == 1 ? 2 : 1);
    OffsetTable t = OffsetTable::build(u, u);
    auto block_norm = [](const Vec& o, const std::vector<int>& axes) {
        double s = 0;
        for (int a : axes) s += o[a] * o[a];
        return std::sqrt(s);
    };
    MaxPoint mp = t.maximize([&](const Vec& o) {
        double no = block_norm(o, axes_o);
        return phi.value(block_norm(o, axes_w)) + no * no / (eps * eps);
    });
    double no = block_norm(mp.a, axes_o);
    double nw = block_norm(mp.a, axes_w);
    mp.degenerate = (mp.M <= 0.0) || (nw < 1e-15);
    return {mp, no * no / (eps * eps)};
}

// --- concave estimates ------------------------------------------------------------

inline const std::vector<double>& s_grid_33() {
    static std::vector<double> s = [] {
        std::vector<double> g;
        for (int i = 0; i <= 32; ++i) g.push_back(-1.0 + 2.0 * i / 32.0);
        return g;
    }();
    return s;
}

struct EstimateSides {
    double lhs = 0.0;
    double rhs = 0.0;
    double term_tail = 0.0;
    double term_cone = 0.0;
    double term_ring = 0.0;
    double term_ball = 0.0;
};

namespace detail {

inline void require_plain_kernel(const LevyKernel& k, const char* who) {
    if (k.kind == KernelKind::directional_embedding)
        throw std::invalid_argument(std::string(who) + ": directional embeddings not supported here");
}

/// sup over the 33-point s-grid of the concave-combination integrand.
inline double cone_sup_integrand(const TestFunctionPhi& phi, const Vec& a, const Vec& w,
                                 double eta_tilde) {
    double best = -1e300;
    const double et2 = eta_tilde * eta_tilde;
    for (double s : s_grid_33()) {
        double r = norm(a + s * w);
        if (r < 1e-300) r = 1e-300;
        double v = (1.0 - et2) * phi.dphi(r) / r + et2 * phi.d2phi(r);
        best = std::max(best, v);
    }
    return best;
}

inline double sup_dphi_over_r(const TestFunctionPhi& phi, const Vec& a, const Vec& w) {
    double best = -1e300;
    for (double s : s_grid_33()) {
        double r = norm(a + s * w);
        if (r < 1e-300) r = 1e-300;
        best = std::max(best, phi.dphi(r) / r);
    }
    return best;
}

inline LevyKernel abs_difference_kernel(const LevyKernel& k, const Vec& x, const Vec& y) {
    LevyKernel kd = k;
    auto base = k;
    kd.density = [base, x, y](const Vec&, const Vec& z) {
        return std::abs(base.density_at(x, z) - base.density_at(y, z));
    };
    kd.normalization = 1.0;
    kd.x_dependent = false;
    kd.fractional_radial = false;
    return kd;
}

}  // namespace detail

/// Both sides of the concave estimate for general nonlocal operators at a
/// located non-degenerate doubling maximum; asserts nothing, returns the
/// numbers for the caller to compare.
inline EstimateSides concave_estimate_sides(const LevyKernel& kernel, const GridFunction& u,
                                            const GridFunction& v, const TestFunctionPhi& phi,
                                            const DoublingGeometry& geom, const MaxPoint& mp,
                                            const NonlocalOptions& opt = {}) {
    detail::require_plain_kernel(kernel, "concave_estimate_sides");
    if (mp.degenerate)
        throw std::invalid_argument("concave_estimate_sides: degenerate maximum point");
    const Vec a = geom.a;
    const double na = norm(a);
    if (na < 1e-15) throw std::invalid_argument("concave_estimate_sides: |a| = 0");
    const Vec ahat = a * (1.0 / na);
    const Vec p = phi.dphi(na) * ahat;
    const double delta = geom.delta();
    const double eta_t = geom.eta_tilde();

    EstimateSides out;
    SplitSpec split;
    split.delta = std::min(0.5, std::max(delta, 2.0 * u.geometry().h()));
    split.gradient_override = p;
    out.lhs = eval_nonlocal(kernel, u, mp.x, split, opt) - eval_nonlocal(kernel, v, mp.y, split, opt);

    std::vector<Vec> m1pts = {mp.x, mp.y};
    const double ctilde = m1_constant(kernel, m1pts, opt.radial);
    out.term_tail = 4.0 * ctilde * std::max(u.max_norm(), v.max_norm());

    auto cone_g = [&](const Vec& z) {
        return detail::cone_sup_integrand(phi, a, z, eta_t) * dot(z, z);
    };
    double cone_x = kernel_cone(kernel, mp.x, ahat, geom.eta, delta, cone_g, opt.radial);
    double cone_y = kernel.x_dependent ? kernel_cone(kernel, mp.y, ahat, geom.eta, delta, cone_g, opt.radial)
                                       : cone_x;
    out.term_cone = 0.5 * (cone_x + cone_y);

    if (kernel.x_dependent) {
        LevyKernel kd = detail::abs_difference_kernel(kernel, mp.x, mp.y);
        out.term_ring = 2.0 * phi.dphi(na) *
                        kernel_shell(kd, mp.x, delta, 1.0, [](const Vec& z) { return norm(z); },
                                     opt.radial);
        auto ball_g = [&](const Vec& z) { return detail::sup_dphi_over_r(phi, a, z) * dot(z, z); };
        out.term_ball = kernel_ball_minus_cone(kd, mp.x, ahat, geom.eta, delta, ball_g, opt.radial);
    }
    out.rhs = out.term_tail + out.term_cone + out.term_ring + out.term_ball;
    return out;
}

/// Middle cone of the Levy-Ito estimate, evaluated at the midpoint of the
/// located pair.
struct MiddleCone {
    Vec mid;
    Vec ahat;
    double eta, delta;
    const JumpFunction* jump;

    bool contains(const Vec& z) const {
        Vec jm = jump->map(mid, z);
        double njm = norm(jm);
        if (njm > 0.5 * delta) return false;
        return std::abs(dot(jm, ahat)) >= (1.0 - 0.5 * eta) * njm;
    }
};

inline EstimateSides levy_ito_concave_sides(const JumpFunction& jump, const LevyKernel& kernel,
                                            const GridFunction& u, const GridFunction& v,
                                            const TestFunctionPhi& phi,
                                            const DoublingGeometry& geom, const MaxPoint& mp,
                                            const NonlocalOptions& opt = {}) {
    detail::require_plain_kernel(kernel, "levy_ito_concave_sides");
    if (mp.degenerate)
        throw std::invalid_argument("levy_ito_concave_sides: degenerate maximum point");
    const Vec a = geom.a;
    const double na = norm(a);
    const Vec ahat = a * (1.0 / na);
    const double delta = geom.delta();
    const double eta_t = geom.eta_tilde();

    // smallness condition guaranteeing the middle-cone inclusion
    const double lhs_small = std::pow(0.5 * na, jump.gamma);
    const double rhs_small = (jump.c0 / jump.C0) * geom.eta / (4.0 - geom.eta);
    if (lhs_small > rhs_small)
        throw std::invalid_argument(
            "levy_ito_concave_sides: smallness condition (|a|/2)^gamma <= (c0/C0) eta/(4-eta) "
            "fails; the middle-cone inclusion is not guaranteed");

    Vec mid = mp.y + 0.5 * a;
    for (int i = 0; i < mid.dim; ++i) mid[i] -= std::floor(mid[i]);
    MiddleCone cone{mid, ahat, geom.eta, delta, &jump};

    EstimateSides out;
    const Vec p = phi.dphi(na) * ahat;
    SplitSpec split;
    split.delta = std::min(0.5, std::max(delta, 2.0 * u.geometry().h()));
    split.gradient_override = p;
    out.lhs =
        eval_levy_ito(jump, kernel, u, mp.x, split, opt) - eval_levy_ito(jump, kernel, v, mp.y, split, opt);

    // (J1)-type constant: jump-weighted inner mass plus plain tail mass
    double ctilde = 0.0;
    for (const Vec& xq : {mp.x, mp.y}) {
        double inner = kernel_shell(
            kernel, xq, 0.0, 1.0,
            [&](const Vec& z) {
                Vec jz = jump.map(xq, z);
                return dot(jz, jz);
            },
            opt.radial);
        ctilde = std::max(ctilde, inner + kernel_tail_mass(kernel, xq, 1.0, opt.radial));
    }
    out.term_tail = 4.0 * ctilde * std::max(u.max_norm(), v.max_norm());

    // cone term: per-point Taylor bound, averaged over the two base points
    const double zball = delta / (2.0 * std::max(jump.c0, 1e-12));
    for (const Vec& xq : {mp.x, mp.y}) {
        auto g = [&](const Vec& z) {
            if (!cone.contains(z)) return 0.0;
            Vec jz = jump.map(xq, z);
            return detail::cone_sup_integrand(phi, a, jz, eta_t) * dot(jz, jz);
        };
        out.term_cone += 0.5 * kernel_shell(kernel, xq, 0.0, zball, g, opt.radial);
    }

    // Delta-split terms over B minus the middle cone
    auto delta_of = [&](const Vec& z) { return jump.map(mp.x, z) - jump.map(mp.y, z); };
    auto ring_g = [&](const Vec& z) {
        if (cone.contains(z)) return 0.0;
        Vec dz = delta_of(z);
        double nd = norm(dz);
        return nd >= delta ? nd : 0.0;
    };
    auto ball_g = [&](const Vec& z) {
        if (cone.contains(z)) return 0.0;
        Vec dz = delta_of(z);
        double nd = norm(dz);
        if (nd >= delta || nd == 0.0) return 0.0;
        return detail::sup_dphi_over_r(phi, a, dz) * nd * nd;
    };
    out.term_ring = 2.0 * phi.dphi(na) * kernel_shell(kernel, mp.x, 0.0, 1.0, ring_g, opt.radial);
    out.term_ball = kernel_shell(kernel, mp.x, 0.0, 1.0, ball_g, opt.radial);

    out.rhs = out.term_tail + out.term_cone + out.term_ring + out.term_ball;
    return out;
}

// --- quadratic estimates -----------------------------------------------------------

/// Bound of the quadratic doubling estimate for Levy-Ito operators.
inline double quadratic_bound(const JumpFunction& jump, const LevyKernel& kernel, double eps,
                              const Vec& a, double delta, const NonlocalOptions& opt = {}) {
    if (!(eps > 0.0) || !(delta > 0.0))
        throw std::invalid_argument("quadratic_bound: eps, delta > 0");
    Vec x0 = Vec::zero(kernel.dim);
    const double variance = kernel_variance_mass(kernel, x0, delta, opt.radial);
    const double ctilde = m1_constant(kernel, {x0}, opt.radial);
    const double na = norm(a);
    const double C0 = jump.C0;
    const double g = jump.gamma;
    return 2.0 * C0 * C0 / (eps * eps) * variance +
           C0 * C0 * std::pow(na, 2.0 * g) / (eps * eps) * ctilde +
           2.0 * C0 * std::pow(na, g + 1.0) / (eps * eps) * ctilde;
}

struct QuadraticCheck {
    MaxPoint point;
    double lhs = 0.0;
    double bound = 0.0;
    bool holds = false;
};

/// Companion check: the direct difference at a located maximum of the
/// quadratic doubling u(x) - u(y) - |x-y|^2/eps^2 stays below the bound.
inline QuadraticCheck quadratic_companion_check(const JumpFunction& jump, const LevyKernel& kernel,
                                                const GridFunction& u, double eps, double delta,
                                                const NonlocalOptions& opt = {}) {
    OffsetTable t = OffsetTable::build(u, u);
    MaxPoint mp = t.maximize([&](const Vec& o) {
        double d = norm(o);
        return d * d / (eps * eps);
    });
    QuadraticCheck qc;
    qc.point = mp;
    if (mp.degenerate) return qc;
    Vec p = (2.0 / (eps * eps)) * mp.a;
    SplitSpec split;
    split.delta = std::min(0.5, std::max(delta, 2.0 * u.geometry().h()));
    split.gradient_override = p;
    qc.lhs = eval_levy_ito(jump, kernel, u, mp.x, split, opt) -
             eval_levy_ito(jump, kernel, u, mp.y, split, opt);
    qc.bound = quadratic_bound(jump, kernel, eps, mp.a, delta, opt);
    qc.holds = qc.lhs <= qc.bound + 1e-6 * (1.0 + std::abs(qc.bound));
    return qc;
}

// --- assembled corollary bounds ------------------------------------------------------

struct AssembledBound {
    double value = 0.0;       // full bound
    double leading = 0.0;     // alpha C(mu), resp. Theta
    double o_term = 0.0;      // measured o_{|a|}(1)
    double big_o = 0.0;       // 4 C~ max norms
    double threshold = 0.0;   // |a| below which leading - o_term stays positive
    double c_mu = 0.0;        // measured cone constant
};

namespace detail {

/// Cone constant fit C_mu = mass / (eta^{(d-1)/2} delta^{2-beta}), worst case
/// over a small x-grid for x-dependent kernels.
inline double measured_cone_constant(const LevyKernel& k, const Vec& ahat, double eta, double delta,
                                     const RadialOptions& opt) {
    const int d = k.dim;
    double worst = std::numeric_limits<double>::infinity();
    SamplePlan plan = SamplePlan::standard(d);
    std::vector<Vec> xs = k.x_dependent ? plan.points : std::vector<Vec>{Vec::zero(d)};
    for (const Vec& x : xs) {
        auto cm = cone_mass(k, ConeSpec(ahat, eta, delta), x, opt);
        worst = std::min(worst, cm.value);
    }
    return worst / (std::pow(eta, 0.5 * (d - 1)) * std::pow(delta, 2.0 - k.beta));
}

/// Measured (M3) ring/ball constants from the standard plan (0 for
/// x-independent kernels).
inline std::pair<double, double> measured_m3_constants(const LevyKernel& k,
                                                       const RadialOptions& opt) {
    if (!k.x_dependent) return {0.0, 0.0};
    ConditionReport rep = verify_measure_conditions(k, SamplePlan::standard(k.dim), opt);
    const auto& m3 = rep.find("M3");
    double cball = 0, cring = 0;
    for (const auto& [key, val] : m3.constants) {
        if (key == "C_ball") cball = val;
        if (key == "C_ring") cring = val;
    }
    return {cball, cring};
}

inline double solve_threshold(double leading, const std::function<double(double)>& o_of_a,
                              double hi) {
    if (o_of_a(hi) <= leading) return hi;
    double lo = 1e-9;
    if (o_of_a(lo) > leading) return 0.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (o_of_a(mid) <= leading ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

/// Assembled Holder-corollary bound -L|a|^{alpha-beta}(alpha C(mu) - o(|a|)) + O,
/// with every constant measured from the kernel rather than assumed.
inline AssembledBound holder_bound(const LevyKernel& kernel, const TestFunctionPhi& phi,
                                   const Vec& a, const DoublingGeometry& geom, double norm_u,
                                   double norm_v, const NonlocalOptions& opt = {}) {
    detail::require_plain_kernel(kernel, "holder_bound");
    if (phi.family != TestFunctionPhi::Family::holder)
        throw std::invalid_argument("holder_bound: phi must be the holder family");
    const double alpha = phi.alpha;
    const double beta = kernel.beta;
    if (!(alpha < std::min(beta, 1.0)))
        throw std::invalid_argument("holder_bound: alpha < min(beta, 1) required");
    const double floor = (norm_u + norm_v) / std::pow(phi.t0, alpha);
    if (!(phi.L > floor))
        throw std::invalid_argument("holder_bound: L must exceed (||u||+||v||)/t0^alpha = " +
                                    format_double(floor));
    const double eta_t = geom.eta_tilde();
    if (!((2.0 - alpha) * eta_t * eta_t > 0.5))
        throw std::invalid_argument("holder_bound: (2-alpha) eta_tilde^2 > 1/2 required");

    const double na = norm(a);
    const Vec ahat = a * (1.0 / na);
    const double delta = na * geom.delta0;
    const int d = kernel.dim;
    const double kappa = (2.0 - alpha) * eta_t * eta_t - 1.0;

    AssembledBound out;
    out.c_mu = detail::measured_cone_constant(kernel, ahat, geom.eta, delta, opt.radial);
    const double c_of_mu = kappa * std::pow(1.0 + geom.delta0, alpha - 2.0) * out.c_mu *
                           std::pow(geom.eta, 0.5 * (d - 1)) * std::pow(geom.delta0, 2.0 - beta);
    out.leading = alpha * c_of_mu;

    auto [cball, cring] = detail::measured_m3_constants(kernel, opt.radial);
    const double gamma = kernel.holder_gamma.value_or(1.0);
    auto o_of = [&](double r) {
        double ring = (std::abs(beta - 1.0) > 1e-12)
                          ? 2.0 * alpha * cring * std::pow(geom.delta0, 1.0 - beta) * std::pow(r, gamma)
                          : 2.0 * alpha * cring * std::pow(r, gamma) *
                                std::abs(std::log(r * geom.delta0));
        double ball = alpha * cball * std::pow(1.0 - geom.delta0, alpha - 2.0) *
                      std::pow(geom.delta0, 2.0 - beta) * std::pow(r, gamma);
        return ring + ball;
    };
    out.o_term = o_of(na);
    out.big_o = 4.0 * m1_constant(kernel, SamplePlan::standard(d).points, opt.radial) *
                std::max(norm_u, norm_v);
    out.value = -phi.L * std::pow(na, alpha - beta) * (out.leading - out.o_term) + out.big_o;
    out.threshold = detail::solve_threshold(out.leading, o_of, phi.t0);
    return out;
}

/// Assembled Lipschitz-corollary bound with the |a|-dependent cone geometry
/// eta_tilde = 1 - |a|^alpha eta0, delta0 = |a|^alpha eta0 / 2, eta = |a|^{2 alpha} eta0^2 / 2.
inline AssembledBound lipschitz_bound(const LevyKernel& kernel, const TestFunctionPhi& phi,
                                      const Vec& a, double eta_tilde0, double norm_u,
                                      double norm_v, const NonlocalOptions& opt = {}) {
    detail::require_plain_kernel(kernel, "lipschitz_bound");
    if (phi.family != TestFunctionPhi::Family::lipschitz_regularized)
        throw std::invalid_argument("lipschitz_bound: phi must be the lipschitz family");
    const double alpha = phi.alpha;
    const double beta = kernel.beta;
    const int d = kernel.dim;
    const double gamma = kernel.holder_gamma.value_or(1.0);
    if (!(beta > 1.0)) throw std::invalid_argument("lipschitz_bound: beta > 1 required");
    if (!(eta_tilde0 > 0.0 && eta_tilde0 < 0.25))
        throw std::invalid_argument("lipschitz_bound: eta_tilde0 in (0, 1/4) required");
    const double alpha_cap = std::min(gamma / (d + 1.0), (beta - 1.0) / (d + 2.0 - beta));
    if (!(alpha < alpha_cap))
        throw std::invalid_argument("lipschitz_bound: alpha below min(gamma/(d+1), (beta-1)/(d+2-beta)) = " +
                                    format_double(alpha_cap));
    const double floor = (norm_u + norm_v) * (alpha + 1.0) / (phi.t0 * alpha);
    if (!(phi.L > floor))
        throw std::invalid_argument("lipschitz_bound: L must exceed " + format_double(floor));

    const double na = norm(a);
    const Vec ahat = a * (1.0 / na);
    const double delta0 = 0.5 * std::pow(na, alpha) * eta_tilde0;
    const double eta = 0.5 * std::pow(na, 2.0 * alpha) * eta_tilde0 * eta_tilde0;
    const double delta = na * delta0;
    const double theta_shape = phi.rho * alpha * std::pow(2.0, alpha - 1.0) - 1.0;

    AssembledBound out;
    out.c_mu = detail::measured_cone_constant(kernel, ahat, eta, delta, opt.radial);
    const double c_of_mu = out.c_mu * std::pow(0.5 * eta_tilde0 * eta_tilde0, 0.5 * (d - 1)) *
                           std::pow(0.5 * eta_tilde0, 2.0 - beta);
    out.leading = theta_shape * c_of_mu;
    if (!(out.leading > 0.0))
        throw std::invalid_argument("lipschitz_bound: Theta must be positive");

    auto [cball, cring] = detail::measured_m3_constants(kernel, opt.radial);
    auto o_of = [&](double r) {
        double ring = 2.0 * cring * std::pow(0.5 * eta_tilde0, 1.0 - beta) *
                      std::pow(r, gamma - alpha * (d + 1.0));
        double d0 = 0.5 * std::pow(r, alpha) * eta_tilde0;
        double ball = cball / (1.0 - d0) * std::pow(0.5 * eta_tilde0, 2.0 - beta) *
                      std::pow(r, gamma - alpha * d);
        return ring + ball;
    };
    out.o_term = o_of(na);
    out.big_o = 4.0 * m1_constant(kernel, SamplePlan::standard(d).points, opt.radial) *
                std::max(norm_u, norm_v);
    const double expo = (1.0 - beta) + alpha * (d + 2.0 - beta);
    out.value = -phi.L * std::pow(na, expo) * (out.leading - out.o_term) + out.big_o;
    out.threshold = detail::solve_threshold(out.leading, o_of, phi.t0);
    return out;
}

// --- directional sign analysis --------------------------------------------------------

struct DirectionalReport {
    double trace_expression = 0.0;    // 4 L alpha |a|^{alpha-2} (1 + (alpha-2) q1)
    double trace_factor = 0.0;        // 1 + (alpha-2) q1
    double nonlocal_factor = 0.0;     // 1 + eta_tilde^2 (alpha-2) q2
    bool local_active = false;        // trace expression strictly negative
    bool nonlocal_active = false;     // nonlocal factor strictly negative
    double local_threshold_q1 = 0.0;  // q1 = |a1|^2/|a|^2 sign change
    double nonlocal_threshold_q2 = 0.0;
};

/// Closed forms of the two degeneracy mechanisms of the mixed toy model: the
/// local trace estimate (block 1) and the cone estimate of the directional
/// nonlocal term (block 2).
inline DirectionalReport directional_sign_analysis(const Vec& a1, const Vec& a2, double alpha,
                                                   double L, double eta_tilde) {
    double n1 = dot(a1, a1), n2 = dot(a2, a2);
    double n = n1 + n2;
    if (!(n > 0.0)) throw std::invalid_argument("directional_sign_analysis: a != 0");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("directional_sign_analysis: alpha in (0,1)");
    const double q1 = n1 / n, q2 = n2 / n;
    const double na = std::sqrt(n);
    DirectionalReport r;
    r.trace_factor = 1.0 + (alpha - 2.0) * q1;
    r.trace_expression = 4.0 * L * alpha * std::pow(na, alpha - 2.0) * r.trace_factor;
    r.nonlocal_factor = 1.0 + eta_tilde * eta_tilde * (alpha - 2.0) * q2;
    r.local_active = r.trace_expression < 0.0;
    r.nonlocal_active = r.nonlocal_factor < 0.0;
    r.local_threshold_q1 = 1.0 / (2.0 - alpha);
    r.nonlocal_threshold_q2 = 1.0 / (eta_tilde * eta_tilde * (2.0 - alpha));
    return r;
}

/// Bisection on q1 = |a1|^2/|a|^2 for the trace-expression sign change.
inline double bisect_trace_threshold(double alpha, double tol = 1e-12) {
    double lo = 0.0, hi = 1.0;
    auto f = [&](double q1) {
        Vec a1 = Vec::of(std::sqrt(q1), 0.0);
        Vec a2 = Vec::of(std::sqrt(1.0 - q1), 0.0);
        return directional_sign_analysis(a1, a2, alpha, 1.0, 0.5).trace_factor;
    };
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace pidelab
