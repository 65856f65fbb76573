#pragma once

#include "pidelab/estimates.hpp"

namespace pidelab {

using CoeffFn = std::function<double(const Vec&)>;

/// (H1)-style ellipticity metadata carried by equation specs for reporting.
struct EllipticityProfile {
    CoeffFn lambda1, lambda2;
    double lambda0 = 1.0;
    double k = 0.0;
    double tau = 1.0, theta = 1.0, theta_tilde = 1.0;
    double C1 = 0.0, C2 = 0.0;
    double gamma_tilde = 0.0;

    bool validate(const Geometry& g) const {
        if (!lambda1 || !lambda2) return false;
        GridFunction probe(g);
        bool ok = true;
        probe.for_each_index([&](const std::array<int, 3>& idx, long) {
            Vec x = probe.point(idx);
            if (lambda1(x) + lambda2(x) < lambda0 - 1e-12) ok = false;
        });
        return ok;
    }
};

// --- term kinds -------------------------------------------------------------

/// -a(x) * (Laplacian over the block axes); diag supplies per-axis
/// coefficients when anisotropy is needed.
struct LocalTraceTerm {
    int block = 0;
    CoeffFn a;
    std::vector<CoeffFn> diag;
};

/// sign * c(x) * I_block[x,u]; sign = -1 with c >= 0 is the dissipative
/// orientation (-I equals +(-Delta)^{beta/2} for fractional kernels).
struct NonlocalTerm {
    int block = 0;
    LevyKernel kernel;
    std::optional<JumpFunction> jump;
    CoeffFn coeff;
    double sign = -1.0;
    bool force_direct = false;  // cross-validation: bypass the spectral fast path
};

/// b(x) |D_block u|^k, upwind for k >= 1, centered with a 1e-12 floor for k < 1.
struct GradientPowerTerm {
    int block = 0;
    CoeffFn b;
    double exponent = 1.0;
};

/// b(x) . D_block u with per-component upwinding against the sign of b.
struct DriftTerm {
    int block = 0;
    std::vector<CoeffFn> b;
};

struct TermSet {
    std::vector<LocalTraceTerm> local_terms;
    std::vector<NonlocalTerm> nonlocal_terms;
    std::vector<GradientPowerTerm> gradient_terms;
    std::vector<DriftTerm> drift_terms;
    double zeroth_order = 0.0;
    CoeffFn forcing;  // null means 0
};

struct EquationSpec {
    Geometry geo{1, 0, 64};
    TermSet base;
    std::vector<std::vector<TermSet>> controls;  // Gamma x Delta; empty = plain equation
    std::optional<EllipticityProfile> profile;
    bool profile_checked = false;
    double grad_clamp = std::numeric_limits<double>::infinity();

    bool has_controls() const { return !controls.empty(); }

    void validate() const {
        auto dissipative = [](const TermSet& t) {
            if (!t.local_terms.empty()) return true;
            for (const auto& nl : t.nonlocal_terms)
                if (nl.sign < 0) return true;
            return false;
        };
        if (!dissipative(base) && !has_controls())
            throw std::invalid_argument("equation spec: needs a dissipative term");
        if (has_controls()) {
            size_t cols = controls.front().size();
            if (cols == 0) throw std::invalid_argument("equation spec: empty Delta family");
            if (controls.size() > 16 || cols > 16)
                throw std::invalid_argument("equation spec: control families limited to 16");
            for (const auto& row : controls) {
                if (row.size() != cols)
                    throw std::invalid_argument("equation spec: ragged control grid");
                for (const auto& ts : row)
                    if (!dissipative(ts))
                        throw std::invalid_argument("equation spec: non-dissipative control variant");
            }
        }
    }

    EquationSpec with_resolution(int n) const {
        EquationSpec s = *this;
        s.geo = Geometry(geo.d1, geo.d2, n);
        return s;
    }
};

/// Clamp |Du| at R in every gradient-power and drift term (R = +inf leaves
/// the spec unchanged, R = 0 removes the gradient terms' contribution).
inline EquationSpec gradient_cutoff(const EquationSpec& spec, double R) {
    if (!(R >= 0.0)) throw std::invalid_argument("gradient_cutoff: R >= 0");
    EquationSpec s = spec;
    s.grad_clamp = R;
    return s;
}

// --- compiled evaluation ------------------------------------------------------

namespace detail {

struct CompiledLocal {
    std::vector<int> axes;
    std::vector<GridFunction> coeff;  // one per axis
};
struct CompiledNonlocal {
    const NonlocalTerm* term = nullptr;
    GridFunction coeff;
    bool spectral = false;
};
struct CompiledGradPow {
    std::vector<int> axes;
    GridFunction b;
    double k = 1.0;
};
struct CompiledDrift {
    std::vector<int> axes;
    std::vector<GridFunction> b;
};

struct CompiledTermSet {
    CompiledLocal dummy;
    std::vector<CompiledLocal> locals;
    std::vector<CompiledNonlocal> nonlocals;
    std::vector<CompiledGradPow> gradients;
    std::vector<CompiledDrift> drifts;
    double zeroth = 0.0;
    GridFunction forcing;
};

inline GridFunction sample_or_one(const CoeffFn& f, const Geometry& g) {
    if (!f) {
        GridFunction one(g);
        for (double& v : one.values()) v = 1.0;
        return one;
    }
    return GridFunction::sample(g, f);
}

inline CompiledTermSet compile(const TermSet& ts, const Geometry& g) {
    CompiledTermSet c;
    for (const auto& t : ts.local_terms) {
        CompiledLocal cl;
        cl.axes = g.block_axes(t.block);
        if (!t.diag.empty()) {
            if (t.diag.size() != cl.axes.size())
                throw std::invalid_argument("local term: diag size must match block dim");
            for (const auto& f : t.diag) cl.coeff.push_back(sample_or_one(f, g));
        } else {
            GridFunction a = sample_or_one(t.a, g);
            for (size_t i = 0; i < cl.axes.size(); ++i) cl.coeff.push_back(a);
        }
        c.locals.push_back(std::move(cl));
    }
    for (const auto& t : ts.nonlocal_terms) {
        CompiledNonlocal cn;
        cn.term = &t;
        cn.coeff = sample_or_one(t.coeff, g);
        cn.spectral = t.kernel.kind == KernelKind::isotropic_fractional && !t.jump &&
                      !t.force_direct && t.kernel.normalization == 1.0;
        c.nonlocals.push_back(std::move(cn));
    }
    for (const auto& t : ts.gradient_terms) {
        CompiledGradPow cg;
        cg.axes = g.block_axes(t.block);
        cg.b = sample_or_one(t.b, g);
        cg.k = t.exponent;
        c.gradients.push_back(std::move(cg));
    }
    for (const auto& t : ts.drift_terms) {
        CompiledDrift cd;
        cd.axes = g.block_axes(t.block);
        if (t.b.size() != cd.axes.size())
            throw std::invalid_argument("drift term: needs one coefficient per block axis");
        for (const auto& f : t.b) cd.b.push_back(sample_or_one(f, g));
        c.drifts.push_back(std::move(cd));
    }
    c.zeroth = ts.zeroth_order;
    c.forcing = ts.forcing ? GridFunction::sample(g, ts.forcing) : GridFunction(g);
    return c;
}

/// F(u) - f for one compiled term set.
inline GridFunction eval_termset(const CompiledTermSet& c, const EquationSpec& spec,
                                 const GridFunction& u, const NonlocalOptions& opt) {
    const Geometry& g = u.geometry();
    const double h = g.h();
    const long N = g.size();
    GridFunction out(g);

    // nonlocal terms first (spectral path works on whole fields)
    for (const auto& cn : c.nonlocals) {
        const NonlocalTerm& t = *cn.term;
        if (cn.spectral) {
            GridFunction lap = fractional_laplacian_spectral(u, t.kernel.beta, t.block);
            // I = -(-Delta)^{beta/2} u
            for (long i = 0; i < N; ++i)
                out.values()[static_cast<size_t>(i)] += t.sign * cn.coeff.values()[static_cast<size_t>(i)] *
                                                        (-lap.values()[static_cast<size_t>(i)]);
        } else {
            GridFunction field(g);
            field.for_each_index([&](const std::array<int, 3>& idx, long f) {
                Vec x = u.point(idx);
                double val;
                SplitSpec split;
                if (t.block == 0) {
                    val = t.jump ? eval_levy_ito(*t.jump, t.kernel, u, x, split, opt)
                                 : eval_nonlocal(t.kernel, u, x, split, opt);
                } else {
                    val = eval_directional(t.kernel, u, x, t.block, split, opt);
                }
                field.values()[static_cast<size_t>(f)] = val;
            });
            for (long i = 0; i < N; ++i)
                out.values()[static_cast<size_t>(i)] += t.sign * cn.coeff.values()[static_cast<size_t>(i)] *
                                                        field.values()[static_cast<size_t>(i)];
        }
    }

    const double clamp = spec.grad_clamp;
    out.for_each_index([&](const std::array<int, 3>& idx, long f) {
        double acc = 0.0;
        const double u0 = u.at(idx);
        // local trace terms
        for (const auto& cl : c.locals) {
            for (size_t i = 0; i < cl.axes.size(); ++i) {
                auto ip = idx, im = idx;
                ip[static_cast<size_t>(cl.axes[i])] += 1;
                im[static_cast<size_t>(cl.axes[i])] -= 1;
                double second = (u.at(ip) - 2.0 * u0 + u.at(im)) / (h * h);
                acc -= cl.coeff[i].values()[static_cast<size_t>(f)] * second;
            }
        }
        // gradient powers
        for (const auto& cg : c.gradients) {
            double mag;
            if (cg.k >= 1.0) {
                double s = 0.0;
                for (int ax : cg.axes) {
                    auto ip = idx, im = idx;
                    ip[static_cast<size_t>(ax)] += 1;
                    im[static_cast<size_t>(ax)] -= 1;
                    double back = (u0 - u.at(im)) / h;
                    double fwd = (u.at(ip) - u0) / h;
                    double gax = std::max({back, -fwd, 0.0});
                    s += gax * gax;
                }
                mag = std::sqrt(s);
            } else {
                double s = 0.0;
                for (int ax : cg.axes) {
                    auto ip = idx, im = idx;
                    ip[static_cast<size_t>(ax)] += 1;
                    im[static_cast<size_t>(ax)] -= 1;
                    double cen = (u.at(ip) - u.at(im)) / (2.0 * h);
                    s += cen * cen;
                }
                mag = std::sqrt(s) + 1e-12;  // floor keeps t -> t^k differentiable at 0
            }
            mag = std::min(mag, clamp);
            acc += cg.b.values()[static_cast<size_t>(f)] * std::pow(mag, cg.k);
        }
        // drift terms
        for (const auto& cd : c.drifts) {
            double p[3] = {0, 0, 0};
            double pnorm2 = 0.0;
            for (size_t i = 0; i < cd.axes.size(); ++i) {
                int ax = cd.axes[i];
                auto ip = idx, im = idx;
                ip[static_cast<size_t>(ax)] += 1;
                im[static_cast<size_t>(ax)] -= 1;
                double bi = cd.b[i].values()[static_cast<size_t>(f)];
                double der = bi >= 0.0 ? (u0 - u.at(im)) / h : (u.at(ip) - u0) / h;
                p[i] = der;
                pnorm2 += der * der;
            }
            double scale = 1.0;
            if (std::isfinite(clamp)) {
                double pn = std::sqrt(pnorm2);
                if (pn > clamp) scale = (clamp == 0.0) ? 0.0 : clamp / pn;
            }
            for (size_t i = 0; i < cd.axes.size(); ++i)
                acc += cd.b[i].values()[static_cast<size_t>(f)] * scale * p[i];
        }
        acc += c.zeroth * u0;
        acc -= c.forcing.values()[static_cast<size_t>(f)];
        out.values()[static_cast<size_t>(f)] += acc;
    });
    return out;
}

struct CompiledSpec {
    std::vector<std::vector<CompiledTermSet>> grid;  // at least 1x1
    bool is_supinf = false;
};

inline CompiledSpec compile_spec(const EquationSpec& spec) {
    spec.validate();
    CompiledSpec cs;
    if (spec.has_controls()) {
        cs.is_supinf = true;
        for (const auto& row : spec.controls) {
            std::vector<CompiledTermSet> crow;
            for (const auto& ts : row) crow.push_back(compile(ts, spec.geo));
            cs.grid.push_back(std::move(crow));
        }
    } else {
        cs.grid.push_back({});
        cs.grid.back().push_back(compile(spec.base, spec.geo));
    }
    return cs;
}

/// Pointwise sup-inf residual; records the active (gamma, delta) pair.
inline GridFunction eval_residual(const CompiledSpec& cs, const EquationSpec& spec,
                                  const GridFunction& u, const NonlocalOptions& opt,
                                  std::vector<std::pair<int, int>>* active = nullptr) {
    std::vector<std::vector<GridFunction>> fields;
    for (const auto& row : cs.grid) {
        std::vector<GridFunction> frow;
        for (const auto& c : row) frow.push_back(eval_termset(c, spec, u, opt));
        fields.push_back(std::move(frow));
    }
    const long N = u.geometry().size();
    if (fields.size() == 1 && fields[0].size() == 1) {
        if (active) active->assign(static_cast<size_t>(N), {0, 0});
        return fields[0][0];
    }
    GridFunction out(u.geometry());
    if (active) active->assign(static_cast<size_t>(N), {0, 0});
    for (long i = 0; i < N; ++i) {
        double best_sup = -1e300;
        int bg = 0, bd = 0;
        for (size_t gi = 0; gi < fields.size(); ++gi) {
            double worst_inf = 1e300;
            int wdi = 0;
            for (size_t di = 0; di < fields[gi].size(); ++di) {
                double v = fields[gi][di].values()[static_cast<size_t>(i)];
                if (v < worst_inf) {
                    worst_inf = v;
                    wdi = static_cast<int>(di);
                }
            }
            if (worst_inf > best_sup) {
                best_sup = worst_inf;
                bg = static_cast<int>(gi);
                bd = wdi;
            }
        }
        out.values()[static_cast<size_t>(i)] = best_sup;
        if (active) (*active)[static_cast<size_t>(i)] = {bg, bd};
    }
    return out;
}

}  // namespace detail

/// Pointwise F(u) - f (sup-inf over control families when present).
inline GridFunction residual(const EquationSpec& spec, const GridFunction& u,
                             const NonlocalOptions& opt = {}) {
    auto cs = detail::compile_spec(spec);
    return detail::eval_residual(cs, spec, u, opt);
}

/// CFL time step 0.5 / (sum of term stiffnesses): local 4 d/h^2, fractional
/// stiffness from the spectral multiplier at the Nyquist mode, gradient and
/// drift terms linearized at unit scale.
inline double cfl_dt(const EquationSpec& spec) {
    const Geometry& g = spec.geo;
    const double h = g.h();
    auto sup_field = [&](const CoeffFn& f) {
        if (!f) return 1.0;
        double m = 0.0;
        GridFunction probe(g);
        probe.for_each_index(
            [&](const std::array<int, 3>& idx, long) { m = std::max(m, std::abs(f(probe.point(idx)))); });
        return m;
    };
    auto set_stiffness = [&](const TermSet& ts) {
        double s = 0.0;
        for (const auto& t : ts.local_terms) {
            double sup = 0.0;
            if (!t.diag.empty())
                for (const auto& f : t.diag) sup = std::max(sup, sup_field(f));
            else
                sup = sup_field(t.a);
            s += sup * 4.0 * static_cast<double>(g.block_axes(t.block).size()) / (h * h);
        }
        for (const auto& t : ts.nonlocal_terms) {
            int bd = static_cast<int>(g.block_axes(t.block).size());
            double scale = t.jump ? std::pow(std::max(t.jump->C0, 1.0), t.kernel.beta) : 1.0;
            int md = std::min(bd, t.kernel.support_dim());
            s += sup_field(t.coeff) * t.kernel.normalization * scale *
                 fractional_multiplier(t.kernel.beta, kPi * g.n, md);
        }
        for (const auto& t : ts.gradient_terms)
            s += sup_field(t.b) * std::max(t.exponent, 1.0) * 2.0 / h;
        for (const auto& t : ts.drift_terms) {
            double sum = 0.0;
            for (const auto& f : t.b) sum += sup_field(f);
            s += sum / h;
        }
        s += std::abs(ts.zeroth_order);
        return s;
    };
    double worst = 0.0;
    if (spec.has_controls()) {
        for (const auto& row : spec.controls)
            for (const auto& ts : row) worst = std::max(worst, set_stiffness(ts));
    } else {
        worst = set_stiffness(spec.base);
    }
    if (!(worst > 0.0)) throw std::invalid_argument("cfl_dt: zero stiffness");
    return 0.5 / worst;
}

struct SolveResult {
    GridFunction u;
    bool converged = false;
    int steps = 0;
    double final_residual = 0.0;
    double dt = 0.0;
    std::vector<std::array<double, 3>> history;  // step, residual max-norm, dt
    std::vector<std::pair<int, int>> active_controls;
    std::string note;
};

namespace detail {

inline SolveResult march(const EquationSpec& spec, const GridFunction& init, double tol,
                         int max_steps, const NonlocalOptions& opt) {
    auto cs = compile_spec(spec);
    SolveResult res;
    res.u = init;
    res.dt = cfl_dt(spec);
    const long N = spec.geo.size();
    const int hist_every = std::max(1, max_steps / 200);
    double res_norm = 0.0;
    int step = 0;
    for (; step < max_steps; ++step) {
        GridFunction r = eval_residual(cs, spec, res.u, opt,
                                       step + 1 == max_steps ? &res.active_controls : nullptr);
        res_norm = r.max_norm();
        if (step % hist_every == 0) res.history.push_back({static_cast<double>(step), res_norm, res.dt});
        if (!std::isfinite(res_norm) || res_norm > 1e12) {
            res.note = "divergence detected";
            res.final_residual = res_norm;
            res.steps = step;
            return res;
        }
        if (res_norm <= tol) {
            eval_residual(cs, spec, res.u, opt, &res.active_controls);
            res.converged = true;
            break;
        }
        for (long i = 0; i < N; ++i)
            res.u.values()[static_cast<size_t>(i)] -= res.dt * r.values()[static_cast<size_t>(i)];
    }
    res.steps = step;
    res.final_residual = res_norm;
    res.history.push_back({static_cast<double>(step), res_norm, res.dt});
    if (!res.converged && res.note.empty()) res.note = "max steps reached";
    return res;
}

}  // namespace detail

/// Explicit pseudo-time marching u <- u - dt residual(u) under the CFL step.
inline SolveResult solve_stationary(const EquationSpec& spec, const GridFunction& init, double tol,
                                    int max_steps, const NonlocalOptions& opt = {}) {
    if (spec.has_controls())
        throw std::invalid_argument("solve_stationary: use solve_isaacs for control families");
    return detail::march(spec, init, tol, max_steps, opt);
}

/// Pointwise sup-inf marching; singleton families reduce exactly to
/// solve_stationary (same arithmetic path).
inline SolveResult solve_isaacs(const EquationSpec& spec, const GridFunction& init, double tol,
                                int max_steps = 200000, const NonlocalOptions& opt = {}) {
    return detail::march(spec, init, tol, max_steps, opt);
}

struct Trajectory {
    std::vector<double> times;
    std::vector<GridFunction> snapshots;
    bool max_principle_ok = true;
    bool blew_up = false;
    std::string note;
};

/// Explicit Euler in time with snapshots; monitors the forced maximum
/// principle min u0 - t ||f|| <= u <= max u0 + t ||f||.
inline Trajectory solve_parabolic(const EquationSpec& spec, const GridFunction& u0, double T,
                                  double dt, int snapshot_every = 0,
                                  const NonlocalOptions& opt = {}) {
    const double dt_max = cfl_dt(spec);
    if (!(dt > 0.0) || dt > dt_max)
        throw std::invalid_argument("solve_parabolic: dt must lie in (0, " + format_double(dt_max) +
                                    "] (CFL)");
    auto cs = detail::compile_spec(spec);
    double fmax = 0.0;
    for (const auto& row : cs.grid)
        for (const auto& c : row) fmax = std::max(fmax, c.forcing.max_norm());
    double lo0 = 1e300, hi0 = -1e300;
    for (double v : u0.values()) {
        lo0 = std::min(lo0, v);
        hi0 = std::max(hi0, v);
    }
    Trajectory traj;
    GridFunction u = u0;
    const int steps = static_cast<int>(std::ceil(T / dt - 1e-12));
    if (snapshot_every <= 0) snapshot_every = std::max(1, steps / 8);
    traj.times.push_back(0.0);
    traj.snapshots.push_back(u);
    const long N = spec.geo.size();
    const double blow_bound = 10.0 * (std::max(std::abs(lo0), std::abs(hi0)) + T * fmax) + 1.0;
    for (int s = 0; s < steps; ++s) {
        const double step_dt = std::min(dt, T - s * dt);  // land exactly on T
        GridFunction r = detail::eval_residual(cs, spec, u, opt);
        for (long i = 0; i < N; ++i)
            u.values()[static_cast<size_t>(i)] -= step_dt * r.values()[static_cast<size_t>(i)];
        double t = s * dt + step_dt;
        double lo = lo0 - t * fmax - 1e-9, hi = hi0 + t * fmax + 1e-9;
        for (double v : u.values()) {
            if (v < lo || v > hi) traj.max_principle_ok = false;
            if (std::abs(v) > blow_bound || !std::isfinite(v)) traj.blew_up = true;
        }
        if (traj.blew_up) {
            traj.note = "instability: field exceeded the a-priori bound";
            traj.times.push_back(t);
            traj.snapshots.push_back(u);
            return traj;
        }
        if ((s + 1) % snapshot_every == 0 || s + 1 == steps) {
            traj.times.push_back(t);
            traj.snapshots.push_back(u);
        }
    }
    return traj;
}

// --- equation catalogue ---------------------------------------------------------

namespace catalogue {

/// -Lap_{x1} u + (-Lap_{x2})^{beta/2} u = f on the 2-torus.
inline EquationSpec toy_model(int n, double beta, CoeffFn f = nullptr) {
    EquationSpec s;
    s.geo = Geometry(1, 1, n);
    LocalTraceTerm lt;
    lt.block = 1;
    s.base.local_terms.push_back(std::move(lt));
    NonlocalTerm nt;
    nt.block = 2;
    nt.kernel = LevyKernel::fractional(1, beta);
    nt.sign = -1.0;
    s.base.nonlocal_terms.push_back(std::move(nt));
    s.base.forcing = f ? std::move(f) : [](const Vec& x) {
        return std::cos(2.0 * kPi * x[0]) * std::cos(2.0 * kPi * x[1]);
    };
    EllipticityProfile prof;
    prof.lambda1 = [](const Vec&) { return 1.0; };
    prof.lambda2 = [](const Vec&) { return 1.0; };
    prof.lambda0 = 1.0;
    s.profile = prof;
    s.profile_checked = true;
    return s;
}

/// (-Lap)^{beta/2} u + b(x) u' + c u = f in one dimension.
inline EquationSpec advection_fractional(int n, double beta, CoeffFn b, CoeffFn f, double c) {
    EquationSpec s;
    s.geo = Geometry(1, 0, n);
    NonlocalTerm nt;
    nt.block = 0;
    nt.kernel = LevyKernel::fractional(1, beta);
    nt.sign = -1.0;
    s.base.nonlocal_terms.push_back(std::move(nt));
    DriftTerm dt;
    dt.block = 0;
    dt.b.push_back(std::move(b));
    s.base.drift_terms.push_back(std::move(dt));
    s.base.zeroth_order = c;
    s.base.forcing = std::move(f);
    s.profile_checked = true;
    return s;
}

/// -tr(A(x) D^2 u) - c(x) I[x,u] + b(x)|Du|^k + |Du|^r + c0 u = f.
inline EquationSpec model_equation(int n, int dim, double beta, CoeffFn A, CoeffFn cI, CoeffFn b,
                                   double k, double r, double c0, CoeffFn f) {
    EquationSpec s;
    s.geo = Geometry(dim, 0, n);
    if (A) {
        LocalTraceTerm lt;
        lt.block = 0;
        lt.a = std::move(A);
        s.base.local_terms.push_back(std::move(lt));
    }
    if (cI) {
        NonlocalTerm nt;
        nt.block = 0;
        nt.kernel = LevyKernel::fractional(dim, beta);
        nt.coeff = std::move(cI);
        nt.sign = -1.0;
        s.base.nonlocal_terms.push_back(std::move(nt));
    }
    if (b) {
        GradientPowerTerm gt;
        gt.block = 0;
        gt.b = std::move(b);
        gt.exponent = k;
        s.base.gradient_terms.push_back(std::move(gt));
    }
    if (r > 0.0) {
        GradientPowerTerm gt;
        gt.block = 0;
        gt.b = [](const Vec&) { return 1.0; };
        gt.exponent = r;
        s.base.gradient_terms.push_back(std::move(gt));
    }
    s.base.zeroth_order = c0;
    s.base.forcing = std::move(f);
    s.profile_checked = true;
    return s;
}

/// Mixed equation with first-order terms:
/// -a1(x1) Lap_{x1} u + sign * I_{x2}[x,u] + b1(x1)|D_{x1}u|^{k1} + b2(x2)|D_{x2}u|^{k2} + c u = f.
inline EquationSpec mixed_first_order(int n, double beta, CoeffFn a1, CoeffFn b1, double k1,
                                      CoeffFn b2, double k2, double c, CoeffFn f) {
    EquationSpec s;
    s.geo = Geometry(1, 1, n);
    LocalTraceTerm lt;
    lt.block = 1;
    lt.a = std::move(a1);
    s.base.local_terms.push_back(std::move(lt));
    NonlocalTerm nt;
    nt.block = 2;
    nt.kernel = LevyKernel::fractional(1, beta);
    nt.sign = -1.0;
    s.base.nonlocal_terms.push_back(std::move(nt));
    if (b1) {
        GradientPowerTerm g1;
        g1.block = 1;
        g1.b = std::move(b1);
        g1.exponent = k1;
        s.base.gradient_terms.push_back(std::move(g1));
    }
    if (b2) {
        GradientPowerTerm g2;
        g2.block = 2;
        g2.b = std::move(b2);
        g2.exponent = k2;
        s.base.gradient_terms.push_back(std::move(g2));
    }
    s.base.zeroth_order = c;
    s.base.forcing = std::move(f);
    s.profile_checked = true;
    return s;
}

}  // namespace catalogue

}  // namespace pidelab
