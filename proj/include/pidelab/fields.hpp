#pragma once

#include "pidelab/grid.hpp"
#include "pidelab/rng.hpp"

namespace pidelab {

/// Random low-mode trigonometric field, sup-norm scaled to `amplitude`.
inline GridFunction random_trig_field(const Geometry& g, Rng& rng, int max_mode = 3,
                                      double amplitude = 1.0) {
    struct Mode {
        std::array<int, 3> k;
        double amp, phase0, phase1, phase2;
    };
    std::vector<Mode> modes;
    const int d = g.dim();
    const int count = 2 + rng.below(3);
    for (int m = 0; m < count; ++m) {
        Mode mo{};
        bool nonzero = false;
        for (int a = 0; a < d; ++a) {
            mo.k[static_cast<size_t>(a)] = 1 + rng.below(max_mode);
            nonzero = true;
        }
        if (!nonzero) mo.k[0] = 1;
        mo.amp = rng.uniform(0.3, 1.0);
        mo.phase0 = rng.uniform(0.0, 2.0 * kPi);
        mo.phase1 = rng.uniform(0.0, 2.0 * kPi);
        mo.phase2 = rng.uniform(0.0, 2.0 * kPi);
        modes.push_back(mo);
    }
    GridFunction u = GridFunction::sample(g, [&](const Vec& x) {
        double s = 0;
        for (const auto& mo : modes) {
            double v = mo.amp;
            const double ph[3] = {mo.phase0, mo.phase1, mo.phase2};
            for (int a = 0; a < d; ++a)
                v *= std::cos(2.0 * kPi * mo.k[static_cast<size_t>(a)] * x[a] + ph[a]);
            s += v;
        }
        return s;
    });
    double norm = u.max_norm();
    if (norm > 0) u *= amplitude / norm;
    return u;
}

}  // namespace pidelab
