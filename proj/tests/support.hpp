#pragma once

// Independent oracles used by the test suites. These deliberately avoid the
// implementation paths they check: grid search instead of eigen maps, double
// loops instead of offset tables.

#include <Eigen/Dense>

#include "pidelab/estimates.hpp"
#include "pidelab/grid.hpp"

namespace testsupport {

using pidelab::GridFunction;
using pidelab::Vec;

/// sup_xi { X xi.xi - |z-xi|^2/eps } by coarse grid search plus shrinking
/// refinement passes. Valid for dims <= 3.
inline double grid_sup_convolution(const Eigen::MatrixXd& X, double eps, const Eigen::VectorXd& z,
                                   int npts = 21, int passes = 14) {
    const int d = static_cast<int>(z.size());
    double opnorm = X.cwiseAbs().rowwise().sum().maxCoeff();
    double radius = (z.norm() + 1.0) / std::max(1e-9, 1.0 - eps * opnorm);
    Eigen::VectorXd center = z;
    double best = -1e300;
    Eigen::VectorXd best_xi = z;
    for (int pass = 0; pass < passes; ++pass) {
        Eigen::VectorXd xi(d);
        std::vector<int> idx(static_cast<size_t>(d), 0);
        bool done = false;
        while (!done) {
            for (int a = 0; a < d; ++a)
                xi(a) = center(a) + radius * (-1.0 + 2.0 * idx[static_cast<size_t>(a)] / (npts - 1.0));
            double val = xi.dot(X * xi) - (z - xi).squaredNorm() / eps;
            if (val > best) {
                best = val;
                best_xi = xi;
            }
            int a = 0;
            for (; a < d; ++a) {
                if (++idx[static_cast<size_t>(a)] < npts) break;
                idx[static_cast<size_t>(a)] = 0;
            }
            done = (a == d);
        }
        center = best_xi;
        radius *= 0.35;
    }
    return best;
}

/// Pairwise alpha-Holder seminorm by a direct double loop over all lattice
/// pairs (torus metric).
inline double brute_force_seminorm(const GridFunction& u, double alpha) {
    const auto& g = u.geometry();
    const long N = g.size();
    double best = 0.0;
    for (long i = 0; i < N; ++i)
        for (long j = 0; j < N; ++j) {
            if (i == j) continue;
            auto unflatten = [&](long f) {
                std::array<int, 3> idx{0, 0, 0};
                for (int a = g.dim() - 1; a >= 0; --a) {
                    idx[static_cast<size_t>(a)] = static_cast<int>(f % g.n);
                    f /= g.n;
                }
                return idx;
            };
            Vec x = u.point(unflatten(i));
            Vec y = u.point(unflatten(j));
            double d = pidelab::torus_dist(x, y);
            if (d < 1e-15) continue;
            double q = (u.values()[static_cast<size_t>(i)] - u.values()[static_cast<size_t>(j)]) /
                       std::pow(d, alpha);
            best = std::max(best, q);
        }
    return best;
}

/// Doubling maximum by a direct double loop (oracle for locate_max).
inline double brute_force_doubling_max(const GridFunction& u, const GridFunction& v,
                                       const pidelab::TestFunctionPhi& phi) {
    const auto& g = u.geometry();
    const long N = g.size();
    auto unflatten = [&](long f) {
        std::array<int, 3> idx{0, 0, 0};
        for (int a = g.dim() - 1; a >= 0; --a) {
            idx[static_cast<size_t>(a)] = static_cast<int>(f % g.n);
            f /= g.n;
        }
        return idx;
    };
    double best = -1e300;
    for (long i = 0; i < N; ++i)
        for (long j = 0; j < N; ++j) {
            Vec x = u.point(unflatten(i));
            Vec y = v.point(unflatten(j));
            double val = u.values()[static_cast<size_t>(i)] - v.values()[static_cast<size_t>(j)] -
                         phi.value(pidelab::torus_dist(x, y));
            best = std::max(best, val);
        }
    return best;
}

}  // namespace testsupport
