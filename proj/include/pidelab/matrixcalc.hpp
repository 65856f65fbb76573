#pragma once

#include <Eigen/Dense>
#include <sstream>
#include <string>

#include "pidelab/common.hpp"
#include "pidelab/rng.hpp"

namespace pidelab {

/// Symmetric matrix with symmetry enforced by construction (set writes both
/// triangles). Dimensions stay small (<= 16).
struct SymMatrix {
    Eigen::MatrixXd m;

    SymMatrix() : m(Eigen::MatrixXd::Zero(1, 1)) {}
    explicit SymMatrix(int dim) : m(Eigen::MatrixXd::Zero(dim, dim)) {}

    static SymMatrix identity(int dim) {
        SymMatrix s(dim);
        s.m = Eigen::MatrixXd::Identity(dim, dim);
        return s;
    }
    static SymMatrix from(const Eigen::MatrixXd& a) {
        SymMatrix s(static_cast<int>(a.rows()));
        s.m = 0.5 * (a + a.transpose());
        return s;
    }

    int dim() const { return static_cast<int>(m.rows()); }
    double operator()(int i, int j) const { return m(i, j); }
    void set(int i, int j, double v) { m(i, j) = m(j, i) = v; }

    SymMatrix operator+(const SymMatrix& o) const { return from(m + o.m); }
    SymMatrix operator-(const SymMatrix& o) const { return from(m - o.m); }
    SymMatrix operator-() const { return from(-m); }
    SymMatrix scaled(double s) const { return from(s * m); }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }
    double max_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().maxCoeff();
    }
    double spectral_norm() const {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().maxCoeff();
    }
    double trace() const { return m.trace(); }

    /// Stable text form for golden tests.
    std::string to_text() const {
        std::ostringstream os;
        os << dim() << "\n";
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j) os << format_double(m(i, j)) << (j + 1 < dim() ? " " : "\n");
        return os.str();
    }
};

/// X, Y, Z of the doubled-variable matrix inequality with a d1+d2 block split.
struct BlockTriple {
    SymMatrix X, Y, Z;
    int d1 = 0, d2 = 0;
};

/// Minimum eigenvalue of [[Z,-Z],[-Z,Z]] - diag(X,-Y); >= -1e-9 means the
/// inequality X z.z - Y z'.z' <= Z(z-z').(z-z') holds.
inline double check_block_inequality(const SymMatrix& X, const SymMatrix& Y, const SymMatrix& Z) {
    const int d = X.dim();
    Eigen::MatrixXd W(2 * d, 2 * d);
    W.topLeftCorner(d, d) = Z.m - X.m;
    W.topRightCorner(d, d) = -Z.m;
    W.bottomLeftCorner(d, d) = -Z.m;
    W.bottomRightCorner(d, d) = Z.m + Y.m;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline double check_block_inequality(const BlockTriple& t) {
    return check_block_inequality(t.X, t.Y, t.Z);
}

/// Splits a block-diagonal triple into its two diagonal sub-triples. A trivial
/// split (d1 = d, d2 = 0) returns the triple unchanged alongside an empty one.
inline std::pair<BlockTriple, BlockTriple> extract_blocks(const BlockTriple& t) {
    const int d1 = t.d1, d2 = t.d2;
    if (d1 == 0 || d2 == 0) {
        BlockTriple empty{SymMatrix(0), SymMatrix(0), SymMatrix(0), 0, 0};
        return d1 == 0 ? std::make_pair(empty, t) : std::make_pair(t, empty);
    }
    auto offdiag = [&](const SymMatrix& A) {
        return A.m.topRightCorner(d1, d2).cwiseAbs().maxCoeff();
    };
    double worst = std::max({offdiag(t.X), offdiag(t.Y), offdiag(t.Z)});
    if (worst > 1e-12)
        throw std::invalid_argument("extract_blocks: off-diagonal blocks above 1e-12 (" +
                                    format_double(worst) + ")");
    auto take = [&](const SymMatrix& A, int off, int sz) {
        return SymMatrix::from(A.m.block(off, off, sz, sz));
    };
    BlockTriple a{take(t.X, 0, d1), take(t.Y, 0, d1), take(t.Z, 0, d1), d1, 0};
    BlockTriple b{take(t.X, d1, d2), take(t.Y, d1, d2), take(t.Z, d1, d2), d2, 0};
    return {a, b};
}

inline double convolution_epsilon0(const SymMatrix& X, const SymMatrix& Y, const SymMatrix& Z) {
    return 1.0 / std::max({X.spectral_norm(), Y.spectral_norm(), 2.0 * Z.spectral_norm()});
}

/// Matrix of the sup-convolved quadratic form: eigenvalues map to
/// lambda/(1 - eps*lambda). Diverges when eps*lambda_max >= 1.
inline SymMatrix sup_convolve(const SymMatrix& X, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("sup_convolve: eps > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X.m);
    Eigen::VectorXd lam = es.eigenvalues();
    if (eps * lam.maxCoeff() >= 1.0)
        throw DivergentConvolution("sup_convolve: eps*lambda_max >= 1, supremum is +infinity");
    Eigen::VectorXd mapped(lam.size());
    for (int i = 0; i < lam.size(); ++i) mapped(i) = lam(i) / (1.0 - eps * lam(i));
    return SymMatrix::from(es.eigenvectors() * mapped.asDiagonal() *
                           es.eigenvectors().transpose());
}

inline SymMatrix inf_convolve(const SymMatrix& Y, double eps) {
    return -sup_convolve(-Y, eps);
}

/// Closed form of the sup-convolution (parameter alpha/2) of
/// Z = (1/alpha)(I - omega a x a): (2/alpha)(I - (2 omega/(1+omega)) a x a).
inline SymMatrix conv_closed_form(double alpha, double omega, const Eigen::VectorXd& axis) {
    if (!(alpha > 0.0)) throw std::invalid_argument("conv_closed_form: alpha > 0");
    if (omega < 0.0) throw std::invalid_argument("conv_closed_form: omega >= 0");
    if (std::abs(omega + 1.0) < 1e-14)
        throw std::invalid_argument("conv_closed_form: omega = -1 divides by zero");
    if (axis.norm() == 0.0) throw std::invalid_argument("conv_closed_form: zero axis");
    Eigen::VectorXd a = axis.normalized();
    const int d = static_cast<int>(axis.size());
    SymMatrix out(d);
    const double c = 2.0 * omega / (1.0 + omega);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double v = (2.0 / alpha) * ((i == j ? 1.0 : 0.0) - c * a(i) * a(j));
            out.set(i, j, v);
        }
    return out;
}

inline SymMatrix conv_closed_form(double alpha, double omega, const Vec& axis) {
    Eigen::VectorXd a(axis.dim);
    for (int i = 0; i < axis.dim; ++i) a(i) = axis[i];
    return conv_closed_form(alpha, omega, a);
}

struct TraceBound {
    double bound = 0.0;
    double trace = 0.0;
    bool satisfied = false;
    double precondition_margin = 0.0;
};

/// trace(X - Y) <= -8(omega-1)/(alpha(1+omega)) whenever (X, Y, Z^{alpha/2})
/// satisfies the block inequality.
inline TraceBound trace_bound_check(const SymMatrix& X, const SymMatrix& Y, double alpha,
                                    double omega, const Vec& axis) {
    if (!(omega >= 1.0 && omega < 2.0))
        throw std::invalid_argument("trace_bound_check: omega in [1,2)");
    SymMatrix Zc = conv_closed_form(alpha, omega, axis);
    TraceBound r;
    r.precondition_margin = check_block_inequality(X, Y, Zc);
    if (r.precondition_margin < -1e-9)
        throw std::invalid_argument("trace_bound_check: block inequality fails, margin = " +
                                    format_double(r.precondition_margin));
    r.bound = -8.0 * (omega - 1.0) / (alpha * (1.0 + omega));
    r.trace = (X - Y).trace();
    r.satisfied = r.trace <= r.bound + 1e-9;
    return r;
}

// --- constructive samplers -----------------------------------------------------

inline SymMatrix random_sym(Rng& rng, int d, double scale = 0.7) {
    SymMatrix s(d);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) s.set(i, j, scale * rng.normal());
    return s;
}

inline SymMatrix random_psd(Rng& rng, int d, double scale = 0.5) {
    Eigen::MatrixXd B(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) B(i, j) = rng.normal();
    return SymMatrix::from(scale * (B * B.transpose()) / std::max(1, d));
}

/// Triple satisfying the block inequality by construction: with
/// S = [[S1, -Z], [-Z, S2]] positive semidefinite (Schur: S1 = Z S2^{-1} Z + R),
/// X = Z - S1 and Y = S2 - Z give [[Z,-Z],[-Z,Z]] - diag(X,-Y) = S >= 0.
inline BlockTriple make_valid_triple(Rng& rng, int d1, int d2, bool block_diagonal) {
    const int d = d1 + d2;
    auto build = [&](int dim) {
        SymMatrix Z = random_sym(rng, dim);
        SymMatrix S2 = SymMatrix::from(rng.uniform(0.4, 1.6) * Eigen::MatrixXd::Identity(dim, dim) +
                                       random_psd(rng, dim, 0.4).m);
        Eigen::MatrixXd S2inv = S2.m.inverse();
        SymMatrix S1 = SymMatrix::from(Z.m * S2inv * Z.m + random_psd(rng, dim, 0.4).m);
        SymMatrix X = SymMatrix::from(Z.m - S1.m);
        SymMatrix Y = SymMatrix::from(S2.m - Z.m);
        return BlockTriple{X, Y, Z, dim, 0};
    };
    if (!block_diagonal || d2 == 0) {
        BlockTriple t = build(d);
        t.d1 = d1;
        t.d2 = d2;
        return t;
    }
    BlockTriple a = build(d1);
    BlockTriple b = build(d2);
    BlockTriple t{SymMatrix(d), SymMatrix(d), SymMatrix(d), d1, d2};
    auto place = [&](SymMatrix& M, const SymMatrix& A, const SymMatrix& B) {
        M.m.topLeftCorner(d1, d1) = A.m;
        M.m.bottomRightCorner(d2, d2) = B.m;
    };
    place(t.X, a.X, b.X);
    place(t.Y, a.Y, b.Y);
    place(t.Z, a.Z, b.Z);
    return t;
}

/// (X, Y) satisfying the trace-lemma precondition with Z = conv_closed_form.
inline std::pair<SymMatrix, SymMatrix> make_trace_pair(Rng& rng, double alpha, double omega,
                                                       const Vec& axis) {
    SymMatrix Zc = conv_closed_form(alpha, omega, axis);
    const int d = Zc.dim();
    SymMatrix S2 = SymMatrix::from(rng.uniform(0.5, 2.0) * Eigen::MatrixXd::Identity(d, d) +
                                   random_psd(rng, d, 0.5).m);
    SymMatrix S1 = SymMatrix::from(Zc.m * S2.m.inverse() * Zc.m + random_psd(rng, d, 0.5).m);
    return {SymMatrix::from(Zc.m - S1.m), SymMatrix::from(S2.m - Zc.m)};
}

}  // namespace pidelab
