#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pidelab {

inline constexpr double kPi = 3.14159265358979323846;

/// Shortest round-trip decimal form, locale independent ('.' decimal point).
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Small fixed-capacity vector for points and jump displacements (dim <= 3).
struct Vec {
    int dim = 0;
    std::array<double, 3> c{0.0, 0.0, 0.0};

    Vec() = default;
    explicit Vec(int d) : dim(d) {}
    Vec(int d, const std::array<double, 3>& v) : dim(d), c(v) {}

    static Vec of(double x) { return Vec(1, {x, 0, 0}); }
    static Vec of(double x, double y) { return Vec(2, {x, y, 0}); }
    static Vec of(double x, double y, double z) { return Vec(3, {x, y, z}); }
    static Vec zero(int d) { return Vec(d); }
    static Vec axis(int d, int i) {
        Vec v(d);
        v.c[static_cast<size_t>(i)] = 1.0;
        return v;
    }

    double& operator[](int i) { return c[static_cast<size_t>(i)]; }
    double operator[](int i) const { return c[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < dim; ++i) c[static_cast<size_t>(i)] += o[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < dim; ++i) c[static_cast<size_t>(i)] -= o[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < dim; ++i) c[static_cast<size_t>(i)] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator-(Vec a) { return a *= -1.0; }
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0;
    for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec normalized(const Vec& a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return a * (1.0 / n);
}

/// Raised when a singular-kernel quadrature does not meet its error target.
class QuadratureError : public std::runtime_error {
  public:
    QuadratureError(const std::string& what, double estimated_error, double tolerance)
        : std::runtime_error(what + " (estimated error " + std::to_string(estimated_error) +
                             " above tolerance " + std::to_string(tolerance) + ")"),
          estimated_error(estimated_error),
          tolerance(tolerance) {}
    double estimated_error;
    double tolerance;
};

/// Sup-convolution with eps*lambda_max >= 1: the supremum is +infinity.
class DivergentConvolution : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace pidelab
