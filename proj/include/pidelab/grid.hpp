#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <vector>

#include "pidelab/common.hpp"

namespace pidelab {

/// Periodic lattice on the torus [0,1)^d with the coordinate split d = d1 + d2.
struct Geometry {
    int d1 = 1;
    int d2 = 0;
    int n = 64;

    Geometry() = default;
    Geometry(int d1_, int d2_, int n_) : d1(d1_), d2(d2_), n(n_) {
        if (d1 < 0 || d2 < 0 || d1 + d2 < 1 || d1 + d2 > 3)
            throw std::invalid_argument("geometry: need 1 <= d1+d2 <= 3");
        if (n < 8) throw std::invalid_argument("geometry: n >= 8 required");
    }

    int dim() const { return d1 + d2; }
    double h() const { return 1.0 / n; }
    long size() const {
        long s = 1;
        for (int i = 0; i < dim(); ++i) s *= n;
        return s;
    }
    int wrap(int i) const {
        int m = i % n;
        return m < 0 ? m + n : m;
    }
    bool operator==(const Geometry& o) const { return d1 == o.d1 && d2 == o.d2 && n == o.n; }

    /// Axes belonging to a block selector: 0 = full, 1 = first block, 2 = second.
    std::vector<int> block_axes(int which) const {
        std::vector<int> ax;
        int lo = (which == 2) ? d1 : 0;
        int hi = (which == 1) ? d1 : dim();
        for (int i = lo; i < hi; ++i) ax.push_back(i);
        return ax;
    }
};

/// Minimal torus representative of t in (-1/2, 1/2].
inline double torus_delta(double t) {
    t -= std::floor(t);
    if (t > 0.5) t -= 1.0;
    return t;
}

inline double torus_dist(const Vec& x, const Vec& y) {
    double s = 0;
    for (int i = 0; i < x.dim; ++i) {
        double d = torus_delta(x[i] - y[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

class GridFunction {
  public:
    GridFunction() = default;
    explicit GridFunction(const Geometry& g) : geo_(g), v_(static_cast<size_t>(g.size()), 0.0) {}

    static GridFunction sample(const Geometry& g, const std::function<double(const Vec&)>& f) {
        GridFunction u(g);
        u.for_each_index([&](const std::array<int, 3>& idx, long flat) {
            u.v_[static_cast<size_t>(flat)] = f(u.point(idx));
        });
        return u;
    }

    const Geometry& geometry() const { return geo_; }
    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    long flat_index(const std::array<int, 3>& idx) const {
        long f = 0;
        for (int a = 0; a < geo_.dim(); ++a) f = f * geo_.n + geo_.wrap(idx[static_cast<size_t>(a)]);
        return f;
    }

    double at(const std::array<int, 3>& idx) const { return v_[static_cast<size_t>(flat_index(idx))]; }
    double& at(const std::array<int, 3>& idx) { return v_[static_cast<size_t>(flat_index(idx))]; }

    Vec point(const std::array<int, 3>& idx) const {
        Vec p(geo_.dim());
        for (int a = 0; a < geo_.dim(); ++a) p[a] = geo_.wrap(idx[static_cast<size_t>(a)]) * geo_.h();
        return p;
    }

    template <class F>
    void for_each_index(F&& f) const {
        const int d = geo_.dim();
        std::array<int, 3> idx{0, 0, 0};
        long flat = 0;
        const long total = geo_.size();
        for (flat = 0; flat < total; ++flat) {
            f(idx, flat);
            for (int a = d - 1; a >= 0; --a) {
                if (++idx[static_cast<size_t>(a)] < geo_.n) break;
                idx[static_cast<size_t>(a)] = 0;
            }
        }
    }

    /// Multilinear periodic interpolation. Lattice points are reproduced
    /// exactly (fractional offsets below 1e-12 snap to the node).
    double value_at(const Vec& x) const {
        const int d = geo_.dim();
        int base[3];
        double frac[3];
        for (int a = 0; a < d; ++a) {
            double pos = (x[a] - std::floor(x[a])) * geo_.n;
            int i0 = static_cast<int>(std::floor(pos));
            double fr = pos - i0;
            if (fr < 1e-12) fr = 0.0;
            if (fr > 1.0 - 1e-12) {
                fr = 0.0;
                ++i0;
            }
            base[a] = geo_.wrap(i0);
            frac[a] = fr;
        }
        double acc = 0.0;
        const int corners = 1 << d;
        for (int c = 0; c < corners; ++c) {
            double w = 1.0;
            std::array<int, 3> idx{0, 0, 0};
            for (int a = 0; a < d; ++a) {
                const int bit = (c >> a) & 1;
                w *= bit ? frac[a] : (1.0 - frac[a]);
                idx[static_cast<size_t>(a)] = base[a] + bit;
            }
            if (w != 0.0) acc += w * at(idx);
        }
        return acc;
    }

    double max_norm() const {
        double m = 0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

    double mean() const {
        double s = std::accumulate(v_.begin(), v_.end(), 0.0);
        return s / static_cast<double>(v_.size());
    }

    GridFunction& operator+=(const GridFunction& o) {
        for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    GridFunction& operator*=(double s) {
        for (double& x : v_) x *= s;
        return *this;
    }

  private:
    Geometry geo_;
    std::vector<double> v_;
};

// --- serialization ----------------------------------------------------------
//
// CSV: header "d1,d2,n" then one row-major value per line.
// Binary: magic "PGF1", then d1,d2,n as little-endian uint32, then row-major
// float64 values, little-endian.

inline void write_grid_csv(const GridFunction& u, std::ostream& os) {
    const Geometry& g = u.geometry();
    os << "d1,d2,n\n" << g.d1 << "," << g.d2 << "," << g.n << "\n";
    for (double v : u.values()) os << format_double(v) << "\n";
}

inline void write_grid_binary(const GridFunction& u, std::ostream& os) {
    const Geometry& g = u.geometry();
    os.write("PGF1", 4);
    auto put_u32 = [&](uint32_t x) {
        unsigned char b[4] = {static_cast<unsigned char>(x & 0xff),
                              static_cast<unsigned char>((x >> 8) & 0xff),
                              static_cast<unsigned char>((x >> 16) & 0xff),
                              static_cast<unsigned char>((x >> 24) & 0xff)};
        os.write(reinterpret_cast<const char*>(b), 4);
    };
    put_u32(static_cast<uint32_t>(g.d1));
    put_u32(static_cast<uint32_t>(g.d2));
    put_u32(static_cast<uint32_t>(g.n));
    for (double v : u.values()) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        unsigned char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
        os.write(reinterpret_cast<const char*>(b), 8);
    }
}

inline GridFunction read_grid_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::strncmp(magic, "PGF1", 4) != 0)
        throw std::invalid_argument("grid binary: bad magic");
    auto get_u32 = [&]() {
        unsigned char b[4];
        is.read(reinterpret_cast<char*>(b), 4);
        return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
               (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
    };
    int d1 = static_cast<int>(get_u32());
    int d2 = static_cast<int>(get_u32());
    int n = static_cast<int>(get_u32());
    GridFunction u{Geometry(d1, d2, n)};
    for (double& v : u.values()) {
        unsigned char b[8];
        is.read(reinterpret_cast<char*>(b), 8);
        uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= static_cast<uint64_t>(b[i]) << (8 * i);
        std::memcpy(&v, &bits, 8);
    }
    if (!is) throw std::invalid_argument("grid binary: truncated");
    return u;
}

}  // namespace pidelab
