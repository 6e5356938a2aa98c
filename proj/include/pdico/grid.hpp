#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pdico/errors.hpp"

namespace pdico {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Formats a double with 17 significant digits (value-preserving round trip).
inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

/// Uniform space-time grid on [0,L] x [0,S] x [0,T] with steps
/// (delta, sigma, h) and vector-valued samples in R^n.
///
/// nx, ny, nt are closed-grid point counts per axis, so (nx-1)*delta = L
/// and the interior index sets {delta,...,L-delta}, {sigma,...,S-sigma},
/// {0,h,...,T-h} are nonempty.
struct GridSpec {
    double L = 0, S = 0, T = 0;
    double delta = 0, sigma = 0, h = 0;
    int n = 0;
    int nx = 0, ny = 0, nt = 0;
    double theta = 0;  // delta / sigma

    static GridSpec make(double L, double S, double T,
                         double delta, double sigma, double h, int n) {
        if (!(L > 0) || !(S > 0) || !(T > 0))
            throw error("grid: extents L, S, T must be positive");
        if (!(delta > 0) || !(sigma > 0) || !(h > 0))
            throw error("grid: steps delta, sigma, h must be positive");
        if (n < 1) throw error("grid: state dimension n must be >= 1");

        GridSpec g;
        g.L = L; g.S = S; g.T = T;
        g.delta = delta; g.sigma = sigma; g.h = h;
        g.n = n;
        g.nx = derive_count(L, delta, "delta");
        g.ny = derive_count(S, sigma, "sigma");
        g.nt = derive_count(T, h, "h");
        if (g.nx < 3 || g.ny < 3 || g.nt < 3)
            throw error("grid: need at least 3 points per axis (one interior point)");
        g.theta = delta / sigma;
        return g;
    }

    long points() const { return static_cast<long>(nx) * ny * nt; }
    long values() const { return points() * n; }

    double x(int ix) const { return ix * delta; }
    double y(int iy) const { return iy * sigma; }
    double t(int it) const { return it * h; }

    bool interior_x(int ix) const { return ix >= 1 && ix <= nx - 2; }
    bool interior_y(int iy) const { return iy >= 1 && iy <= ny - 2; }
    /// Time levels carrying the inclusion: {0, h, ..., T-h}.
    bool marching_t(int it) const { return it >= 0 && it <= nt - 2; }

    bool same_geometry(const GridSpec& o) const {
        return nx == o.nx && ny == o.ny && nt == o.nt && n == o.n &&
               delta == o.delta && sigma == o.sigma && h == o.h;
    }

private:
    static int derive_count(double extent, double step, const char* name) {
        const double ratio = extent / step;
        const long intervals = std::lround(ratio);
        if (intervals < 1 ||
            std::abs(intervals * step - extent) > 1e-9 * std::max(extent, 1.0))
            throw error(std::string("grid: ") + name +
                        " does not divide its extent (relative mismatch > 1e-9)");
        return static_cast<int>(intervals) + 1;
    }
};

struct GridPoint {
    int ix = 0, iy = 0, it = 0;

    bool operator==(const GridPoint&) const = default;

    std::string str() const {
        std::ostringstream os;
        os << "(" << ix << "," << iy << "," << it << ")";
        return os.str();
    }
};

/// Dense vector-valued grid function over the full closed grid, boundary
/// points included. Storage is t-major, then y, then x; time slices are
/// contiguous so forward/adjoint marching reads whole levels.
class Field {
public:
    Field() = default;
    explicit Field(const GridSpec& spec, double fill = 0.0)
        : spec_(spec), values_(static_cast<size_t>(spec.values()), fill) {}

    const GridSpec& spec() const { return spec_; }

    size_t index(int ix, int iy, int it) const {
        return ((static_cast<size_t>(it) * spec_.ny + iy) * spec_.nx + ix) *
               spec_.n;
    }
    size_t index(const GridPoint& p) const { return index(p.ix, p.iy, p.it); }

    std::span<double> at(int ix, int iy, int it) {
        check_range(ix, iy, it);
        return {values_.data() + index(ix, iy, it), static_cast<size_t>(spec_.n)};
    }
    std::span<const double> at(int ix, int iy, int it) const {
        check_range(ix, iy, it);
        return {values_.data() + index(ix, iy, it), static_cast<size_t>(spec_.n)};
    }
    std::span<double> at(const GridPoint& p) { return at(p.ix, p.iy, p.it); }
    std::span<const double> at(const GridPoint& p) const {
        return at(p.ix, p.iy, p.it);
    }

    Eigen::Map<const Vec> vec(const GridPoint& p) const {
        auto s = at(p);
        return Eigen::Map<const Vec>(s.data(), s.size());
    }
    void set(const GridPoint& p, const Vec& v) {
        auto s = at(p);
        for (int k = 0; k < spec_.n; ++k) s[k] = v[k];
    }

    std::vector<double>& raw() { return values_; }
    const std::vector<double>& raw() const { return values_; }

    /// Largest absolute entry; used as the scale in relative tolerances.
    double scale() const {
        double m = 0;
        for (double v : values_) m = std::max(m, std::abs(v));
        return m;
    }

    bool all_finite() const {
        for (double v : values_) if (!std::isfinite(v)) return false;
        return true;
    }

private:
    void check_range(int ix, int iy, int it) const {
        if (ix < 0 || ix >= spec_.nx || iy < 0 || iy >= spec_.ny ||
            it < 0 || it >= spec_.nt)
            throw index_error("field: point (" + std::to_string(ix) + "," +
                              std::to_string(iy) + "," + std::to_string(it) +
                              ") outside grid");
    }

    GridSpec spec_;
    std::vector<double> values_;
};

/// Samples of the five fixed faces: alpha on t=0, beta0/betaS on y=0 and
/// y=S, gamma0/gammaL on x=0 and x=L. Where faces share an edge the
/// samples must agree within 1e-12.
class BoundaryData {
public:
    explicit BoundaryData(const GridSpec& spec)
        : spec_(spec),
          alpha_(static_cast<size_t>(spec.nx) * spec.ny * spec.n, 0.0),
          beta0_(static_cast<size_t>(spec.nx) * spec.nt * spec.n, 0.0),
          betaS_(beta0_.size(), 0.0),
          gamma0_(static_cast<size_t>(spec.ny) * spec.nt * spec.n, 0.0),
          gammaL_(gamma0_.size(), 0.0) {}

    const GridSpec& spec() const { return spec_; }

    std::span<double> alpha(int ix, int iy) {
        return {alpha_.data() + (static_cast<size_t>(iy) * spec_.nx + ix) * spec_.n,
                static_cast<size_t>(spec_.n)};
    }
    std::span<const double> alpha(int ix, int iy) const {
        return {alpha_.data() + (static_cast<size_t>(iy) * spec_.nx + ix) * spec_.n,
                static_cast<size_t>(spec_.n)};
    }
    std::span<double> beta0(int ix, int it) { return xt(beta0_, ix, it); }
    std::span<const double> beta0(int ix, int it) const { return xt(beta0_, ix, it); }
    std::span<double> betaS(int ix, int it) { return xt(betaS_, ix, it); }
    std::span<const double> betaS(int ix, int it) const { return xt(betaS_, ix, it); }
    std::span<double> gamma0(int iy, int it) { return yt(gamma0_, iy, it); }
    std::span<const double> gamma0(int iy, int it) const { return yt(gamma0_, iy, it); }
    std::span<double> gammaL(int iy, int it) { return yt(gammaL_, iy, it); }
    std::span<const double> gammaL(int iy, int it) const { return yt(gammaL_, iy, it); }

    /// Checks the eight shared edges; throws on disagreement beyond 1e-12.
    void validate_edges() const {
        const double tol = 1e-12;
        auto expect = [&](std::span<const double> a, std::span<const double> b,
                          const char* where) {
            for (size_t k = 0; k < a.size(); ++k)
                if (std::abs(a[k] - b[k]) > tol)
                    throw error(std::string("boundary: faces disagree along ") +
                                where);
        };
        for (int ix = 0; ix < spec_.nx; ++ix) {
            expect(alpha(ix, 0), beta0(ix, 0), "t=0, y=0");
            expect(alpha(ix, spec_.ny - 1), betaS(ix, 0), "t=0, y=S");
        }
        for (int iy = 0; iy < spec_.ny; ++iy) {
            expect(alpha(0, iy), gamma0(iy, 0), "t=0, x=0");
            expect(alpha(spec_.nx - 1, iy), gammaL(iy, 0), "t=0, x=L");
        }
        for (int it = 0; it < spec_.nt; ++it) {
            expect(beta0(0, it), gamma0(0, it), "x=0, y=0");
            expect(beta0(spec_.nx - 1, it), gammaL(0, it), "x=L, y=0");
            expect(betaS(0, it), gamma0(spec_.ny - 1, it), "x=0, y=S");
            expect(betaS(spec_.nx - 1, it), gammaL(spec_.ny - 1, it), "x=L, y=S");
        }
    }

    static BoundaryData zero(const GridSpec& spec) { return BoundaryData(spec); }

    /// Same constant vector on every face (edge-compatible by construction).
    static BoundaryData constant(const GridSpec& spec, const Vec& v) {
        if (v.size() != spec.n)
            throw dimension_error("boundary: constant value has wrong dimension");
        BoundaryData b(spec);
        auto fill = [&](std::vector<double>& face) {
            for (size_t i = 0; i < face.size(); i += spec.n)
                for (int k = 0; k < spec.n; ++k) face[i + k] = v[k];
        };
        fill(b.alpha_);
        fill(b.beta0_);
        fill(b.betaS_);
        fill(b.gamma0_);
        fill(b.gammaL_);
        return b;
    }

private:
    std::span<double> xt(std::vector<double>& f, int ix, int it) {
        return {f.data() + (static_cast<size_t>(it) * spec_.nx + ix) * spec_.n,
                static_cast<size_t>(spec_.n)};
    }
    std::span<const double> xt(const std::vector<double>& f, int ix, int it) const {
        return {f.data() + (static_cast<size_t>(it) * spec_.nx + ix) * spec_.n,
                static_cast<size_t>(spec_.n)};
    }
    std::span<double> yt(std::vector<double>& f, int iy, int it) {
        return {f.data() + (static_cast<size_t>(it) * spec_.ny + iy) * spec_.n,
                static_cast<size_t>(spec_.n)};
    }
    std::span<const double> yt(const std::vector<double>& f, int iy, int it) const {
        return {f.data() + (static_cast<size_t>(it) * spec_.ny + iy) * spec_.n,
                static_cast<size_t>(spec_.n)};
    }

    GridSpec spec_;
    std::vector<double> alpha_, beta0_, betaS_, gamma0_, gammaL_;
};

/// Second difference in x: (f(x+delta) - 2f(x) + f(x-delta)) / delta^2.
inline Vec a1_apply(const Field& f, const GridPoint& p) {
    const GridSpec& g = f.spec();
    if (!g.interior_x(p.ix))
        throw index_error("a1: point " + p.str() + " has no x-neighbors");
    Vec r(g.n);
    auto l = f.at(p.ix - 1, p.iy, p.it);
    auto c = f.at(p.ix, p.iy, p.it);
    auto rr = f.at(p.ix + 1, p.iy, p.it);
    const double inv = 1.0 / (g.delta * g.delta);
    for (int k = 0; k < g.n; ++k) r[k] = (rr[k] - 2.0 * c[k] + l[k]) * inv;
    return r;
}

/// Second difference in y with step sigma.
inline Vec a2_apply(const Field& f, const GridPoint& p) {
    const GridSpec& g = f.spec();
    if (!g.interior_y(p.iy))
        throw index_error("a2: point " + p.str() + " has no y-neighbors");
    Vec r(g.n);
    auto l = f.at(p.ix, p.iy - 1, p.it);
    auto c = f.at(p.ix, p.iy, p.it);
    auto u = f.at(p.ix, p.iy + 1, p.it);
    const double inv = 1.0 / (g.sigma * g.sigma);
    for (int k = 0; k < g.n; ++k) r[k] = (u[k] - 2.0 * c[k] + l[k]) * inv;
    return r;
}

/// Forward difference in t: (f(t+h) - f(t)) / h. Requires t <= T-h.
inline Vec b_apply(const Field& f, const GridPoint& p) {
    const GridSpec& g = f.spec();
    if (p.it < 0 || p.it > g.nt - 2)
        throw index_error("b: point " + p.str() + " has no forward t-neighbor");
    Vec r(g.n);
    auto c = f.at(p.ix, p.iy, p.it);
    auto fwd = f.at(p.ix, p.iy, p.it + 1);
    for (int k = 0; k < g.n; ++k) r[k] = (fwd[k] - c[k]) / g.h;
    return r;
}

/// Five-point discrete Laplacian A1 + A2.
inline Vec laplacian5(const Field& f, const GridPoint& p) {
    return a1_apply(f, p) + a2_apply(f, p);
}

/// Returns f with all five fixed faces overwritten from b; interior values
/// untouched. Corner ownership: x-faces are written first, then y-faces,
/// then the t=0 slab, so shared edges take the t=0 value first, y-face
/// values next.
inline Field apply_boundary(const Field& f, const BoundaryData& b) {
    const GridSpec& g = f.spec();
    if (!g.same_geometry(b.spec()))
        throw dimension_error("apply_boundary: grid shapes differ");
    Field out = f;
    for (int it = 0; it < g.nt; ++it) {
        for (int iy = 0; iy < g.ny; ++iy) {
            auto gl = b.gamma0(iy, it);
            auto gr = b.gammaL(iy, it);
            auto dl = out.at(0, iy, it);
            auto dr = out.at(g.nx - 1, iy, it);
            for (int k = 0; k < g.n; ++k) { dl[k] = gl[k]; dr[k] = gr[k]; }
        }
        for (int ix = 0; ix < g.nx; ++ix) {
            auto bl = b.beta0(ix, it);
            auto bu = b.betaS(ix, it);
            auto dl = out.at(ix, 0, it);
            auto du = out.at(ix, g.ny - 1, it);
            for (int k = 0; k < g.n; ++k) { dl[k] = bl[k]; du[k] = bu[k]; }
        }
    }
    for (int iy = 0; iy < g.ny; ++iy)
        for (int ix = 0; ix < g.nx; ++ix) {
            auto a = b.alpha(ix, iy);
            auto d = out.at(ix, iy, 0);
            for (int k = 0; k < g.n; ++k) d[k] = a[k];
        }
    return out;
}

/// Writes the field as CSV: header `x,y,t,u_1,...,u_n`, rows in
/// lexicographic (t,y,x) order, 17 significant digits.
inline void write_field_csv(const Field& f, std::ostream& os) {
    const GridSpec& g = f.spec();
    os << "x,y,t";
    for (int k = 1; k <= g.n; ++k) os << ",u_" << k;
    os << "\n";
    for (int it = 0; it < g.nt; ++it)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                os << format_g17(g.x(ix)) << "," << format_g17(g.y(iy)) << ","
                   << format_g17(g.t(it));
                auto v = f.at(ix, iy, it);
                for (int k = 0; k < g.n; ++k) os << "," << format_g17(v[k]);
                os << "\n";
            }
}

inline void write_field_csv(const Field& f, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw error("cannot open for writing: " + path);
    write_field_csv(f, os);
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') { out.push_back(cur); cur.clear(); }
        else if (c != '\r') cur += c;
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos != s.size()) throw parse_error("trailing characters");
        return v;
    } catch (const parse_error&) {
        throw parse_error(where + ": bad number '" + s + "'");
    } catch (const std::exception&) {
        throw parse_error(where + ": bad number '" + s + "'");
    }
}

} // namespace detail

/// Reads a field CSV written by write_field_csv. Row order and coordinates
/// are validated against the spec (1e-9 tolerance on coordinates).
inline Field read_field_csv(const GridSpec& g, std::istream& is,
                            const std::string& name = "field csv") {
    std::string line;
    if (!std::getline(is, line))
        throw parse_error(name + ": empty file");
    {
        auto cols = detail::split_csv_line(line);
        if (static_cast<int>(cols.size()) != 3 + g.n || cols[0] != "x" ||
            cols[1] != "y" || cols[2] != "t")
            throw parse_error(name + ": bad header, expected x,y,t,u_1..u_" +
                              std::to_string(g.n));
    }
    Field f(g);
    long row = 0;
    for (int it = 0; it < g.nt; ++it)
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix) {
                if (!std::getline(is, line))
                    throw parse_error(name + ": unexpected end of file at row " +
                                      std::to_string(row + 2));
                auto cols = detail::split_csv_line(line);
                if (static_cast<int>(cols.size()) != 3 + g.n)
                    throw parse_error(name + ": row " + std::to_string(row + 2) +
                                      " has wrong column count");
                const std::string where = name + " row " + std::to_string(row + 2);
                const double x = detail::parse_double(cols[0], where);
                const double y = detail::parse_double(cols[1], where);
                const double t = detail::parse_double(cols[2], where);
                if (std::abs(x - g.x(ix)) > 1e-9 || std::abs(y - g.y(iy)) > 1e-9 ||
                    std::abs(t - g.t(it)) > 1e-9)
                    throw parse_error(where + ": coordinates out of order");
                auto dst = f.at(ix, iy, it);
                for (int k = 0; k < g.n; ++k) {
                    dst[k] = detail::parse_double(cols[3 + k], where);
                    if (!std::isfinite(dst[k]))
                        throw parse_error(where + ": non-finite value");
                }
                ++row;
            }
    return f;
}

inline Field read_field_csv(const GridSpec& g, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw error("cannot open: " + path);
    return read_field_csv(g, is, path);
}

} // namespace pdico
