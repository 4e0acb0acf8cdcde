#pragma once

// Continuum side of the two-point formula: smooth compactly supported test
// functions, their Fourier transforms under the unitary convention
//
//     f^(p) = (2 pi)^{-d/2} \int f(x) e^{-i p.x} dx,
//
// momentum integrals against the Bose kernel and its split, the condensate
// overlaps, and whole-space resolvent references.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "harmonics.hpp"
#include "lattice.hpp"
#include "quadrature.hpp"
#include "spectral_function.hpp"
#include "text.hpp"

namespace phibose {

/// A hypothesis of the limit theorem is violated (nonzero mean in d <= 2).
struct HypothesisError : std::domain_error {
    using std::domain_error::domain_error;
};

/// exp(-1/(1 - t^2)) on |t| < 1, zero elsewhere.
inline double bump_profile(double t)
{
    const double s = 1.0 - t * t;
    return s > 0.0 ? std::exp(-1.0 / s) : 0.0;
}

/// amplitude * prod_i bump_profile((x_i - c_i) / a)
struct BumpTerm {
    std::array<double, 2> center{0.0, 0.0};
    double halfwidth = 1.0;
    cplx amplitude{1.0, 0.0};
};

struct Bump {
    std::array<double, 2> center{0.0, 0.0};
    double halfwidth = 1.0;
    cplx amplitude{1.0, 0.0};
};

/// Bump(c - s) - Bump(c + s), zero mean.
struct Dipole {
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> offset{1.0, 0.0};
    double halfwidth = 1.0;
    cplx amplitude{1.0, 0.0};
};

using TestAtom = std::variant<Bump, Dipole>;

/// Finite linear combination of bumps and dipoles in one or two dimensions.
struct TestFunctionSpec {
    int dim = 1;
    std::vector<TestAtom> atoms;

    std::vector<BumpTerm> terms() const
    {
        std::vector<BumpTerm> out;
        for (const auto& atom : atoms) {
            if (const auto* b = std::get_if<Bump>(&atom)) {
                out.push_back({b->center, b->halfwidth, b->amplitude});
            } else {
                const auto& d = std::get<Dipole>(atom);
                BumpTerm lo{{d.center[0] - d.offset[0], d.center[1] - d.offset[1]}, d.halfwidth, d.amplitude};
                BumpTerm hi{{d.center[0] + d.offset[0], d.center[1] + d.offset[1]}, d.halfwidth, -d.amplitude};
                out.push_back(lo);
                out.push_back(hi);
            }
        }
        return out;
    }

    bool empty() const { return atoms.empty(); }
};

inline cplx eval_test_function(const TestFunctionSpec& f, const Point& p)
{
    if (p.dim != f.dim) throw std::invalid_argument("eval_test_function: dimension mismatch");
    cplx sum = 0.0;
    for (const auto& t : f.terms()) {
        double v = bump_profile((p[0] - t.center[0]) / t.halfwidth);
        if (f.dim == 2 && v != 0.0) v *= bump_profile((p[1] - t.center[1]) / t.halfwidth);
        sum += t.amplitude * v;
    }
    return sum;
}

/// Sup-norm radius of a ball around the origin containing the support.
inline double support_radius(const TestFunctionSpec& f)
{
    double r = 0.0;
    for (const auto& t : f.terms()) {
        for (int i = 0; i < f.dim; ++i) r = std::max(r, std::abs(t.center[static_cast<std::size_t>(i)]) + t.halfwidth);
    }
    return r;
}

/// True when the closed support lies strictly inside the open box of the grid.
inline bool support_inside(const TestFunctionSpec& f, const Grid& grid)
{
    if (f.dim != grid.dim()) return false;
    for (const auto& t : f.terms()) {
        for (int i = 0; i < f.dim; ++i) {
            const double half = 0.5 * grid.length(i);
            const double c = t.center[static_cast<std::size_t>(i)];
            if (c - t.halfwidth <= -half || c + t.halfwidth >= half) return false;
        }
    }
    return true;
}

inline GridField sample(const Grid& grid, const TestFunctionSpec& f)
{
    return sample(grid, [&](const Point& p) { return eval_test_function(f, p); });
}

// --- text syntax -----------------------------------------------------------
//   bump:c=0,a=1,amp=1
//   dipole:c=(0.25,0),s=(0.8,0),a=0.75,amp=1
//   atoms joined by '+', e.g.  bump:c=-1,a=0.5 + bump:c=1,a=0.5,amp=-1
// The dimension is the number of components of c.

namespace detail {

inline std::array<double, 2> parse_position(const std::string& s, int& dim)
{
    const auto v = text::parse_tuple(s);
    if (v.empty() || v.size() > 2) throw std::invalid_argument("position must have 1 or 2 components: '" + s + "'");
    const int d = static_cast<int>(v.size());
    if (dim != 0 && dim != d) throw std::invalid_argument("inconsistent dimensions in test function");
    dim = d;
    return {v[0], v.size() > 1 ? v[1] : 0.0};
}

inline std::string format_position(const std::array<double, 2>& x, int dim)
{
    return dim == 1 ? text::format_double(x[0]) : text::format_tuple({x[0], x[1]});
}

inline std::vector<std::string> split_atoms(const std::string& s)
{
    std::vector<std::string> out;
    int depth = 0;
    std::string cur;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == '+' && depth == 0) {
            std::size_t j = i + 1;
            while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
            if (j < s.size() && std::isalpha(static_cast<unsigned char>(s[j]))) {
                out.push_back(text::trim(cur));
                cur.clear();
                continue;
            }
        }
        cur.push_back(c);
    }
    out.push_back(text::trim(cur));
    return out;
}

}  // namespace detail

inline TestFunctionSpec parse_test_function(const std::string& str)
{
    TestFunctionSpec f;
    f.dim = 0;
    if (text::trim(str).empty() || text::trim(str) == "zero") {
        f.dim = 1;
        return f;
    }
    for (const auto& item : detail::split_atoms(str)) {
        const auto kind = text::parse_kind_args(item).kind;
        if (kind == "bump") {
            const auto ka = text::parse_kind_args(item, {"c", "a", "amp"});
            Bump b;
            b.center = detail::parse_position(ka.has("c") ? ka.args.at("c") : "0", f.dim);
            if (ka.has("a")) b.halfwidth = text::parse_double(ka.args.at("a"));
            if (ka.has("amp")) b.amplitude = text::parse_complex(ka.args.at("amp"));
            if (!(b.halfwidth > 0.0)) throw std::invalid_argument("bump: halfwidth a must be positive");
            f.atoms.emplace_back(b);
        } else if (kind == "dipole") {
            const auto ka = text::parse_kind_args(item, {"c", "s", "a", "amp"});
            Dipole d;
            d.center = detail::parse_position(ka.has("c") ? ka.args.at("c") : "0", f.dim);
            if (ka.has("s")) d.offset = detail::parse_position(ka.args.at("s"), f.dim);
            if (ka.has("a")) d.halfwidth = text::parse_double(ka.args.at("a"));
            if (ka.has("amp")) d.amplitude = text::parse_complex(ka.args.at("amp"));
            if (!(d.halfwidth > 0.0)) throw std::invalid_argument("dipole: halfwidth a must be positive");
            f.atoms.emplace_back(d);
        } else {
            throw std::invalid_argument("unknown test function kind '" + kind + "'");
        }
    }
    if (f.dim == 0) f.dim = 1;
    return f;
}

inline std::string format_test_function(const TestFunctionSpec& f)
{
    if (f.atoms.empty()) return "zero";
    std::string out;
    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
        if (i) out += " + ";
        if (const auto* b = std::get_if<Bump>(&f.atoms[i])) {
            out += "bump:c=" + detail::format_position(b->center, f.dim) + ",a=" + text::format_double(b->halfwidth)
                   + ",amp=" + text::format_complex(b->amplitude);
        } else {
            const auto& d = std::get<Dipole>(f.atoms[i]);
            out += "dipole:c=" + detail::format_position(d.center, f.dim)
                   + ",s=" + detail::format_position(d.offset, f.dim) + ",a=" + text::format_double(d.halfwidth)
                   + ",amp=" + text::format_complex(d.amplitude);
        }
    }
    return out;
}

// --- spatial quadrature ------------------------------------------------------

/// \int conj(f(x)) w(x) dx by the trapezoidal rule with `nodes` intervals per
/// axis on each bump's support. Spectrally accurate for smooth w.
template <class W>
cplx integrate_against(const TestFunctionSpec& f, W&& w, int nodes = 512)
{
    cplx total = 0.0;
    for (const auto& t : f.terms()) {
        const double a = t.halfwidth;
        const double dt = 2.0 / nodes;
        std::vector<double> prof(static_cast<std::size_t>(nodes - 1));
        for (int j = 1; j < nodes; ++j) prof[static_cast<std::size_t>(j - 1)] = bump_profile(-1.0 + j * dt);
        cplx acc = 0.0;
        if (f.dim == 1) {
            for (int j = 1; j < nodes; ++j) {
                const double x = t.center[0] + a * (-1.0 + j * dt);
                acc += prof[static_cast<std::size_t>(j - 1)] * w(point1(x));
            }
            acc *= a * dt;
        } else {
            for (int j = 1; j < nodes; ++j) {
                const double x = t.center[0] + a * (-1.0 + j * dt);
                for (int k = 1; k < nodes; ++k) {
                    const double y = t.center[1] + a * (-1.0 + k * dt);
                    acc += prof[static_cast<std::size_t>(j - 1)] * prof[static_cast<std::size_t>(k - 1)] * w(point2(x, y));
                }
            }
            acc *= a * a * dt * dt;
        }
        total += std::conj(t.amplitude) * acc;
    }
    return total;
}

/// \int |f|^2 by the same trapezoidal rule on the union of supports.
inline double l2_norm_squared(const TestFunctionSpec& f, int nodes = 512)
{
    return integrate_against(f, [&](const Point& p) { return eval_test_function(f, p); }, nodes).real();
}

// --- Fourier tables ---------------------------------------------------------

/// \int_{-1}^{1} bump_profile(t) cos(k t) dt by the trapezoidal rule.
inline double bump_profile_transform(double k, int nodes)
{
    // trapezoid on [-1, 1]; the profile is even and vanishes to all orders at the ends
    thread_local std::vector<double> profile;
    thread_local int cached = 0;
    const int half = nodes / 2;
    const double dt = 2.0 / nodes;
    if (cached != nodes) {
        profile.assign(static_cast<std::size_t>(half) + 1, 0.0);
        for (int j = 0; j <= half; ++j) profile[static_cast<std::size_t>(j)] = bump_profile(-1.0 + j * dt);
        cached = nodes;
    }
    double acc = nodes % 2 == 0 ? 0.5 * profile[static_cast<std::size_t>(half)] * std::cos(k * (-1.0 + half * dt)) : 0.0;
    // e^{ik t_j} by rotation, reseeded every 32 nodes
    const cplx step = std::polar(1.0, k * dt);
    cplx z;
    for (int j = 1; j < (nodes + 1) / 2; ++j) {
        z = (j - 1) % 32 == 0 ? std::polar(1.0, k * (-1.0 + j * dt)) : z * step;
        acc += profile[static_cast<std::size_t>(j)] * z.real();
    }
    return 2.0 * acc * dt;
}

inline cplx fourier_value(const TestFunctionSpec& f, const std::array<double, 2>& p, int nodes)
{
    constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;
    cplx sum = 0.0;
    std::map<double, std::array<double, 2>> cache;
    for (const auto& t : f.terms()) {
        auto it = cache.find(t.halfwidth);
        if (it == cache.end()) {
            std::array<double, 2> v{bump_profile_transform(p[0] * t.halfwidth, nodes), 1.0};
            if (f.dim == 2) v[1] = bump_profile_transform(p[1] * t.halfwidth, nodes);
            it = cache.emplace(t.halfwidth, v).first;
        }
        const double phase = p[0] * t.center[0] + (f.dim == 2 ? p[1] * t.center[1] : 0.0);
        const cplx e = std::polar(1.0, -phase);
        if (f.dim == 1) {
            sum += t.amplitude * t.halfwidth * inv_sqrt_2pi * it->second[0] * e;
        } else {
            sum += t.amplitude * t.halfwidth * t.halfwidth * inv_sqrt_2pi * inv_sqrt_2pi * it->second[0]
                   * it->second[1] * e;
        }
    }
    return sum;
}

/// Momentum grid. d = 1: uniform nodes k*spacing on [-cutoff, cutoff].
/// d = 2: polar grid, `spacing`-wide Gauss-Legendre radial panels on
/// [0, cutoff] times `angular` uniform angles.
struct MomentumGrid {
    int dim = 1;
    double cutoff = 60.0;
    double spacing = 0.01;
    int angular = 192;
    int quadrature_nodes = 512;

    bool operator==(const MomentumGrid&) const = default;
};

inline MomentumGrid default_momentum_grid(int dim)
{
    MomentumGrid g;
    g.dim = dim;
    if (dim == 2) {
        g.cutoff = 80.0;
        g.spacing = 0.5;
        g.angular = 192;
        g.quadrature_nodes = 256;
    }
    return g;
}

/// Default grid with the cutoff scaled up for bumps narrower than 0.75, so the
/// truncated tail of |f^|^2 stays below 1e-6 relative.
inline MomentumGrid momentum_grid_for(const TestFunctionSpec& f, const TestFunctionSpec& g)
{
    MomentumGrid grid = default_momentum_grid(f.dim);
    double narrowest = 0.75;
    for (const auto* s : {&f, &g}) {
        for (const auto& t : s->terms()) narrowest = std::min(narrowest, t.halfwidth);
    }
    grid.cutoff *= 0.75 / narrowest;
    return grid;
}

struct FourierTable {
    MomentumGrid grid;
    std::vector<std::array<double, 2>> p;
    std::vector<double> weight;
    std::vector<double> p2;
    Eigen::VectorXcd values;
    cplx at_zero = 0.0;
    std::ptrdiff_t zero_index = -1;  // d = 1 only
    std::string provenance;
};

inline void validate(const MomentumGrid& g)
{
    if (g.dim != 1 && g.dim != 2) throw std::invalid_argument("momentum grid: dimension must be 1 or 2");
    if (!(g.cutoff > 0.0) || !(g.spacing > 0.0) || g.quadrature_nodes < 8 || (g.dim == 2 && g.angular < 8)) {
        throw std::invalid_argument("momentum grid: cutoff, spacing and resolution must be positive");
    }
}

inline FourierTable fourier_oracle(const TestFunctionSpec& f, const MomentumGrid& grid)
{
    validate(grid);
    if (f.dim != grid.dim) throw std::invalid_argument("fourier_oracle: dimension mismatch");
    FourierTable t;
    t.grid = grid;
    if (grid.dim == 1) {
        const long m = std::lround(grid.cutoff / grid.spacing);
        for (long k = -m; k <= m; ++k) {
            const double p = k * grid.spacing;
            t.p.push_back({p, 0.0});
            t.weight.push_back(grid.spacing);
            t.p2.push_back(p * p);
        }
        t.zero_index = m;
    } else {
        const int panels = static_cast<int>(std::lround(grid.cutoff / grid.spacing));
        const GaussRule radial = composite_gauss_rule(0.0, panels * grid.spacing, panels);
        const double dtheta = 2.0 * std::numbers::pi / grid.angular;
        for (std::size_t i = 0; i < radial.nodes.size(); ++i) {
            const double r = radial.nodes[i];
            for (int j = 0; j < grid.angular; ++j) {
                const double th = j * dtheta;
                t.p.push_back({r * std::cos(th), r * std::sin(th)});
                t.weight.push_back(radial.weights[i] * r * dtheta);
                t.p2.push_back(r * r);
            }
        }
    }
    t.values.resize(static_cast<Eigen::Index>(t.p.size()));
    for (std::size_t i = 0; i < t.p.size(); ++i) {
        t.values[static_cast<Eigen::Index>(i)] = fourier_value(f, t.p[i], grid.quadrature_nodes);
    }
    t.at_zero = fourier_value(f, {0.0, 0.0}, grid.quadrature_nodes);
    char buf[160];
    std::snprintf(buf, sizeof buf, "trapezoid M=%d; %s grid cutoff=%g spacing=%g%s", grid.quadrature_nodes,
                  grid.dim == 1 ? "uniform" : "polar Gauss-Legendre", grid.cutoff, grid.spacing,
                  grid.dim == 2 ? (" angular=" + std::to_string(grid.angular)).c_str() : "");
    t.provenance = buf;
    return t;
}

/// CSV with columns p (or px,py), re, im.
inline std::string fourier_table_csv(const FourierTable& t)
{
    std::string out = t.grid.dim == 1 ? "p,re,im\n" : "px,py,re,im\n";
    char buf[128];
    for (std::size_t i = 0; i < t.p.size(); ++i) {
        const cplx v = t.values[static_cast<Eigen::Index>(i)];
        if (t.grid.dim == 1) {
            std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e\n", t.p[i][0], v.real(), v.imag());
        } else {
            std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e,%.16e\n", t.p[i][0], t.p[i][1], v.real(), v.imag());
        }
        out += buf;
    }
    return out;
}

/// Relative size of |f^(0)| below which the zero-mean hypothesis counts as met.
inline constexpr double zero_mean_tolerance = 1e-10;

inline bool has_zero_mean(const FourierTable& t)
{
    const double scale = t.values.size() ? t.values.cwiseAbs().maxCoeff() : 0.0;
    return std::abs(t.at_zero) <= zero_mean_tolerance * std::max(scale, 1e-300);
}

enum class MomentumKernel { bose, regular, green };

/// \int conj(f^) g^ K(|p|^2) dp with K = Bose(beta .), F(beta .) or 1/|.|.
inline cplx momentum_integral(const FourierTable& tf, const FourierTable& tg, MomentumKernel kernel, double beta = 1.0)
{
    if (!(tf.grid == tg.grid)) throw std::invalid_argument("momentum_integral: tables on different momentum grids");
    if (kernel != MomentumKernel::green && !(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (kernel != MomentumKernel::regular && (!has_zero_mean(tf) || !has_zero_mean(tg))) {
        throw HypothesisError("the momentum integral diverges at p = 0 in d <= 2 unless f^(0) = g^(0) = 0 "
                              "(zero-mean hypothesis of the limit theorem)");
    }
    const auto& f = tf.values;
    const auto& g = tg.values;
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (i == tf.zero_index) continue;
        const cplx fg = std::conj(f[i]) * g[i];
        double w = 0.0;
        switch (kernel) {
        case MomentumKernel::bose: w = 1.0 / std::expm1(beta * tf.p2[k]); break;
        case MomentumKernel::regular: w = bose_regular(beta * tf.p2[k]); break;
        case MomentumKernel::green: w = 1.0 / tf.p2[k]; break;
        }
        acc += tf.weight[k] * w * fg;
    }
    if (tf.zero_index >= 0) {
        const auto z = tf.zero_index;
        const auto k = static_cast<std::size_t>(z);
        const cplx regular0 = -0.5 * std::conj(f[z]) * g[z];
        cplx green0 = 0.0;
        if (kernel != MomentumKernel::regular) {
            // limit of conj(f^) g^ / p^2 from a fit c0 + c1 p^2 + c2 p^4 through
            // the three nearest positive nodes
            const double d = tf.grid.spacing;
            cplx y[3];
            for (int j = 1; j <= 3; ++j) y[j - 1] = std::conj(f[z + j]) * g[z + j] / (j * j * d * d);
            // Lagrange extrapolation in u = p^2 to u = 0 with nodes u_j = j^2 d^2
            green0 = y[0] * (4.0 * 9.0) / ((4.0 - 1.0) * (9.0 - 1.0)) + y[1] * (1.0 * 9.0) / ((1.0 - 4.0) * (9.0 - 4.0))
                     + y[2] * (1.0 * 4.0) / ((1.0 - 9.0) * (4.0 - 9.0));
        }
        cplx v0 = 0.0;
        switch (kernel) {
        case MomentumKernel::bose: v0 = regular0 + green0 / beta; break;
        case MomentumKernel::regular: v0 = regular0; break;
        case MomentumKernel::green: v0 = green0; break;
        }
        acc += tf.weight[k] * v0;
    }
    return acc;
}

inline double free_gas_integral(const FourierTable& t, double beta)
{
    return momentum_integral(t, t, MomentumKernel::bose, beta).real();
}

inline double regular_part_integral(const FourierTable& t, double beta)
{
    return momentum_integral(t, t, MomentumKernel::regular, beta).real();
}

inline double green_integral(const FourierTable& t) { return momentum_integral(t, t, MomentumKernel::green).real(); }

/// Quadrature sum of |f^|^2, equal to \int |f|^2 when the cutoff is adequate.
inline double parseval_sum(const FourierTable& t)
{
    double acc = 0.0;
    for (Eigen::Index i = 0; i < t.values.size(); ++i) acc += t.weight[static_cast<std::size_t>(i)] * std::norm(t.values[i]);
    return acc;
}

/// beta^{-1} sum_k (\int conj(f) phi_k)(\int conj(phi_k) g).
inline cplx condensate_term(const HarmonicFamily& family, const TestFunctionSpec& f, const TestFunctionSpec& g,
                            double beta, int nodes = 512)
{
    if (!(beta > 0.0)) throw std::invalid_argument("condensate_term: beta must be positive");
    cplx acc = 0.0;
    for (const auto& phi : family) {
        const auto w = [&](const Point& p) { return eval_harmonic(phi, p); };
        const cplx fo = integrate_against(f, w, nodes);
        const cplx go = integrate_against(g, w, nodes);
        acc += fo * std::conj(go);
    }
    return acc / beta;
}

struct TwoPointRhs {
    cplx total;
    cplx free_gas;
    cplx regular;
    cplx green;  // beta^{-1} \int conj(f^) g^ / |p|^2
    cplx condensate;
};

inline TwoPointRhs two_point_rhs(const HarmonicFamily& family, const TestFunctionSpec& f, const TestFunctionSpec& g,
                                 double beta, const FourierTable& tf, const FourierTable& tg)
{
    if (!(beta > 0.0)) throw std::invalid_argument("two_point_rhs: beta must be positive");
    TwoPointRhs r;
    r.free_gas = momentum_integral(tf, tg, MomentumKernel::bose, beta);
    r.regular = momentum_integral(tf, tg, MomentumKernel::regular, beta);
    r.green = momentum_integral(tf, tg, MomentumKernel::green) / beta;
    r.condensate = condensate_term(family, f, g, beta, tf.grid.quadrature_nodes);
    r.total = r.free_gas + r.condensate;
    return r;
}

// --- whole-space resolvent --------------------------------------------------

/// ((1 - Delta)^{-1} u)(x) on the line: (1/2) \int e^{-|x-y|} u(y) dy.
inline cplx resolvent_reference_1d(const TestFunctionSpec& u, double x)
{
    if (u.dim != 1) throw std::invalid_argument("resolvent_reference_1d: one-dimensional test function required");
    cplx acc = 0.0;
    for (const auto& t : u.terms()) {
        const double c = t.center[0];
        const double a = t.halfwidth;
        // y = c + a s, s in [-1, 1]; split where the kernel has its kink
        const double sx = std::clamp((x - c) / a, -1.0, 1.0);
        const auto left = [&](double s) { return bump_profile(s) * std::exp(-(x - c - a * s)); };
        const auto right = [&](double s) { return bump_profile(s) * std::exp(-(c + a * s - x)); };
        const double v = integrate_endpoint_flat(left, -1.0, sx) + integrate_endpoint_flat(right, sx, 1.0);
        acc += t.amplitude * 0.5 * a * v;
    }
    return acc;
}

/// ((1 - Delta)^{-1} u)(x) in the plane by Fourier synthesis on a polar table of u.
inline cplx resolvent_reference_2d(const FourierTable& table, const Point& x)
{
    if (table.grid.dim != 2 || x.dim != 2) throw std::invalid_argument("resolvent_reference_2d: 2D table and point required");
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < table.values.size(); ++i) {
        const auto k = static_cast<std::size_t>(i);
        const double phase = table.p[k][0] * x[0] + table.p[k][1] * x[1];
        acc += table.weight[k] * table.values[i] * std::polar(1.0, phase) / (1.0 + table.p2[k]);
    }
    return acc / (2.0 * std::numbers::pi);
}

inline std::vector<cplx> resolvent_reference(const TestFunctionSpec& u, const std::vector<Point>& points,
                                             const MomentumGrid& grid2d = default_momentum_grid(2))
{
    std::vector<cplx> out;
    out.reserve(points.size());
    if (u.empty()) {
        out.assign(points.size(), 0.0);
        return out;
    }
    if (u.dim == 1) {
        for (const auto& p : points) out.push_back(resolvent_reference_1d(u, p[0]));
        return out;
    }
    if (u.dim != 2) throw std::invalid_argument("resolvent_reference: d must be 1 or 2");
    const FourierTable table = fourier_oracle(u, grid2d);
    for (const auto& p : points) out.push_back(resolvent_reference_2d(table, p));
    return out;
}

}  // namespace phibose
