#pragma once

// Globally harmonic functions phi_k, their sampling on grids and the
// condensate densities beta^{-1} sum_k |phi_k(x)|^2.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lattice.hpp"
#include "text.hpp"

namespace phibose {

struct Constant {
    cplx c{1.0, 0.0};
};

/// a + b x on the line.
struct Affine1D {
    cplx a{0.0, 0.0};
    cplx b{1.0, 0.0};
};

enum class Part { re, im };

/// coefficient * Re or Im of (x + i y - center)^degree.
struct HarmonicPoly2D {
    int degree = 1;
    Part part = Part::re;
    cplx center{0.0, 0.0};
    cplx coefficient{1.0, 0.0};
};

/// e^{k x} cos(k y + phase).
struct ExpCos2D {
    double k = 1.0;
    double phase = 0.0;
};

using HarmonicSpec = std::variant<Constant, Affine1D, HarmonicPoly2D, ExpCos2D>;
using HarmonicFamily = std::vector<HarmonicSpec>;

/// 0 when the variant is defined in every dimension.
inline int spec_dimension(const HarmonicSpec& spec)
{
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Constant>) return 0;
            else if constexpr (std::is_same_v<T, Affine1D>) return 1;
            else return 2;
        },
        spec);
}

inline cplx eval_harmonic(const HarmonicSpec& spec, const Point& p)
{
    const int d = spec_dimension(spec);
    if (d != 0 && d != p.dim) {
        throw std::invalid_argument("eval_harmonic: a " + std::to_string(d) + "D harmonic function evaluated at a "
                                    + std::to_string(p.dim) + "D point");
    }
    return std::visit(
        [&](const auto& s) -> cplx {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return s.c;
            } else if constexpr (std::is_same_v<T, Affine1D>) {
                return s.a + s.b * p[0];
            } else if constexpr (std::is_same_v<T, HarmonicPoly2D>) {
                const cplx z = cplx(p[0], p[1]) - s.center;
                cplx zn = 1.0;
                for (int i = 0; i < s.degree; ++i) zn *= z;
                return s.coefficient * (s.part == Part::re ? zn.real() : zn.imag());
            } else {
                return std::exp(s.k * p[0]) * std::cos(s.k * p[1] + s.phase);
            }
        },
        spec);
}

// --- text syntax -----------------------------------------------------------
//   const:c=(1,0)
//   affine:a=(0,0),b=(1,0)
//   hpoly2:n=2,part=re,z0=(0,0),coef=(1,0)
//   expcos:k=1,phase=0
// Omitted keys take the defaults above; format() always writes every key.

inline std::string format_harmonic(const HarmonicSpec& spec)
{
    using text::format_complex;
    using text::format_double;
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Constant>) {
                return "const:c=" + format_complex(s.c);
            } else if constexpr (std::is_same_v<T, Affine1D>) {
                return "affine:a=" + format_complex(s.a) + ",b=" + format_complex(s.b);
            } else if constexpr (std::is_same_v<T, HarmonicPoly2D>) {
                return "hpoly2:n=" + std::to_string(s.degree) + ",part=" + (s.part == Part::re ? "re" : "im")
                       + ",z0=" + format_complex(s.center) + ",coef=" + format_complex(s.coefficient);
            } else {
                return "expcos:k=" + format_double(s.k) + ",phase=" + format_double(s.phase);
            }
        },
        spec);
}

inline HarmonicSpec parse_harmonic(const std::string& str)
{
    const auto kind = text::parse_kind_args(str).kind;
    if (kind == "const") {
        const auto ka = text::parse_kind_args(str, {"c"});
        Constant s;
        if (ka.has("c")) s.c = text::parse_complex(ka.args.at("c"));
        return s;
    }
    if (kind == "affine") {
        const auto ka = text::parse_kind_args(str, {"a", "b"});
        Affine1D s;
        if (ka.has("a")) s.a = text::parse_complex(ka.args.at("a"));
        if (ka.has("b")) s.b = text::parse_complex(ka.args.at("b"));
        return s;
    }
    if (kind == "hpoly2") {
        const auto ka = text::parse_kind_args(str, {"n", "part", "z0", "coef"});
        HarmonicPoly2D s;
        if (ka.has("n")) {
            const double n = text::parse_double(ka.args.at("n"));
            if (n < 1 || n != std::floor(n)) throw std::invalid_argument("hpoly2: degree must be an integer >= 1");
            s.degree = static_cast<int>(n);
        }
        if (ka.has("part")) {
            const auto& p = ka.args.at("part");
            if (p == "re") s.part = Part::re;
            else if (p == "im") s.part = Part::im;
            else throw std::invalid_argument("hpoly2: part must be re or im");
        }
        if (ka.has("z0")) s.center = text::parse_complex(ka.args.at("z0"));
        if (ka.has("coef")) s.coefficient = text::parse_complex(ka.args.at("coef"));
        return s;
    }
    if (kind == "expcos") {
        const auto ka = text::parse_kind_args(str, {"k", "phase"});
        ExpCos2D s;
        if (ka.has("k")) s.k = text::parse_double(ka.args.at("k"));
        if (ka.has("phase")) s.phase = text::parse_double(ka.args.at("phase"));
        return s;
    }
    throw std::invalid_argument("unknown harmonic function kind '" + kind + "'");
}

/// Family written as specs separated by ';'.
inline HarmonicFamily parse_family(const std::string& str)
{
    HarmonicFamily family;
    if (text::trim(str).empty()) return family;
    for (const auto& item : text::split_top(str, ';')) {
        if (!item.empty()) family.push_back(parse_harmonic(item));
    }
    return family;
}

inline std::string format_family(const HarmonicFamily& family)
{
    std::string out;
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (i) out += ";";
        out += format_harmonic(family[i]);
    }
    return out;
}

// --- grid sampling ---------------------------------------------------------

/// max |(-Delta_h) phi| over interior nodes whose neighbours are all interior.
inline double harmonicity_residual(const HarmonicSpec& spec, const Grid& grid)
{
    const GridField u = sample(grid, [&](const Point& p) { return eval_harmonic(spec, p); });
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    double worst = 0.0;
    if (grid.dim() == 1) {
        for (int i = 1; i + 1 < grid.count(0); ++i) {
            const auto k = static_cast<std::size_t>(i);
            worst = std::max(worst, std::abs((2.0 * u[k] - u[k - 1] - u[k + 1]) * inv_h2));
        }
        return worst;
    }
    for (int i = 1; i + 1 < grid.count(0); ++i) {
        for (int j = 1; j + 1 < grid.count(1); ++j) {
            const cplx lap = 4.0 * u[grid.flat_index(i, j)] - u[grid.flat_index(i - 1, j)]
                             - u[grid.flat_index(i + 1, j)] - u[grid.flat_index(i, j - 1)]
                             - u[grid.flat_index(i, j + 1)];
            worst = std::max(worst, std::abs(lap * inv_h2));
        }
    }
    return worst;
}

enum class SamplingMode { sampled, discrete_harmonic };

inline std::string to_string(SamplingMode m) { return m == SamplingMode::sampled ? "sampled" : "discrete-harmonic"; }

inline SamplingMode parse_sampling_mode(const std::string& s)
{
    if (s == "sampled") return SamplingMode::sampled;
    if (s == "discrete-harmonic") return SamplingMode::discrete_harmonic;
    throw std::invalid_argument("unknown sampling mode '" + s + "' (expected sampled or discrete-harmonic)");
}

/// Source term that the boundary layer values of phi induce on the first
/// interior layer of the Dirichlet stencil.
inline GridField boundary_source(const HarmonicSpec& spec, const Grid& grid)
{
    GridField b(grid);
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    if (grid.dim() == 1) {
        const int n = grid.count(0);
        const double half = 0.5 * grid.length(0);
        b[0] += eval_harmonic(spec, point1(-half)) * inv_h2;
        b[static_cast<std::size_t>(n - 1)] += eval_harmonic(spec, point1(half)) * inv_h2;
        return b;
    }
    const int n0 = grid.count(0);
    const int n1 = grid.count(1);
    const double hx = 0.5 * grid.length(0);
    const double hy = 0.5 * grid.length(1);
    for (int j = 0; j < n1; ++j) {
        const double y = grid.coordinate(1, j + 1);
        b[grid.flat_index(0, j)] += eval_harmonic(spec, point2(-hx, y)) * inv_h2;
        b[grid.flat_index(n0 - 1, j)] += eval_harmonic(spec, point2(hx, y)) * inv_h2;
    }
    for (int i = 0; i < n0; ++i) {
        const double x = grid.coordinate(0, i + 1);
        b[grid.flat_index(i, 0)] += eval_harmonic(spec, point2(x, -hy)) * inv_h2;
        b[grid.flat_index(i, n1 - 1)] += eval_harmonic(spec, point2(x, hy)) * inv_h2;
    }
    return b;
}

/// Columns chi_Omega phi_k on the grid.
///
/// `sampled` evaluates phi_k at the nodes. `discrete_harmonic` solves the
/// stencil equation with phi_k as data on the boundary layer, so the result
/// is exactly harmonic for the discrete Laplacian.
inline std::vector<GridField> sample_family(const HarmonicFamily& family, const Grid& grid, SamplingMode mode)
{
    std::vector<GridField> columns;
    columns.reserve(family.size());
    if (mode == SamplingMode::sampled) {
        for (const auto& spec : family) {
            columns.push_back(sample(grid, [&](const Point& p) { return eval_harmonic(spec, p); }));
        }
        return columns;
    }
    const SineBasis basis(grid);
    const DirichletSpectrum fd = make_spectrum(grid, SpectrumMode::fd);
    for (const auto& spec : family) {
        const int d = spec_dimension(spec);
        if (d != 0 && d != grid.dim()) throw std::invalid_argument("sample_family: dimension mismatch");
        Eigen::VectorXcd c = basis.forward(boundary_source(spec, grid).values);
        c.array() /= fd.by_mode.array();
        columns.emplace_back(grid, basis.inverse(c));
    }
    return columns;
}

inline double condensate_density(const HarmonicFamily& family, double beta, const Point& p)
{
    if (!(beta > 0.0)) throw std::invalid_argument("condensate_density: beta must be positive");
    double sum = 0.0;
    for (const auto& spec : family) sum += std::norm(eval_harmonic(spec, p));
    return sum / beta;
}

}  // namespace phibose
