#pragma once

// Centered uniform grids on boxes (-L/2, L/2)^d, weighted fields, the
// Dirichlet 5-point (3-point in 1D) stencil and the orthonormal sine basis
// that diagonalizes it.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace phibose {

using cplx = std::complex<double>;

/// A point in R^1 or R^2. Unused trailing coordinates are zero.
struct Point {
    std::array<double, 2> x{};
    int dim = 1;

    double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
};

inline Point point1(double x) { return Point{{x, 0.0}, 1}; }
inline Point point2(double x, double y) { return Point{{x, y}, 2}; }

class Grid {
public:
    Grid() = default;

    int dim() const { return dim_; }
    double spacing() const { return h_; }
    double length(int axis) const { return lengths_[static_cast<std::size_t>(axis)]; }
    int count(int axis) const { return counts_[static_cast<std::size_t>(axis)]; }
    std::size_t size() const { return total_; }

    /// Quadrature weight h^d of every node.
    double weight() const { return dim_ == 1 ? h_ : h_ * h_; }

    /// Coordinate of the m-th node on an axis, m in 1..n (0 and n+1 are the
    /// boundary layer at -L/2 and L/2).
    double coordinate(int axis, int m) const { return -0.5 * length(axis) + m * h_; }

    /// Lexicographic node ordering: index = i0 * n1 + i1 with zero-based i.
    std::array<int, 2> multi_index(std::size_t index) const
    {
        if (dim_ == 1) {
            return {static_cast<int>(index), 0};
        }
        const auto n1 = static_cast<std::size_t>(counts_[1]);
        return {static_cast<int>(index / n1), static_cast<int>(index % n1)};
    }

    std::size_t flat_index(int i0, int i1 = 0) const
    {
        return dim_ == 1 ? static_cast<std::size_t>(i0)
                         : static_cast<std::size_t>(i0) * static_cast<std::size_t>(counts_[1])
                               + static_cast<std::size_t>(i1);
    }

    Point node(std::size_t index) const
    {
        const auto mi = multi_index(index);
        Point p;
        p.dim = dim_;
        for (int a = 0; a < dim_; ++a) {
            p.x[static_cast<std::size_t>(a)] = coordinate(a, mi[static_cast<std::size_t>(a)] + 1);
        }
        return p;
    }

    bool operator==(const Grid& other) const
    {
        return dim_ == other.dim_ && h_ == other.h_ && counts_ == other.counts_
               && lengths_ == other.lengths_;
    }

    friend Grid make_grid(int dim, const std::vector<double>& lengths, double spacing);

private:
    int dim_ = 1;
    double h_ = 1.0;
    std::array<double, 2> lengths_{};
    std::array<int, 2> counts_{1, 1};
    std::size_t total_ = 0;
};

/// Builds the centered grid with interior nodes -L/2 + m h, m = 1..L/h - 1.
inline Grid make_grid(int dim, const std::vector<double>& lengths, double spacing)
{
    if (dim != 1 && dim != 2) {
        throw std::invalid_argument("make_grid: dimension must be 1 or 2");
    }
    if (static_cast<int>(lengths.size()) != dim) {
        throw std::invalid_argument("make_grid: expected one length per axis");
    }
    if (!(spacing > 0.0)) {
        throw std::invalid_argument("make_grid: spacing must be positive");
    }
    Grid g;
    g.dim_ = dim;
    g.h_ = spacing;
    g.total_ = 1;
    for (int a = 0; a < dim; ++a) {
        const double ratio = lengths[static_cast<std::size_t>(a)] / spacing;
        const double nearest = std::round(ratio);
        if (std::abs(ratio - nearest) > 1e-9 * std::max(1.0, ratio)) {
            std::ostringstream msg;
            msg << "make_grid: axis " << a << ": L/h not integer (L=" << lengths[static_cast<std::size_t>(a)]
                << ", h=" << spacing << ", L/h=" << ratio << ")";
            throw std::invalid_argument(msg.str());
        }
        if (nearest < 2.0) {
            std::ostringstream msg;
            msg << "make_grid: axis " << a << ": L/h must be at least 2";
            throw std::invalid_argument(msg.str());
        }
        g.lengths_[static_cast<std::size_t>(a)] = lengths[static_cast<std::size_t>(a)];
        g.counts_[static_cast<std::size_t>(a)] = static_cast<int>(nearest) - 1;
        g.total_ *= static_cast<std::size_t>(g.counts_[static_cast<std::size_t>(a)]);
    }
    return g;
}

/// Cubic box of side L.
inline Grid make_box(int dim, double side, double spacing)
{
    return make_grid(dim, std::vector<double>(static_cast<std::size_t>(dim), side), spacing);
}

struct GridField {
    Grid grid;
    Eigen::VectorXcd values;

    GridField() = default;
    explicit GridField(Grid g) : grid(std::move(g)), values(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()))) {}
    GridField(Grid g, Eigen::VectorXcd v) : grid(std::move(g)), values(std::move(v))
    {
        if (static_cast<std::size_t>(values.size()) != grid.size()) {
            throw std::invalid_argument("GridField: value count does not match grid size");
        }
    }

    cplx& operator[](std::size_t i) { return values[static_cast<Eigen::Index>(i)]; }
    const cplx& operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
};

/// Samples a callable point -> value at every node.
template <class Fn>
GridField sample(const Grid& grid, Fn&& fn)
{
    GridField u(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        u[i] = cplx(fn(grid.node(i)));
    }
    return u;
}

inline void require_same_grid(const GridField& u, const GridField& v, const char* where)
{
    if (!(u.grid == v.grid)) {
        throw std::invalid_argument(std::string(where) + ": grid mismatch");
    }
}

/// h^d sum conj(u) v, conjugate-linear in the first slot.
inline cplx inner_product(const GridField& u, const GridField& v)
{
    require_same_grid(u, v, "inner_product");
    return u.grid.weight() * u.values.dot(v.values);
}

inline double norm(const GridField& u) { return std::sqrt(u.grid.weight() * u.values.squaredNorm()); }

/// Discrete -Laplacian with zero Dirichlet data outside the interior nodes.
inline GridField stencil_apply(const Grid& grid, const GridField& u)
{
    if (!(u.grid == grid)) {
        throw std::invalid_argument("stencil_apply: grid mismatch");
    }
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    GridField out(grid);
    if (grid.dim() == 1) {
        const int n = grid.count(0);
        for (int i = 0; i < n; ++i) {
            const cplx left = i > 0 ? u[static_cast<std::size_t>(i - 1)] : cplx{};
            const cplx right = i + 1 < n ? u[static_cast<std::size_t>(i + 1)] : cplx{};
            out[static_cast<std::size_t>(i)] = (2.0 * u[static_cast<std::size_t>(i)] - left - right) * inv_h2;
        }
        return out;
    }
    const int n0 = grid.count(0);
    const int n1 = grid.count(1);
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n1; ++j) {
            cplx acc = 4.0 * u[grid.flat_index(i, j)];
            if (i > 0) acc -= u[grid.flat_index(i - 1, j)];
            if (i + 1 < n0) acc -= u[grid.flat_index(i + 1, j)];
            if (j > 0) acc -= u[grid.flat_index(i, j - 1)];
            if (j + 1 < n1) acc -= u[grid.flat_index(i, j + 1)];
            out[grid.flat_index(i, j)] = acc * inv_h2;
        }
    }
    return out;
}

enum class SpectrumMode { fd, spectral };

inline std::string to_string(SpectrumMode m) { return m == SpectrumMode::fd ? "fd" : "spectral"; }

inline SpectrumMode parse_spectrum_mode(const std::string& s)
{
    if (s == "fd") return SpectrumMode::fd;
    if (s == "spectral") return SpectrumMode::spectral;
    throw std::invalid_argument("unknown spectrum mode '" + s + "' (expected fd or spectral)");
}

/// 1D eigenvalue of mode k (1-based) on an axis with n interior nodes.
inline double dirichlet_eigenvalue_1d(SpectrumMode mode, int k, int n, double h)
{
    const double L = (n + 1) * h;
    if (mode == SpectrumMode::fd) {
        const double s = std::sin(k * std::numbers::pi / (2.0 * (n + 1)));
        return 4.0 / (h * h) * s * s;
    }
    const double p = k * std::numbers::pi / L;
    return p * p;
}

/// Eigenvalues of the Dirichlet Laplacian in the sine basis.
///
/// `by_mode` follows the lexicographic mode ordering used by the sine
/// transform, so dividing coefficients by it applies the inverse.
/// `sorted` is the same multiset in ascending order.
struct DirichletSpectrum {
    SpectrumMode mode = SpectrumMode::fd;
    std::vector<std::vector<double>> axis;
    Eigen::VectorXd by_mode;
    std::vector<double> sorted;
};

inline DirichletSpectrum make_spectrum(const Grid& grid, SpectrumMode mode = SpectrumMode::fd)
{
    DirichletSpectrum s;
    s.mode = mode;
    for (int a = 0; a < grid.dim(); ++a) {
        std::vector<double> ev(static_cast<std::size_t>(grid.count(a)));
        for (int k = 1; k <= grid.count(a); ++k) {
            ev[static_cast<std::size_t>(k - 1)] = dirichlet_eigenvalue_1d(mode, k, grid.count(a), grid.spacing());
        }
        s.axis.push_back(std::move(ev));
    }
    s.by_mode.resize(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto mi = grid.multi_index(i);
        double lam = s.axis[0][static_cast<std::size_t>(mi[0])];
        if (grid.dim() == 2) lam += s.axis[1][static_cast<std::size_t>(mi[1])];
        s.by_mode[static_cast<Eigen::Index>(i)] = lam;
    }
    s.sorted.assign(s.by_mode.data(), s.by_mode.data() + s.by_mode.size());
    std::sort(s.sorted.begin(), s.sorted.end());
    return s;
}

enum class Direction { forward, inverse };

/// Orthonormal tensor sine basis e_k(x) = prod_a sqrt(2/L_a) sin(k_a pi m_a / (n_a + 1)).
///
/// Forward maps node values to coefficients c_k = <e_k, u> (weighted inner
/// product); inverse synthesizes sum_k c_k e_k. Coefficients carry the plain
/// Euclidean inner product, so the forward map is unitary onto C^N.
class SineBasis {
public:
    SineBasis() = default;

    explicit SineBasis(const Grid& grid) : grid_(grid)
    {
        for (int a = 0; a < grid.dim(); ++a) {
            const int n = grid.count(a);
            Eigen::MatrixXd s(n, n);
            const double scale = std::sqrt(2.0 / (n + 1));
            for (int k = 1; k <= n; ++k) {
                for (int m = 1; m <= n; ++m) {
                    // reduce k m modulo the period 2(n + 1) before scaling by pi
                    const int j = (k * m) % (2 * (n + 1));
                    s(k - 1, m - 1) = scale * std::sin(std::numbers::pi * j / (n + 1));
                }
            }
            tables_.push_back(std::move(s));
        }
    }

    const Grid& grid() const { return grid_; }

    Eigen::VectorXcd forward(const Eigen::VectorXcd& values) const
    {
        return unscaled(values) * std::pow(grid_.spacing(), 0.5 * grid_.dim());
    }

    Eigen::VectorXcd inverse(const Eigen::VectorXcd& coeffs) const
    {
        return unscaled(coeffs) * std::pow(grid_.spacing(), -0.5 * grid_.dim());
    }

    GridField transform(const GridField& u, Direction dir) const
    {
        if (!(u.grid == grid_)) {
            throw std::invalid_argument("sine_transform: grid mismatch");
        }
        return GridField(grid_, dir == Direction::forward ? forward(u.values) : inverse(u.values));
    }

    /// Node values of the basis function with lexicographic mode index.
    GridField mode(std::size_t index) const
    {
        Eigen::VectorXcd c = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid_.size()));
        c[static_cast<Eigen::Index>(index)] = 1.0;
        return GridField(grid_, inverse(c));
    }

private:
    // Applies the symmetric orthogonal DST-I matrix along every axis.
    Eigen::VectorXcd unscaled(const Eigen::VectorXcd& v) const
    {
        if (static_cast<std::size_t>(v.size()) != grid_.size()) {
            throw std::invalid_argument("SineBasis: vector length does not match grid");
        }
        if (grid_.dim() == 1) {
            Eigen::VectorXcd out(v.size());
            out.real() = tables_[0] * v.real();
            out.imag() = tables_[0] * v.imag();
            return out;
        }
        const Eigen::Index n0 = grid_.count(0);
        const Eigen::Index n1 = grid_.count(1);
        using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const RowMat re = Eigen::Map<const RowMat>(v.real().eval().data(), n0, n1);
        const RowMat im = Eigen::Map<const RowMat>(v.imag().eval().data(), n0, n1);
        const RowMat out_re = tables_[0] * re * tables_[1];
        const RowMat out_im = tables_[0] * im * tables_[1];
        Eigen::VectorXcd out(v.size());
        for (Eigen::Index i = 0; i < n0; ++i) {
            for (Eigen::Index j = 0; j < n1; ++j) {
                out[i * n1 + j] = cplx(out_re(i, j), out_im(i, j));
            }
        }
        return out;
    }

    Grid grid_;
    std::vector<Eigen::MatrixXd> tables_;
};

inline GridField sine_transform(const Grid& grid, const GridField& u, Direction dir)
{
    return SineBasis(grid).transform(u, dir);
}

enum class Side { left, right };

struct BoundaryTrace {
    cplx value;
    cplx outward_derivative;
};

/// Second-order extrapolation of a 1D field to x = -L/2 or x = +L/2 from the
/// three nearest interior nodes, with the one-sided derivative oriented
/// outward (-d/dx on the left, +d/dx on the right).
inline BoundaryTrace boundary_trace_1d(const Grid& grid, const GridField& u, Side side)
{
    if (grid.dim() != 1) {
        throw std::invalid_argument("boundary_trace_1d: grid must be one-dimensional");
    }
    if (!(u.grid == grid)) {
        throw std::invalid_argument("boundary_trace_1d: grid mismatch");
    }
    const int n = grid.count(0);
    if (n < 3) {
        throw std::invalid_argument("boundary_trace_1d: need at least three interior nodes");
    }
    const auto at = [&](int k) {
        // k-th node inward from the requested side, k = 1, 2, 3
        return side == Side::left ? u[static_cast<std::size_t>(k - 1)] : u[static_cast<std::size_t>(n - k)];
    };
    const double h = grid.spacing();
    const cplx value = 3.0 * at(1) - 3.0 * at(2) + at(3);
    // derivative along the inward coordinate t at t = 0
    const cplx inward = (-5.0 * at(1) + 8.0 * at(2) - 3.0 * at(3)) / (2.0 * h);
    return {value, -inward};
}

}  // namespace phibose
