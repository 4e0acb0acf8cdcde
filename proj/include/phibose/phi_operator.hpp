#pragma once

// The discrete Laplacian with harmonic condensates, -Delta_Phi, defined
// through its inverse
//
//     A^{-1} = G + sum_k |v_k><v_k|,
//
// where G is the Dirichlet Green operator and v_k are the columns chi phi_k.
// Everything is assembled in the orthonormal sine basis, where G is the
// diagonal 1/lambda and the condensate sum is a rank-K congruence.

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "harmonics.hpp"
#include "lattice.hpp"
#include "linalg.hpp"
#include "spectral_function.hpp"

namespace phibose {

enum class Backend { automatic, dense, lanczos };

/// Largest problem size handled by the dense backend.
inline constexpr std::size_t dense_limit = 4096;

/// Relative threshold on Gram eigenvalues below which directions are dropped.
inline constexpr double rank_threshold = 1e-10;

inline std::string to_string(Backend b)
{
    switch (b) {
    case Backend::automatic: return "auto";
    case Backend::dense: return "dense";
    case Backend::lanczos: return "lanczos";
    }
    return "auto";
}

inline Backend parse_backend(const std::string& s)
{
    if (s == "auto") return Backend::automatic;
    if (s == "dense") return Backend::dense;
    if (s == "lanczos") return Backend::lanczos;
    throw std::invalid_argument("unknown backend '" + s + "' (expected auto, dense or lanczos)");
}

/// Span of the condensate columns with its projection and the operator R.
struct CondensateBasis {
    std::vector<GridField> columns;
    Eigen::MatrixXcd coefficients;  // N x K sine coefficients of the columns
    Eigen::MatrixXcd gram;          // K x K, gram(i, j) = <v_i, v_j>
    std::size_t rank = 0;
    std::size_t deflated = 0;
    Eigen::MatrixXcd orthonormal;  // N x rank, orthonormal basis of the span (sine coefficients)
    Eigen::MatrixXcd compressed;   // rank x rank, Q^* (sum_k |v_k><v_k|) Q
    Eigen::MatrixXcd R_matrix;     // compressed^{-1}
    Eigen::MatrixXcd factor;       // N x rank, factor * factor^* = Q compressed Q^*
    bool real = true;
};

inline CondensateBasis make_condensate_basis(const SineBasis& sines, std::vector<GridField> columns)
{
    CondensateBasis b;
    const auto n = static_cast<Eigen::Index>(sines.grid().size());
    const auto k = static_cast<Eigen::Index>(columns.size());
    b.coefficients.resize(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const auto& col = columns[static_cast<std::size_t>(j)];
        if (!(col.grid == sines.grid())) throw std::invalid_argument("condensate column sampled on a different grid");
        b.coefficients.col(j) = sines.forward(col.values);
    }
    b.columns = std::move(columns);
    b.gram = b.coefficients.adjoint() * b.coefficients;
    b.real = b.coefficients.imag().isZero(0.0);
    if (k == 0) {
        b.orthonormal.resize(n, 0);
        b.compressed.resize(0, 0);
        b.R_matrix.resize(0, 0);
        b.factor.resize(n, 0);
        return b;
    }

    Eigen::MatrixXcd u;
    Eigen::VectorXd s;
    if (b.real) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.coefficients.real(), Eigen::ComputeThinU);
        u = svd.matrixU().cast<cplx>();
        s = svd.singularValues();
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b.coefficients, Eigen::ComputeThinU);
        u = svd.matrixU();
        s = svd.singularValues();
    }
    const double top = s.size() > 0 ? s[0] * s[0] : 0.0;
    Eigen::Index r = 0;
    while (r < s.size() && top > 0.0 && s[r] * s[r] > rank_threshold * top) ++r;
    b.rank = static_cast<std::size_t>(r);
    b.deflated = static_cast<std::size_t>(k - r);
    b.orthonormal = u.leftCols(r);
    const Eigen::MatrixXcd qc = b.orthonormal.adjoint() * b.coefficients;
    b.compressed = qc * qc.adjoint();
    b.compressed = (0.5 * (b.compressed + b.compressed.adjoint())).eval();
    b.R_matrix = b.compressed.llt().solve(Eigen::MatrixXcd::Identity(r, r));
    const Eigen::MatrixXcd chol = b.compressed.llt().matrixL();
    b.factor = b.orthonormal * chol;
    return b;
}

struct LanczosResult {
    double value = 0.0;
    std::size_t steps = 0;
    bool converged = false;
    bool breakdown = false;
};

struct TwoPointLhs {
    cplx direct;      // <f, Bose(A) g>
    cplx split;       // regular + green + condensate
    cplx regular;     // <f, F(beta A) g>
    cplx green;       // beta^{-1} <f, G g>
    cplx condensate;  // beta^{-1} sum_k <f, v_k><v_k, g>
};

class PhiOperator {
public:
    struct Options {
        Backend backend = Backend::automatic;
        double lanczos_tolerance = 1e-13;
        std::size_t lanczos_max_steps = 3000;
    };

    PhiOperator(const Grid& grid, const DirichletSpectrum& spectrum, std::vector<GridField> columns, Options options)
        : grid_(grid), spectrum_(spectrum), sines_(grid), options_(options)
    {
        if (static_cast<std::size_t>(spectrum.by_mode.size()) != grid.size()) {
            throw std::invalid_argument("PhiOperator: spectrum does not belong to the grid");
        }
        basis_ = make_condensate_basis(sines_, std::move(columns));
        green_diag_ = spectrum_.by_mode.cwiseInverse();
        backend_ = options.backend;
        if (backend_ == Backend::automatic) {
            backend_ = grid.size() <= dense_limit ? Backend::dense : Backend::lanczos;
        }
        if (backend_ == Backend::dense && grid.size() > dense_limit) {
            throw std::invalid_argument("PhiOperator: dense backend is limited to N <= " + std::to_string(dense_limit)
                                        + " (N = " + std::to_string(grid.size()) + ")");
        }
        if (backend_ == Backend::dense) decompose();
    }

    const Grid& grid() const { return grid_; }
    const DirichletSpectrum& spectrum() const { return spectrum_; }
    const SineBasis& sines() const { return sines_; }
    const CondensateBasis& basis() const { return basis_; }
    Backend backend() const { return backend_; }
    const Options& options() const { return options_; }
    bool has_dense() const { return backend_ == Backend::dense; }

    Eigen::VectorXcd coefficients(const GridField& u) const
    {
        if (!(u.grid == grid_)) throw std::invalid_argument("PhiOperator: field lives on a different grid");
        return sines_.forward(u.values);
    }

    GridField field(const Eigen::VectorXcd& coeffs) const { return GridField(grid_, sines_.inverse(coeffs)); }

    /// Dense A^{-1} in the sine basis: diag(1/lambda) + factor factor^*.
    Eigen::MatrixXcd inverse_matrix() const
    {
        Eigen::MatrixXcd m = basis_.factor * basis_.factor.adjoint();
        m.diagonal() += green_diag_.cast<cplx>();
        return m;
    }

    Eigen::VectorXcd apply_green_coeff(const Eigen::VectorXcd& c) const { return green_diag_.cast<cplx>().cwiseProduct(c); }

    Eigen::VectorXcd apply_inverse_coeff(const Eigen::VectorXcd& c) const
    {
        Eigen::VectorXcd out = apply_green_coeff(c);
        if (basis_.rank > 0) out.noalias() += basis_.factor * (basis_.factor.adjoint() * c);
        return out;
    }

    GridField green_apply(const GridField& u) const { return field(apply_green_coeff(coefficients(u))); }
    GridField apply_inverse(const GridField& u) const { return field(apply_inverse_coeff(coefficients(u))); }

    /// Orthogonal projection onto span{v_k}.
    GridField project(const GridField& u) const
    {
        const Eigen::VectorXcd c = coefficients(u);
        return field(basis_.orthonormal * (basis_.orthonormal.adjoint() * c));
    }

    /// A itself in sine coefficients, diag(lambda) - W (1 + Z^* W)^{-1} W^* with
    /// W = diag(lambda) Z. Its eigenvalues keep relative accuracy at the top of
    /// the spectrum, where 1/mu loses it.
    Eigen::MatrixXcd operator_matrix() const
    {
        if (grid_.size() > dense_limit) throw std::invalid_argument("operator_matrix: N exceeds the dense limit");
        const Eigen::VectorXcd lam = spectrum_.by_mode.cast<cplx>();
        Eigen::MatrixXcd a = lam.asDiagonal();
        if (basis_.rank > 0) {
            const Eigen::MatrixXcd w = lam.asDiagonal() * basis_.factor;
            Eigen::MatrixXcd s = basis_.factor.adjoint() * w;
            s.diagonal().array() += 1.0;
            a.noalias() -= w * s.ldlt().solve(w.adjoint());
            a = (0.5 * (a + a.adjoint())).eval();
        }
        return a;
    }

    // --- dense spectral data ----------------------------------------------

    /// Eigenvalues mu of A^{-1}, ascending. Operator eigenvalues are 1/mu.
    const Eigen::VectorXd& inverse_eigenvalues() const
    {
        require_dense("inverse_eigenvalues");
        return mu_;
    }

    /// Operator eigenvalues nu = 1/mu, ascending.
    std::vector<double> operator_eigenvalues() const
    {
        require_dense("operator_eigenvalues");
        std::vector<double> nu(static_cast<std::size_t>(mu_.size()));
        for (Eigen::Index i = 0; i < mu_.size(); ++i) nu[static_cast<std::size_t>(i)] = 1.0 / mu_[mu_.size() - 1 - i];
        return nu;
    }

    /// Sine coefficients of the eigenvector belonging to inverse_eigenvalues()[j].
    Eigen::VectorXcd eigenvector_coeff(Eigen::Index j) const
    {
        require_dense("eigenvector_coeff");
        return real_ ? Eigen::VectorXcd(vec_re_.col(j).cast<cplx>()) : Eigen::VectorXcd(vec_cx_.col(j));
    }

    /// Eigenvector of the m-th smallest operator eigenvalue (m = 0 is the lowest).
    GridField operator_eigenvector(std::size_t m) const
    {
        require_dense("operator_eigenvector");
        return field(eigenvector_coeff(mu_.size() - 1 - static_cast<Eigen::Index>(m)));
    }

    /// V^* c in the eigenbasis.
    Eigen::VectorXcd to_eigenbasis(const Eigen::VectorXcd& c) const
    {
        require_dense("to_eigenbasis");
        if (real_) {
            Eigen::VectorXcd out(c.size());
            out.real() = vec_re_.transpose() * c.real();
            out.imag() = vec_re_.transpose() * c.imag();
            return out;
        }
        return vec_cx_.adjoint() * c;
    }

    Eigen::VectorXcd from_eigenbasis(const Eigen::VectorXcd& a) const
    {
        require_dense("from_eigenbasis");
        if (real_) {
            Eigen::VectorXcd out(a.size());
            out.real() = vec_re_ * a.real();
            out.imag() = vec_re_ * a.imag();
            return out;
        }
        return vec_cx_ * a;
    }

    /// F(A) u through the dense eigendecomposition.
    GridField apply_function(const SpectralFunction& fn, const GridField& u) const
    {
        validate(fn);
        Eigen::VectorXcd a = to_eigenbasis(coefficients(u));
        for (Eigen::Index j = 0; j < a.size(); ++j) a[j] *= evaluate_on_inverse(fn, mu_[j]);
        return field(from_eigenbasis(a));
    }

    /// A u through the dense eigendecomposition.
    GridField apply(const GridField& u) const
    {
        Eigen::VectorXcd a = to_eigenbasis(coefficients(u));
        a.array() /= mu_.array().cast<cplx>();
        return field(from_eigenbasis(a));
    }

    /// (A + s)^{-1} u = A^{-1} (1 + s A^{-1})^{-1} u by the Woodbury identity
    /// on the diagonal-plus-low-rank form. Works for every backend.
    GridField resolvent_apply(double s, const GridField& u) const
    {
        if (!(s > 0.0)) throw std::invalid_argument("resolvent_apply: shift must be positive");
        const Eigen::VectorXcd c = coefficients(u);
        const Eigen::VectorXd b_inv = (Eigen::VectorXd::Ones(green_diag_.size()) + s * green_diag_).cwiseInverse();
        Eigen::VectorXcd t = b_inv.cast<cplx>().cwiseProduct(c);
        if (basis_.rank > 0) {
            const Eigen::MatrixXcd& z = basis_.factor;
            const Eigen::MatrixXcd bz = b_inv.cast<cplx>().asDiagonal() * z;
            Eigen::MatrixXcd small = z.adjoint() * bz;
            small.diagonal().array() += 1.0 / s;
            const Eigen::VectorXcd corr = small.ldlt().solve(bz.adjoint() * c);
            t.noalias() -= bz * corr;
        }
        return field(apply_inverse_coeff(t));
    }

    // --- quadratic forms ---------------------------------------------------

    /// Q(f) = <f, F(A) f> by Lanczos on A^{-1} started from f.
    LanczosResult lanczos_quadratic_form(const SpectralFunction& fn, const GridField& f, std::size_t steps,
                                         double tolerance) const
    {
        validate(fn);
        if (steps == 0) throw std::invalid_argument("lanczos_quadratic_form: steps must be positive");
        return lanczos_coeff(fn, coefficients(f), steps, tolerance);
    }

    /// <f, F(A) g>, conjugate-linear in f.
    cplx quadratic_form(const SpectralFunction& fn, const GridField& f, const GridField& g) const
    {
        validate(fn);
        const Eigen::VectorXcd cf = coefficients(f);
        const Eigen::VectorXcd cg = coefficients(g);
        if (backend_ == Backend::dense) {
            const Eigen::VectorXcd a = to_eigenbasis(cf);
            const Eigen::VectorXcd b = to_eigenbasis(cg);
            cplx acc = 0.0;
            for (Eigen::Index j = 0; j < a.size(); ++j) acc += evaluate_on_inverse(fn, mu_[j]) * std::conj(a[j]) * b[j];
            return acc;
        }
        const auto q = [&](const Eigen::VectorXcd& c) {
            if (c.squaredNorm() == 0.0) return 0.0;
            return lanczos_coeff(fn, c, options_.lanczos_max_steps, options_.lanczos_tolerance).value;
        };
        if (cf == cg) return q(cf);
        const cplx i(0.0, 1.0);
        const double re = 0.25 * (q(cf + cg) - q(cf - cg));
        double im = 0.0;
        if (!(basis_.real && cf.imag().isZero(0.0) && cg.imag().isZero(0.0))) {
            im = -0.25 * (q(cf + i * cg) - q(cf - i * cg));
        }
        return {re, im};
    }

    /// Two-point function <f, (e^{beta A} - 1)^{-1} g>, evaluated directly and
    /// through the split Bose = F(beta .) + 1/(beta .), whose 1/(beta .) part
    /// is taken from the explicit inverse G + sum_k |v_k><v_k|.
    TwoPointLhs two_point_lhs(double beta, const GridField& f, const GridField& g) const
    {
        if (!(beta > 0.0)) throw std::invalid_argument("two_point_lhs: beta must be positive");
        TwoPointLhs out;
        out.direct = quadratic_form(Bose{beta}, f, g);
        out.regular = quadratic_form(BoseRegular{beta}, f, g);
        const Eigen::VectorXcd cf = coefficients(f);
        const Eigen::VectorXcd cg = coefficients(g);
        out.green = cf.dot(apply_green_coeff(cg)) / beta;
        cplx cond = 0.0;
        for (const auto& v : basis_.columns) cond += inner_product(f, v) * inner_product(v, g);
        out.condensate = cond / beta;
        out.split = out.regular + out.green + out.condensate;
        return out;
    }

    /// Scales the stored Gram data away from the operator it came from.
    /// Only for exercising failure paths of the verification checks.
    void corrupt_gram_for_testing(double relative)
    {
        basis_.gram *= (1.0 + relative);
        basis_.compressed *= (1.0 + relative);
        basis_.R_matrix /= (1.0 + relative);
    }

private:
    void require_dense(const char* what) const
    {
        if (backend_ != Backend::dense) {
            throw std::logic_error(std::string(what) + ": requires the dense backend");
        }
    }

    void decompose()
    {
        real_ = basis_.real;
        if (real_) {
            Eigen::MatrixXd m = basis_.factor.real() * basis_.factor.real().transpose();
            m.diagonal() += green_diag_;
            auto eig = eigendecompose_symmetric<double>(m);
            mu_ = std::move(eig.values);
            vec_re_ = std::move(eig.vectors);
        } else {
            auto eig = eigendecompose_symmetric<cplx>(inverse_matrix());
            mu_ = std::move(eig.values);
            vec_cx_ = std::move(eig.vectors);
        }
        if (mu_.size() > 0 && !(mu_[0] > 0.0)) {
            throw std::runtime_error("PhiOperator: non-positive eigenvalue of the inverse operator");
        }
    }

    LanczosResult lanczos_coeff(const SpectralFunction& fn, const Eigen::VectorXcd& start, std::size_t max_steps,
                                double tolerance) const
    {
        const double start_norm = start.norm();
        if (start_norm == 0.0) throw std::invalid_argument("lanczos_quadratic_form: start vector is zero");
        const auto n = static_cast<std::size_t>(start.size());
        max_steps = std::min(max_steps, n);

        std::vector<Eigen::VectorXcd> q;
        q.push_back(start / start_norm);
        std::vector<double> alpha;
        std::vector<double> beta;
        LanczosResult res;
        double scale = 0.0;
        double last = 0.0;
        bool have_last = false;

        const auto estimate = [&]() {
            const auto te = tridiagonal_eigen(alpha, beta);
            double acc = 0.0;
            for (Eigen::Index j = 0; j < te.values.size(); ++j) {
                acc += evaluate_on_inverse(fn, te.values[j]) * te.first_components[j] * te.first_components[j];
            }
            return acc * start_norm * start_norm;
        };

        for (std::size_t k = 1; k <= max_steps; ++k) {
            Eigen::VectorXcd w = apply_inverse_coeff(q.back());
            const double a = q.back().dot(w).real();
            alpha.push_back(a);
            w -= a * q.back();
            if (k > 1) w -= beta.back() * q[q.size() - 2];
            for (int pass = 0; pass < 2; ++pass) {
                for (const auto& v : q) w -= v * v.dot(w);
            }
            const double b = w.norm();
            scale = std::max(scale, std::abs(a) + b);
            res.steps = k;

            const bool stop = b <= 1e-13 * scale || k == max_steps;
            const bool check = stop || k <= 24 || k % std::max<std::size_t>(1, k / 12) == 0;
            if (check) {
                res.value = estimate();
                if (have_last && std::abs(res.value - last) <= tolerance * std::abs(res.value)) {
                    res.converged = true;
                    return res;
                }
                last = res.value;
                have_last = true;
            }
            if (b <= 1e-13 * scale) {
                res.breakdown = true;
                res.converged = true;
                return res;
            }
            if (k == n) {
                res.converged = true;
                return res;
            }
            beta.push_back(b);
            q.push_back(w / b);
        }
        return res;
    }

    Grid grid_;
    DirichletSpectrum spectrum_;
    SineBasis sines_;
    Options options_;
    CondensateBasis basis_;
    Eigen::VectorXd green_diag_;
    Backend backend_ = Backend::dense;
    bool real_ = true;
    Eigen::VectorXd mu_;
    Eigen::MatrixXd vec_re_;
    Eigen::MatrixXcd vec_cx_;
};

inline PhiOperator build_phi_operator(const Grid& grid, const DirichletSpectrum& spectrum,
                                      const HarmonicFamily& family, SamplingMode mode,
                                      PhiOperator::Options options = {})
{
    return PhiOperator(grid, spectrum, sample_family(family, grid, mode), options);
}

inline PhiOperator build_phi_operator(const Grid& grid, const DirichletSpectrum& spectrum,
                                      const HarmonicFamily& family, SamplingMode mode, Backend backend)
{
    PhiOperator::Options options;
    options.backend = backend;
    return build_phi_operator(grid, spectrum, family, mode, options);
}

/// (-Delta_0)^{-1} u by sine transform, division by the spectrum, and inverse transform.
inline GridField green_apply(const Grid& grid, const DirichletSpectrum& spectrum, const GridField& u)
{
    const SineBasis sines(grid);
    Eigen::VectorXcd c = sines.forward(u.values);
    c.array() /= spectrum.by_mode.array().cast<cplx>();
    return GridField(grid, sines.inverse(c));
}

}  // namespace phibose
