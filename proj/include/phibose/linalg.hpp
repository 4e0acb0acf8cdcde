#pragma once

#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <type_traits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#include <lapacke.h>

namespace phibose {

template <class Scalar>
struct EigenDecomposition {
    Eigen::VectorXd values;  // ascending
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // columns, orthonormal
};

namespace detail {

template <class Matrix>
void require_hermitian(const Matrix& a)
{
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("eigendecompose_symmetric: matrix is not square");
    }
    const double scale = a.cwiseAbs().maxCoeff();
    const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * std::max(scale, 1e-300)) {
        throw std::invalid_argument("eigendecompose_symmetric: matrix is not symmetric (asymmetry "
                                    + std::to_string(asym) + ")");
    }
}

template <class Matrix>
bool is_diagonal(const Matrix& a)
{
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j && a(i, j) != typename Matrix::Scalar(0)) return false;
        }
    }
    return true;
}

}  // namespace detail

/// Eigen-decomposition of a real symmetric or complex Hermitian matrix.
///
/// Exactly diagonal input returns the stably sorted diagonal with unit
/// vectors; everything else goes through LAPACK's divide and conquer driver.
template <class Scalar>
EigenDecomposition<Scalar> eigendecompose_symmetric(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a)
{
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    detail::require_hermitian(a);
    const Eigen::Index n = a.rows();
    EigenDecomposition<Scalar> out;
    if (n == 0) return out;

    if (detail::is_diagonal(a)) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
            return std::real(a(i, i)) < std::real(a(j, j));
        });
        out.values.resize(n);
        out.vectors = Mat::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            const Eigen::Index i = order[static_cast<std::size_t>(k)];
            out.values[k] = std::real(a(i, i));
            out.vectors(i, k) = Scalar(1);
        }
        return out;
    }

    // symmetrize exactly so LAPACK sees the same matrix regardless of which
    // triangle it reads
    out.vectors = (0.5 * (a + a.adjoint())).eval();
    out.values.resize(n);
    lapack_int info = 0;
    if constexpr (std::is_same_v<Scalar, double>) {
        info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), out.vectors.data(),
                              static_cast<lapack_int>(n), out.values.data());
    } else {
        static_assert(std::is_same_v<Scalar, std::complex<double>>, "double or complex<double> only");
        info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), out.vectors.data(),
                              static_cast<lapack_int>(n), out.values.data());
    }
    if (info != 0) {
        throw std::runtime_error("eigendecompose_symmetric: LAPACK failed with info " + std::to_string(info));
    }
    return out;
}

/// Eigenvalues and first eigenvector components of a real symmetric
/// tridiagonal matrix (diag, offdiag). Used for Gauss quadrature from Lanczos.
struct TridiagonalEigen {
    Eigen::VectorXd values;
    Eigen::VectorXd first_components;
};

inline TridiagonalEigen tridiagonal_eigen(const std::vector<double>& diag, const std::vector<double>& offdiag)
{
    const auto n = static_cast<lapack_int>(diag.size());
    TridiagonalEigen out;
    if (n == 0) return out;
    std::vector<double> d(diag);
    std::vector<double> e(offdiag.begin(), offdiag.begin() + std::max<lapack_int>(0, n - 1));
    e.push_back(0.0);
    Eigen::MatrixXd z(n, n);
    const lapack_int info = LAPACKE_dstev(LAPACK_COL_MAJOR, 'V', n, d.data(), e.data(), z.data(), n);
    if (info != 0) {
        throw std::runtime_error("tridiagonal_eigen: LAPACK dstev failed with info " + std::to_string(info));
    }
    out.values = Eigen::Map<Eigen::VectorXd>(d.data(), n);
    out.first_components = z.row(0).transpose();
    return out;
}

}  // namespace phibose
