#pragma once

// n-point functions of a quasi-free Bose state from its two-point matrix:
// <a*(f_1)...a*(f_n) a(g_n)...a(g_1)> = perm[T_ij], T_ij = <f_i, rho g_j>.

#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace phibose {

namespace detail {

inline void require_square(const Eigen::MatrixXcd& t, const char* who)
{
    if (t.rows() != t.cols()) throw std::invalid_argument(std::string(who) + ": matrix is not square");
}

}  // namespace detail

/// Permanent by Ryser's inclusion-exclusion formula in Gray-code order.
inline std::complex<double> permanent_ryser(const Eigen::MatrixXcd& t)
{
    detail::require_square(t, "permanent_ryser");
    const int n = static_cast<int>(t.rows());
    if (n == 0) return 1.0;
    if (n > 24) throw std::invalid_argument("permanent_ryser: n > 24 is out of reach");
    Eigen::VectorXcd row_sums = Eigen::VectorXcd::Zero(n);
    std::complex<double> total = 0.0;
    unsigned long gray = 0;
    const unsigned long subsets = 1ul << n;
    for (unsigned long k = 1; k < subsets; ++k) {
        const unsigned long next = k ^ (k >> 1);
        const unsigned long changed = next ^ gray;
        const int j = __builtin_ctzl(changed);
        if (next & changed) row_sums += t.col(j);
        else row_sums -= t.col(j);
        gray = next;
        std::complex<double> prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= row_sums[i];
        const int size = __builtin_popcountl(next);
        total += ((n - size) % 2 == 0) ? prod : -prod;
    }
    return total;
}

/// Permanent by summing over all n! pairings.
inline std::complex<double> permanent_enumeration(const Eigen::MatrixXcd& t)
{
    detail::require_square(t, "permanent_enumeration");
    const int n = static_cast<int>(t.rows());
    if (n > 10) throw std::invalid_argument("permanent_enumeration: n > 10 is out of reach");
    std::vector<int> sigma(static_cast<std::size_t>(n));
    std::iota(sigma.begin(), sigma.end(), 0);
    std::complex<double> total = 0.0;
    do {
        std::complex<double> prod = 1.0;
        for (int i = 0; i < n; ++i) prod *= t(i, sigma[static_cast<std::size_t>(i)]);
        total += prod;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

/// Wick's rule for the n-point function.
inline std::complex<double> wick_npoint(const Eigen::MatrixXcd& t)
{
    detail::require_square(t, "wick_npoint");
    if (t.rows() > 12) throw std::invalid_argument("wick_npoint: supported up to n = 12");
    return permanent_ryser(t);
}

}  // namespace phibose
