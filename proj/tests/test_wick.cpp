#include <gtest/gtest.h>

#include <random>

#include "phibose/wick.hpp"

using namespace phibose;

namespace {

Eigen::MatrixXcd random_matrix(int n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = {d(rng), d(rng)};
    return m;
}

}  // namespace

TEST(Wick, OneAndTwoPoint)
{
    Eigen::MatrixXcd t1(1, 1);
    t1(0, 0) = {0.3, -1.2};
    EXPECT_EQ(wick_npoint(t1), t1(0, 0));
    const Eigen::MatrixXcd t2 = random_matrix(2, 1);
    EXPECT_LE(std::abs(wick_npoint(t2) - (t2(0, 0) * t2(1, 1) + t2(0, 1) * t2(1, 0))), 1e-15);
    EXPECT_LE(std::abs(permanent_enumeration(t2) - (t2(0, 0) * t2(1, 1) + t2(0, 1) * t2(1, 0))), 1e-15);
}

TEST(Wick, RyserMatchesEnumeration)
{
    for (int n = 1; n <= 6; ++n) {
        for (unsigned seed = 0; seed < 5; ++seed) {
            const Eigen::MatrixXcd t = random_matrix(n, 100 * n + seed);
            EXPECT_LE(std::abs(permanent_ryser(t) - permanent_enumeration(t)), 1e-13 * std::max(1.0, std::abs(permanent_enumeration(t))))
                << "n=" << n;
        }
    }
}

TEST(Wick, KnownPermanents)
{
    // perm of the all-ones n x n matrix is n!
    EXPECT_NEAR(permanent_ryser(Eigen::MatrixXcd::Ones(8, 8)).real(), 40320.0, 1e-9);
    EXPECT_EQ(permanent_ryser(Eigen::MatrixXcd::Identity(5, 5)), std::complex<double>(1.0));
    EXPECT_EQ(permanent_ryser(Eigen::MatrixXcd(0, 0)), std::complex<double>(1.0));
}

TEST(Wick, RejectsNonSquare)
{
    EXPECT_THROW(wick_npoint(Eigen::MatrixXcd(2, 3)), std::invalid_argument);
    EXPECT_THROW(permanent_enumeration(Eigen::MatrixXcd(3, 2)), std::invalid_argument);
    EXPECT_THROW(wick_npoint(Eigen::MatrixXcd::Ones(13, 13)), std::invalid_argument);
}
