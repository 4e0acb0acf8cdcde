#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "phibose/continuum.hpp"

using namespace phibose;

namespace {

// \int_{-1}^{1} exp(-1/(1-t^2)) dt by adaptive Gauss-Kronrod, independent of the trapezoid rule
double bump_mass_reference()
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double t) { return bump_profile(t); }, -1.0, 1.0, 15, 1e-15);
}

const TestFunctionSpec& dipole1d()
{
    static const TestFunctionSpec f = parse_test_function("dipole:c=0,s=1,a=0.75");
    return f;
}

MomentumGrid doubled(MomentumGrid g)
{
    g.cutoff *= 2;
    g.spacing /= 2;
    g.quadrature_nodes *= 2;
    g.angular *= 2;
    return g;
}

}  // namespace

TEST(TestFunction, SupportAndZeroOutside)
{
    const TestFunctionSpec f = parse_test_function("bump:c=0.5,a=1,amp=2");
    EXPECT_EQ(eval_test_function(f, point1(1.5)), cplx(0.0));
    EXPECT_EQ(eval_test_function(f, point1(-0.6)), cplx(0.0));
    EXPECT_NEAR(eval_test_function(f, point1(0.5)).real(), 2.0 * std::exp(-1.0), 1e-15);
    EXPECT_DOUBLE_EQ(support_radius(f), 1.5);
    EXPECT_TRUE(support_inside(f, make_box(1, 4.0, 0.5)));
    EXPECT_FALSE(support_inside(f, make_box(1, 3.0, 0.5)));
}

TEST(TestFunction, DipoleAntisymmetric)
{
    const TestFunctionSpec f = parse_test_function("dipole:c=(0.25,0),s=(0.8,0),a=0.75");
    ASSERT_EQ(f.dim, 2);
    for (double x : {0.1, 0.4, 0.77}) {
        for (double y : {0.0, 0.3}) {
            EXPECT_EQ(eval_test_function(f, point2(0.25 + x, y)), -eval_test_function(f, point2(0.25 - x, y)));
        }
    }
    EXPECT_LE(std::abs(integrate_against(f, [](const Point&) { return 1.0; })), 1e-15);
}

TEST(TestFunction, TextRoundTripAndErrors)
{
    for (const std::string s : {"dipole:c=0,s=1,a=0.75", "bump:c=(1,-1),a=0.5,amp=(1,2)",
                                "bump:c=-1,a=0.5 + bump:c=1,a=0.5,amp=-1e+0", "zero"}) {
        const std::string once = format_test_function(parse_test_function(s));
        EXPECT_EQ(format_test_function(parse_test_function(once)), once) << s;
    }
    EXPECT_EQ(parse_test_function("bump:c=-1,a=0.5 + bump:c=1,a=0.5,amp=-1e+0").terms().size(), 2u);
    EXPECT_THROW(parse_test_function("gauss:c=0"), std::invalid_argument);
    EXPECT_THROW(parse_test_function("bump:c=0,w=1"), std::invalid_argument);
    EXPECT_THROW(parse_test_function("bump:c=0 + bump:c=(0,1)"), std::invalid_argument);
    EXPECT_THROW(parse_test_function("bump:a=-1"), std::invalid_argument);
}

TEST(Quadrature, GridInnerProductConvergesToIntegral)
{
    const TestFunctionSpec f = parse_test_function("bump:c=0.1,a=1");
    const double exact = l2_norm_squared(f);
    double prev = 0.0;
    for (int level = 0; level < 3; ++level) {
        const Grid g = make_box(1, 4.0, 0.25 / (1 << level));
        const GridField u = sample(g, f);
        const double err = std::abs(inner_product(u, u).real() - exact);
        if (level > 0) EXPECT_GE(std::log2(prev / err), 2.0);
        prev = err;
    }
}

TEST(FourierOracle, DipoleHasZeroMean)
{
    const FourierTable t = fourier_oracle(dipole1d(), default_momentum_grid(1));
    EXPECT_LE(std::abs(t.at_zero), 1e-14);
    EXPECT_LE(std::abs(t.values[t.zero_index]), 1e-14);
    EXPECT_TRUE(has_zero_mean(t));
}

TEST(FourierOracle, CenteredBumpRealAndEven)
{
    const FourierTable t = fourier_oracle(parse_test_function("bump:c=0,a=0.8,amp=1"), default_momentum_grid(1));
    const auto n = t.values.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        EXPECT_EQ(t.values[i].imag(), 0.0);
        EXPECT_EQ(t.values[i], t.values[n - 1 - i]);
    }
    EXPECT_NEAR(t.at_zero.real(), 0.8 * bump_mass_reference() / std::sqrt(2 * std::numbers::pi), 1e-14);
}

TEST(FourierOracle, ParsevalAgainstSpatialIntegral)
{
    for (const std::string s : {"dipole:c=0,s=1,a=0.75", "bump:c=0.3,a=0.5,amp=(1,1)", "dipole:c=0.5,s=1,a=0.25"}) {
        const TestFunctionSpec f = parse_test_function(s);
        const double l2 = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [&](double x) { return std::norm(eval_test_function(f, point1(x))); }, -3.0, 3.0, 20, 1e-14);
        const FourierTable t = fourier_oracle(f, momentum_grid_for(f, f));
        EXPECT_LE(std::abs(parseval_sum(t) - l2), 1e-6 * l2) << s;
    }
    const TestFunctionSpec f2 = parse_test_function("dipole:c=(0.25,0),s=(0.8,0),a=0.75");
    const FourierTable t2 = fourier_oracle(f2, default_momentum_grid(2));
    const double l2 = l2_norm_squared(f2);
    EXPECT_LE(std::abs(parseval_sum(t2) - l2), 1e-6 * l2);
}

TEST(MomentumIntegrals, ZeroFunction)
{
    const FourierTable t = fourier_oracle(parse_test_function("zero"), default_momentum_grid(1));
    EXPECT_EQ(free_gas_integral(t, 1.0), 0.0);
    EXPECT_EQ(regular_part_integral(t, 1.0), 0.0);
    EXPECT_EQ(green_integral(t), 0.0);
}

TEST(MomentumIntegrals, SplitIdentity)
{
    const FourierTable t = fourier_oracle(dipole1d(), default_momentum_grid(1));
    for (double beta : {0.5, 1.0, 2.0}) {
        const double fg = free_gas_integral(t, beta);
        const double split = regular_part_integral(t, beta) + green_integral(t) / beta;
        EXPECT_LE(std::abs(fg - split), 1e-10 * std::abs(fg));
    }
}

TEST(MomentumIntegrals, StableUnderDoubledResolution)
{
    for (int d = 1; d <= 2; ++d) {
        const TestFunctionSpec f =
            d == 1 ? dipole1d() : parse_test_function("dipole:c=(0.25,0),s=(0.8,0),a=0.75");
        const FourierTable a = fourier_oracle(f, default_momentum_grid(d));
        const FourierTable b = fourier_oracle(f, doubled(default_momentum_grid(d)));
        for (auto k : {MomentumKernel::bose, MomentumKernel::regular, MomentumKernel::green}) {
            const double va = momentum_integral(a, a, k, 1.0).real();
            const double vb = momentum_integral(b, b, k, 1.0).real();
            EXPECT_LE(std::abs(va - vb), 1e-6 * std::abs(vb)) << "d=" << d;
        }
    }
}

TEST(MomentumIntegrals, GreenIntegralMatchesAntiderivativeNorm)
{
    // for zero-mean f in d = 1, \int |f^|^2/p^2 dp = \int |F|^2 dx with F' = f
    using boost::math::quadrature::gauss_kronrod;
    const TestFunctionSpec& f = dipole1d();
    const auto fx = [&](double x) { return eval_test_function(f, point1(x)).real(); };
    const auto F = [&](double x) { return gauss_kronrod<double, 61>::integrate(fx, -1.75, x, 8, 1e-12); };
    const double ref = gauss_kronrod<double, 61>::integrate([&](double x) { return F(x) * F(x); }, -1.75, 1.75, 8, 1e-10);
    const double g = green_integral(fourier_oracle(f, default_momentum_grid(1)));
    EXPECT_LE(std::abs(g - ref), 1e-6 * ref);
}

TEST(MomentumIntegrals, HypothesisViolation)
{
    const FourierTable t = fourier_oracle(parse_test_function("bump:c=0,a=1"), default_momentum_grid(1));
    EXPECT_THROW(green_integral(t), HypothesisError);
    EXPECT_THROW(free_gas_integral(t, 1.0), HypothesisError);
    EXPECT_NO_THROW(regular_part_integral(t, 1.0));
    EXPECT_LE(std::abs(regular_part_integral(t, 1e-9) + 0.5 * parseval_sum(t)), 1e-6 * parseval_sum(t));
}

TEST(Condensate, ConstantAgainstDipoleVanishes)
{
    EXPECT_LE(std::abs(condensate_term({Constant{1.0}}, dipole1d(), dipole1d(), 1.0)), 1e-15);
}

TEST(Condensate, AffineAgainstDipole)
{
    const double m = 0.75 * bump_mass_reference();
    for (double beta : {1.0, 2.5}) {
        const cplx c = condensate_term({Affine1D{0.0, 1.0}}, dipole1d(), dipole1d(), beta);
        EXPECT_NEAR(c.real(), std::pow(2.0 * 1.0 * m, 2) / beta, 1e-13);
        EXPECT_EQ(c.imag(), 0.0);
    }
}

TEST(Condensate, PhaseInvarianceAndPositivity)
{
    const TestFunctionSpec f = parse_test_function("dipole:c=(0.25,0),s=(0.8,0),a=0.75");
    const HarmonicFamily fam = {HarmonicPoly2D{2, Part::re, 0.0, 1.0}};
    const HarmonicFamily rotated = {HarmonicPoly2D{2, Part::re, 0.0, std::polar(1.0, 0.7)}};
    const cplx a = condensate_term(fam, f, f, 1.0, 256);
    const cplx b = condensate_term(rotated, f, f, 1.0, 256);
    EXPECT_GT(a.real(), 0.0);
    EXPECT_LE(std::abs(a - b), 1e-14 * a.real());
    EXPECT_LE(std::abs(b.imag()), 1e-14 * b.real());
}

TEST(TwoPointRhs, EmptyFamilyAndConjugateSymmetry)
{
    const TestFunctionSpec f = dipole1d();
    const TestFunctionSpec g = parse_test_function("dipole:c=0.3,s=0.6,a=0.5,amp=(1,0.5)");
    const MomentumGrid grid = default_momentum_grid(1);
    const FourierTable tf = fourier_oracle(f, grid);
    const FourierTable tg = fourier_oracle(g, grid);
    const TwoPointRhs empty = two_point_rhs({}, f, f, 1.0, tf, tf);
    EXPECT_EQ(empty.total, cplx(free_gas_integral(tf, 1.0)));
    const HarmonicFamily fam = {Affine1D{0.0, 1.0}};
    const cplx fg = two_point_rhs(fam, f, g, 1.0, tf, tg).total;
    const cplx gf = two_point_rhs(fam, g, f, 1.0, tg, tf).total;
    EXPECT_LE(std::abs(fg - std::conj(gf)), 1e-13 * std::abs(fg));
    EXPECT_THROW(two_point_rhs(fam, f, f, 1.0, tf, fourier_oracle(f, doubled(grid))), std::invalid_argument);
}

TEST(Resolvent, ZeroInput)
{
    const auto v = resolvent_reference(parse_test_function("zero"), {point1(0.0), point1(1.0)});
    EXPECT_EQ(v[0], cplx(0.0));
    EXPECT_EQ(v[1], cplx(0.0));
}

TEST(Resolvent, OneDimensionalRoundTrip)
{
    const TestFunctionSpec u = parse_test_function("bump:c=0.2,a=1");
    const double d = 1e-3;
    double worst = 0.0;
    for (double x = -0.7; x <= 1.1; x += 0.05) {
        const auto v = resolvent_reference(u, {point1(x - d), point1(x), point1(x + d)});
        const double rec = v[1].real() - (v[0].real() - 2 * v[1].real() + v[2].real()) / (d * d);
        worst = std::max(worst, std::abs(rec - eval_test_function(u, point1(x)).real()));
    }
    EXPECT_LE(worst, 1e-4);
}

TEST(Resolvent, DecaysMonotonicallyOutsideSupport)
{
    const TestFunctionSpec u = parse_test_function("bump:c=0,a=1");
    double prev = resolvent_reference_1d(u, 1.0).real();
    for (double x = 1.25; x < 8.0; x += 0.25) {
        const double v = resolvent_reference_1d(u, x).real();
        EXPECT_LT(v, prev);
        EXPECT_GT(v, 0.0);
        EXPECT_NEAR(v, resolvent_reference_1d(u, -x).real(), 1e-15);
        prev = v;
    }
}

TEST(Resolvent, TwoDimensionalRoundTrip)
{
    const TestFunctionSpec u = parse_test_function("bump:c=(0,0.2),a=1");
    const double d = 2e-2;
    for (const auto& x : {point2(0.0, 0.0), point2(0.3, 0.5), point2(-0.4, -0.1)}) {
        const auto v = resolvent_reference(u, {x, point2(x[0] + d, x[1]), point2(x[0] - d, x[1]),
                                              point2(x[0], x[1] + d), point2(x[0], x[1] - d)});
        const double lap = (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]).real() / (d * d);
        EXPECT_NEAR(v[0].real() - lap, eval_test_function(u, x).real(), 2e-3);
    }
}
