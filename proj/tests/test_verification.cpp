#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "phibose/verification.hpp"

using namespace phibose;

namespace {

OperatorSetup setup_1d(double L, double h, HarmonicFamily fam)
{
    OperatorSetup s;
    s.dim = 1;
    s.length = L;
    s.spacing = h;
    s.family = std::move(fam);
    return s;
}

const HarmonicFamily& x_only()
{
    static const HarmonicFamily f = {Affine1D{0.0, 1.0}};
    return f;
}

std::vector<HarmonicFamily> families_1d()
{
    return {{Affine1D{0.0, 1.0}},
            {Affine1D{0.0, 1.0}, Constant{1.0}},
            {Affine1D{0.0, 1.0}, Constant{1.0}, Affine1D{cplx(1.0, 0.5), 2.0}}};
}

}  // namespace

TEST(CheckReport, PassSemanticsAndJson)
{
    CheckReport r;
    r.name = "demo";
    r.upper("a", 1e-12, 1e-10);
    r.lower("order", 1.9, 1.0);
    r.info("note", 42.0);
    EXPECT_TRUE(r.pass());
    const auto j = r.to_json();
    EXPECT_EQ(j["name"], "demo");
    EXPECT_EQ(j["tolerances"]["a"]["max"], 1e-10);
    EXPECT_EQ(j["tolerances"]["order"]["min"], 1.0);
    EXPECT_FALSE(j["tolerances"].contains("note"));
    EXPECT_TRUE(j["pass"].get<bool>());
    r.upper("b", 2.0, 1.0);
    EXPECT_FALSE(r.pass());
    EXPECT_FALSE(r.to_json()["pass"].get<bool>());
}

TEST(Krein, EmptyFamilyIsDirichletResolvent)
{
    const OperatorSetup s = setup_1d(4.0, 1.0 / 64, {});
    EXPECT_LE(krein_identity_residual(s.build(), -1.0).entry("relative_residual").value, 1e-13);
}

TEST(Krein, SingleNodeClosedForm)
{
    // N = 1, h = 1: lambda = 2, <1,1> = 1, so A^{-1} = 1/2 + 1 and A = 2/3
    const Grid g = make_grid(1, {2.0}, 1.0);
    const PhiOperator op = build_phi_operator(g, make_spectrum(g), {Constant{1.0}}, SamplingMode::sampled);
    ASSERT_EQ(g.size(), 1u);
    EXPECT_DOUBLE_EQ(op.operator_eigenvalues()[0], 2.0 / 3.0);
    const double s = 1.0;
    const double T = 2.0 / (2.0 + s);
    const double rhs = -1.0 / (2.0 + s) - T * T / (1.0 + s * T);
    EXPECT_DOUBLE_EQ(rhs, 1.0 / (-s - 2.0 / 3.0));
    EXPECT_LE(krein_identity_residual(op, -s).entry("relative_residual").value, 1e-15);
}

TEST(Krein, OneDimensionalFamilies)
{
    for (double h : {1.0 / 16, 1.0 / 64}) {
        for (const auto& fam : families_1d()) {
            const PhiOperator op = setup_1d(4.0, h, fam).build();
            for (double z : {-1.0, -2.5}) {
                const CheckReport r = krein_identity_residual(op, z);
                EXPECT_TRUE(r.pass()) << r.to_json().dump();
            }
        }
    }
}

TEST(Krein, TwoDimensionalComplexFamilyAndLanczosBackend)
{
    const Grid g = make_box(2, 2.0, 0.125);
    const HarmonicFamily fam = {HarmonicPoly2D{2, Part::re, 0.0, cplx(1.0, 1.0)}, ExpCos2D{1.0, 0.0}};
    for (Backend b : {Backend::dense, Backend::lanczos}) {
        const PhiOperator op = build_phi_operator(g, make_spectrum(g), fam, SamplingMode::sampled, b);
        EXPECT_TRUE(krein_identity_residual(op, -1.5).pass());
    }
}

TEST(Krein, CorruptedGramIsDetected)
{
    PhiOperator op = setup_1d(4.0, 1.0 / 32, families_1d()[1]).build();
    op.corrupt_gram_for_testing(1e-3);
    const CheckReport r = krein_identity_residual(op, -1.0);
    EXPECT_FALSE(r.pass());
    EXPECT_GT(r.entry("relative_residual").value, 1e-6);
    EXPECT_THROW(krein_identity_residual(op, 0.0), std::invalid_argument);
}

TEST(DomainDecomposition, EmptyFamily)
{
    const CheckReport r = domain_decomposition_random(setup_1d(4.0, 1.0 / 64, {}).build());
    EXPECT_EQ(r.entry("psi_norm").value, 0.0);
}

TEST(DomainDecomposition, RandomFieldsAllFamilies)
{
    for (double h : {1.0 / 16, 1.0 / 64}) {
        for (const auto& fam : families_1d()) {
            const CheckReport r = domain_decomposition_random(setup_1d(4.0, h, fam).build(), 7, 20);
            EXPECT_TRUE(r.pass()) << r.to_json().dump();
        }
    }
}

TEST(DomainDecomposition, OrthogonalSourceGivesNoCorrection)
{
    const PhiOperator op = setup_1d(4.0, 1.0 / 32, families_1d()[1]).build();
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    GridField w(op.grid());
    for (std::size_t i = 0; i < w.grid.size(); ++i) w[i] = d(rng);
    w.values -= op.project(w).values;
    const CheckReport r = domain_decomposition_check(op, w);
    EXPECT_TRUE(r.pass()) << r.to_json().dump();
    EXPECT_LE(r.entry("psi_norm").value, 1e-10);
}

TEST(Dtn, ClosedForms)
{
    const Grid g = make_grid(1, {4.0}, 0.5);
    EXPECT_EQ(dtn_apply_1d(g, {1.0, 1.0}), std::make_pair(cplx(0.0), cplx(0.0)));
    EXPECT_EQ(dtn_apply_1d(g, {-2.0, 2.0}), std::make_pair(cplx(-1.0), cplx(1.0)));
    EXPECT_EQ(dtn_apply_1d(g, {0.0, 1.0}), std::make_pair(cplx(-0.25), cplx(0.25)));
    EXPECT_THROW(dtn_apply_1d(make_box(2, 2.0, 0.5), {0.0, 0.0}), std::invalid_argument);
}

TEST(BoundaryMatrix, ExampleScalar)
{
    // r = 1 / (|phi(-L/2)|^2 + |phi(L/2)|^2)
    struct Case {
        double L;
        double h;
        Affine1D phi;
    };
    for (const Case& c : {Case{4.0, 1.0 / 16, Affine1D{0.0, 1.0}}, Case{6.0, 0.25, Affine1D{0.3, -1.2}},
                          Case{5.0, 1.0 / 32, Affine1D{cplx(1.0, 2.0), cplx(0.0, 0.5)}}}) {
        const PhiOperator op = setup_1d(c.L, c.h, {c.phi}).build();
        const cplx a = eval_harmonic(c.phi, point1(-0.5 * c.L));
        const cplx b = eval_harmonic(c.phi, point1(0.5 * c.L));
        const double expected = 1.0 / (std::norm(a) + std::norm(b));
        EXPECT_NEAR(example_scalar(boundary_matrix(op, {c.phi})), expected, 1e-12 * expected);
    }
    EXPECT_NEAR(example_scalar(boundary_matrix(setup_1d(4.0, 1.0 / 16, x_only()).build(), x_only())), 0.125, 1e-12);
}

TEST(BoundaryMatrix, ReproducesRImageOnTraces)
{
    const HarmonicFamily fam = families_1d()[1];
    const PhiOperator op = setup_1d(4.0, 1.0 / 32, fam).build();
    const BoundaryMatrix m = boundary_matrix(op, fam);
    ASSERT_FALSE(m.degenerate);
    EXPECT_LE((m.trace.adjoint() * m.r * m.trace - op.basis().R_matrix).norm(), 1e-12 * op.basis().R_matrix.norm());
}

TEST(BoundaryCondition, SingleAffineDecreases)
{
    const CheckReport r = boundary_condition_residual(setup_1d(4.0, 1.0 / 16, x_only()), 0, 3);
    EXPECT_TRUE(r.pass()) << r.to_json().dump();
    EXPECT_FALSE(r.inconclusive);
    EXPECT_NEAR(r.entry("example_r").value, 0.125, 1e-12);
    // odd eigenvector: full and projected residuals agree
    EXPECT_NEAR(r.entry("full_h2").value, r.entry("residual_h2").value, 1e-12);
}

TEST(BoundaryCondition, EmptyFamilyDirichletTrace)
{
    const CheckReport r = boundary_condition_residual(setup_1d(4.0, 1.0 / 16, {}), 0, 3);
    EXPECT_TRUE(r.pass()) << r.to_json().dump();
    EXPECT_GE(r.entry("order_h2").value, 1.0);
}

TEST(BoundaryCondition, TwoFunctionFamily)
{
    for (std::size_t which : {0u, 1u, 2u}) {
        const CheckReport r = boundary_condition_residual(setup_1d(4.0, 1.0 / 16, families_1d()[1]), which, 3);
        EXPECT_TRUE(r.pass()) << r.to_json().dump();
    }
}

TEST(QuadraticForm, SingleAffine)
{
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const CheckReport r = quadratic_form_identity(setup_1d(4.0, 1.0 / 32, x_only()), seed);
        EXPECT_TRUE(r.pass()) << r.to_json().dump();
    }
}

TEST(QuadraticForm, TwoFunctionFamily)
{
    const CheckReport r = quadratic_form_identity(setup_1d(4.0, 1.0 / 32, families_1d()[1]), 5);
    EXPECT_TRUE(r.pass()) << r.to_json().dump();
}

TEST(QuadraticForm, EmptyFamilyDirichletEigenvector)
{
    // f = sin(2 pi (x + 2) / 4) / lambda solves A f = sin(...)
    const auto src = [](double x) { return cplx(std::sin(2.0 * std::numbers::pi * (x + 2.0) / 4.0)); };
    const CheckReport r = quadratic_form_identity(setup_1d(4.0, 1.0 / 32, {}), src, 2, 1e-11);
    EXPECT_TRUE(r.pass()) << r.to_json().dump();
    EXPECT_LE(r.entry("exact_residual").value, 1e-11);
}

TEST(QuadraticForm, InteriorFunctionHasNoBoundaryPart)
{
    // w = L_h b for a bump b vanishing near the boundary, so f = A^{-1} w = b
    const double h = 1.0 / 32;
    const auto b = [](double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; };
    const auto src = [&](double x) { return cplx((2.0 * b(x) - b(x - h) - b(x + h)) / (h * h)); };
    const CheckReport r = quadratic_form_identity(setup_1d(4.0, h, x_only()), src, 1);
    EXPECT_TRUE(r.pass());
    EXPECT_LE(r.entry("exact_residual").value, 1e-10);
    EXPECT_LE(r.entry("residual_h0").value, 1e-10);
}

TEST(QuadraticForm, RefusesSampledMode)
{
    OperatorSetup s = setup_1d(4.0, 1.0 / 32, x_only());
    s.sampling = SamplingMode::sampled;
    EXPECT_THROW(quadratic_form_identity(s, 1), std::invalid_argument);
}

TEST(Ordering, EmptySingleAndRandomFamilies)
{
    const CheckReport empty = ordering_check(setup_1d(4.0, 1.0 / 64, {}).build());
    EXPECT_TRUE(empty.pass());
    EXPECT_LE(empty.entry("max_relative_excess").value, 0.0);

    const CheckReport single = ordering_check(setup_1d(4.0, 1.0 / 64, x_only()).build());
    EXPECT_TRUE(single.pass());
    EXPECT_GE(single.entry("strictly_below").value, 1.0);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> d;
    const Grid g = make_box(2, 4.0, 0.125);
    ASSERT_LE(g.size(), 1024u);
    for (int trial = 0; trial < 3; ++trial) {
        const HarmonicFamily fam = {HarmonicPoly2D{1 + trial, Part::re, cplx(d(rng), d(rng)), cplx(d(rng), d(rng))},
                                    HarmonicPoly2D{2, Part::im, 0.0, d(rng)}, ExpCos2D{0.5 + 0.25 * trial, d(rng)}};
        const PhiOperator op = build_phi_operator(g, make_spectrum(g), fam, SamplingMode::sampled);
        const CheckReport r = ordering_check(op);
        EXPECT_TRUE(r.pass()) << r.to_json().dump();
    }
}

TEST(DirichletReduction, OneAndTwoDimensions)
{
    const PhiOperator op1 = setup_1d(4.0, 1.0 / 64, {}).build();
    ASSERT_EQ(op1.grid().size(), 255u);
    const CheckReport r1 = reduction_to_dirichlet(op1);
    EXPECT_TRUE(r1.pass()) << r1.to_json().dump();

    const Grid g = make_box(2, 4.0, 0.125);
    ASSERT_EQ(g.size(), 961u);
    const PhiOperator op2 = build_phi_operator(g, make_spectrum(g), {}, SamplingMode::sampled);
    const CheckReport r2 = reduction_to_dirichlet(op2);
    EXPECT_TRUE(r2.pass()) << r2.to_json().dump();
    EXPECT_THROW(reduction_to_dirichlet(setup_1d(4.0, 0.25, x_only()).build()), std::invalid_argument);
}

TEST(SplitIdentity, RandomFields)
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> d;
    for (const auto& fam : families_1d()) {
        const PhiOperator op = setup_1d(8.0, 1.0 / 16, fam).build();
        GridField f(op.grid());
        GridField g(op.grid());
        for (std::size_t i = 0; i < f.grid.size(); ++i) {
            f[i] = cplx(d(rng), d(rng));
            g[i] = cplx(d(rng), d(rng));
        }
        for (double beta : {0.5, 1.0, 3.0}) EXPECT_TRUE(split_identity_check(op, beta, f, g).pass());
    }
}
