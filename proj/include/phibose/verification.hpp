#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "phibose/harmonics.hpp"
#include "phibose/lattice.hpp"
#include "phibose/phi_operator.hpp"
#include "phibose/text.hpp"

namespace phibose {

enum class Bound { upper, lower, none };

struct CheckEntry {
    std::string name;
    double value = 0.0;
    double limit = 0.0;
    Bound bound = Bound::upper;

    bool ok() const
    {
        switch (bound) {
        case Bound::upper: return value <= limit;
        case Bound::lower: return value >= limit;
        case Bound::none: return true;
        }
        return false;
    }
};

/// Outcome of one check. Entries with a bound are gated; the rest are
/// diagnostics. An inconclusive report passes but says why.
struct CheckReport {
    std::string name;
    std::vector<CheckEntry> entries;
    std::map<std::string, std::string> context;
    bool inconclusive = false;
    std::string note;

    void upper(std::string n, double v, double limit) { entries.push_back({std::move(n), v, limit, Bound::upper}); }
    void lower(std::string n, double v, double limit) { entries.push_back({std::move(n), v, limit, Bound::lower}); }
    void info(std::string n, double v) { entries.push_back({std::move(n), v, 0.0, Bound::none}); }

    bool pass() const
    {
        for (const auto& e : entries) {
            if (!e.ok()) return false;
        }
        return true;
    }

    const CheckEntry& entry(const std::string& n) const
    {
        for (const auto& e : entries) {
            if (e.name == n) return e;
        }
        throw std::out_of_range("CheckReport " + name + ": no entry '" + n + "'");
    }

    nlohmann::ordered_json to_json() const
    {
        nlohmann::ordered_json j;
        j["name"] = name;
        j["residuals"] = nlohmann::ordered_json::object();
        j["tolerances"] = nlohmann::ordered_json::object();
        for (const auto& e : entries) {
            j["residuals"][e.name] = e.value;
            if (e.bound == Bound::upper) j["tolerances"][e.name] = {{"max", e.limit}};
            if (e.bound == Bound::lower) j["tolerances"][e.name] = {{"min", e.limit}};
        }
        j["pass"] = pass();
        j["inconclusive"] = inconclusive;
        if (!note.empty()) j["note"] = note;
        j["context"] = context;
        return j;
    }
};

/// Everything needed to rebuild an operator at another mesh width.
struct OperatorSetup {
    int dim = 1;
    double length = 4.0;
    double spacing = 1.0 / 16;
    HarmonicFamily family;
    SpectrumMode spectrum = SpectrumMode::fd;
    SamplingMode sampling = SamplingMode::discrete_harmonic;
    PhiOperator::Options options;

    Grid grid() const { return make_box(dim, length, spacing); }

    PhiOperator build() const
    {
        const Grid g = grid();
        return build_phi_operator(g, make_spectrum(g, spectrum), family, sampling, options);
    }

    OperatorSetup refined(int level) const
    {
        OperatorSetup s = *this;
        s.spacing = spacing / static_cast<double>(1 << level);
        return s;
    }

    std::map<std::string, std::string> context() const
    {
        return {{"dim", std::to_string(dim)},
                {"L", text::format_double(length)},
                {"h", text::format_double(spacing)},
                {"family", format_family(family)},
                {"spectrum", to_string(spectrum)},
                {"sampling", to_string(sampling)}};
    }
};

inline std::map<std::string, std::string> operator_context(const PhiOperator& op)
{
    const Grid& g = op.grid();
    std::map<std::string, std::string> c = {{"dim", std::to_string(g.dim())},
                                            {"L", text::format_double(g.length(0))},
                                            {"h", text::format_double(g.spacing())},
                                            {"N", std::to_string(g.size())},
                                            {"K", std::to_string(op.basis().columns.size())},
                                            {"rank", std::to_string(op.basis().rank)},
                                            {"spectrum", to_string(op.spectrum().mode)},
                                            {"backend", to_string(op.backend())}};
    return c;
}

namespace detail {

inline Eigen::VectorXcd random_coefficients(Eigen::Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> d(0.0, 1.0);
    Eigen::VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = d(rng);
        v[i] = cplx(re, d(rng));
    }
    return v;
}

inline double safe_ratio(double num, double den) { return den > 0.0 ? num / den : num; }

}  // namespace detail

// --- Krein resolvent formula ----------------------------------------------

/// Both sides of the Krein formula at z = -s applied to `samples` random
/// fields. The left side -(A + s)^{-1} comes from the dense spectrum (or the
/// Woodbury solve without one); the right side is assembled from the
/// Dirichlet data, the projection onto the span and R.
inline CheckReport krein_identity_residual(const PhiOperator& op, double z, std::uint64_t seed = 1, int samples = 20,
                                           double tolerance = 1e-10)
{
    if (!(z < 0.0)) throw std::invalid_argument("krein_identity_residual: z must be negative");
    const double s = -z;
    const Eigen::VectorXd& lam = op.spectrum().by_mode;
    const Eigen::VectorXcd t = (lam.array() / (lam.array() + s)).matrix().cast<cplx>();
    const Eigen::VectorXcd gs = (lam.array() + s).inverse().matrix().cast<cplx>();
    const CondensateBasis& b = op.basis();
    const Eigen::MatrixXcd& q = b.orthonormal;
    Eigen::LDLT<Eigen::MatrixXcd> middle;
    if (b.rank > 0) {
        Eigen::MatrixXcd m = b.R_matrix + s * (q.adjoint() * t.asDiagonal() * q);
        middle.compute(m);
    }

    std::mt19937_64 rng(seed);
    double diff = 0.0;
    double lhs_norm = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Eigen::VectorXcd c = detail::random_coefficients(static_cast<Eigen::Index>(op.grid().size()), rng);
        Eigen::VectorXcd lhs;
        if (op.has_dense()) {
            Eigen::VectorXcd a = op.to_eigenbasis(c);
            const Eigen::VectorXd& mu = op.inverse_eigenvalues();
            for (Eigen::Index j = 0; j < a.size(); ++j) a[j] *= -mu[j] / (1.0 + s * mu[j]);
            lhs = op.from_eigenbasis(a);
        } else {
            lhs = -op.coefficients(op.resolvent_apply(s, op.field(c)));
        }
        Eigen::VectorXcd rhs = -gs.cwiseProduct(c);
        if (b.rank > 0) {
            const Eigen::VectorXcd inner = middle.solve(q.adjoint() * t.cwiseProduct(c));
            rhs -= t.cwiseProduct(q * inner);
        }
        const double cn = c.norm();
        diff = std::max(diff, (lhs - rhs).norm() / cn);
        lhs_norm = std::max(lhs_norm, lhs.norm() / cn);
    }
    CheckReport r;
    r.name = "krein";
    r.context = operator_context(op);
    r.context["z"] = text::format_double(z);
    r.context["samples"] = std::to_string(samples);
    r.upper("relative_residual", detail::safe_ratio(diff, lhs_norm), tolerance);
    return r;
}

// --- decomposition f = G w + psi ------------------------------------------

/// u = A^{-1} w splits as G w + psi with psi in the span and R psi = P w.
inline CheckReport domain_decomposition_check(const PhiOperator& op, const GridField& w, double tolerance = 1e-10)
{
    const Eigen::VectorXcd cw = op.coefficients(w);
    const Eigen::VectorXcd u = op.apply_inverse_coeff(cw);
    const Eigen::VectorXcd psi = u - op.apply_green_coeff(cw);
    const CondensateBasis& b = op.basis();
    CheckReport r;
    r.name = "domain_decomposition";
    r.context = operator_context(op);
    const double wn = cw.norm();
    if (b.rank == 0) {
        r.upper("psi_norm", detail::safe_ratio(psi.norm(), wn), 1e-13);
        return r;
    }
    const Eigen::VectorXcd qpsi = b.orthonormal.adjoint() * psi;
    const Eigen::VectorXcd qw = b.orthonormal.adjoint() * cw;
    if (qw.norm() > 1e-12 * wn) {
        r.upper("span_distance", detail::safe_ratio((psi - b.orthonormal * qpsi).norm(), psi.norm()), tolerance);
        r.upper("R_relation", (b.R_matrix * qpsi - qw).norm() / qw.norm(), tolerance);
    } else {
        // w orthogonal to the span: psi vanishes
        r.upper("psi_norm", detail::safe_ratio(psi.norm(), wn), tolerance);
    }
    return r;
}

/// Worst case of domain_decomposition_check over random fields.
inline CheckReport domain_decomposition_random(const PhiOperator& op, std::uint64_t seed = 1, int samples = 20,
                                               double tolerance = 1e-10)
{
    std::mt19937_64 rng(seed);
    CheckReport worst;
    for (int k = 0; k < samples; ++k) {
        const GridField w = op.field(detail::random_coefficients(static_cast<Eigen::Index>(op.grid().size()), rng));
        CheckReport r = domain_decomposition_check(op, w, tolerance);
        if (k == 0) {
            worst = std::move(r);
            continue;
        }
        for (std::size_t i = 0; i < r.entries.size(); ++i) {
            if (i < worst.entries.size() && worst.entries[i].name == r.entries[i].name) {
                worst.entries[i].value = std::max(worst.entries[i].value, r.entries[i].value);
            } else {
                worst.entries.push_back(r.entries[i]);
            }
        }
    }
    worst.context["samples"] = std::to_string(samples);
    return worst;
}

// --- boundary condition ---------------------------------------------------

/// Outward normal derivatives at (-L/2, L/2) of the affine interpolant of
/// the boundary values.
inline std::pair<cplx, cplx> dtn_apply_1d(const Grid& grid, std::pair<cplx, cplx> values)
{
    if (grid.dim() != 1) throw std::invalid_argument("dtn_apply_1d: grid must be one-dimensional");
    const cplx slope = (values.second - values.first) / grid.length(0);
    return {-slope, slope};
}

/// Boundary matrix r with <psi, R psi> = <psi|bd, r psi|bd> on the trace
/// space of the span, from the exact traces of the family members.
struct BoundaryMatrix {
    Eigen::MatrixXcd trace;  // 2 x rank, boundary values of the orthonormal span basis
    Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
    Eigen::Matrix2cd projector = Eigen::Matrix2cd::Zero();  // onto the trace space
    bool degenerate = false;
};

inline BoundaryMatrix boundary_matrix(const PhiOperator& op, const HarmonicFamily& family)
{
    const Grid& g = op.grid();
    if (g.dim() != 1) throw std::invalid_argument("boundary_matrix: grid must be one-dimensional");
    const CondensateBasis& b = op.basis();
    if (family.size() != b.columns.size()) throw std::invalid_argument("boundary_matrix: family does not match operator");
    BoundaryMatrix out;
    const auto k = static_cast<Eigen::Index>(family.size());
    const auto rank = static_cast<Eigen::Index>(b.rank);
    out.trace = Eigen::MatrixXcd::Zero(2, rank);
    if (rank == 0) return out;
    Eigen::MatrixXcd tphi(2, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        tphi(0, j) = eval_harmonic(family[static_cast<std::size_t>(j)], point1(-0.5 * g.length(0)));
        tphi(1, j) = eval_harmonic(family[static_cast<std::size_t>(j)], point1(0.5 * g.length(0)));
    }
    // span basis Q = C X
    const Eigen::MatrixXcd x = b.coefficients.completeOrthogonalDecomposition().solve(b.orthonormal);
    out.trace = tphi * x;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(out.trace, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    if (rank > 2 || sv[0] == 0.0 || sv[sv.size() - 1] <= 1e-10 * sv[0]) {
        out.degenerate = true;
        return out;
    }
    const Eigen::MatrixXcd pinv = out.trace.completeOrthogonalDecomposition().pseudoInverse();
    out.r = pinv.adjoint() * b.R_matrix * pinv;
    out.projector = out.trace * pinv;
    return out;
}

/// Scalar of the single-function case, <t, r t>/|t|^2 on the trace t.
inline double example_scalar(const BoundaryMatrix& m)
{
    if (m.trace.cols() != 1 || m.degenerate) throw std::invalid_argument("example_scalar: needs a single non-degenerate trace");
    const Eigen::Vector2cd t = m.trace.col(0);
    return (t.adjoint() * m.r * t)(0, 0).real() / t.squaredNorm();
}

/// Residual of d_n u = H u|bd - r u|bd for the `which`-th lowest eigenvector
/// at mesh widths h, h/2, ... (`levels` of them). Gated on the trace-space
/// component and on the decrease factor between levels.
inline CheckReport boundary_condition_residual(const OperatorSetup& setup, std::size_t which = 0, int levels = 3,
                                               double min_ratio = 1.5)
{
    if (setup.dim != 1) throw std::invalid_argument("boundary_condition_residual: d = 1 only");
    if (levels < 2) throw std::invalid_argument("boundary_condition_residual: need at least two levels");
    CheckReport r;
    r.name = "boundary_condition";
    r.context = setup.context();
    r.context["eigenvector"] = std::to_string(which);
    std::vector<double> res;
    for (int level = 0; level < levels; ++level) {
        const PhiOperator op = setup.refined(level).build();
        const BoundaryMatrix bm = boundary_matrix(op, setup.family);
        if (bm.degenerate) {
            r.inconclusive = true;
            r.note = "trace space of the span is degenerate; r is undefined";
            return r;
        }
        const GridField u = op.operator_eigenvector(which);
        const BoundaryTrace left = boundary_trace_1d(op.grid(), u, Side::left);
        const BoundaryTrace right = boundary_trace_1d(op.grid(), u, Side::right);
        const Eigen::Vector2cd values(left.value, right.value);
        const Eigen::Vector2cd normal(left.outward_derivative, right.outward_derivative);
        Eigen::Vector2cd full;
        Eigen::Vector2cd projected;
        if (op.basis().rank == 0) {
            // Dirichlet condition
            full = values;
            projected = values;
        } else {
            const auto dtn = dtn_apply_1d(op.grid(), {left.value, right.value});
            full = normal - (Eigen::Vector2cd(dtn.first, dtn.second) - bm.r * values);
            projected = bm.projector * full;
        }
        const std::string tag = "_h" + std::to_string(level);
        r.info("full" + tag, full.norm());
        r.info("residual" + tag, projected.norm());
        if (level == 0 && bm.trace.cols() == 1 && setup.family.size() == 1) {
            r.info("example_r", example_scalar(bm));
        }
        res.push_back(projected.norm());
    }
    for (std::size_t i = 1; i < res.size(); ++i) {
        const double ratio = res[i - 1] / res[i];
        r.lower("ratio_h" + std::to_string(i), ratio, min_ratio);
        r.info("order_h" + std::to_string(i), std::log2(ratio));
    }
    return r;
}

// --- quadratic form --------------------------------------------------------

namespace detail {

/// Forward-difference Dirichlet energy h sum |u_{m+1} - u_m|^2 / h^2 with
/// ghost values at the two boundary nodes.
inline double dirichlet_energy_1d(const GridField& u, cplx ghost_left, cplx ghost_right)
{
    const double h = u.grid.spacing();
    const auto n = static_cast<Eigen::Index>(u.values.size());
    double acc = std::norm(u.values[0] - ghost_left) + std::norm(ghost_right - u.values[n - 1]);
    for (Eigen::Index m = 0; m + 1 < n; ++m) acc += std::norm(u.values[m + 1] - u.values[m]);
    return acc / h;
}

inline double energy_of_affine(cplx left, cplx right, const Grid& grid)
{
    GridField p(grid);
    const double L = grid.length(0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = (grid.node(i)[0] + 0.5 * L) / L;
        p[i] = left + (right - left) * t;
    }
    return dirichlet_energy_1d(p, left, right);
}

}  // namespace detail

/// Smooth random source: polynomial of degree 5 in 2x/L with normal coefficients.
inline std::function<cplx(double)> random_polynomial_source(double length, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> a(6);
    for (auto& c : a) c = d(rng);
    return [a, length](double x) {
        const double t = 2.0 * x / length;
        double acc = 0.0;
        for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * t + *it;
        return cplx(acc);
    };
}

/// <f, A f> against the form D(f) - D(psi_f) + <psi_f, R psi_f> for f = A^{-1} w.
///
/// "exact_*": psi_f = f - G A f with ghost values continued linearly; this is
/// an identity of the discrete operator. "residual_h*": psi_f is the affine
/// interpolant of the extrapolated boundary trace of f, which is only
/// consistent up to discretization error and is gated by its order under
/// h -> h/2 (or by a round-off floor when already exact).
inline CheckReport quadratic_form_identity(const OperatorSetup& setup, const std::function<cplx(double)>& source,
                                           int levels = 2, double exact_tolerance = 1e-10, double min_order = 1.0,
                                           double floor = 1e-10)
{
    if (setup.dim != 1) throw std::invalid_argument("quadratic_form_identity: d = 1 only");
    if (setup.sampling != SamplingMode::discrete_harmonic) {
        throw std::invalid_argument("quadratic_form_identity: needs discrete-harmonic sampling; "
                                    "in sampled mode the identity holds only asymptotically");
    }
    if (setup.spectrum != SpectrumMode::fd) {
        throw std::invalid_argument("quadratic_form_identity: needs the finite-difference spectrum");
    }
    CheckReport r;
    r.name = "quadratic_form";
    r.context = setup.context();
    std::vector<double> res;
    double exact_worst = 0.0;
    for (int level = 0; level < levels; ++level) {
        const PhiOperator op = setup.refined(level).build();
        const Grid& g = op.grid();
        const auto n = static_cast<Eigen::Index>(g.size());
        GridField w(g);
        for (std::size_t i = 0; i < g.size(); ++i) w[i] = source(g.node(i)[0]);
        const Eigen::VectorXcd cw = op.coefficients(w);
        const Eigen::VectorXcd cf = op.apply_inverse_coeff(cw);
        const GridField f = op.field(cf);
        const cplx target = inner_product(f, w);  // <f, A f>
        const CondensateBasis& b = op.basis();
        const auto form_of_span = [&](const GridField& p) {
            if (b.rank == 0) return 0.0;
            const Eigen::VectorXcd a = b.orthonormal.adjoint() * op.coefficients(p);
            return a.dot(b.R_matrix * a).real();
        };

        // exact
        const GridField psi = op.field(cf - op.apply_green_coeff(cw));
        cplx gl = 0.0;
        cplx gr = 0.0;
        if (n >= 2) {
            gl = 2.0 * psi.values[0] - psi.values[1];
            gr = 2.0 * psi.values[n - 1] - psi.values[n - 2];
        }
        const double exact = detail::dirichlet_energy_1d(f, gl, gr) - detail::dirichlet_energy_1d(psi, gl, gr)
                             + form_of_span(psi);
        exact_worst = std::max(exact_worst, std::abs(exact - target) / std::abs(target));

        // trace based
        const cplx tl = boundary_trace_1d(g, f, Side::left).value;
        const cplx tr = boundary_trace_1d(g, f, Side::right).value;
        GridField psi_t(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double t = (g.node(i)[0] + 0.5 * g.length(0)) / g.length(0);
            psi_t[i] = tl + (tr - tl) * t;
        }
        const double form = detail::dirichlet_energy_1d(f, tl, tr) - detail::energy_of_affine(tl, tr, g)
                            + form_of_span(psi_t);
        const double rel = std::abs(form - target) / std::abs(target);
        r.info("residual_h" + std::to_string(level), rel);
        res.push_back(rel);
    }
    r.upper("exact_residual", exact_worst, exact_tolerance);
    for (std::size_t i = 1; i < res.size(); ++i) {
        const double order = std::log2(res[i - 1] / res[i]);
        r.info("order_h" + std::to_string(i), order);
        // a residual already at round-off has no meaningful order
        if (res[i] > floor) r.lower("order_h" + std::to_string(i) + "_gate", order, min_order);
    }
    return r;
}

inline CheckReport quadratic_form_identity(const OperatorSetup& setup, std::uint64_t seed = 1, int levels = 2)
{
    return quadratic_form_identity(setup, random_polynomial_source(setup.length, seed), levels);
}

// --- spectral comparisons -------------------------------------------------

/// nu_m(Phi) <= nu_m(empty) (1 + tol) for every m, with nu from the matrix of A.
inline CheckReport ordering_check(const PhiOperator& op, double tolerance = 1e-12)
{
    std::vector<double> nu;
    if (op.basis().real) {
        const auto e = eigendecompose_symmetric<double>(Eigen::MatrixXd(op.operator_matrix().real()));
        nu.assign(e.values.data(), e.values.data() + e.values.size());
    } else {
        const auto e = eigendecompose_symmetric<cplx>(op.operator_matrix());
        nu.assign(e.values.data(), e.values.data() + e.values.size());
    }
    const std::vector<double>& dir = op.spectrum().sorted;
    double worst = -std::numeric_limits<double>::infinity();
    int strict = 0;
    for (std::size_t m = 0; m < nu.size(); ++m) {
        const double excess = (nu[m] - dir[m]) / dir[m];
        worst = std::max(worst, excess);
        if (excess < -tolerance) ++strict;
    }
    CheckReport r;
    r.name = "ordering";
    r.context = operator_context(op);
    r.upper("max_relative_excess", worst, tolerance);
    r.info("strictly_below", strict);
    return r;
}

/// Empty family: eigenvalues and eigenvectors against the analytic sine modes.
inline CheckReport reduction_to_dirichlet(const PhiOperator& op, double tolerance = 1e-13)
{
    if (op.basis().rank != 0) throw std::invalid_argument("reduction_to_dirichlet: family must be empty");
    const Grid& g = op.grid();
    const std::vector<double> nu = op.operator_eigenvalues();
    const DirichletSpectrum& spec = op.spectrum();
    double ev_dev = 0.0;
    for (std::size_t m = 0; m < nu.size(); ++m) {
        ev_dev = std::max(ev_dev, std::abs(nu[m] - spec.sorted[m]) / spec.sorted[m]);
    }
    // each eigenvector is one sine mode up to a phase; compare node values
    double vec_dev = 0.0;
    double val_dev = 0.0;
    for (std::size_t m = 0; m < nu.size(); ++m) {
        const Eigen::VectorXcd c = op.eigenvector_coeff(static_cast<Eigen::Index>(nu.size() - 1 - m));
        Eigen::Index k = 0;
        c.cwiseAbs().maxCoeff(&k);
        const auto mi = g.multi_index(static_cast<std::size_t>(k));
        GridField s(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            // sqrt(2/L) sin(k pi (x + L/2) / L) at x = -L/2 + m h, phase reduced exactly
            const auto node = g.multi_index(i);
            double v = 1.0;
            for (int a = 0; a < g.dim(); ++a) {
                const auto ax = static_cast<std::size_t>(a);
                const long period = 2L * (g.count(a) + 1);
                const long phase = (static_cast<long>(mi[ax] + 1) * (node[ax] + 1)) % period;
                v *= std::sqrt(2.0 / g.length(a)) * std::sin(std::numbers::pi * 2.0 * phase / period);
            }
            s[i] = v;
        }
        const GridField e = op.field(c);
        const cplx phase = inner_product(s, e);
        const double scale = s.values.cwiseAbs().maxCoeff();
        vec_dev = std::max(vec_dev, (e.values - phase / std::abs(phase) * s.values).cwiseAbs().maxCoeff() / scale);
        val_dev = std::max(val_dev, std::abs(nu[m] - spec.by_mode[k]) / spec.by_mode[k]);
    }
    CheckReport r;
    r.name = "dirichlet_reduction";
    r.context = operator_context(op);
    r.upper("eigenvalue_deviation", ev_dev, tolerance);
    r.upper("mode_eigenvalue_deviation", val_dev, tolerance);
    r.upper("eigenvector_deviation", vec_dev, tolerance);
    return r;
}

/// Direct Bose quadratic form against regular + Green + condensate parts.
inline CheckReport split_identity_check(const PhiOperator& op, double beta, const GridField& f, const GridField& g,
                                        double tolerance = 1e-12)
{
    const TwoPointLhs lhs = op.two_point_lhs(beta, f, g);
    CheckReport r;
    r.name = "split_identity";
    r.context = operator_context(op);
    r.context["beta"] = text::format_double(beta);
    r.upper("relative_difference", std::abs(lhs.direct - lhs.split) / std::abs(lhs.direct), tolerance);
    return r;
}

/// ||A f - L f|| / ||L f|| with L the Dirichlet operator of the same spectrum mode.
inline double locality_residual(const PhiOperator& op, const GridField& f)
{
    const Eigen::VectorXcd c = op.coefficients(f);
    const GridField lf = op.field(op.spectrum().by_mode.cast<cplx>().cwiseProduct(c));
    const GridField af = op.apply(f);
    return norm(GridField(f.grid, af.values - lf.values)) / norm(lf);
}

}  // namespace phibose
