#pragma once

// Config-driven sweeps and report emission.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/sha.h>

#include "json.hpp"

#include "phibose/continuum.hpp"
#include "phibose/harmonics.hpp"
#include "phibose/lattice.hpp"
#include "phibose/phi_operator.hpp"
#include "phibose/text.hpp"
#include "phibose/verification.hpp"
#include "phibose/wick.hpp"

namespace phibose {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ExperimentKind { converge, srs, verify, wick_demo };

inline std::string to_string(ExperimentKind k)
{
    switch (k) {
    case ExperimentKind::converge: return "converge";
    case ExperimentKind::srs: return "srs";
    case ExperimentKind::verify: return "verify";
    case ExperimentKind::wick_demo: return "wick-demo";
    }
    return "?";
}

/// Flat `key = value` config. Lines starting with '#' are comments.
///
///   experiment   converge | srs | verify | wick-demo
///   dim          1 | 2
///   beta         > 0
///   family       harmonic specs separated by ';' (empty for none)
///   f, g         test functions (g defaults to f)
///   u            source of the srs sweep
///   L            explicit schedule "8;16;32" or L_start, L_factor, L_steps
///   h            mesh width
///   richardson   true: also run at h/2 and extrapolate with the order-2 model
///   backend      auto | dense | lanczos
///   spectrum     fd | spectral
///   sampling     sampled | discrete-harmonic
///   cross_check  true: repeat dense rows with Lanczos and record the difference
///   oracle_cutoff, oracle_spacing, oracle_angular, oracle_nodes
///   window_margin, compare_empty     srs only
///   wick_n       wick-demo size
///   seed, jobs, zero_wall_time, csv, json, svg
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::converge;
    int dim = 1;
    double beta = 1.0;
    HarmonicFamily family;
    TestFunctionSpec f;
    TestFunctionSpec g;
    TestFunctionSpec u;
    std::vector<double> lengths;
    double h = 1.0 / 16;
    bool richardson = false;
    Backend backend = Backend::automatic;
    SpectrumMode spectrum = SpectrumMode::fd;
    SamplingMode sampling = SamplingMode::sampled;
    bool cross_check = false;
    std::optional<double> oracle_cutoff;
    std::optional<double> oracle_spacing;
    std::optional<int> oracle_angular;
    std::optional<int> oracle_nodes;
    double window_margin = 0.25;
    bool compare_empty = true;
    int wick_n = 4;
    std::uint64_t seed = 1;
    int jobs = 1;
    bool zero_wall_time = false;
    std::string csv = "sweep.csv";
    std::string json = "summary.json";
    std::string svg = "sweep.svg";
    std::string source_text;  // verbatim input, hashed into the summary

    std::map<std::string, std::string> entries;  // normalized echo

    MomentumGrid momentum_grid() const
    {
        MomentumGrid m = momentum_grid_for(f, g.empty() ? f : g);
        if (kind == ExperimentKind::srs) m = momentum_grid_for(u, u);
        m.dim = dim;
        if (oracle_cutoff) m.cutoff = *oracle_cutoff;
        if (oracle_spacing) m.spacing = *oracle_spacing;
        if (oracle_angular) m.angular = *oracle_angular;
        if (oracle_nodes) m.quadrature_nodes = *oracle_nodes;
        return m;
    }
};

namespace detail {

inline bool parse_bool(const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline double parse_number(const std::string& key, const std::string& v)
{
    try {
        return text::parse_double(v);
    } catch (const std::invalid_argument&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v)
{
    const double d = parse_number(key, v);
    if (d != std::floor(d) || std::abs(d) > 1e9) throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return static_cast<int>(d);
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& source)
{
    static const std::set<std::string> known = {
        "experiment", "dim", "beta", "family", "f", "g", "u", "L", "L_start", "L_factor", "L_steps", "h",
        "richardson", "backend", "spectrum", "sampling", "cross_check", "oracle_cutoff", "oracle_spacing",
        "oracle_angular", "oracle_nodes", "window_margin", "compare_empty", "wick_n", "seed", "jobs",
        "zero_wall_time", "csv", "json", "svg"};
    std::map<std::string, std::string> kv;
    std::istringstream in(source);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = text::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = text::trim(t.substr(0, eq));
        const std::string value = text::trim(t.substr(eq + 1));
        if (!known.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (kv.count(key)) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        kv[key] = value;
    }

    ExperimentConfig c;
    c.source_text = source;
    const auto has = [&](const char* k) { return kv.count(k) > 0; };
    try {
        if (has("experiment")) {
            const std::string& e = kv["experiment"];
            if (e == "converge") c.kind = ExperimentKind::converge;
            else if (e == "srs") c.kind = ExperimentKind::srs;
            else if (e == "verify") c.kind = ExperimentKind::verify;
            else if (e == "wick-demo" || e == "wick") c.kind = ExperimentKind::wick_demo;
            else throw ConfigError("experiment: unknown kind '" + e + "'");
        }
        if (has("dim")) c.dim = detail::parse_int("dim", kv["dim"]);
        if (c.dim != 1 && c.dim != 2) throw ConfigError("dim: must be 1 or 2");
        if (has("beta")) c.beta = detail::parse_number("beta", kv["beta"]);
        if (!(c.beta > 0.0)) throw ConfigError("beta: must be positive");
        if (has("family")) c.family = parse_family(kv["family"]);
        for (const auto& spec : c.family) {
            if (spec_dimension(spec) != 0 && spec_dimension(spec) != c.dim) {
                throw ConfigError("family: '" + format_harmonic(spec) + "' does not live in d = " + std::to_string(c.dim));
            }
        }
        const auto test_function = [&](const char* key) {
            TestFunctionSpec t = parse_test_function(kv[key]);
            if (!t.empty() && t.dim != c.dim) throw ConfigError(std::string(key) + ": dimension does not match dim");
            t.dim = c.dim;
            return t;
        };
        if (has("f")) c.f = test_function("f");
        c.g = has("g") ? test_function("g") : c.f;
        if (has("u")) c.u = test_function("u");
        if (c.f.empty()) c.f.dim = c.dim;
        if (c.g.empty()) c.g.dim = c.dim;
        if (c.u.empty()) c.u.dim = c.dim;

        if (has("h")) c.h = detail::parse_number("h", kv["h"]);
        if (!(c.h > 0.0)) throw ConfigError("h: must be positive");
        if (has("L") && (has("L_start") || has("L_factor") || has("L_steps"))) {
            throw ConfigError("L: give either an explicit list or L_start/L_factor/L_steps");
        }
        if (has("L")) {
            for (const auto& part : text::split_top(kv["L"], ';')) c.lengths.push_back(detail::parse_number("L", part));
        } else if (has("L_start")) {
            const double start = detail::parse_number("L_start", kv["L_start"]);
            const double factor = has("L_factor") ? detail::parse_number("L_factor", kv["L_factor"]) : 2.0;
            const int steps = has("L_steps") ? detail::parse_int("L_steps", kv["L_steps"]) : 1;
            if (steps < 1) throw ConfigError("L_steps: must be at least 1");
            double L = start;
            for (int i = 0; i < steps; ++i, L *= factor) c.lengths.push_back(L);
        } else {
            c.lengths = {4.0};
        }
        for (std::size_t i = 0; i < c.lengths.size(); ++i) {
            if (!(c.lengths[i] > 0.0)) throw ConfigError("L: lengths must be positive");
            if (i > 0 && !(c.lengths[i] > c.lengths[i - 1])) throw ConfigError("L: schedule must be strictly increasing");
            const double ratio = c.lengths[i] / c.h;
            if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio || std::round(ratio) < 2) {
                throw ConfigError("h = " + text::format_double(c.h) + " does not divide L = " + text::format_double(c.lengths[i]));
            }
        }
        if (has("richardson")) c.richardson = detail::parse_bool("richardson", kv["richardson"]);
        if (has("backend")) c.backend = parse_backend(kv["backend"]);
        if (has("spectrum")) c.spectrum = parse_spectrum_mode(kv["spectrum"]);
        if (has("sampling")) c.sampling = parse_sampling_mode(kv["sampling"]);
        if (has("cross_check")) c.cross_check = detail::parse_bool("cross_check", kv["cross_check"]);
        if (has("oracle_cutoff")) c.oracle_cutoff = detail::parse_number("oracle_cutoff", kv["oracle_cutoff"]);
        if (has("oracle_spacing")) c.oracle_spacing = detail::parse_number("oracle_spacing", kv["oracle_spacing"]);
        if (has("oracle_angular")) c.oracle_angular = detail::parse_int("oracle_angular", kv["oracle_angular"]);
        if (has("oracle_nodes")) c.oracle_nodes = detail::parse_int("oracle_nodes", kv["oracle_nodes"]);
        if (has("window_margin")) c.window_margin = detail::parse_number("window_margin", kv["window_margin"]);
        if (c.window_margin < 0.0) throw ConfigError("window_margin: must be non-negative");
        if (has("compare_empty")) c.compare_empty = detail::parse_bool("compare_empty", kv["compare_empty"]);
        if (has("wick_n")) c.wick_n = detail::parse_int("wick_n", kv["wick_n"]);
        if (c.wick_n < 1 || c.wick_n > 10) throw ConfigError("wick_n: must be in 1..10");
        if (has("seed")) c.seed = static_cast<std::uint64_t>(detail::parse_int("seed", kv["seed"]));
        if (has("jobs")) c.jobs = std::max(1, detail::parse_int("jobs", kv["jobs"]));
        if (has("zero_wall_time")) c.zero_wall_time = detail::parse_bool("zero_wall_time", kv["zero_wall_time"]);
        if (has("csv")) c.csv = kv["csv"];
        if (has("json")) c.json = kv["json"];
        if (has("svg")) c.svg = kv["svg"];
        validate(c.momentum_grid());
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    c.entries = kv;
    return c;
}

/// Config used by a subcommand when no file is given.
inline std::string default_config_text(ExperimentKind kind)
{
    switch (kind) {
    case ExperimentKind::converge:
        return "experiment = converge\nfamily = affine:a=0,b=1\nf = dipole:c=0,s=1,a=0.75\nL = 8;16;32;64\n"
               "h = 0.0625\nrichardson = true\n";
    case ExperimentKind::srs:
        return "experiment = srs\nfamily = affine:a=0,b=1\nu = bump:c=0.5,a=3\nL = 8;16;32;64\nh = 0.015625\n"
               "spectrum = spectral\n";
    case ExperimentKind::verify:
        return "experiment = verify\nfamily = affine:a=0,b=1;const:c=1\nL = 4\nh = 0.015625\n"
               "sampling = discrete-harmonic\n";
    case ExperimentKind::wick_demo:
        return "experiment = wick-demo\n";
    }
    return "";
}

inline ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// --- converge ---------------------------------------------------------------

struct ConvergenceRow {
    double L = 0.0;
    std::size_t N = 0;
    double h = 0.0;
    cplx lhs;
    cplx rhs;
    double abs_err = 0.0;
    double rel_err = 0.0;
    cplx green_term;
    cplx regular_term;
    cplx condensate_term;
    double wall_time_s = 0.0;
};

struct ConvergenceReport {
    ExperimentConfig config;
    TwoPointRhs rhs;
    std::string oracle;
    std::vector<ConvergenceRow> rows;                  // Richardson-corrected when enabled
    std::vector<std::vector<ConvergenceRow>> raw;      // per mesh width: h, and h/2 with Richardson
    std::vector<double> split_difference;              // |direct - split| / |direct| per raw row, all widths
    std::vector<double> lanczos_difference;            // dense vs Lanczos per row, NaN when not run
    std::vector<std::string> backends;
};

namespace detail {

struct LhsPoint {
    ConvergenceRow row;
    double split = 0.0;
    double lanczos = std::numeric_limits<double>::quiet_NaN();
    std::string backend;
};

inline LhsPoint converge_point(const ExperimentConfig& c, double L, double h)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Grid grid = make_box(c.dim, L, h);
    const DirichletSpectrum spec = make_spectrum(grid, c.spectrum);
    PhiOperator::Options opt;
    opt.backend = c.backend;
    const PhiOperator op = build_phi_operator(grid, spec, c.family, c.sampling, opt);
    const GridField fs = sample(grid, c.f);
    const GridField gs = sample(grid, c.g);
    const TwoPointLhs lhs = op.two_point_lhs(c.beta, fs, gs);
    LhsPoint p;
    p.backend = to_string(op.backend());
    p.row.L = L;
    p.row.N = grid.size();
    p.row.h = h;
    p.row.lhs = lhs.direct;
    p.row.green_term = lhs.green;
    p.row.regular_term = lhs.regular;
    p.row.condensate_term = lhs.condensate;
    p.split = std::abs(lhs.direct - lhs.split) / std::abs(lhs.direct);
    if (c.cross_check && op.backend() == Backend::dense) {
        PhiOperator::Options lo = opt;
        lo.backend = Backend::lanczos;
        const PhiOperator lop(grid, spec, op.basis().columns, lo);
        p.lanczos = std::abs(lop.quadratic_form(Bose{c.beta}, fs, gs) - lhs.direct) / std::abs(lhs.direct);
    }
    p.row.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return p;
}

/// Runs `fn(i)` for i in [0, n) with at most `jobs` in flight; results keep index order.
template <class Fn>
auto indexed_map(std::size_t n, int jobs, Fn fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::future<R>> running;
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < n; ++i) {
        running.push_back(std::async(std::launch::async, fn, i));
        slots.push_back(i);
        if (running.size() == static_cast<std::size_t>(jobs) || i + 1 == n) {
            for (std::size_t k = 0; k < running.size(); ++k) out[slots[k]] = running[k].get();
            running.clear();
            slots.clear();
        }
    }
    return out;
}

inline void finish_row(ConvergenceRow& r, cplx rhs)
{
    r.rhs = rhs;
    r.abs_err = std::abs(r.lhs - rhs);
    r.rel_err = r.abs_err / std::abs(rhs);
}

}  // namespace detail

inline void require_supports(const ExperimentConfig& c, const std::vector<const TestFunctionSpec*>& fns)
{
    const Grid smallest = make_box(c.dim, c.lengths.front(), c.h);
    for (const auto* t : fns) {
        if (!t->empty() && !support_inside(*t, smallest)) {
            throw ConfigError("support of '" + format_test_function(*t) + "' exceeds the smallest box L = "
                              + text::format_double(c.lengths.front()));
        }
    }
}

inline ConvergenceReport run_converge_sweep(const ExperimentConfig& c)
{
    if (c.f.empty() || c.g.empty()) throw ConfigError("converge: f must be given");
    require_supports(c, {&c.f, &c.g});
    ConvergenceReport rep;
    rep.config = c;
    const MomentumGrid mg = c.momentum_grid();
    const FourierTable tf = fourier_oracle(c.f, mg);
    const FourierTable tg = format_test_function(c.g) == format_test_function(c.f) ? tf : fourier_oracle(c.g, mg);
    rep.rhs = two_point_rhs(c.family, c.f, c.g, c.beta, tf, tg);  // throws HypothesisError without zero mean
    rep.oracle = tf.provenance;

    std::vector<double> widths = {c.h};
    if (c.richardson) widths.push_back(0.5 * c.h);
    const std::size_t nl = c.lengths.size();
    const auto points = detail::indexed_map(nl * widths.size(), c.jobs, [&](std::size_t i) {
        return detail::converge_point(c, c.lengths[i % nl], widths[i / nl]);
    });
    rep.raw.resize(widths.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        ConvergenceRow r = points[i].row;
        detail::finish_row(r, rep.rhs.total);
        if (c.zero_wall_time) r.wall_time_s = 0.0;
        rep.raw[i / nl].push_back(r);
        rep.split_difference.push_back(points[i].split);
    }
    for (std::size_t j = 0; j < nl; ++j) {
        rep.lanczos_difference.push_back(points[j].lanczos);
        rep.backends.push_back(points[j].backend);
        if (!c.richardson) {
            rep.rows.push_back(rep.raw[0][j]);
            continue;
        }
        // order-2 model: X(h) = X + c h^2
        const ConvergenceRow& a = rep.raw[0][j];
        const ConvergenceRow& b = rep.raw[1][j];
        const auto ex = [](cplx coarse, cplx fine) { return (4.0 * fine - coarse) / 3.0; };
        ConvergenceRow r = a;
        r.lhs = ex(a.lhs, b.lhs);
        r.green_term = ex(a.green_term, b.green_term);
        r.regular_term = ex(a.regular_term, b.regular_term);
        r.condensate_term = ex(a.condensate_term, b.condensate_term);
        r.wall_time_s = a.wall_time_s + b.wall_time_s;
        detail::finish_row(r, rep.rhs.total);
        rep.rows.push_back(r);
    }
    return rep;
}

// --- strong resolvent convergence -------------------------------------------

struct SrsRow {
    double L = 0.0;
    std::size_t N = 0;
    double h = 0.0;
    double error = 0.0;
    double error_empty = std::numeric_limits<double>::quiet_NaN();
    bool decreasing = true;
    double wall_time_s = 0.0;
};

struct SrsReport {
    ExperimentConfig config;
    std::vector<double> window;  // [lo, hi] per axis
    std::vector<SrsRow> rows;
};

namespace detail {

/// Window nodes: within halfwidth + margin (sup norm) of some bump center.
inline bool in_window(const TestFunctionSpec& u, double margin, const Point& p)
{
    for (const auto& t : u.terms()) {
        double dist = 0.0;
        for (int a = 0; a < u.dim; ++a) dist = std::max(dist, std::abs(p[a] - t.center[static_cast<std::size_t>(a)]));
        if (dist <= t.halfwidth + margin) return true;
    }
    return false;
}

using NodeKey = std::pair<long long, long long>;

inline NodeKey node_key(const Point& p, double h) { return {std::llround(p[0] / h), std::llround(p[1] / h)}; }

inline double srs_error(const ExperimentConfig& c, const HarmonicFamily& family, const Grid& grid,
                        const std::map<NodeKey, cplx>& reference)
{
    // the Woodbury solve needs no eigendecomposition, so skip it unless asked for
    PhiOperator::Options opt;
    opt.backend = c.backend == Backend::automatic ? Backend::lanczos : c.backend;
    const PhiOperator op = build_phi_operator(grid, make_spectrum(grid, c.spectrum), family, c.sampling, opt);
    const GridField y = op.resolvent_apply(1.0, sample(grid, c.u));
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point p = grid.node(i);
        const auto it = reference.find(node_key(p, c.h));
        if (it != reference.end()) acc += std::norm(y[i] - it->second);
    }
    return std::sqrt(acc * grid.weight());
}

}  // namespace detail

inline SrsReport run_srs_sweep(const ExperimentConfig& c)
{
    require_supports(c, {&c.u});
    SrsReport rep;
    rep.config = c;
    // reference on the window nodes, which all boxes share
    std::map<detail::NodeKey, cplx> reference;
    if (!c.u.empty()) {
        const Grid small = make_box(c.dim, c.lengths.front(), c.h);
        std::vector<Point> pts;
        for (std::size_t i = 0; i < small.size(); ++i) {
            const Point p = small.node(i);
            if (detail::in_window(c.u, c.window_margin, p)) pts.push_back(p);
        }
        const auto ref = resolvent_reference(c.u, pts, c.momentum_grid());
        for (std::size_t k = 0; k < pts.size(); ++k) reference[detail::node_key(pts[k], c.h)] = ref[k];
        const double rmax = support_radius(c.u) + c.window_margin;
        rep.window = {-rmax, rmax};
    }
    rep.rows = detail::indexed_map(c.lengths.size(), c.jobs, [&](std::size_t i) {
        const auto t0 = std::chrono::steady_clock::now();
        const Grid grid = make_box(c.dim, c.lengths[i], c.h);
        SrsRow r;
        r.L = c.lengths[i];
        r.N = grid.size();
        r.h = c.h;
        if (!c.u.empty()) {
            r.error = detail::srs_error(c, c.family, grid, reference);
            if (c.compare_empty) r.error_empty = detail::srs_error(c, {}, grid, reference);
        } else {
            r.error = 0.0;
            if (c.compare_empty) r.error_empty = 0.0;
        }
        r.wall_time_s = c.zero_wall_time ? 0.0 : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return r;
    });
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
        rep.rows[i].decreasing = rep.rows[i].error < rep.rows[i - 1].error
                                 && (!c.compare_empty || rep.rows[i].error_empty < rep.rows[i - 1].error_empty);
    }
    return rep;
}

// --- verification suite -----------------------------------------------------

struct VerifyReport {
    ExperimentConfig config;
    std::vector<CheckReport> checks;

    bool pass() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const CheckReport& r) { return r.pass(); });
    }
};

inline CheckReport wick_check(std::uint64_t seed, int max_n = 4, double tolerance = 1e-13)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d;
    double worst = 0.0;
    for (int n = 1; n <= max_n; ++n) {
        for (int trial = 0; trial < 5; ++trial) {
            Eigen::MatrixXcd t(n, n);
            for (Eigen::Index i = 0; i < t.size(); ++i) {
                const double re = d(rng);
                t.data()[i] = cplx(re, d(rng));
            }
            const cplx a = permanent_ryser(t);
            const cplx b = permanent_enumeration(t);
            worst = std::max(worst, std::abs(a - b));
        }
    }
    CheckReport r;
    r.name = "wick";
    r.context = {{"max_n", std::to_string(max_n)}, {"seed", std::to_string(seed)}};
    r.upper("ryser_vs_enumeration", worst, tolerance);
    return r;
}

/// Default: d = 1, L = 4, h = 1/64 (N = 255), family {x, 1}, discrete-harmonic.
inline VerifyReport run_verify_suite(const ExperimentConfig& c)
{
    VerifyReport rep;
    rep.config = c;
    OperatorSetup s;
    s.dim = c.dim;
    s.length = c.lengths.front();
    s.spacing = c.h;
    s.family = c.family;
    s.spectrum = c.spectrum;
    s.sampling = c.sampling;
    s.options.backend = c.backend;
    const PhiOperator op = s.build();
    for (double z : {-1.0, -2.5}) rep.checks.push_back(krein_identity_residual(op, z, c.seed));
    rep.checks.push_back(domain_decomposition_random(op, c.seed));
    if (op.grid().size() <= dense_limit) rep.checks.push_back(ordering_check(op));
    {
        OperatorSetup empty = s;
        empty.family.clear();
        empty.options.backend = Backend::dense;
        if (op.grid().size() <= dense_limit) rep.checks.push_back(reduction_to_dirichlet(empty.build()));
    }
    {
        std::mt19937_64 rng(c.seed + 1);
        std::normal_distribution<double> d;
        GridField f(op.grid());
        GridField g(op.grid());
        for (std::size_t i = 0; i < f.grid.size(); ++i) {
            const double a = d(rng);
            const double b = d(rng);
            f[i] = cplx(a, b);
            g[i] = cplx(d(rng), d(rng));
        }
        rep.checks.push_back(split_identity_check(op, c.beta, f, g));
    }
    if (c.dim == 1) {
        rep.checks.push_back(boundary_condition_residual(s, 0, 3));
        OperatorSetup q = s;
        // in d = 1 sampled and discrete-harmonic families coincide
        q.sampling = SamplingMode::discrete_harmonic;
        q.spectrum = SpectrumMode::fd;
        rep.checks.push_back(quadratic_form_identity(q, c.seed));
    }
    rep.checks.push_back(wick_check(c.seed));
    return rep;
}

// --- emission -----------------------------------------------------------------

inline const char* convergence_csv_header =
    "L,N,h,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,green_term,regular_term,condensate_term,wall_time_s";

namespace detail {

inline std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

}  // namespace detail

/// The three term columns hold real parts; the imaginary parts of these
/// terms vanish for f = g and are kept in the JSON summary.
inline std::string convergence_csv(const std::vector<ConvergenceRow>& rows)
{
    std::string out = std::string(convergence_csv_header) + "\n";
    for (const auto& r : rows) {
        const double cells[] = {r.L,       r.h,           r.lhs.real(),           r.lhs.imag(),
                                r.rhs.real(), r.rhs.imag(), r.abs_err,           r.rel_err,
                                r.green_term.real(), r.regular_term.real(), r.condensate_term.real(), r.wall_time_s};
        out += detail::num(cells[0]) + "," + std::to_string(r.N);
        for (std::size_t k = 1; k < std::size(cells); ++k) out += "," + detail::num(cells[k]);
        out += "\n";
    }
    return out;
}

inline std::string srs_csv(const std::vector<SrsRow>& rows)
{
    std::string out = "L,N,h,error,error_empty,decreasing,wall_time_s\n";
    for (const auto& r : rows) {
        out += detail::num(r.L) + "," + std::to_string(r.N) + "," + detail::num(r.h) + "," + detail::num(r.error) + ","
               + detail::num(r.error_empty) + "," + (r.decreasing ? "1" : "0") + "," + detail::num(r.wall_time_s) + "\n";
    }
    return out;
}

/// Git blob id: SHA-1 of "blob <size>\0" followed by the content.
inline std::string git_blob_sha1(const std::string& content)
{
    const std::string data = "blob " + std::to_string(content.size()) + std::string(1, '\0') + content;
    unsigned char md[SHA_DIGEST_LENGTH];
    SHA1(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
    char hex[2 * SHA_DIGEST_LENGTH + 1];
    for (int i = 0; i < SHA_DIGEST_LENGTH; ++i) std::snprintf(hex + 2 * i, 3, "%02x", md[i]);
    return hex;
}

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained log-log line plot, one polyline per series.
inline std::string svg_loglog(const std::vector<SvgSeries>& series, const std::string& xlabel, const std::string& ylabel)
{
    const double W = 640;
    const double H = 420;
    const double ml = 80;
    const double mr = 150;
    const double mt = 20;
    const double mb = 60;
    double x0 = INFINITY;
    double x1 = -INFINITY;
    double y0 = INFINITY;
    double y1 = -INFINITY;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
            x0 = std::min(x0, std::log10(s.x[i]));
            x1 = std::max(x1, std::log10(s.x[i]));
            y0 = std::min(y0, std::log10(s.y[i]));
            y1 = std::max(y1, std::log10(s.y[i]));
        }
    }
    if (!(x1 >= x0)) {
        x0 = 0;
        x1 = 1;
        y0 = 0;
        y1 = 1;
    }
    x0 = std::floor(x0 * 10) / 10;
    x1 = std::ceil(x1 * 10) / 10;
    y0 = std::floor(y0);
    y1 = std::ceil(y1);
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    const auto px = [&](double v) { return ml + (std::log10(v) - x0) / (x1 - x0) * (W - ml - mr); };
    const auto py = [&](double v) { return H - mb - (std::log10(v) - y0) / (y1 - y0) * (H - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::ostringstream o;
    char buf[256];
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                  ml, mt, W - ml - mr, H - mt - mb);
    o << buf;
    for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); ++e) {
        const double y = py(std::pow(10.0, e));
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%g\" y1=\"%.2f\" x2=\"%g\" y2=\"%.2f\" stroke=\"#ddd\"/><text x=\"%g\" y=\"%.2f\" "
                      "text-anchor=\"end\">1e%d</text>\n",
                      ml, y, W - mr, y, ml - 6, y + 4, e);
        o << buf;
    }
    std::set<double> xticks;
    for (const auto& s : series) xticks.insert(s.x.begin(), s.x.end());
    for (double v : xticks) {
        if (!(v > 0.0)) continue;
        const double x = px(v);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%.2f\" y1=\"%g\" x2=\"%.2f\" y2=\"%g\" stroke=\"#ddd\"/><text x=\"%.2f\" y=\"%g\" "
                      "text-anchor=\"middle\">%g</text>\n",
                      x, mt, x, H - mb, x, H - mb + 16, v);
        o << buf;
    }
    o << "<text x=\"" << ml + 0.5 * (W - ml - mr) << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
    o << "<text transform=\"translate(18," << mt + 0.5 * (H - mt - mb) << ") rotate(-90)\" text-anchor=\"middle\">"
      << ylabel << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* col = colors[k % std::size(colors)];
        o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
            o << buf;
        }
        o << "\"/>\n";
        const double ly = mt + 16 + 18 * static_cast<double>(k);
        std::snprintf(buf, sizeof buf,
                      "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"%s\" stroke-width=\"2\"/><text x=\"%g\" "
                      "y=\"%g\">",
                      W - mr + 10, ly, W - mr + 30, ly, col, W - mr + 36, ly + 4);
        o << buf << s.label << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

/// Writes through a temporary file in the same directory, then renames.
inline void write_atomic(const std::filesystem::path& path, const std::string& content)
{
    namespace fs = std::filesystem;
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    fs::rename(tmp, path, ec);
    if (ec) throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

namespace detail {

inline nlohmann::ordered_json config_echo(const ExperimentConfig& c)
{
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.entries) j[k] = v;
    return j;
}

inline nlohmann::ordered_json complex_json(cplx z) { return {z.real(), z.imag()}; }

inline nlohmann::ordered_json summary_head(const ExperimentConfig& c)
{
    nlohmann::ordered_json j;
    j["experiment"] = to_string(c.kind);
    j["config"] = config_echo(c);
    j["input_hash"] = git_blob_sha1(c.source_text);
    return j;
}

}  // namespace detail

inline nlohmann::ordered_json summary_json(const ConvergenceReport& r)
{
    auto j = detail::summary_head(r.config);
    bool decreasing = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i) decreasing = decreasing && r.rows[i].rel_err < r.rows[i - 1].rel_err;
    j["rhs"] = {{"total", detail::complex_json(r.rhs.total)},
                {"free_gas", detail::complex_json(r.rhs.free_gas)},
                {"regular", detail::complex_json(r.rhs.regular)},
                {"green", detail::complex_json(r.rhs.green)},
                {"condensate", detail::complex_json(r.rhs.condensate)},
                {"oracle", r.oracle}};
    j["richardson"] = r.config.richardson;
    j["rel_err"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) j["rel_err"].push_back(row.rel_err);
    j["final_rel_err"] = r.rows.empty() ? 0.0 : r.rows.back().rel_err;
    j["rel_err_decreasing"] = decreasing;
    j["split_difference_max"] = r.split_difference.empty()
                                    ? 0.0
                                    : *std::max_element(r.split_difference.begin(), r.split_difference.end());
    j["backends"] = r.backends;
    nlohmann::ordered_json lz = nlohmann::ordered_json::array();
    for (double v : r.lanczos_difference) {
        if (std::isnan(v)) lz.push_back(nullptr);
        else lz.push_back(v);
    }
    j["lanczos_difference"] = lz;
    if (!r.rows.empty()) {
        const ConvergenceRow& last = r.rows.back();
        j["final_term_errors"] = {{"regular", std::abs(last.regular_term - r.rhs.regular)},
                                  {"green", std::abs(last.green_term - r.rhs.green)},
                                  {"condensate", std::abs(last.condensate_term - r.rhs.condensate)}};
        // recorded only: in d = 1 the box error should sit in the Green part
        j["regular_within_10x_green"] =
            std::abs(last.regular_term - r.rhs.regular) <= 10.0 * std::abs(last.green_term - r.rhs.green);
    }
    j["pass"] = decreasing;
    return j;
}

inline nlohmann::ordered_json summary_json(const SrsReport& r)
{
    auto j = detail::summary_head(r.config);
    j["window"] = r.window;
    bool decreasing = true;
    j["error"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
        j["error"].push_back(row.error);
        decreasing = decreasing && row.decreasing;
    }
    j["final_error"] = r.rows.empty() ? 0.0 : r.rows.back().error;
    j["decreasing"] = decreasing;
    j["pass"] = decreasing;
    return j;
}

inline nlohmann::ordered_json summary_json(const VerifyReport& r)
{
    auto j = detail::summary_head(r.config);
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.checks) j["checks"].push_back(c.to_json());
    j["pass"] = r.pass();
    return j;
}

inline std::filesystem::path output_path(const std::filesystem::path& dir, const std::string& name)
{
    return std::filesystem::path(name).is_absolute() ? std::filesystem::path(name) : dir / name;
}

/// CSV (plus one raw CSV per mesh width when Richardson is on), JSON and SVG.
inline std::vector<std::filesystem::path> emit_outputs(const ConvergenceReport& r, const std::filesystem::path& dir)
{
    const ExperimentConfig& c = r.config;
    std::vector<std::filesystem::path> written;
    const auto put = [&](const std::filesystem::path& p, const std::string& s) {
        write_atomic(p, s);
        written.push_back(p);
    };
    const auto csv = output_path(dir, c.csv);
    put(csv, convergence_csv(r.rows));
    if (c.richardson) {
        for (std::size_t k = 0; k < r.raw.size(); ++k) {
            auto p = csv;
            p.replace_extension(".h" + std::to_string(k) + ".csv");
            put(p, convergence_csv(r.raw[k]));
        }
    }
    put(output_path(dir, c.json), summary_json(r).dump(2) + "\n");
    SvgSeries s{c.richardson ? "rel_err (Richardson)" : "rel_err", {}, {}};
    for (const auto& row : r.rows) {
        s.x.push_back(row.L);
        s.y.push_back(row.rel_err);
    }
    put(output_path(dir, c.svg), svg_loglog({s}, "L", "relative error"));
    return written;
}

inline std::vector<std::filesystem::path> emit_outputs(const SrsReport& r, const std::filesystem::path& dir)
{
    const ExperimentConfig& c = r.config;
    std::vector<std::filesystem::path> written;
    write_atomic(output_path(dir, c.csv), srs_csv(r.rows));
    written.push_back(output_path(dir, c.csv));
    write_atomic(output_path(dir, c.json), summary_json(r).dump(2) + "\n");
    written.push_back(output_path(dir, c.json));
    std::vector<SvgSeries> series(1);
    series[0].label = "family";
    for (const auto& row : r.rows) {
        series[0].x.push_back(row.L);
        series[0].y.push_back(row.error);
    }
    if (c.compare_empty) {
        series.push_back({"empty family", {}, {}});
        for (const auto& row : r.rows) {
            series[1].x.push_back(row.L);
            series[1].y.push_back(row.error_empty);
        }
    }
    write_atomic(output_path(dir, c.svg), svg_loglog(series, "L", "L2 error on window"));
    written.push_back(output_path(dir, c.svg));
    return written;
}

inline std::vector<std::filesystem::path> emit_outputs(const VerifyReport& r, const std::filesystem::path& dir)
{
    const auto p = output_path(dir, r.config.json);
    write_atomic(p, summary_json(r).dump(2) + "\n");
    return {p};
}

}  // namespace phibose
