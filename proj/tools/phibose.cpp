#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "phibose/experiments.hpp"

namespace fs = std::filesystem;
using namespace phibose;

namespace {

enum Exit { ok = 0, check_failed = 1, config_error = 2, hypothesis = 3 };

struct Globals {
    std::string config;
    std::string out = ".";
    std::string backend;
    std::string mode;
    std::optional<std::uint64_t> seed;
};

ExperimentConfig resolve(const Globals& g, ExperimentKind kind)
{
    ExperimentConfig c = g.config.empty() ? parse_config(default_config_text(kind)) : load_config(g.config);
    if (!g.config.empty() && c.kind != kind) {
        throw ConfigError("config '" + g.config + "' describes a " + to_string(c.kind) + " experiment, not "
                          + to_string(kind));
    }
    try {
        if (!g.backend.empty()) c.backend = parse_backend(g.backend);
        if (!g.mode.empty()) c.spectrum = parse_spectrum_mode(g.mode);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (g.seed) c.seed = *g.seed;
    return c;
}

void print_written(const std::vector<fs::path>& paths)
{
    for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
}

int run_converge(const Globals& g)
{
    const ConvergenceReport r = run_converge_sweep(resolve(g, ExperimentKind::converge));
    std::cout << convergence_csv(r.rows);
    print_written(emit_outputs(r, g.out));
    return summary_json(r)["pass"].get<bool>() ? ok : check_failed;
}

int run_srs(const Globals& g)
{
    const SrsReport r = run_srs_sweep(resolve(g, ExperimentKind::srs));
    std::cout << srs_csv(r.rows);
    print_written(emit_outputs(r, g.out));
    return summary_json(r)["pass"].get<bool>() ? ok : check_failed;
}

int run_verify(const Globals& g)
{
    const VerifyReport r = run_verify_suite(resolve(g, ExperimentKind::verify));
    for (const auto& c : r.checks) std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << "\n";
    print_written(emit_outputs(r, g.out));
    return r.pass() ? ok : check_failed;
}

int run_wick(const Globals& g)
{
    const ExperimentConfig c = resolve(g, ExperimentKind::wick_demo);
    const CheckReport r = wick_check(c.seed, c.wick_n);
    std::cout << r.to_json().dump(2) << "\n";
    return r.pass() ? ok : check_failed;
}

int run_fourier_dump(const Globals& g, const std::string& function, int dim)
{
    ExperimentConfig c;
    if (!g.config.empty()) c = load_config(g.config);
    TestFunctionSpec f = c.f;
    if (!function.empty()) {
        try {
            f = parse_test_function(function);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        if (f.empty()) f.dim = dim;
    }
    if (f.empty() && function.empty() && g.config.empty()) throw ConfigError("fourier-dump: give --function or --config");
    MomentumGrid m = momentum_grid_for(f, f);
    const FourierTable t = fourier_oracle(f, m);
    const fs::path p = output_path(g.out, "fourier.csv");
    write_atomic(p, fourier_table_csv(t));
    std::cout << "wrote " << p.string() << "\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Phi-modified Laplacians: sweeps, oracles and verification"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "key = value experiment file");
    app.add_option("--out", g.out, "output directory");
    app.add_option("--backend", g.backend, "auto | dense | lanczos");
    app.add_option("--mode", g.mode, "spectrum mode: fd | spectral");
    app.add_option("--seed", g.seed, "seed for randomized checks");

    auto* converge = app.add_subcommand("converge", "two-point function sweep over growing boxes");
    auto* srs = app.add_subcommand("srs", "resolvent convergence sweep");
    auto* verify = app.add_subcommand("verify", "identity and structure checks");
    auto* wick = app.add_subcommand("wick", "permanent cross-check");
    auto* dump = app.add_subcommand("fourier-dump", "write the Fourier table of a test function as CSV");
    std::string function;
    int dim = 1;
    dump->add_option("--function", function, "test function, e.g. dipole:c=0,s=1,a=0.75");
    dump->add_option("--dim", dim, "dimension of an empty function")->check(CLI::Range(1, 2));
    for (auto* sub : {converge, srs, verify, wick, dump}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        if (*converge) return run_converge(g);
        if (*srs) return run_srs(g);
        if (*verify) return run_verify(g);
        if (*wick) return run_wick(g);
        if (*dump) return run_fourier_dump(g, function, dim);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const HypothesisError& e) {
        std::cerr << "hypothesis violated: " << e.what() << "\n";
        return hypothesis;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return check_failed;
    }
    return ok;
}
