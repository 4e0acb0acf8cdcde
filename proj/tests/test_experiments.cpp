#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "phibose/experiments.hpp"

using namespace phibose;
namespace fs = std::filesystem;

namespace {

const char* small_converge =
    "experiment = converge\n"
    "family = affine:a=0,b=1\n"
    "f = dipole:c=0,s=1,a=0.75\n"
    "L = 4;8;16\n"
    "h = 0.125\n"
    "zero_wall_time = true\n";

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("phibose_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace

TEST(Config, ParsesKeysAndDefaults)
{
    const ExperimentConfig c = parse_config(
        "# comment\nexperiment = converge\ndim = 1\nbeta = 2\nf = bump:c=0,a=1\nL_start = 4\nL_factor = 2\nL_steps = 3\n"
        "h = 0.25\nbackend = lanczos\nspectrum = spectral\nsampling = discrete-harmonic\nseed = 9\n");
    EXPECT_EQ(c.kind, ExperimentKind::converge);
    EXPECT_EQ(c.beta, 2.0);
    EXPECT_EQ(c.lengths, (std::vector<double>{4.0, 8.0, 16.0}));
    EXPECT_EQ(c.backend, Backend::lanczos);
    EXPECT_EQ(c.spectrum, SpectrumMode::spectral);
    EXPECT_EQ(c.sampling, SamplingMode::discrete_harmonic);
    EXPECT_EQ(c.seed, 9u);
    EXPECT_EQ(format_test_function(c.g), format_test_function(c.f));
}

TEST(Config, RejectsBadInput)
{
    const char* bad[] = {
        "colour = red\n",                         // unknown key
        "h = 0.5\nh = 0.25\n",                    // duplicate
        "no equals sign\n",                       // syntax
        "L = 8;4\n",                              // not increasing
        "L = 8;8\n",                              // not strictly increasing
        "L = 3\nh = 0.4\n",                       // h does not divide L
        "beta = 0\n",                             // beta > 0
        "beta = -1\n",
        "dim = 3\n",
        "experiment = nonsense\n",
        "richardson = maybe\n",
        "family = hpoly2:n=1\n",                  // 2D spec in d = 1
        "dim = 2\nf = bump:c=0,a=1\n",            // 1D function in d = 2
        "L = 4\nL_start = 4\n",
        "oracle_cutoff = -1\n",
        "f = wobble:a=1\n",
    };
    for (const char* text : bad) EXPECT_THROW(parse_config(text), ConfigError) << text;
}

TEST(Config, LoadReportsMissingFile)
{
    try {
        load_config("/nonexistent/dir/x.conf");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/x.conf"), std::string::npos);
    }
}

TEST(Config, DefaultsParse)
{
    for (auto k : {ExperimentKind::converge, ExperimentKind::srs, ExperimentKind::verify, ExperimentKind::wick_demo}) {
        EXPECT_EQ(parse_config(default_config_text(k)).kind, k);
    }
}

TEST(Converge, CsvHeaderAndRows)
{
    const ConvergenceReport r = run_converge_sweep(parse_config(small_converge));
    const std::string csv = convergence_csv(r.rows);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "L,N,h,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,green_term,regular_term,condensate_term,wall_time_s");
    ASSERT_EQ(r.rows.size(), 3u);
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.rhs, r.rhs.total);
        EXPECT_DOUBLE_EQ(row.rel_err, std::abs(row.lhs - row.rhs) / std::abs(row.rhs));
        EXPECT_EQ(row.wall_time_s, 0.0);
    }
    for (double d : r.split_difference) EXPECT_LE(d, 1e-12);
}

TEST(Converge, CondensateTermIndependentOfBox)
{
    // <chi phi, f> only sees supp f
    const ConvergenceReport r = run_converge_sweep(parse_config(small_converge));
    for (const auto& row : r.rows) EXPECT_NEAR(row.condensate_term.real(), r.rows.front().condensate_term.real(), 1e-14);
}

TEST(Converge, EmptyFamilyDecreases)
{
    std::string text = small_converge;
    text.replace(text.find("family = affine:a=0,b=1"), 23, "family =");
    const ConvergenceReport r = run_converge_sweep(parse_config(text));
    for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_LT(r.rows[i].rel_err, r.rows[i - 1].rel_err);
    EXPECT_EQ(r.rhs.condensate, cplx(0.0));
}

TEST(Converge, RichardsonCombination)
{
    const ConvergenceReport r = run_converge_sweep(parse_config(std::string(small_converge) + "richardson = true\n"));
    ASSERT_EQ(r.raw.size(), 2u);
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const cplx expected = (4.0 * r.raw[1][i].lhs - r.raw[0][i].lhs) / 3.0;
        EXPECT_EQ(r.rows[i].lhs, expected);
        EXPECT_EQ(r.raw[1][i].N, 2 * r.raw[0][i].N + 1);
    }
}

TEST(Converge, Deterministic)
{
    const auto c = parse_config(small_converge);
    EXPECT_EQ(convergence_csv(run_converge_sweep(c).rows), convergence_csv(run_converge_sweep(c).rows));
}

TEST(Converge, ParallelEqualsSerial)
{
    const auto serial = run_converge_sweep(parse_config(small_converge));
    const auto parallel = run_converge_sweep(parse_config(std::string(small_converge) + "jobs = 3\n"));
    EXPECT_EQ(convergence_csv(serial.rows), convergence_csv(parallel.rows));
}

TEST(Converge, Errors)
{
    // nonzero mean in d = 1
    EXPECT_THROW(run_converge_sweep(parse_config("f = bump:c=0,a=1\nL = 4\nh = 0.25\n")), HypothesisError);
    // support wider than the smallest box
    EXPECT_THROW(run_converge_sweep(parse_config("f = dipole:c=0,s=1.5,a=0.75\nL = 4;8\nh = 0.25\n")), ConfigError);
    EXPECT_THROW(run_converge_sweep(parse_config("L = 4\nh = 0.25\n")), ConfigError);
}

TEST(Converge, LanczosCrossCheckRecorded)
{
    const auto r = run_converge_sweep(parse_config(std::string(small_converge) + "cross_check = true\n"));
    for (double d : r.lanczos_difference) EXPECT_LE(d, 1e-8);
}

TEST(Srs, ZeroSourceGivesZero)
{
    const auto r = run_srs_sweep(parse_config("experiment = srs\nfamily = affine:a=0,b=1\nu = zero\nL = 4;8\nh = 0.125\n"));
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.error, 0.0);
        EXPECT_EQ(row.error_empty, 0.0);
    }
}

TEST(Srs, ErrorDecreasesWithBox)
{
    const auto r = run_srs_sweep(
        parse_config("experiment = srs\nfamily = affine:a=0,b=1\nu = bump:c=0.5,a=1\nL = 4;8;16\nh = 0.0625\n"
                     "spectrum = spectral\nzero_wall_time = true\n"));
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        EXPECT_LT(r.rows[i].error, r.rows[i - 1].error);
        EXPECT_TRUE(r.rows[i].decreasing);
    }
    EXPECT_EQ(srs_csv(r.rows).substr(0, 44), "L,N,h,error,error_empty,decreasing,wall_time");
}

TEST(Verify, DefaultSuitePasses)
{
    const auto r = run_verify_suite(parse_config(default_config_text(ExperimentKind::verify)));
    EXPECT_TRUE(r.pass());
    EXPECT_GE(r.checks.size(), 9u);
}

TEST(Verify, EmptyFamilySuitePasses)
{
    const auto r = run_verify_suite(parse_config("experiment = verify\nL = 4\nh = 0.015625\n"));
    EXPECT_TRUE(r.pass());
    for (const auto& c : r.checks) {
        for (const auto& e : c.entries) {
            if (e.bound == Bound::upper && c.name != "quadratic_form") EXPECT_LE(e.value, 1e-13) << c.name << " " << e.name;
        }
    }
}

TEST(Emit, GitBlobHash)
{
    // git hash-object of an empty file and of "hello\n"
    EXPECT_EQ(git_blob_sha1(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    EXPECT_EQ(git_blob_sha1("hello\n"), "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST(Emit, FilesAreReproducible)
{
    const fs::path a = scratch("emit_a");
    const fs::path b = scratch("emit_b");
    const auto c = parse_config(std::string(small_converge) + "richardson = true\n");
    emit_outputs(run_converge_sweep(c), a);
    emit_outputs(run_converge_sweep(c), b);
    for (const char* name : {"sweep.csv", "sweep.h0.csv", "sweep.h1.csv", "summary.json", "sweep.svg"}) {
        EXPECT_TRUE(fs::exists(a / name)) << name;
        EXPECT_EQ(read_file(a / name), read_file(b / name)) << name;
    }
    const auto j = nlohmann::json::parse(read_file(a / "summary.json"));
    EXPECT_EQ(j["input_hash"], git_blob_sha1(c.source_text));
    EXPECT_EQ(j["config"]["h"], "0.125");
    EXPECT_TRUE(j.contains("pass"));
    EXPECT_FALSE(fs::exists(a / "sweep.csv.tmp"));
}

TEST(Emit, SvgHasOnePolylinePerSeries)
{
    const std::string svg =
        svg_loglog({{"a", {1, 2, 4}, {1, 0.5, 0.25}}, {"b", {1, 2, 4}, {2, 1, 0.1}}}, "L", "err");
    std::size_t count = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++count;
    EXPECT_EQ(count, 2u);
    EXPECT_EQ(svg.find("http://www.w3.org/2000/svg") != std::string::npos, true);
    EXPECT_EQ(svg.find("href"), std::string::npos);
}

TEST(Emit, WriteFailureNamesPath)
{
    const fs::path blocker = scratch("blocker") / "file";
    std::ofstream(blocker) << "x";
    try {
        write_atomic(blocker / "sub" / "out.csv", "data");
        FAIL();
    } catch (const std::runtime_error& e) {
        EXPECT_NE(std::string(e.what()).find(blocker.string()), std::string::npos);
    }
}
