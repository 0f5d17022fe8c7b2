#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kscat/driver.hpp"
#include "kscat/errors.hpp"

using namespace kscat;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

} // namespace

TEST_CASE("defaults: empty config runs abstract-check") {
    RunConfig c = RunConfig::parse({});
    CHECK(c.mode == RunMode::abstract_check);
    CHECK(c.shape == "sphere");
    CHECK(c.level == 3);
    CHECK(c.lambda == -1.0);
    CHECK(c.n_polar == 8);
    CHECK(c.potential.empty());
    CHECK(c.model.is_none());
}

TEST_CASE("config parsing and validation errors") {
    CHECK_THROWS_AS((void)RunConfig::parse({{"bogus.key", "1"}}), ConfigError);
    CHECK_THROWS_AS((void)RunConfig::parse({{"geometry.level", "9"}}), ConfigError);
    CHECK_THROWS_AS((void)RunConfig::parse({{"geometry.level", "abc"}}), ConfigError);
    CHECK_THROWS_AS((void)RunConfig::parse({{"energy.lambda", "0.5"}}), ConfigError);
    CHECK_THROWS_AS((void)RunConfig::parse({{"mode", "banana"}}), ConfigError);
    CHECK_THROWS_AS((void)RunConfig::parse({{"convergence.levels", "1,2,2"}}), ConfigError);
    CHECK_THROWS_AS((void)RunConfig::parse({{"model.kind", "robin"}}), ConfigError);
    CHECK_THROWS_AS((void)RunConfig::parse({{"potential.kind", "well"}}), ConfigError);

    RunConfig c = RunConfig::parse({{"mode", "smatrix"},
                                    {"model.kind", "delta"},
                                    {"model.alpha", "2.5"},
                                    {"potential.kind", "gaussian"},
                                    {"potential.depth", "0.5"},
                                    {"potential.sigma", "0.4"},
                                    {"energy.lambda", "-2.0"}});
    CHECK(c.mode == RunMode::smatrix);
    CHECK(c.model.variant == InterfaceModel::Variant::delta);
    CHECK(c.model.strength == 2.5);
    CHECK(c.potential.depth == 0.5);
    CHECK(c.potential.support_radius == doctest::Approx(1.2)); // 3 sigma default
    CHECK(c.lambda == -2.0);
}

TEST_CASE("key=value file reader") {
    const std::string path = "test_cli_config.cfg";
    {
        std::ofstream out(path);
        out << "# comment\nmode = smatrix\n\ngeometry.level = 2 # trailing\n";
    }
    auto kv = RunConfig::read_kv_file(path);
    CHECK(kv.at("mode") == "smatrix");
    CHECK(kv.at("geometry.level") == "2");
    RunConfig c = RunConfig::parse(kv);
    CHECK(c.level == 2);
    std::remove(path.c_str());
}

TEST_CASE("abstract-check run: residual table, exit 0, deterministic summary") {
    RunConfig c;
    c.mode = RunMode::abstract_check;
    c.seed = 7;
    c.n_systems = 100;
    c.out_dir = "test_cli_out_abstract";
    RunResult r1 = run(c);
    CHECK(r1.exit_code == 0);
    CHECK(r1.message.find("PASS") != std::string::npos);

    const std::string s1 = slurp(c.out_dir + "/summary.json");
    CHECK(s1 == r1.summary_json);
    CHECK(s1.find("\"worst_residual\"") != std::string::npos);
    CHECK(s1.find("\"format_version\": \"1\"") != std::string::npos);

    // residuals all below 1e-9 for this seed
    RunResult r2 = run(c);
    CHECK(slurp(c.out_dir + "/summary.json") == s1); // bitwise identical rerun
    CHECK(r2.summary_json == r1.summary_json);

    std::filesystem::remove_all(c.out_dir);
}

TEST_CASE("smatrix run writes csv artifacts and defect summary") {
    RunConfig c = RunConfig::parse({{"mode", "smatrix"},
                                    {"model.kind", "dirichlet"},
                                    {"geometry.level", "1"},
                                    {"directions.n_polar", "3"},
                                    {"energy.lambda", "-1.0"}});
    c.out_dir = "test_cli_out_smatrix";
    RunResult r = run(c);
    CHECK(r.exit_code == 0);
    const std::string csv = slurp(c.out_dir + "/smatrix.csv");
    CHECK(csv.rfind("i,j,re,im", 0) == 0);
    CHECK(std::filesystem::exists(c.out_dir + "/directions.csv"));
    CHECK(std::filesystem::exists(c.out_dir + "/timing.txt"));
    const std::string sj = slurp(c.out_dir + "/summary.json");
    CHECK(sj.find("\"unitarity_defect\"") != std::string::npos);
    CHECK(sj.find("\"reciprocity_defect\"") != std::string::npos);
    CHECK(sj.find("\"convention\"") != std::string::npos);
    CHECK(sj.find("\"phase_shifts\"") != std::string::npos);
    CHECK(sj.find("wall_clock") == std::string::npos); // timing kept out of the summary
    std::filesystem::remove_all(c.out_dir);
}

TEST_CASE("oracle-compare run emits the side-by-side table") {
    RunConfig c = RunConfig::parse({{"mode", "oracle-compare"},
                                    {"model.kind", "dirichlet"},
                                    {"geometry.level", "1"},
                                    {"directions.n_polar", "4"},
                                    {"oracle.ell_max", "2"}});
    c.out_dir = "test_cli_out_oracle";
    RunResult r = run(c);
    CHECK(r.exit_code == 0);
    const std::string csv = slurp(c.out_dir + "/oracle_compare.csv");
    CHECK(csv.rfind("l,re_bem,im_bem,re_oracle,im_oracle,abs_err", 0) == 0);
    std::filesystem::remove_all(c.out_dir);
}

TEST_CASE("cross-section run emits the amplitude table") {
    RunConfig c = RunConfig::parse({{"mode", "cross-section"},
                                    {"model.kind", "dirichlet"},
                                    {"geometry.level", "1"},
                                    {"directions.n_polar", "3"}});
    c.out_dir = "test_cli_out_xsec";
    RunResult r = run(c);
    CHECK(r.exit_code == 0);
    const std::string csv = slurp(c.out_dir + "/amplitude.csv");
    CHECK(csv.rfind("i,j,costheta,re_f,im_f,dsigma", 0) == 0);
    const std::string sj = slurp(c.out_dir + "/summary.json");
    CHECK(sj.find("\"sigma_total_integrated\"") != std::string::npos);
    CHECK(sj.find("\"sigma_total_optical\"") != std::string::npos);
    std::filesystem::remove_all(c.out_dir);
}

TEST_CASE("convergence run fits observed orders") {
    RunConfig c = RunConfig::parse({{"mode", "convergence"}, {"convergence.levels", "1,2,3"}});
    c.out_dir = "test_cli_out_conv";
    RunResult r = run(c);
    CHECK(r.exit_code == 0);
    CHECK(std::filesystem::exists(c.out_dir + "/convergence.csv"));
    const std::string sj = slurp(c.out_dir + "/summary.json");
    CHECK(sj.find("\"observed_orders\"") != std::string::npos);
    std::filesystem::remove_all(c.out_dir);

    RunConfig bad = c;
    bad.levels = {1, 2};
    CHECK_THROWS_AS((void)run(bad), ConfigError);
}

TEST_CASE("convergence orders meet the observable-rate floors") {
    RunConfig c = RunConfig::parse({{"mode", "convergence"},
                                    {"model.kind", "dirichlet"},
                                    {"convergence.levels", "1,2,3"},
                                    {"directions.n_polar", "4"},
                                    {"oracle.ell_max", "0"}});
    c.out_dir = "test_cli_out_conv_orders";
    RunResult r = run(c);
    CHECK(r.exit_code == 0);
    const std::string sj = slurp(c.out_dir + "/summary.json");
    // crude numeric pulls from the summary
    auto value_of = [&](const std::string& key) {
        auto pos = sj.find("\"" + key + "\"");
        REQUIRE(pos != std::string::npos);
        pos = sj.find(':', pos);
        return std::stod(sj.substr(pos + 1));
    };
    CHECK(value_of("jump_sl_gamma1") >= 0.9);
    CHECK(value_of("s0_error") >= 1.0);
    std::filesystem::remove_all(c.out_dir);
}

TEST_CASE("numerical failure at the requested lambda exits nonzero") {
    RunConfig c = RunConfig::parse({{"mode", "smatrix"},
                                    {"geometry.level", "1"},
                                    {"directions.n_polar", "3"},
                                    {"potential.kind", "gaussian"},
                                    {"potential.depth", "0.5"},
                                    {"numerics.h_vol", "0.35"},
                                    {"numerics.cond_limit", "1.5"}});
    c.out_dir = "test_cli_out_fail";
    RunResult r = run(c);
    CHECK(r.exit_code == 2);
    CHECK(slurp(c.out_dir + "/summary.json").find("\"error\"") != std::string::npos);
    std::filesystem::remove_all(c.out_dir);
}

TEST_CASE("table potential through the configuration") {
    const std::string tpath = "test_cli_table.txt";
    {
        std::ofstream out(tpath);
        out << "0.0 0.4\n0.5 0.2\n1.0 0.0\n";
    }
    RunConfig c = RunConfig::parse({{"potential.kind", "table"},
                                    {"potential.file", tpath},
                                    {"potential.support_radius", "1.0"}});
    CHECK(c.potential.radial_value(0.25) == doctest::Approx(0.3));
    CHECK_THROWS_AS((void)RunConfig::parse({{"potential.kind", "table"}}), ConfigError);
    std::remove(tpath.c_str());
}
