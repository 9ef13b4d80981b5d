#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "subharmonic/cli.hpp"

using namespace subharmonic;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "subharmonic");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
#ifdef SUBHARMONIC_TEST_TMP
    fs::path dir = SUBHARMONIC_TEST_TMP;
#else
    fs::path dir = fs::temp_directory_path() / "subharmonic_cli_test";
#endif
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("squeezing at threshold") {
    const auto r = run_cli({"squeezing", "--kappa", "0.8", "--epsilon", "0.4"});
    REQUIRE(r.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "squeezing");
    CHECK(j["params"]["regime"] == "at_threshold");
    CHECK(j["results"]["s_global"].get<double>() == Approx(0.5).epsilon(1e-12));
    CHECK(j["results"]["s_out"].get<double>() == Approx(0.4).epsilon(1e-12));
    CHECK(j["results"]["var_minus"].is_null());
    CHECK(j["results"]["vacuum_level"].get<double>() == 2.0);
}

TEST_CASE("local squeezing command") {
    const auto r = run_cli({"local-squeezing", "--kappa", "0.8", "--epsilon", "0.4", "--half-width", "0.05"});
    REQUIRE(r.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(std::abs(j["results"]["s_local"].get<double>() - 0.749) <= 1e-3);
    CHECK(j["results"]["s_global_reference"].get<double>() == Approx(0.5));

    const auto zero = run_cli({"local-squeezing", "--kappa", "0.8", "--epsilon", "0.4", "--half-width", "0"});
    CHECK(zero.code == cli::kExitUsage);
    CHECK(run_cli({"local-squeezing", "--kappa", "0.8", "--epsilon", "0.4"}).code == cli::kExitUsage);
}

TEST_CASE("moments command") {
    const auto vac = run_cli({"moments", "--kappa", "1", "--epsilon", "0"});
    REQUIRE(vac.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(vac.out);
    CHECK(j["results"]["n1"].get<double>() == 0.0);
    CHECK(j["results"]["mean_photon_number"].get<double>() == 0.0);
    CHECK(j["results"]["fano"].is_null());

    const auto r = run_cli({"moments", "--kappa", "1", "--epsilon", "0.2", "--format", "csv"});
    REQUIRE(r.code == cli::kExitOk);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "n1,n2,cross,mean_photon_number,photon_number_variance,fano,conventional_mean_photon_number");
    CHECK(ls[1].rfind("0.0952380952,0.0952380952,-0.238095238,0.19047619,", 0) == 0);
}

TEST_CASE("regime errors exit with status 3 and report the margin") {
    const auto r = run_cli({"moments", "--kappa", "1", "--epsilon", "0.6"});
    CHECK(r.code == cli::kExitRegime);
    CHECK(r.err.find("-0.2") != std::string::npos);
    CHECK(r.err.find("above_threshold") != std::string::npos);
    CHECK(r.out.empty());
    CHECK(run_cli({"photon-dist", "--kappa", "0.8", "--epsilon", "0.4"}).code == cli::kExitRegime);
}

TEST_CASE("usage errors exit with status 2") {
    CHECK(run_cli({}).code == cli::kExitUsage);
    CHECK(run_cli({"frobnicate", "--kappa", "1"}).code == cli::kExitUsage);
    CHECK(run_cli({"moments", "--epsilon", "0.1"}).code == cli::kExitUsage);
    CHECK(run_cli({"moments", "--kappa", "1", "--epsilon", "0.1", "--mu", "1", "--g", "1"}).code == cli::kExitUsage);
    CHECK(run_cli({"moments", "--kappa", "-1", "--epsilon", "0.1"}).code == cli::kExitUsage);
    CHECK(run_cli({"moments", "--kappa", "1", "--epsilon", "0.1", "--format", "xml"}).code == cli::kExitUsage);
    CHECK(run_cli({"sweep", "--kappa", "1"}).code == cli::kExitUsage);
    CHECK(run_cli({"moments", "spectrum", "--kappa", "1", "--epsilon", "0.1"}).code == cli::kExitUsage);
    CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("pump command derives epsilon from mu and g") {
    const auto r = run_cli({"pump", "--kappa", "1", "--mu", "1", "--g", "0.1"});
    REQUIRE(r.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["params"]["epsilon"].get<double>() == Approx(0.2));
    CHECK(j["results"]["pump_mean_photon_number"].get<double>() == Approx(4.0 - 2.0 / 21.0).epsilon(1e-12));
    CHECK(j["results"]["depletion_warning"] == false);

    const auto dep = run_cli({"pump", "--kappa", "1", "--mu", "0.1", "--g", "2"});
    REQUIRE(dep.code == cli::kExitOk);
    CHECK(nlohmann::json::parse(dep.out)["results"]["depletion_warning"] == true);
    CHECK(run_cli({"pump", "--kappa", "1", "--epsilon", "0.2"}).code == cli::kExitUsage);
}

TEST_CASE("photon-dist command") {
    const auto r = run_cli({"photon-dist", "--kappa", "1", "--epsilon", "0.2", "--max-n", "3", "--format", "csv"});
    REQUIRE(r.code == cli::kExitOk);
    const auto ls = lines_of(r.out);
    REQUIRE(ls.size() == 17);
    CHECK(ls[0] == "m,n,probability");
    CHECK(ls[1] == "0,0,0.875");

    const auto j = nlohmann::json::parse(run_cli({"photon-dist", "--kappa", "1", "--epsilon", "0.2"}).out);
    const unsigned n = j["results"]["cutoff"].get<unsigned>();
    CHECK(j["results"]["probabilities"].size() == n + 1);
    CHECK(j["results"]["diagonal"][1].get<double>() == Approx(0.0394965277777778).epsilon(1e-12));
}

TEST_CASE("spectrum command") {
    const auto r = run_cli({"spectrum", "--kappa", "0.8", "--epsilon", "0.4", "--offset", "0.8"});
    REQUIRE(r.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["results"]["spectral_density"].get<double>() == Approx(0.198943678864869).epsilon(1e-12));
}

TEST_CASE("local-squeezing sweep CSV") {
    const fs::path file = scratch_dir() / "sweep.csv";
    fs::remove(file);
    const auto r = run_cli({"sweep", "local-squeezing", "--kappa", "0.8", "--epsilon", "0.4", "--format", "csv",
                            "--output", file.string()});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.empty());
    const std::string text = slurp(file);
    CHECK(text.find('\r') == std::string::npos);
    const auto ls = lines_of(text);
    REQUIRE(ls.size() == 201);
    CHECK(ls[0] == "half_width,s_local,s_global_reference");
    CHECK(ls[1].rfind("0.05,", 0) == 0);
    CHECK(ls[200].rfind("10,", 0) == 0);
    double prev = 1.0;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto c1 = ls[i].find(',');
        const auto c2 = ls[i].find(',', c1 + 1);
        const double s = std::stod(ls[i].substr(c1 + 1, c2 - c1 - 1));
        CHECK(s <= prev);
        CHECK(ls[i].substr(c2 + 1) == "0.5");
        prev = s;
    }

    const fs::path again = scratch_dir() / "sweep_again.csv";
    run_cli({"sweep", "local-squeezing", "--kappa", "0.8", "--epsilon", "0.4", "--format", "csv", "--output",
             again.string()});
    CHECK(slurp(again) == text);
}

TEST_CASE("other sweeps") {
    const auto sq = run_cli({"sweep", "squeezing", "--kappa", "1", "--format", "csv"});
    REQUIRE(sq.code == cli::kExitOk);
    CHECK(lines_of(sq.out).size() == 52);
    const auto mo = run_cli({"sweep", "moments", "--kappa", "1", "--points", "5", "--format", "csv"});
    REQUIRE(mo.code == cli::kExitOk);
    CHECK(lines_of(mo.out).size() == 6);
    const auto sp = run_cli({"sweep", "spectrum", "--kappa", "1", "--epsilon", "0.2"});
    REQUIRE(sp.code == cli::kExitOk);
    CHECK(nlohmann::json::parse(sp.out)["results"]["rows"].size() == 201);
    CHECK(run_cli({"sweep", "moments", "--kappa", "1", "--stop", "0.6"}).code == cli::kExitRegime);
    CHECK(run_cli({"sweep", "pump", "--kappa", "1"}).code == cli::kExitUsage);
    CHECK(run_cli({"sweep", "local-squeezing", "--kappa", "1", "--epsilon", "0.2", "--start", "0"}).code ==
          cli::kExitUsage);
}

TEST_CASE("JSON keys are sorted") {
    const auto r = run_cli({"squeezing", "--kappa", "0.8", "--epsilon", "0.4"});
    const auto pos = [&](const char* key) { return r.out.find(std::string("\"") + key + "\""); };
    CHECK(pos("command") < pos("params"));
    CHECK(pos("params") < pos("results"));
    CHECK(pos("s_global") < pos("s_out"));
    CHECK(pos("var_minus") < pos("var_plus"));
}

TEST_CASE("config file values are overridden by flags") {
    const fs::path cfg = scratch_dir() / "run.ini";
    {
        std::ofstream f(cfg);
        f << "kappa = 0.8\nepsilon = 0.1\nformat = json\n";
    }
    const auto from_file = run_cli({"squeezing", "--config", cfg.string()});
    REQUIRE(from_file.code == cli::kExitOk);
    CHECK(nlohmann::json::parse(from_file.out)["params"]["epsilon"].get<double>() == Approx(0.1));
    const auto overridden = run_cli({"squeezing", "--config", cfg.string(), "--epsilon", "0.4"});
    REQUIRE(overridden.code == cli::kExitOk);
    CHECK(nlohmann::json::parse(overridden.out)["results"]["s_global"].get<double>() == Approx(0.5));
}

TEST_CASE("relative output paths honor the output directory variable") {
    const fs::path dir = scratch_dir() / "envdir";
    fs::remove_all(dir);
    ::setenv(cli::kOutputDirEnv, dir.string().c_str(), 1);
    const auto r = run_cli({"moments", "--kappa", "1", "--epsilon", "0.2", "--output", "nested/m.json"});
    ::unsetenv(cli::kOutputDirEnv);
    REQUIRE(r.code == cli::kExitOk);
    REQUIRE(fs::exists(dir / "nested" / "m.json"));
    CHECK(nlohmann::json::parse(slurp(dir / "nested" / "m.json"))["command"] == "moments");
}

TEST_CASE("verify command") {
    const auto ok = run_cli({"verify", "--skip-fock", "--samples", "200000"});
    CHECK(ok.code == cli::kExitOk);
    const auto j = nlohmann::json::parse(ok.out);
    CHECK(j["results"]["passed"] == true);
    CHECK(j["results"]["failures"] == 0);
    for (const auto& c : j["results"]["checks"]) CHECK(c["name"].get<std::string>().find("fock") == std::string::npos);

    // One sample cannot resolve the antinormal moments.
    const auto bad = run_cli({"verify", "--skip-fock", "--samples", "1", "--format", "csv"});
    CHECK(bad.code == cli::kExitVerifyFailed);
    CHECK(bad.out.find("\"q_sampler.mean_abs1_sq\"") != std::string::npos);
    CHECK(bad.out.find(",false") != std::string::npos);
}
