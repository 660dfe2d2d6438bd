// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include <lis/gram.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace
{

struct CliResult
{
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path &p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

CliResult run_cli(const std::string &args)
{
    static int counter = 0;
    fs::create_directories("cli_tmp");
    fs::path out = "cli_tmp/stdout" + std::to_string(counter) + ".txt";
    fs::path err = "cli_tmp/stderr" + std::to_string(counter) + ".txt";
    ++counter;

    std::string cmd = std::string(LISCAP_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    int status = std::system(cmd.c_str());

    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

} // namespace

TEST_CASE("dims reports the planar dimension density", "[cli]")
{
    auto r = run_cli("dims --lambda 0.4 --geometry plane");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["command"] == "dims");
    CHECK(j["config"]["lambda"] == 0.4);
    CHECK(std::abs(j["results"]["dims_per_square_meter"].get<double>() - 19.635) < 1e-3);

    auto rl = run_cli("dims --lambda 0.4 --geometry line --theta 0.5");
    REQUIRE(rl.exit_code == 0);
    auto jl = json::parse(rl.out);
    CHECK(jl["results"]["dims_per_meter"].get<double>() == 2.5);
}

TEST_CASE("capacity-1d single point matches the closed forms", "[cli]")
{
    auto r = run_cli("capacity-1d --lambda 0.4 --delta-x 0.2 --nu 0.5 --n0 0.05 --pbar 40");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["results"]["theta"].get<double>() == 1.0);
    CHECK(j["results"]["alpha"].get<double>() == 0.0);
    // theta = 1 means the matched filter loses nothing
    CHECK(j["results"]["c_opt"].get<double>() == j["results"]["c_mf"].get<double>());
    CHECK(j["results"]["interference_power"].get<double>() == 0.0);
    double expected = std::log1p(40.0 * 0.2 * 0.5 / 0.05);
    CHECK(std::abs(j["results"]["c_opt"].get<double>() - expected) < 1e-12);
}

TEST_CASE("capacity-1d usage errors", "[cli]")
{
    CHECK(run_cli("capacity-1d --lambda 0.4").exit_code == 2);
    CHECK(run_cli("capacity-1d --lambda 0.4 --delta-x 0.2 --theta 1.0").exit_code == 2);
    CHECK(run_cli("capacity-1d --lambda 0.4 --delta-x 0.2 --p 1 --p-bar 2").exit_code == 2);
    CHECK(run_cli("nonsense-subcommand").exit_code == 2);
    CHECK(run_cli("capacity-1d --lambda 0.4 --delta-x 0.2 --nu 0.9").exit_code == 2);

    auto r = run_cli("capacity-1d --lambda 0.4 --delta-x 0.2 --theta 1.0");
    auto j = json::parse(r.err);
    CHECK(j["error"]["type"] == "usage");
    CHECK(j["error"].contains("message"));
}

TEST_CASE("config file merges under flags", "[cli]")
{
    fs::create_directories("cli_tmp");
    {
        std::ofstream os("cli_tmp/line.json");
        os << "{\"lambda\": 0.5, \"delta_x\": 0.25, \"nu\": 0.5, \"n0\": 1.0, \"p_bar\": 10.0}\n";
    }
    auto r = run_cli("capacity-1d --config cli_tmp/line.json");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["config"]["lambda"] == 0.5);
    CHECK(j["results"]["theta"].get<double>() == 1.0);

    // the flag wins over the file value
    auto r2 = run_cli("capacity-1d --config cli_tmp/line.json --lambda 0.4");
    REQUIRE(r2.exit_code == 0);
    auto j2 = json::parse(r2.out);
    CHECK(j2["config"]["lambda"] == 0.4);
    CHECK(j2["results"]["theta"].get<double>() == 0.8);

    {
        std::ofstream os("cli_tmp/bad.json");
        os << "{\"lambda\": 0.5, \"no_such_knob\": 1}\n";
    }
    CHECK(run_cli("capacity-1d --config cli_tmp/bad.json --delta-x 0.25").exit_code == 2);

    {
        std::ofstream os("cli_tmp/mangled.json");
        os << "{\"lambda\": \n";
    }
    CHECK(run_cli("capacity-1d --config cli_tmp/mangled.json --delta-x 0.25").exit_code == 2);

    CHECK(run_cli("capacity-1d --config cli_tmp/missing.json --delta-x 0.25").exit_code == 4);
}

TEST_CASE("capacity-1d sweep writes the contract CSV", "[cli]")
{
    auto r = run_cli("capacity-1d --lambda 0.4 --nu 0.5 --n0 1 --p-bar 10 "
                     "--sweep-theta 0.5:2.5:5 --out cli_tmp/sweep1d.csv");
    REQUIRE(r.exit_code == 0);
    std::string text = slurp("cli_tmp/sweep1d.csv");
    CHECK(text.rfind("theta,lambda,delta_x,c_opt,c_mf,c_bar_opt,c_bar_mf\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);

    // sweeping without a CSV destination is an error
    CHECK(run_cli("capacity-1d --lambda 0.4 --sweep-theta 0.5:2.5:5").exit_code == 2);
    CHECK(run_cli("capacity-1d --lambda 0.4 --sweep-theta 2.5:0.5:5 --out x.csv").exit_code == 2);
}

TEST_CASE("capacity-2d single point and sweep", "[cli]")
{
    auto r = run_cli("capacity-2d --lambda 0.4 --p-bar 10 --n0 1");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["results"].contains("c_bar_2d"));
    CHECK(std::abs(j["results"]["dims_per_square_meter"].get<double>() - 19.635) < 1e-3);

    auto rs = run_cli("capacity-2d --lambda 0.4 --n0 1 --snr-sweep 1:1000:7 --out cli_tmp/sweep2d.csv");
    REQUIRE(rs.exit_code == 0);
    std::string text = slurp("cli_tmp/sweep2d.csv");
    CHECK(text.rfind("lambda,p_bar_over_n0,c_bar_2d,slope\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 8);
}

TEST_CASE("sinc-audit emits its table and summary", "[cli]")
{
    auto r = run_cli("sinc-audit --z 2 --lambda 0.4 --dx-max 0.5 --points 51 --out cli_tmp/audit.csv");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["results"]["peak"] == 0.5);
    CHECK(j["results"]["nulls"].size() >= 2);
    CHECK(j["outputs"]["csv"] == "cli_tmp/audit.csv");
    std::string text = slurp("cli_tmp/audit.csv");
    CHECK(text.rfind("delta_x,numeric_value,sinc_value,abs_error\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 52);
}

TEST_CASE("budget exhaustion surfaces as exit 3", "[cli]")
{
    auto r = run_cli("sinc-audit --z 2 --lambda 0.4 --points 5 --rel-tol 1e-13 --panel-budget 8");
    CHECK(r.exit_code == 3);
    auto j = json::parse(r.err);
    CHECK(j["error"]["type"] == "budget");
}

TEST_CASE("unwritable output surfaces as exit 4", "[cli]")
{
    fs::create_directories("cli_tmp");
    { std::ofstream os("cli_tmp/plain.txt"); os << "x\n"; }
    auto r = run_cli("dims --lambda 0.4 --geometry plane"); // control: fine without output
    REQUIRE(r.exit_code == 0);
    auto bad = run_cli("sinc-audit --points 5 --dx-max 0.1 --out cli_tmp/plain.txt/sub/a.csv");
    CHECK(bad.exit_code == 4);
    auto j = json::parse(bad.err);
    CHECK(j["error"]["type"] == "io");
}

TEST_CASE("gram subcommand round-trips through the text format", "[cli]")
{
    fs::create_directories("cli_tmp");
    {
        std::ofstream os("cli_tmp/terminals.txt");
        os << "# x y z power\n";
        os << "0.0, 0.0, 1.0, 1.0\n";
        os << "0.1  0.0  1.0\n"; // power defaults to 1
        os << "0.0  0.1  1.0  2.0\n";
    }
    auto r = run_cli("gram --terminals cli_tmp/terminals.txt --lambda 0.4 --mode sinc-approx "
                     "--out cli_tmp/g.txt");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["results"]["k"] == 3);
    CHECK(j["results"]["effective_rank"].get<int>() >= 1);
    CHECK(j["results"]["max_eigenvalue"].get<double>() > 0.0);

    std::ifstream is("cli_tmp/g.txt");
    auto g = lis::read_gram_text(is);
    CHECK(g.size() == 3);
    CHECK(g.mode == lis::GramMode::SincApprox);
    CHECK(g.entries(2, 2).real() == 1.0); // P nu = 2.0 * 0.5

    CHECK(run_cli("gram --lambda 0.4").exit_code == 2); // --terminals is required
    {
        std::ofstream os("cli_tmp/badterm.txt");
        os << "0.0 0.0\n";
    }
    CHECK(run_cli("gram --terminals cli_tmp/badterm.txt --lambda 0.4").exit_code == 2);
}

TEST_CASE("simulate emits deterministic trials", "[cli]")
{
    std::string base = "simulate --geometry line --extent-x 2 --z0 1 --density 3 --lambda 0.4 "
                       "--n0 1 --power-mode per-volume --power 10 --gram-mode sinc-approx "
                       "--trials 5 --seed 3";
    auto r1 = run_cli(base + " --out cli_tmp/simA.csv");
    REQUIRE(r1.exit_code == 0);
    auto r2 = run_cli(base + " --out cli_tmp/simB.csv");
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp("cli_tmp/simA.csv") == slurp("cli_tmp/simB.csv"));

    // stdout echoes the --out path, so compare everything but that field
    auto j2 = json::parse(r2.out);
    j2.erase("outputs");

    auto j = json::parse(r1.out);
    json j1 = j;
    j1.erase("outputs");
    CHECK(j1.dump() == j2.dump());
    CHECK(j["config"]["seed"] == 3);
    CHECK(j["metrics"]["k"].contains("mean"));
    std::string text = slurp("cli_tmp/simA.csv");
    CHECK(text.rfind("trial,K,c_bar_opt,c_bar_mf,c_per_user_opt,c_per_user_mf,eff_rank\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}

TEST_CASE("preset runs a closed-form sweep", "[cli]")
{
    auto r = run_cli("preset fig4 --out-dir cli_tmp/fig4");
    REQUIRE(r.exit_code == 0);
    auto j = json::parse(r.out);
    CHECK(j["kind"] == "line-sweep");
    REQUIRE(j["outputs"].size() == 1);
    std::string csv = slurp(j["outputs"][0].get<std::string>());
    CHECK(csv.rfind("theta,lambda,delta_x,c_opt,c_mf,c_bar_opt,c_bar_mf\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') > 500);
}

TEST_CASE("preset monte-carlo accepts overrides and stays deterministic", "[cli]")
{
    std::string base = "preset fig8 --seed 5 --trials 3 --densities 1,2";
    auto r1 = run_cli(base + " --out-dir cli_tmp/mcA");
    REQUIRE(r1.exit_code == 0);
    auto r2 = run_cli(base + " --out-dir cli_tmp/mcB");
    REQUIRE(r2.exit_code == 0);

    auto j = json::parse(r1.out);
    CHECK(j["name"] == "fig8");
    CHECK(j["config"]["seed"] == 5);
    CHECK(j["config"]["trials"] == 3);
    REQUIRE(j["outputs"].size() == 3); // two trial files and a summary

    for (std::size_t i = 0; i < j["outputs"].size(); ++i)
    {
        auto ja = json::parse(r1.out), jb = json::parse(r2.out);
        fs::path a = ja["outputs"][i].get<std::string>();
        fs::path b = jb["outputs"][i].get<std::string>();
        CHECK(slurp(a) == slurp(b));
        CHECK(!slurp(a).empty());
    }
    std::string summary = slurp("cli_tmp/mcA/fig8_summary.csv");
    CHECK(summary.rfind("density,mean_k,", 0) == 0);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);

    CHECK(run_cli("preset fig99").exit_code == 2);
}
