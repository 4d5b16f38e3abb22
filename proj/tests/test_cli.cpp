#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "lqd/analytics.hpp"
#include "lqd/cli.hpp"

using namespace lqd::cli;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("lqd_cli_test_" + name);
}

int call_main(std::vector<std::string> args) {
    std::vector<char*> argv;
    args.insert(args.begin(), "lqdistill");
    for (auto& a : args) argv.push_back(a.data());
    return main_entry(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("doubles are serialized with 17 significant digits") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(1.0 / 3.0) == "0.33333333333333331");
    CHECK(format_double(16.0 / 17.0).size() >= 17);
}

TEST_CASE("grid parsing") {
    const GridSpec g = parse_grid("0.5:1.0:0.1");
    CHECK(g.start == doctest::Approx(0.5));
    CHECK(g.stop == doctest::Approx(1.0));
    CHECK(g.step == doctest::Approx(0.1));
    CHECK_THROWS_AS(parse_grid("0.5:1.0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("nonsense"), std::invalid_argument);
}

TEST_CASE("sweep writes the pinned header, ascending rows, and identical bytes") {
    RunConfig config;
    config.command = "sweep";
    config.kind = "logic-bit";
    config.grid = GridSpec{0.5, 1.0, 0.1};

    const fs::path first = temp_file("sweep_a.csv");
    const fs::path second = temp_file("sweep_b.csv");
    config.output = first.string();
    REQUIRE(run(config) == kExitOk);
    config.output = second.string();
    REQUIRE(run(config) == kExitOk);

    const std::string bytes = read_file(first);
    CHECK(bytes == read_file(second));
    CHECK(bytes.rfind("F_in,F_out,p_success,kind,policy,m,mode\n", 0) == 0);
    CHECK(std::count(bytes.begin(), bytes.end(), '\n') == 7);  // header + 6 rows
    CHECK(bytes.find("\r") == std::string::npos);

    // Rows ascend in F and F_out matches the map at spot-check points.
    CHECK(bytes.find(",logic-bit,canonical,2,exact\n") != std::string::npos);
    {
        std::istringstream rows(bytes);
        std::string line;
        std::getline(rows, line);  // header
        double previous = -1.0;
        while (std::getline(rows, line)) {
            std::istringstream row(line);
            std::string f_in, f_out;
            std::getline(row, f_in, ',');
            std::getline(row, f_out, ',');
            const double F = std::stod(f_in);
            CHECK(F > previous);
            previous = F;
            CHECK(std::stod(f_out) == doctest::Approx(lqd::fidelity_map(F)).epsilon(1e-10));
        }
    }

    fs::remove(first);
    fs::remove(second);
}

TEST_CASE("monte carlo sweeps differ across seeds but stay statistically close") {
    RunConfig config;
    config.command = "sweep";
    config.grid = GridSpec{0.7, 0.7, 1.0};
    config.mode = "montecarlo";
    config.trials = 20000;

    const fs::path a = temp_file("sweep_mc1.csv");
    const fs::path b = temp_file("sweep_mc2.csv");
    config.seed = 1;
    config.output = a.string();
    REQUIRE(run(config) == kExitOk);
    config.seed = 2;
    config.output = b.string();
    REQUIRE(run(config) == kExitOk);
    const std::string bytes_a = read_file(a);
    const std::string bytes_b = read_file(b);
    CHECK(bytes_a != bytes_b);

    // Both runs land near the exact acceptance probability 0.0725.
    auto parse_p = [](const std::string& bytes) {
        const std::size_t header = bytes.find('\n');
        std::istringstream row(bytes.substr(header + 1));
        std::string field;
        std::getline(row, field, ',');  // F_in
        std::getline(row, field, ',');  // F_out
        std::getline(row, field, ',');  // p_success
        return std::stod(field);
    };
    CHECK(std::abs(parse_p(bytes_a) - 0.0725) < 0.01);
    CHECK(std::abs(parse_p(bytes_b) - 0.0725) < 0.01);
    fs::remove(a);
    fs::remove(b);
}

TEST_CASE("distill json record schema and values") {
    const fs::path out = temp_file("distill.json");
    REQUIRE(call_main({"distill", "--kind", "logic-bit", "--m", "2", "--F", "0.8", "--policy",
                       "canonical", "--mode", "exact", "--output", out.string()}) == kExitOk);
    const std::string bytes = read_file(out);

    // Keys appear in the pinned order.
    const std::vector<std::string> keys{"F_in",            "F_out_exact", "F_out_formula",
                                        "p_success_exact", "p_success_formula",
                                        "policy",          "m",           "kind",
                                        "mode",            "trials",      "seed"};
    std::size_t last = 0;
    for (const auto& key : keys) {
        const std::size_t at = bytes.find("\"" + key + "\"");
        REQUIRE(at != std::string::npos);
        CHECK(at > last);
        last = at;
    }

    const nlohmann::json parsed = nlohmann::json::parse(bytes);
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == 1);
    CHECK(parsed[0]["F_out_exact"].get<double>() == doctest::Approx(16.0 / 17.0).epsilon(1e-12));
    CHECK(parsed[0]["F_out_formula"].get<double>() == doctest::Approx(16.0 / 17.0).epsilon(1e-12));
    CHECK(parsed[0]["p_success_exact"].get<double>() == doctest::Approx(0.085).epsilon(1e-12));
    CHECK(parsed[0]["kind"] == "logic-bit");
    fs::remove(out);
}

TEST_CASE("distill runs the physical-bit correction") {
    const fs::path out = temp_file("distill_pb.json");
    REQUIRE(call_main({"distill", "--kind", "physical-bit", "--m", "3", "--F", "0.6", "--strategy",
                       "localize", "--output", out.string()}) == kExitOk);
    const nlohmann::json parsed = nlohmann::json::parse(read_file(out));
    CHECK(parsed[0]["F_out_exact"].get<double>() == doctest::Approx(1.0));
    CHECK(parsed[0]["p_success_exact"].get<double>() == doctest::Approx(1.0));
    fs::remove(out);
}

TEST_CASE("config validation failures exit with code 2") {
    CHECK(call_main({"distill", "--kind", "logic-bit", "--F", "1.2"}) == kExitConfig);
    CHECK(call_main({"distill", "--kind", "nonsense", "--F", "0.8"}) == kExitConfig);
    CHECK(call_main({"distill", "--kind", "logic-bit", "--F", "0.8", "--mode", "montecarlo"}) ==
          kExitConfig);  // missing seed
    CHECK(call_main({"distill", "--kind", "physical-bit", "--F", "0.8", "--mode", "montecarlo",
                     "--seed", "1"}) == kExitConfig);
    CHECK(call_main({"distill", "--kind", "logic-phase", "--F", "0.8", "--policy", "extended"}) ==
          kExitConfig);
    CHECK(call_main({"distill", "--kind", "logic-bit", "--m", "3", "--F", "0.8", "--policy",
                     "extended"}) == kExitConfig);
    CHECK(call_main({"sweep", "--kind", "logic-bit"}) == kExitConfig);  // no grid
    CHECK(call_main({"distill", "--kind", "logic-bit", "--F", "0.8", "--grid", "bad"}) ==
          kExitConfig);
    CHECK(call_main({"state", "--name", "nonsense"}) == kExitConfig);
}

TEST_CASE("iterate emits the trace and rejects non-improving starts") {
    const fs::path out = temp_file("iterate.json");
    REQUIRE(call_main({"iterate", "--F0", "0.6", "--rounds", "3", "--verify-exact", "--output",
                       out.string()}) == kExitOk);
    const nlohmann::json parsed = nlohmann::json::parse(read_file(out));
    REQUIRE(parsed["f_sequence"].size() == 4);
    CHECK(parsed["f_sequence"][1].get<double>() == doctest::Approx(9.0 / 13.0).epsilon(1e-14));
    CHECK(parsed["f_sequence"][2].get<double>() == doctest::Approx(81.0 / 97.0).epsilon(1e-14));
    CHECK(parsed["f_sequence"][3].get<double>() == doctest::Approx(6561.0 / 6817.0).epsilon(1e-14));
    CHECK(parsed["verified"].get<bool>());
    CHECK(parsed["expected_yield"].get<double>() > 0.0);

    CHECK(call_main({"iterate", "--F0", "0.5", "--rounds", "2"}) == kExitConfig);
    CHECK(call_main({"iterate", "--F0", "0.6", "--rounds", "0"}) == kExitConfig);
    fs::remove(out);
}

TEST_CASE("state subcommand prints canonical states") {
    const fs::path out = temp_file("state.txt");
    REQUIRE(call_main({"state", "--name", "logic-phi+", "--m", "2", "--output", out.string()}) ==
            kExitOk);
    const std::string bytes = read_file(out);
    CHECK(bytes.find("modes: a1 a2 b1 b2") != std::string::npos);
    CHECK(bytes.find("|HHHH>") != std::string::npos);
    CHECK(bytes.find("|VVVV>") != std::string::npos);
    fs::remove(out);
}

TEST_CASE("config file values are overridden by explicit flags") {
    const fs::path cfg = temp_file("config.json");
    {
        std::ofstream out(cfg);
        out << R"({"kind": "logic-bit", "m": 2, "F": 0.6, "policy": "canonical"})";
    }
    const fs::path out = temp_file("override.json");
    REQUIRE(call_main({"distill", "--config", cfg.string(), "--F", "0.8", "--output",
                       out.string()}) == kExitOk);
    const nlohmann::json parsed = nlohmann::json::parse(read_file(out));
    CHECK(parsed[0]["F_in"].get<double>() == doctest::Approx(0.8));
    fs::remove(cfg);
    fs::remove(out);
}

TEST_CASE("relative outputs honor the output directory override") {
    CHECK(resolve_output_path("/abs/path.csv") == "/abs/path.csv");
    ::setenv("LQDISTILL_OUTPUT_DIR", "/tmp/lqd_outdir", 1);
    CHECK(resolve_output_path("result.csv") == "/tmp/lqd_outdir/result.csv");
    ::unsetenv("LQDISTILL_OUTPUT_DIR");
    CHECK(resolve_output_path("result.csv") == "result.csv");
}
