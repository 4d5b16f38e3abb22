#include "lqd/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "lqd/analytics.hpp"
#include "lqd/channels.hpp"
#include "lqd/protocols.hpp"
#include "lqd/state.hpp"

namespace lqd::cli {

namespace {

ErrorKind::Type parse_kind(const std::string& kind) {
    if (kind == "logic-bit") return ErrorKind::Type::LogicBitFlip;
    if (kind == "logic-phase") return ErrorKind::Type::LogicPhaseFlip;
    if (kind == "physical-bit") return ErrorKind::Type::PhysicalBitFlip;
    throw std::invalid_argument("unknown kind '" + kind +
                                "' (expected logic-bit, logic-phase or physical-bit)");
}

PolicyKind parse_policy(const std::string& policy) {
    if (policy == "canonical") return PolicyKind::Canonical;
    if (policy == "extended") return PolicyKind::Extended;
    throw std::invalid_argument("unknown policy '" + policy +
                                "' (expected canonical or extended)");
}

void validate_common(const RunConfig& c) {
    if (c.m < 2) throw std::invalid_argument("m must be at least 2");
    if (c.mode != "exact" && c.mode != "montecarlo")
        throw std::invalid_argument("unknown mode '" + c.mode +
                                    "' (expected exact or montecarlo)");
    if (c.mode == "montecarlo") {
        if (!c.seed.has_value())
            throw std::invalid_argument("montecarlo mode requires --seed");
        if (c.trials < 1) throw std::invalid_argument("montecarlo mode requires trials >= 1");
    }
    if (c.format != "json" && c.format != "csv")
        throw std::invalid_argument("unknown format '" + c.format + "' (expected json or csv)");
}

std::vector<double> grid_points(const RunConfig& c) {
    std::vector<double> points;
    if (c.grid.has_value()) {
        const GridSpec& g = *c.grid;
        if (g.step <= 0.0) throw std::invalid_argument("grid step must be positive");
        if (g.stop < g.start) throw std::invalid_argument("grid stop must be >= start");
        for (double F = g.start; F <= g.stop + 1e-12; F += g.step) points.push_back(F);
    } else if (c.F.has_value()) {
        points.push_back(*c.F);
    } else {
        throw std::invalid_argument("either --F or --grid is required");
    }
    for (double F : points)
        if (F < 0.0 || F > 1.0) throw std::invalid_argument("F out of range [0,1]");
    return points;
}

struct Record {
    double F_in;
    double F_out_exact;
    double F_out_formula;
    double p_success_exact;
    double p_success_formula;
};

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            resolved_ = resolve_output_path(path);
            file_.open(resolved_, std::ios::out | std::ios::trunc);
            if (!file_) throw std::invalid_argument("cannot write to " + resolved_);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::string resolved_;
    std::ofstream file_;
};

Record run_one_point(const RunConfig& c, double F) {
    const ErrorKind::Type kind = parse_kind(c.kind);
    Record record{F, 0.0, 0.0, 0.0, 0.0};

    if (kind == ErrorKind::Type::PhysicalBitFlip) {
        if (c.mode != "exact")
            throw std::invalid_argument(
                "physical-bit correction is deterministic; only exact mode is supported");
        if (c.flip_index < 1 || c.flip_index > c.m)
            throw std::invalid_argument("flip index out of range [1, m]");
        BitFlipStrategy strategy;
        if (c.strategy == "known-location") {
            strategy = KnownLocation{c.flip_index};
        } else if (c.strategy == "localize") {
            strategy = Localize{};
        } else {
            throw std::invalid_argument("unknown strategy '" + c.strategy +
                                        "' (expected known-location or localize)");
        }
        const MixedState rho = make_mixture(ErrorKind::physical_bit(c.flip_index), F, c.m);
        const RoundResult round = correct_physical_bitflip(rho, c.m, strategy);
        record.F_out_exact = round.output_fidelity;
        record.p_success_exact = round.success_probability;
        record.F_out_formula = 1.0;
        record.p_success_formula = 1.0;
        return record;
    }

    const PolicyKind policy_kind = parse_policy(c.policy);
    const SelectionPolicy policy = policy_kind == PolicyKind::Canonical
                                       ? SelectionPolicy::canonical(c.m)
                                       : SelectionPolicy::extended();
    if (policy_kind == PolicyKind::Extended &&
        (c.m != 2 || kind != ErrorKind::Type::LogicBitFlip))
        throw std::invalid_argument(
            "the extended policy applies to logic-bit distillation with m = 2 only");

    const ErrorKind error_kind = (kind == ErrorKind::Type::LogicBitFlip)
                                     ? ErrorKind::logic_bit()
                                     : ErrorKind::logic_phase();
    const MixedState rho = make_mixture(error_kind, F, c.m);
    std::optional<MonteCarloMode> mc;
    if (c.mode == "montecarlo") mc = MonteCarloMode{c.trials, *c.seed};
    const RoundResult round = distill_round(rho, kind, c.m, policy, mc);
    record.F_out_exact = round.output_fidelity;
    record.p_success_exact = round.success_probability;
    record.F_out_formula = fidelity_map(F);
    record.p_success_formula = expected_success_probability(F, kind, c.m, policy_kind);
    return record;
}

void emit_records_json(std::ostream& os, const RunConfig& c, const std::vector<Record>& records) {
    const std::uint64_t trials = (c.mode == "montecarlo") ? c.trials : 0;
    const std::uint64_t seed = (c.mode == "montecarlo") ? *c.seed : 0;
    os << "[\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const Record& r = records[i];
        os << "  {\n";
        os << "    \"F_in\": " << format_double(r.F_in) << ",\n";
        os << "    \"F_out_exact\": " << format_double(r.F_out_exact) << ",\n";
        os << "    \"F_out_formula\": " << format_double(r.F_out_formula) << ",\n";
        os << "    \"p_success_exact\": " << format_double(r.p_success_exact) << ",\n";
        os << "    \"p_success_formula\": " << format_double(r.p_success_formula) << ",\n";
        os << "    \"policy\": \"" << c.policy << "\",\n";
        os << "    \"m\": " << c.m << ",\n";
        os << "    \"kind\": \"" << c.kind << "\",\n";
        os << "    \"mode\": \"" << c.mode << "\",\n";
        os << "    \"trials\": " << trials << ",\n";
        os << "    \"seed\": " << seed << "\n";
        os << "  }" << (i + 1 < records.size() ? "," : "") << "\n";
    }
    os << "]\n";
}

void emit_records_csv(std::ostream& os, const RunConfig& c, const std::vector<Record>& records) {
    const std::uint64_t trials = (c.mode == "montecarlo") ? c.trials : 0;
    const std::uint64_t seed = (c.mode == "montecarlo") ? *c.seed : 0;
    os << "F_in,F_out_exact,F_out_formula,p_success_exact,p_success_formula,"
          "policy,m,kind,mode,trials,seed\n";
    for (const Record& r : records) {
        os << format_double(r.F_in) << ',' << format_double(r.F_out_exact) << ','
           << format_double(r.F_out_formula) << ',' << format_double(r.p_success_exact) << ','
           << format_double(r.p_success_formula) << ',' << c.policy << ',' << c.m << ','
           << c.kind << ',' << c.mode << ',' << trials << ',' << seed << '\n';
    }
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::logic_error& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInternal;
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

GridSpec parse_grid(const std::string& text) {
    GridSpec grid;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &grid.start, &grid.stop, &grid.step, &extra) !=
        3)
        throw std::invalid_argument("grid must be start:stop:step, got '" + text + "'");
    return grid;
}

std::string resolve_output_path(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("LQDISTILL_OUTPUT_DIR");
    if (dir == nullptr || *dir == '\0') return path;
    std::string resolved(dir);
    if (resolved.back() != '/') resolved += '/';
    return resolved + path;
}

int run_distill(const RunConfig& c) {
    return guarded([&] {
        validate_common(c);
        std::vector<Record> records;
        std::size_t index = 0;
        for (double F : grid_points(c)) {
            RunConfig point = c;
            // Independent Monte Carlo streams per grid point.
            if (c.mode == "montecarlo" && c.seed.has_value()) point.seed = *c.seed + index;
            records.push_back(run_one_point(point, F));
            ++index;
        }
        Output out(c.output);
        if (c.format == "csv") {
            emit_records_csv(out.stream(), c, records);
        } else {
            emit_records_json(out.stream(), c, records);
        }
        return kExitOk;
    });
}

int run_sweep(const RunConfig& c) {
    return guarded([&] {
        validate_common(c);
        if (!c.grid.has_value()) throw std::invalid_argument("sweep requires --grid");
        std::vector<Record> records;
        std::size_t index = 0;
        for (double F : grid_points(c)) {
            RunConfig point = c;
            if (c.mode == "montecarlo" && c.seed.has_value()) point.seed = *c.seed + index;
            records.push_back(run_one_point(point, F));
            ++index;
        }
        Output out(c.output);
        std::ostream& os = out.stream();
        os << "F_in,F_out,p_success,kind,policy,m,mode\n";
        for (const Record& r : records) {
            os << format_double(r.F_in) << ',' << format_double(r.F_out_exact) << ','
               << format_double(r.p_success_exact) << ',' << c.kind << ',' << c.policy << ','
               << c.m << ',' << c.mode << '\n';
        }
        return kExitOk;
    });
}

int run_iterate(const RunConfig& c) {
    return guarded([&] {
        if (c.rounds < 1) throw std::invalid_argument("rounds must be at least 1");
        if (!c.F.has_value()) throw std::invalid_argument("iterate requires --F0");
        const double F0 = *c.F;
        if (!(F0 > 0.5) || F0 > 1.0)
            throw std::invalid_argument(
                "F0 must lie in (1/2, 1]: a round only improves the fidelity for F > 1/2 "
                "(F' > F requires F > 1/2)");
        const ErrorKind::Type kind = parse_kind(c.kind);
        if (kind == ErrorKind::Type::PhysicalBitFlip)
            throw std::invalid_argument("iterate applies to the logic error kinds");
        const PolicyKind policy = parse_policy(c.policy);

        std::vector<double> fs{F0};
        std::vector<double> ps;
        double yield = 1.0;
        double F = F0;
        for (int i = 0; i < c.rounds; ++i) {
            const double p = expected_success_probability(F, kind, c.m, policy);
            ps.push_back(p);
            yield *= p / 2.0;
            F = fidelity_map(F);
            fs.push_back(F);
        }

        bool verified = false;
        if (c.verify_exact) {
            verified = true;
            const SelectionPolicy selection = policy == PolicyKind::Canonical
                                                  ? SelectionPolicy::canonical(c.m)
                                                  : SelectionPolicy::extended();
            const ErrorKind error_kind = (kind == ErrorKind::Type::LogicBitFlip)
                                             ? ErrorKind::logic_bit()
                                             : ErrorKind::logic_phase();
            for (int i = 0; i < c.rounds; ++i) {
                const RoundResult round =
                    distill_round(make_mixture(error_kind, fs[static_cast<std::size_t>(i)], c.m),
                                  kind, c.m, selection);
                if (std::abs(round.output_fidelity - fs[static_cast<std::size_t>(i) + 1]) >
                        1e-10 ||
                    std::abs(round.success_probability - ps[static_cast<std::size_t>(i)]) > 1e-10)
                    verified = false;
            }
        }

        Output out(c.output);
        std::ostream& os = out.stream();
        os << "{\n  \"f_sequence\": [";
        for (std::size_t i = 0; i < fs.size(); ++i)
            os << (i ? ", " : "") << format_double(fs[i]);
        os << "],\n  \"success_probs\": [";
        for (std::size_t i = 0; i < ps.size(); ++i)
            os << (i ? ", " : "") << format_double(ps[i]);
        os << "],\n  \"expected_yield\": " << format_double(yield) << ",\n";
        os << "  \"verified\": " << (verified ? "true" : "false") << "\n}\n";
        return kExitOk;
    });
}

int run_state(const RunConfig& c) {
    return guarded([&] {
        if (c.m < 2) throw std::invalid_argument("m must be at least 2");
        const std::string& name = c.state_name;
        PureState state = [&]() -> PureState {
            const Mode a1("a1"), a2("a2");
            if (name == "phi+") return make_bell(BellKind::PhiPlus, a1, a2);
            if (name == "phi-") return make_bell(BellKind::PhiMinus, a1, a2);
            if (name == "psi+") return make_bell(BellKind::PsiPlus, a1, a2);
            if (name == "psi-") return make_bell(BellKind::PsiMinus, a1, a2);
            if (name == "ghz+") return make_ghz(Sign::Plus, default_modes_a(c.m));
            if (name == "ghz-") return make_ghz(Sign::Minus, default_modes_a(c.m));
            if (name == "logic-phi+") return make_logic_bell(BellKind::PhiPlus, c.m);
            if (name == "logic-phi-") return make_logic_bell(BellKind::PhiMinus, c.m);
            if (name == "logic-psi+") return make_logic_bell(BellKind::PsiPlus, c.m);
            if (name == "logic-psi-") return make_logic_bell(BellKind::PsiMinus, c.m);
            if (name == "upsilon") return make_upsilon(c.m, c.flip_index);
            throw std::invalid_argument(
                "unknown state '" + name +
                "' (phi+/-, psi+/-, ghz+/-, logic-phi+/-, logic-psi+/-, upsilon)");
        }();
        Output out(c.output);
        out.stream() << state.to_string();
        return kExitOk;
    });
}

int run(const RunConfig& c) {
    if (c.command == "distill") return run_distill(c);
    if (c.command == "sweep") return run_sweep(c);
    if (c.command == "iterate") return run_iterate(c);
    if (c.command == "state") return run_state(c);
    std::cerr << "error: unknown command '" << c.command << "'\n";
    return kExitConfig;
}

namespace {

void load_config_file(const std::string& path, RunConfig& c) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config file " + path + ": " + e.what());
    }
    if (j.contains("kind")) c.kind = j.at("kind").get<std::string>();
    if (j.contains("m")) c.m = j.at("m").get<int>();
    if (j.contains("F")) c.F = j.at("F").get<double>();
    if (j.contains("grid")) c.grid = parse_grid(j.at("grid").get<std::string>());
    if (j.contains("policy")) c.policy = j.at("policy").get<std::string>();
    if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
    if (j.contains("trials")) c.trials = j.at("trials").get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rounds")) c.rounds = j.at("rounds").get<int>();
    if (j.contains("strategy")) c.strategy = j.at("strategy").get<std::string>();
    if (j.contains("flip_index")) c.flip_index = j.at("flip_index").get<int>();
    if (j.contains("verify_exact")) c.verify_exact = j.at("verify_exact").get<bool>();
    if (j.contains("format")) c.format = j.at("format").get<std::string>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("name")) c.state_name = j.at("name").get<std::string>();
}

}  // namespace

int main_entry(int argc, char** argv) {
    CLI::App app{"Logic-qubit entanglement distillation simulator"};
    app.require_subcommand(1);

    RunConfig flags;  // values provided on the command line
    std::string config_path;
    std::string grid_text;
    double f_value = 0.0;
    std::uint64_t seed_value = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file; flags override its values");
        cmd->add_option("--kind", flags.kind, "logic-bit | logic-phase | physical-bit");
        cmd->add_option("--m", flags.m, "photons per logic qubit (>= 2)");
        cmd->add_option("--policy", flags.policy, "canonical | extended");
        cmd->add_option("--mode", flags.mode, "exact | montecarlo");
        cmd->add_option("--trials", flags.trials, "Monte Carlo trials");
        cmd->add_option("--seed", seed_value, "Monte Carlo seed (required for montecarlo)");
        cmd->add_option("--format", flags.format, "json | csv");
        cmd->add_option("--output", flags.output,
                        "output path (relative paths honor LQDISTILL_OUTPUT_DIR)");
    };

    CLI::App* distill = app.add_subcommand("distill", "run one distillation/correction round");
    add_common(distill);
    distill->add_option("--F", f_value, "input fidelity");
    distill->add_option("--grid", grid_text, "F grid start:stop:step");
    distill->add_option("--strategy", flags.strategy, "known-location | localize");
    distill->add_option("--flip-index", flags.flip_index, "flipped photon (physical-bit)");

    CLI::App* sweep = app.add_subcommand("sweep", "sweep F and write CSV");
    add_common(sweep);
    sweep->add_option("--grid", grid_text, "F grid start:stop:step");

    CLI::App* iterate = app.add_subcommand("iterate", "iterate the fidelity map");
    add_common(iterate);
    iterate->add_option("--F0", f_value, "starting fidelity (must exceed 1/2)");
    iterate->add_option("--rounds", flags.rounds, "number of rounds (>= 1)");
    iterate->add_flag("--verify-exact", flags.verify_exact,
                      "check each round against the exact simulation");

    CLI::App* state = app.add_subcommand("state", "print a canonical state");
    add_common(state);
    state->add_option("--name", flags.state_name, "state name (e.g. logic-phi+, upsilon)");
    state->add_option("--flip-index", flags.flip_index, "flipped photon for upsilon");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    CLI::App* active = app.get_subcommands().front();

    RunConfig config;
    config.command = active->get_name();
    if (active->count("--config") > 0) {
        try {
            load_config_file(config_path, config);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitConfig;
        }
    }

    auto given = [&](const std::string& opt) {
        const CLI::Option* option = active->get_option_no_throw(opt);
        return option != nullptr && option->count() > 0;
    };
    auto override_if = [&](const std::string& opt, auto member, auto value) {
        if (given(opt)) config.*member = value;
    };
    override_if("--kind", &RunConfig::kind, flags.kind);
    override_if("--m", &RunConfig::m, flags.m);
    override_if("--policy", &RunConfig::policy, flags.policy);
    override_if("--mode", &RunConfig::mode, flags.mode);
    override_if("--trials", &RunConfig::trials, flags.trials);
    override_if("--format", &RunConfig::format, flags.format);
    override_if("--output", &RunConfig::output, flags.output);
    override_if("--strategy", &RunConfig::strategy, flags.strategy);
    override_if("--flip-index", &RunConfig::flip_index, flags.flip_index);
    override_if("--rounds", &RunConfig::rounds, flags.rounds);
    override_if("--name", &RunConfig::state_name, flags.state_name);
    if (given("--seed")) config.seed = seed_value;
    if (given("--F") || given("--F0")) config.F = f_value;
    if (given("--verify-exact")) config.verify_exact = true;
    if (given("--grid")) {
        try {
            config.grid = parse_grid(grid_text);
        } catch (const std::invalid_argument& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitConfig;
        }
    }

    return run(config);
}

}  // namespace lqd::cli
