#include "lqd/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>

namespace lqd {

namespace {

struct Wiring {
    int m = 2;
    std::vector<Mode> kept_a, kept_b, copy_a, copy_b;
    std::vector<std::pair<Mode, Mode>> probe_pairs;  // probe i <-> probe_pairs[i-1]
    std::vector<Mode> measured;                      // copy_a then copy_b
    std::vector<Mode> partners;                      // kept partner per measured mode
    std::map<Mode, Mode> to_copy;
    std::vector<Mode> all_modes;

    int probes() const { return 2 * m; }
};

Wiring make_wiring(int m) {
    Wiring w;
    w.m = m;
    w.kept_a = default_modes_a(m);
    w.kept_b = default_modes_b(m);
    w.copy_a = copy_modes_a(m);
    w.copy_b = copy_modes_b(m);
    for (int i = 0; i < m; ++i) w.probe_pairs.emplace_back(w.kept_a[i], w.copy_a[i]);
    for (int i = 0; i < m; ++i) w.probe_pairs.emplace_back(w.kept_b[i], w.copy_b[i]);
    w.measured = w.copy_a;
    w.measured.insert(w.measured.end(), w.copy_b.begin(), w.copy_b.end());
    w.partners = w.kept_a;
    w.partners.insert(w.partners.end(), w.kept_b.begin(), w.kept_b.end());
    for (int i = 0; i < m; ++i) {
        w.to_copy.emplace(w.kept_a[i], w.copy_a[i]);
        w.to_copy.emplace(w.kept_b[i], w.copy_b[i]);
    }
    for (const auto& v : {w.kept_a, w.kept_b, w.copy_a, w.copy_b})
        w.all_modes.insert(w.all_modes.end(), v.begin(), v.end());
    return w;
}

PureState hadamard_each(PureState state, const std::vector<Mode>& modes) {
    for (const auto& mode : modes) state = state.hadamard(mode);
    return state;
}

/// Pre-stage plus all parity gates: bit-flip rounds see Hadamards on every
/// photon first, phase-flip rounds feed the photons to the PCGs directly.
PureState prepare_product(const PureState& product, ErrorKind::Type kind, const Wiring& w) {
    PureState state =
        (kind == ErrorKind::Type::LogicBitFlip) ? hadamard_each(product, w.all_modes) : product;
    for (int i = 0; i < w.probes(); ++i)
        state = apply_pcg(state, w.probe_pairs[i].first, w.probe_pairs[i].second, i + 1);
    return state;
}

void accumulate_component(std::vector<MixedState::Component>& out, double weight,
                          const PureState& state) {
    for (auto& existing : out) {
        if (approx_equal(existing.state, state, 1e-9)) {
            existing.weight += weight;
            return;
        }
    }
    out.push_back({weight, state});
}

ErrorKind logic_kind(ErrorKind::Type type) {
    if (type == ErrorKind::Type::LogicBitFlip) return ErrorKind::logic_bit();
    if (type == ErrorKind::Type::LogicPhaseFlip) return ErrorKind::logic_phase();
    throw std::invalid_argument("distillation rounds handle logic error kinds only");
}

struct RoundInputs {
    PureState target;
    PureState error;
    std::vector<MixedState::Component> products;  // two-copy tensor components
};

RoundInputs build_round_inputs(const MixedState& input, ErrorKind::Type kind, int m,
                               const Wiring& w) {
    validate_mixture(input);
    RoundInputs in{make_logic_bell(BellKind::PhiPlus, m), error_state(logic_kind(kind), m), {}};
    for (const auto& [weight, state] : input.components) {
        if (state.registry() != in.target.registry())
            throw std::invalid_argument("input mixture is not on the a1..am, b1..bm registry");
        const double ft = fidelity_pure(state, in.target);
        const double fe = fidelity_pure(state, in.error);
        if (std::max(ft, fe) < 1.0 - 1e-9)
            throw std::invalid_argument(
                "input component is neither the target state nor this kind's error state");
    }
    for (const auto& c1 : input.components) {
        for (const auto& c2 : input.components) {
            in.products.push_back(
                {c1.weight * c2.weight, c1.state.tensor(c2.state.relabeled(w.to_copy))});
        }
    }
    return in;
}

/// Feed-forward: a '-' outcome on a measured mode triggers a Z on its kept
/// partner.
PureState apply_partner_z(PureState state, const std::string& meas_pattern, const Wiring& w,
                          std::vector<std::string>* applied) {
    for (std::size_t i = 0; i < meas_pattern.size(); ++i) {
        if (meas_pattern[i] == '-') {
            state = state.pauli_z(w.partners[i]);
            if (applied) applied->push_back(Correction{'Z', w.partners[i]}.to_string());
        }
    }
    return state;
}

void enumerate_probe_patterns(
    const PureState& state, int next_probe, const SelectionPolicy& policy, std::string& pattern,
    double prob,
    const std::function<void(const std::string&, double, const PureState&)>& leaf) {
    if (policy.accepted.empty() || !policy.prefix_viable(pattern)) return;
    if (next_probe > static_cast<int>(policy.accepted.begin()->first.size())) {
        leaf(pattern, prob, state);
        return;
    }
    for (const auto& outcome : homodyne(state, next_probe)) {
        pattern.push_back(to_char(outcome.parity));
        enumerate_probe_patterns(outcome.post, next_probe + 1, policy, pattern,
                                 prob * outcome.probability, leaf);
        pattern.pop_back();
    }
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Canonical 53-bit uniform in [0,1); avoids std distributions, whose output
/// sequences are not pinned by the standard.
double next_uniform(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

struct BranchLog {
    std::map<std::pair<std::string, std::string>, BranchRecord> entries;

    void add(const std::string& probes, const std::string& meas,
             const std::vector<std::string>& corrections, double probability) {
        auto key = std::make_pair(probes, meas);
        auto it = entries.find(key);
        if (it == entries.end()) {
            entries.emplace(std::move(key), BranchRecord{probes, meas, corrections, probability});
        } else {
            it->second.probability += probability;
        }
    }

    std::vector<BranchRecord> sorted() const {
        std::vector<BranchRecord> out;
        out.reserve(entries.size());
        for (const auto& [key, record] : entries) out.push_back(record);
        return out;
    }
};

RoundResult finalize_round(std::vector<MixedState::Component> raw, double success,
                           const PureState& target, const BranchLog& log) {
    RoundResult result;
    result.success_probability = std::clamp(success, 0.0, 1.0);
    result.outcome_log = log.sorted();
    if (success > 1e-15) {
        for (auto& c : raw) c.weight /= success;
        result.output = consolidated(MixedState{std::move(raw)});
        validate_mixture(result.output);
        result.output_fidelity = fidelity(result.output, target);
    }
    return result;
}

}  // namespace

std::vector<Mode> copy_modes_a(int m) {
    if (m == 2) return modes_from("a3 a4");
    std::vector<Mode> out;
    for (int i = 1; i <= m; ++i) out.emplace_back("c" + std::to_string(i));
    return out;
}

std::vector<Mode> copy_modes_b(int m) {
    if (m == 2) return modes_from("b3 b4");
    std::vector<Mode> out;
    for (int i = 1; i <= m; ++i) out.emplace_back("d" + std::to_string(i));
    return out;
}

SelectionPolicy SelectionPolicy::canonical(int m) {
    if (m < 2) throw std::invalid_argument("selection policy needs m >= 2");
    SelectionPolicy policy;
    policy.name = "canonical";
    policy.m = m;
    policy.accepted.emplace(std::string(static_cast<std::size_t>(2 * m), 'E'),
                            std::vector<Correction>{});
    return policy;
}

SelectionPolicy SelectionPolicy::extended() {
    SelectionPolicy policy;
    policy.name = "extended";
    policy.m = 2;
    const std::vector<Correction> flip_a{{'X', Mode("a1")}, {'X', Mode("a2")}};
    const std::vector<Correction> flip_b{{'X', Mode("b1")}, {'X', Mode("b2")}};
    std::vector<Correction> flip_both = flip_a;
    flip_both.insert(flip_both.end(), flip_b.begin(), flip_b.end());
    policy.accepted.emplace("EEEE", std::vector<Correction>{});
    policy.accepted.emplace("OOOO", flip_both);
    policy.accepted.emplace("EEOO", flip_b);
    policy.accepted.emplace("OOEE", flip_a);
    return policy;
}

const std::vector<Correction>& SelectionPolicy::corrections(const std::string& pattern) const {
    auto it = accepted.find(pattern);
    if (it == accepted.end())
        throw std::invalid_argument("no correction recorded for pattern " + pattern);
    return it->second;
}

bool SelectionPolicy::prefix_viable(const std::string& prefix) const {
    for (const auto& [pattern, corrections] : accepted) {
        if (pattern.compare(0, prefix.size(), prefix) == 0) return true;
    }
    return false;
}

RoundResult distill_round(const MixedState& input, ErrorKind::Type kind, int m,
                          const SelectionPolicy& policy,
                          const std::optional<MonteCarloMode>& mc) {
    if (m < 2) throw std::invalid_argument("distillation needs m >= 2");
    if (policy.m != m) throw std::invalid_argument("selection policy was built for m = " +
                                                   std::to_string(policy.m));
    if (policy.name == "extended" && kind != ErrorKind::Type::LogicBitFlip)
        throw std::invalid_argument(
            "the extended policy applies to the four-photon logic bit-flip round only");

    const Wiring w = make_wiring(m);
    RoundInputs in = build_round_inputs(input, kind, m, w);

    RoundResult result;
    const double input_fidelity = fidelity(input, in.target);

    std::vector<MixedState::Component> raw;
    BranchLog log;
    double success = 0.0;

    auto process_selected = [&](const PureState& collapsed, const std::string& probe_pattern,
                                double branch_prob, bool sampled, std::mt19937_64* eng) {
        std::vector<std::string> base_corrections;
        PureState state = collapsed;
        for (const auto& c : policy.corrections(probe_pattern)) {
            state = (c.op == 'X') ? state.pauli_x(c.mode) : state.pauli_z(c.mode);
            base_corrections.push_back(c.to_string());
        }

        auto finish = [&](PureState post, const std::string& meas_pattern, double prob) {
            std::vector<std::string> corrections = base_corrections;
            post = apply_partner_z(std::move(post), meas_pattern, w, &corrections);
            if (kind == ErrorKind::Type::LogicBitFlip) {
                post = hadamard_each(std::move(post), w.partners);
            }
            accumulate_component(raw, prob, post);
            success += prob;
            log.add(probe_pattern, meas_pattern, corrections, prob);
        };

        if (!sampled) {
            for (const auto& outcome : measure_diag(state, w.measured)) {
                finish(outcome.post, outcome.pattern, branch_prob * outcome.probability);
            }
        } else {
            std::string meas_pattern;
            for (const auto& mode : w.measured) {
                auto outcomes = measure_diag(state, {mode});
                std::size_t pick = 0;
                if (outcomes.size() > 1) {
                    const double r = next_uniform(*eng);
                    pick = (r < outcomes[0].probability) ? 0 : 1;
                }
                meas_pattern += outcomes[pick].pattern;
                state = outcomes[pick].post;
            }
            finish(state, meas_pattern, branch_prob);
        }
    };

    if (!mc.has_value()) {
        for (const auto& [weight, product] : in.products) {
            const PureState prepared = prepare_product(product, kind, w);
            std::string pattern;
            enumerate_probe_patterns(
                prepared, 1, policy, pattern, weight,
                [&](const std::string& full_pattern, double prob, const PureState& state) {
                    process_selected(state, full_pattern, prob, false, nullptr);
                });
        }
        result = finalize_round(std::move(raw), success, in.target, log);
    } else {
        if (mc->trials == 0) throw std::invalid_argument("Monte Carlo needs at least one trial");
        std::vector<double> cumulative;
        std::vector<PureState> prepared;
        double acc = 0.0;
        for (const auto& [weight, product] : in.products) {
            acc += weight;
            cumulative.push_back(acc);
            prepared.push_back(prepare_product(product, kind, w));
        }

        std::uint64_t accepted_count = 0;
        for (std::uint64_t trial = 0; trial < mc->trials; ++trial) {
            std::mt19937_64 eng(splitmix64(mc->seed ^ (0x9e3779b97f4a7c15ULL * (trial + 1))));
            const double pick = next_uniform(eng) * acc;
            std::size_t idx = 0;
            while (idx + 1 < cumulative.size() && pick >= cumulative[idx]) ++idx;

            PureState state = prepared[idx];
            std::string pattern;
            for (int probe = 1; probe <= w.probes(); ++probe) {
                auto outcomes = homodyne(state, probe);
                std::size_t choice = 0;
                if (outcomes.size() > 1) {
                    const double r = next_uniform(eng);
                    choice = (r < outcomes[0].probability) ? 0 : 1;
                }
                pattern.push_back(to_char(outcomes[choice].parity));
                state = outcomes[choice].post;
            }
            if (!policy.accepts(pattern)) continue;
            ++accepted_count;
            process_selected(state, pattern, 1.0, true, &eng);
        }

        result.trials = mc->trials;
        result.accepted = accepted_count;
        result.success_probability =
            static_cast<double>(accepted_count) / static_cast<double>(mc->trials);
        if (accepted_count > 0) {
            const double inv = 1.0 / static_cast<double>(accepted_count);
            for (auto& c : raw) c.weight *= inv;
            // Log entries hold absolute frequencies, matching exact mode's
            // absolute branch probabilities.
            for (auto& [key, record] : log.entries)
                record.probability /= static_cast<double>(mc->trials);
            result.output = consolidated(MixedState{std::move(raw)});
            validate_mixture(result.output);
            result.output_fidelity = fidelity(result.output, in.target);
        }
        result.outcome_log = log.sorted();
    }

    result.input_fidelity = input_fidelity;
    return result;
}

RoundResult correct_physical_bitflip(const MixedState& input, int m,
                                     const BitFlipStrategy& strategy) {
    if (m < 2) throw std::invalid_argument("correction needs m >= 2");
    validate_mixture(input);
    const PureState target = make_logic_bell(BellKind::PhiPlus, m);
    for (const auto& [weight, state] : input.components) {
        if (state.registry() != target.registry())
            throw std::invalid_argument("input mixture is not on the a1..am, b1..bm registry");
    }

    const std::vector<Mode> a = default_modes_a(m);
    std::vector<MixedState::Component> raw;
    BranchLog log;
    double total = 0.0;

    auto settle = [&](double prob, PureState state, std::string pattern, int flip) {
        std::vector<std::string> corrections;
        if (flip > 0) {
            state = state.pauli_x(a[static_cast<std::size_t>(flip - 1)]);
            corrections.push_back(Correction{'X', a[static_cast<std::size_t>(flip - 1)]}.to_string());
        }
        accumulate_component(raw, prob, state);
        total += prob;
        log.add(pattern, "", corrections, prob);
    };

    if (const auto* known = std::get_if<KnownLocation>(&strategy)) {
        const int j = known->photon;
        if (j < 1 || j > m) throw std::invalid_argument("flipped photon index out of range");
        const Mode& photon = a[static_cast<std::size_t>(j - 1)];
        const Mode& neighbor = a[static_cast<std::size_t>(j < m ? j : j - 2)];
        for (const auto& [weight, state] : input.components) {
            for (const auto& outcome : parity_check(state, photon, neighbor)) {
                settle(weight * outcome.probability, outcome.post,
                       std::string(1, to_char(outcome.parity)),
                       outcome.parity == Parity::Odd ? j : 0);
            }
        }
    } else {
        // Consecutive-pair sweep; the odd checks of a single flip at photon j
        // are exactly the checks containing j.
        auto infer = [m](const std::string& pattern) {
            for (int j = 1; j <= m; ++j) {
                bool match = true;
                for (int i = 1; i <= m - 1; ++i) {
                    const bool odd = pattern[static_cast<std::size_t>(i - 1)] == 'O';
                    const bool contains = (i == j || i == j - 1);
                    if (odd != contains) {
                        match = false;
                        break;
                    }
                }
                if (match) return j;
            }
            return 0;
        };

        std::function<void(const PureState&, int, std::string, double, double)> sweep =
            [&](const PureState& state, int check, std::string pattern, double prob,
                double weight) {
                if (check > m - 1) {
                    bool all_even = pattern.find('O') == std::string::npos;
                    if (all_even) {
                        settle(weight * prob, state, pattern, 0);
                    } else if (m == 2) {
                        // One check cannot separate a flip on a1 from one on
                        // a2; a cross check against b1 does (flip on a1 makes
                        // (a1,b1) odd, flip on a2 leaves it even).
                        for (const auto& extra : parity_check(state, a[0], Mode("b1"))) {
                            settle(weight * prob * extra.probability, extra.post,
                                   pattern + to_char(extra.parity),
                                   extra.parity == Parity::Odd ? 1 : 2);
                        }
                    } else {
                        settle(weight * prob, state, pattern, infer(pattern));
                    }
                    return;
                }
                const Mode& x = a[static_cast<std::size_t>(check - 1)];
                const Mode& y = a[static_cast<std::size_t>(check)];
                for (const auto& outcome : parity_check(state, x, y)) {
                    sweep(outcome.post, check + 1, pattern + to_char(outcome.parity),
                          prob * outcome.probability, weight);
                }
            };
        for (const auto& [weight, state] : input.components) sweep(state, 1, "", 1.0, weight);
    }

    RoundResult result = finalize_round(std::move(raw), total, target, log);
    result.input_fidelity = fidelity(input, target);
    return result;
}

RejectionReport verify_rejection(ErrorKind::Type kind, int m) {
    const Wiring w = make_wiring(m);
    const PureState target = make_logic_bell(BellKind::PhiPlus, m);
    const PureState error = error_state(logic_kind(kind), m);
    const std::string error_name =
        (kind == ErrorKind::Type::LogicBitFlip) ? "Psi+" : "Phi-";

    std::vector<std::pair<std::string, PureState>> inputs;
    inputs.emplace_back("Phi+ x " + error_name, target.tensor(error.relabeled(w.to_copy)));
    inputs.emplace_back(error_name + " x Phi+", error.tensor(target.relabeled(w.to_copy)));
    inputs.emplace_back("Phi+ x Phi+", target.tensor(target.relabeled(w.to_copy)));

    std::vector<SelectionPolicy> policies{SelectionPolicy::canonical(m)};
    if (m == 2 && kind == ErrorKind::Type::LogicBitFlip)
        policies.push_back(SelectionPolicy::extended());

    RejectionReport report;
    for (const auto& [label, product] : inputs) {
        const PureState prepared = prepare_product(product, kind, w);
        for (const auto& policy : policies) {
            double acceptance = 0.0;
            std::string pattern;
            enumerate_probe_patterns(prepared, 1, policy, pattern, 1.0,
                                     [&](const std::string&, double prob, const PureState&) {
                                         acceptance += prob;
                                     });
            report.entries.push_back({label, policy.name, acceptance});
        }
    }
    return report;
}

std::optional<CollapseResult> collapse_under_pattern(const PureState& product,
                                                     ErrorKind::Type kind, int m,
                                                     const SelectionPolicy& policy,
                                                     const std::string& pattern) {
    const Wiring w = make_wiring(m);
    if (pattern.size() != static_cast<std::size_t>(w.probes()))
        throw std::invalid_argument("pattern needs one parity per probe");

    PureState state = prepare_product(product, kind, w);
    double prob = 1.0;
    for (int probe = 1; probe <= w.probes(); ++probe) {
        const char wanted = pattern[static_cast<std::size_t>(probe - 1)];
        bool found = false;
        for (const auto& outcome : homodyne(state, probe)) {
            if (to_char(outcome.parity) == wanted) {
                prob *= outcome.probability;
                state = outcome.post;
                found = true;
                break;
            }
        }
        if (!found) return std::nullopt;
    }
    if (policy.accepts(pattern)) {
        for (const auto& c : policy.corrections(pattern))
            state = (c.op == 'X') ? state.pauli_x(c.mode) : state.pauli_z(c.mode);
    }
    return CollapseResult{prob, state};
}

}  // namespace lqd
