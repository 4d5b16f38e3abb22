// End-to-end distillation rounds on a two-logic-qubit pair.
//
// A round consumes two copies of the input mixture. Copy one lives on
// a1..am, b1..bm; copy two on a3, a4, b3, b4 when m = 2 (the four-photon
// layout) and on c1..cm, d1..dm otherwise. Probe i couples the i-th kept
// mode of a side to its copy-two partner: (a1,a3), (a2,a4), (b1,b3), (b2,b4)
// for m = 2, and (a_i,c_i), (b_i,d_i) in general. Probe patterns are strings
// over {E,O}, Alice's m probes first, then Bob's.
//
// Logic bit-flip rounds apply Hadamards to every photon before the parity
// checks and again to the kept photons at the end; logic phase-flip rounds
// run the parity checks directly (the collapse that distinguishes Phi+ from
// Phi- only survives without the Hadamard stage).

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lqd/channels.hpp"
#include "lqd/qnd.hpp"
#include "lqd/state.hpp"

namespace lqd {

/// One corrective single-photon operation ('X' or 'Z' on a mode).
struct Correction {
    char op;
    Mode mode;

    std::string to_string() const { return std::string(1, op) + " " + mode.name(); }
};

/// Which homodyne patterns count as success, and the corrective flips that
/// map each accepted pattern's collapsed state onto the all-even one. The
/// canonical policy accepts all-even only; the extended policy additionally
/// accepts OOOO, EEOO and OOEE (four-photon layout only).
struct SelectionPolicy {
    std::string name;
    int m = 2;
    std::map<std::string, std::vector<Correction>> accepted;

    static SelectionPolicy canonical(int m);
    static SelectionPolicy extended();

    bool accepts(const std::string& pattern) const { return accepted.count(pattern) > 0; }
    const std::vector<Correction>& corrections(const std::string& pattern) const;
    /// True if some accepted pattern starts with this prefix.
    bool prefix_viable(const std::string& prefix) const;
};

struct MonteCarloMode {
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
};

struct BranchRecord {
    std::string probe_pattern;            // 'E'/'O' per probe
    std::string meas_pattern;             // '+'/'-' per measured mode (empty if none)
    std::vector<std::string> corrections;  // feed-forward operations applied
    double probability;                    // exact branch probability, or MC frequency
};

struct RoundResult {
    double success_probability = 0.0;
    MixedState output;  // conditioned on success
    std::vector<BranchRecord> outcome_log;
    double input_fidelity = 0.0;
    double output_fidelity = 0.0;
    std::uint64_t trials = 0;    // Monte Carlo only
    std::uint64_t accepted = 0;  // Monte Carlo only
};

/// One distillation round for a logic bit-flip or logic phase-flip mixture.
/// The input must be an ensemble of Phi+_m and the kind's error state on the
/// default registry. Exact mode enumerates every branch; Monte Carlo samples
/// seeded trajectories.
RoundResult distill_round(const MixedState& input, ErrorKind::Type kind, int m,
                          const SelectionPolicy& policy,
                          const std::optional<MonteCarloMode>& mc = std::nullopt);

struct KnownLocation {
    int photon = 1;
};
struct Localize {};
using BitFlipStrategy = std::variant<KnownLocation, Localize>;

/// Deterministic correction of a physical bit-flip mixture
/// {(F, Phi+_m), (1-F, Upsilon+_m(j))}. known_location checks (a_j, neighbor)
/// and flips a_j on odd parity; localize sweeps consecutive pairs
/// (a1,a2)..(a_{m-1},a_m) and infers the flipped photon from the odd-parity
/// pattern (at m = 2 one extra cross check (a1,b1) separates j=1 from j=2).
/// No branch is discarded: success probability is 1.
RoundResult correct_physical_bitflip(const MixedState& input, int m,
                                     const BitFlipStrategy& strategy);

struct RejectionReport {
    struct Entry {
        std::string input;
        std::string policy;
        double acceptance_probability;
    };
    std::vector<Entry> entries;
};

/// Acceptance probabilities of the pure products Phi+ x err, err x Phi+ and
/// Phi+ x Phi+ under the canonical policy (and the extended policy when it
/// applies). The cross products must come out exactly 0.
RejectionReport verify_rejection(ErrorKind::Type kind, int m);

struct CollapseResult {
    double probability;
    PureState state;
};

/// Runs a pure two-copy product through the kind's pre-stage and parity
/// checks, selects one homodyne pattern, and applies the policy's corrective
/// flips. Returns nothing if the pattern has zero probability.
std::optional<CollapseResult> collapse_under_pattern(const PureState& product,
                                                     ErrorKind::Type kind, int m,
                                                     const SelectionPolicy& policy,
                                                     const std::string& pattern);

/// Copy-two mode names: a3 a4 b3 b4 for m = 2, else c1..cm d1..dm.
std::vector<Mode> copy_modes_a(int m);
std::vector<Mode> copy_modes_b(int m);

}  // namespace lqd
