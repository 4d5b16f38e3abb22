// Closed-form round analytics: the fidelity map F' = F^2/(F^2+(1-F)^2),
// acceptance probabilities, fixed-point iteration, and exact-vs-formula
// comparison reports.

#pragma once

#include <string>
#include <vector>

#include "lqd/channels.hpp"
#include "lqd/protocols.hpp"

namespace lqd {

enum class PolicyKind { Canonical, Extended };

/// F' = F^2 / (F^2 + (1-F)^2); fixed points at 0, 1/2 and 1.
double fidelity_map(double F);

/// Acceptance probability of the four-photon bit-flip round:
/// (F^2+(1-F)^2)/8 canonical, four times that for the extended policy.
double success_probability(double F, PolicyKind policy);

/// Acceptance probability for general m and kind. Bit-flip rounds select one
/// branch out of 2^(2m-1) per surviving component; phase-flip rounds have
/// only two probe branches, so the canonical value is (F^2+(1-F)^2)/2.
double expected_success_probability(double F, ErrorKind::Type kind, int m, PolicyKind policy);

struct IterationTrace {
    std::vector<double> fidelities;     // F0, F1, ..., Fn
    std::vector<double> success_probs;  // acceptance probability entering each round
    double expected_yield = 1.0;        // product of (p_i / 2): two copies in, one out
};

/// Iterates the fidelity map from F0 in (1/2, 1]; rounds >= 1.
IterationTrace iterate(double F0, int rounds, PolicyKind policy);

struct ComparisonRow {
    double F;
    double exact_fidelity;
    double formula_fidelity;
    double exact_success;
    double formula_success;
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double max_fidelity_diff = 0.0;
    double max_success_diff = 0.0;
};

/// Runs the exact round at every grid point and compares against the
/// closed forms.
ComparisonReport compare_exact_vs_formula(const std::vector<double>& grid, int m,
                                          ErrorKind::Type kind,
                                          PolicyKind policy = PolicyKind::Canonical);

}  // namespace lqd
