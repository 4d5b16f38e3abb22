#include "lqd/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace lqd {

double fidelity_map(double F) {
    if (F < 0.0 || F > 1.0) throw std::domain_error("F must lie in [0,1]");
    const double num = F * F;
    const double den = num + (1.0 - F) * (1.0 - F);
    return num / den;
}

double success_probability(double F, PolicyKind policy) {
    if (F < 0.0 || F > 1.0) throw std::domain_error("F must lie in [0,1]");
    const double canonical = (F * F + (1.0 - F) * (1.0 - F)) / 8.0;
    return policy == PolicyKind::Canonical ? canonical : 4.0 * canonical;
}

double expected_success_probability(double F, ErrorKind::Type kind, int m, PolicyKind policy) {
    if (F < 0.0 || F > 1.0) throw std::domain_error("F must lie in [0,1]");
    if (m < 2) throw std::invalid_argument("m must be at least 2");
    const double mass = F * F + (1.0 - F) * (1.0 - F);
    switch (kind) {
        case ErrorKind::Type::LogicBitFlip: {
            const double canonical = mass / std::pow(2.0, 2 * m - 1);
            if (policy == PolicyKind::Canonical) return canonical;
            if (m != 2)
                throw std::invalid_argument("the extended policy exists for m = 2 only");
            return 4.0 * canonical;
        }
        case ErrorKind::Type::LogicPhaseFlip:
            if (policy != PolicyKind::Canonical)
                throw std::invalid_argument(
                    "the extended policy applies to the bit-flip round only");
            return mass / 2.0;
        case ErrorKind::Type::PhysicalBitFlip:
        case ErrorKind::Type::PhysicalPhaseFlip:
            return 1.0;  // detection plus local flip, nothing is discarded
    }
    throw std::logic_error("unreachable error kind");
}

IterationTrace iterate(double F0, int rounds, PolicyKind policy) {
    if (rounds < 1) throw std::invalid_argument("rounds must be at least 1");
    if (!(F0 > 0.5) || F0 > 1.0)
        throw std::invalid_argument("F0 must lie in (1/2, 1]: below 1/2 a round cannot improve "
                                    "the fidelity (F' > F only for F > 1/2)");
    IterationTrace trace;
    trace.fidelities.push_back(F0);
    double F = F0;
    for (int i = 0; i < rounds; ++i) {
        const double p = success_probability(F, policy);
        trace.success_probs.push_back(p);
        trace.expected_yield *= p / 2.0;
        F = fidelity_map(F);
        trace.fidelities.push_back(F);
    }
    return trace;
}

ComparisonReport compare_exact_vs_formula(const std::vector<double>& grid, int m,
                                          ErrorKind::Type kind, PolicyKind policy) {
    ComparisonReport report;
    const SelectionPolicy selection =
        policy == PolicyKind::Canonical ? SelectionPolicy::canonical(m)
                                        : SelectionPolicy::extended();
    const ErrorKind error_kind = kind == ErrorKind::Type::LogicBitFlip
                                     ? ErrorKind::logic_bit()
                                     : ErrorKind::logic_phase();
    for (double F : grid) {
        const RoundResult round = distill_round(make_mixture(error_kind, F, m), kind, m, selection);
        ComparisonRow row{F, round.output_fidelity, fidelity_map(F), round.success_probability,
                          expected_success_probability(F, kind, m, policy)};
        report.max_fidelity_diff =
            std::max(report.max_fidelity_diff, std::abs(row.exact_fidelity - row.formula_fidelity));
        report.max_success_diff =
            std::max(report.max_success_diff, std::abs(row.exact_success - row.formula_success));
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace lqd
