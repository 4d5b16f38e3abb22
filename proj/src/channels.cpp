#include "lqd/channels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lqd {

void validate_mixture(const MixedState& mixed) {
    if (mixed.components.empty()) throw std::invalid_argument("mixture has no components");
    double total = 0.0;
    const auto& registry = mixed.components.front().state.registry();
    for (const auto& [weight, state] : mixed.components) {
        if (weight <= 0.0) throw std::invalid_argument("mixture weights must be positive");
        if (state.registry() != registry)
            throw std::invalid_argument("mixture components disagree on the mode registry");
        total += weight;
    }
    if (std::abs(total - 1.0) > 1e-10)
        throw std::invalid_argument("mixture weights sum to " + std::to_string(total));
}

MixedState consolidated(const MixedState& mixed, double tol) {
    MixedState out;
    for (const auto& component : mixed.components) {
        bool merged = false;
        for (auto& existing : out.components) {
            if (approx_equal(existing.state, component.state, tol)) {
                existing.weight += component.weight;
                merged = true;
                break;
            }
        }
        if (!merged) out.components.push_back(component);
    }
    return out;
}

PureState error_state(const ErrorKind& kind, int m) {
    switch (kind.type) {
        case ErrorKind::Type::LogicBitFlip:
            return make_logic_bell(BellKind::PsiPlus, m);
        case ErrorKind::Type::LogicPhaseFlip:
            return make_logic_bell(BellKind::PhiMinus, m);
        case ErrorKind::Type::PhysicalBitFlip:
            return make_upsilon(m, kind.photon);
        case ErrorKind::Type::PhysicalPhaseFlip: {
            if (kind.photon < 1 || kind.photon > m)
                throw std::invalid_argument("flipped photon index out of range");
            return make_logic_bell(BellKind::PhiPlus, m)
                .pauli_z(Mode("a" + std::to_string(kind.photon)));
        }
    }
    throw std::logic_error("unreachable error kind");
}

MixedState make_mixture(const ErrorKind& kind, double F, int m) {
    if (F < 0.0 || F > 1.0) throw std::invalid_argument("F must lie in [0,1]");
    if (m < 2) throw std::invalid_argument("logic qubits need m >= 2 photons");
    MixedState out;
    if (F > 0.0) out.components.push_back({F, make_logic_bell(BellKind::PhiPlus, m)});
    if (F < 1.0) out.components.push_back({1.0 - F, error_state(kind, m)});
    validate_mixture(out);
    return out;
}

double fidelity(const MixedState& mixed, const PureState& target) {
    validate_mixture(mixed);
    double acc = 0.0;
    for (const auto& [weight, state] : mixed.components)
        acc += weight * fidelity_pure(state, target);
    return std::clamp(acc, 0.0, 1.0);
}

Eigen::MatrixXcd density_matrix(const MixedState& mixed) {
    validate_mixture(mixed);
    const auto& registry = mixed.components.front().state.registry();
    const std::size_t n = registry.size();
    if (n > 12) throw std::invalid_argument("density matrix limited to 12 photons");
    const Eigen::Index dim = Eigen::Index{1} << n;

    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [weight, state] : mixed.components) {
        if (!state.open_probes().empty())
            throw std::invalid_argument("density matrix over states with open probes");
        Eigen::VectorXcd vec = Eigen::VectorXcd::Zero(dim);
        for (const auto& [key, amp] : state.terms()) {
            Eigen::Index idx = 0;
            for (std::size_t pos = 0; pos < n; ++pos)
                if (key.ket[pos] == 'V') idx |= Eigen::Index{1} << (n - 1 - pos);
            vec(idx) = amp;
        }
        rho.noalias() += weight * (vec * vec.adjoint());
    }
    return rho;
}

bool physical_phase_flip_matches_logic_bit_flip(int m) {
    const PureState psi_plus = make_logic_bell(BellKind::PsiPlus, m);
    for (int j = 1; j <= m; ++j) {
        const PureState flipped = error_state(ErrorKind::physical_phase(j), m);
        if (std::abs(std::abs(inner_product(psi_plus, flipped)) - 1.0) > 1e-12) return false;
    }
    return true;
}

}  // namespace lqd
