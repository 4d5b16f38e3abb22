// Mixed states as finite weighted ensembles of pure states, the four error
// channels acting on a logic pair, and ensemble fidelities. Density matrices
// exist only as a verification backend for small instances.

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lqd/state.hpp"

namespace lqd {

struct ErrorKind {
    enum class Type { LogicBitFlip, LogicPhaseFlip, PhysicalBitFlip, PhysicalPhaseFlip };

    Type type = Type::LogicBitFlip;
    int photon = 1;  // for the physical kinds: photon index within logic qubit A

    static ErrorKind logic_bit() { return {Type::LogicBitFlip, 0}; }
    static ErrorKind logic_phase() { return {Type::LogicPhaseFlip, 0}; }
    static ErrorKind physical_bit(int j = 1) { return {Type::PhysicalBitFlip, j}; }
    static ErrorKind physical_phase(int j = 1) { return {Type::PhysicalPhaseFlip, j}; }
};

struct MixedState {
    struct Component {
        double weight;
        PureState state;
    };
    std::vector<Component> components;
};

/// Weights must be positive and sum to 1; all components share one registry.
void validate_mixture(const MixedState& mixed);

/// Merges components whose states agree term-by-term within tol.
MixedState consolidated(const MixedState& mixed, double tol = 1e-9);

/// The (1-F) component a channel of the given kind produces from Phi+_m:
/// Psi+_m for a logic bit flip, Phi-_m for a logic phase flip, Upsilon+_m(j)
/// for a physical bit flip, Z_aj Phi+_m for a physical phase flip.
PureState error_state(const ErrorKind& kind, int m);

/// Two-component ensemble {(F, Phi+_m), (1-F, error_state)} on the default
/// registry a1..am, b1..bm. Zero-weight components are dropped.
MixedState make_mixture(const ErrorKind& kind, double F, int m);

/// sum_i w_i |<target|psi_i>|^2.
double fidelity(const MixedState& mixed, const PureState& target);

/// Dense density matrix sum_i w_i |psi_i><psi_i| over the full 2^n basis.
/// Basis index: bit (n-1-pos) of the index is 1 iff the ket has V at
/// registry position pos (first mode = most significant bit). Limited to
/// n <= 12 photons; states must carry no open probe tags.
Eigen::MatrixXcd density_matrix(const MixedState& mixed);

/// True iff a Z on any single photon of logic qubit A maps Phi+_m to a state
/// equal to Psi+_m up to global phase (checked for every photon index).
bool physical_phase_flip_matches_logic_bit_flip(int m);

}  // namespace lqd
