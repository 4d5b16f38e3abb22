// Brute-force reference machinery for the tests: dense state vectors,
// operators and projectors over the full 2^n basis, composed by plain matrix
// algebra. This path shares no logic with the sparse simulator beyond the
// state constructors, so agreement between the two is a real check.

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "lqd/channels.hpp"
#include "lqd/state.hpp"

namespace lqd::oracle {

/// Dense 2^n vector of a pure state; V at registry position p sets bit
/// (n-1-p), so the first mode is the most significant bit.
Eigen::VectorXcd state_vector(const PureState& state);

Eigen::MatrixXcd density_matrix(const MixedState& mixed);

/// Single-qubit operator u embedded at registry position pos of an n-photon
/// system.
Eigen::MatrixXcd embed_single(std::size_t n, std::size_t pos, const Eigen::Matrix2cd& u);

Eigen::Matrix2cd hadamard_2x2();
Eigen::Matrix2cd pauli_x_2x2();
Eigen::Matrix2cd pauli_z_2x2();

/// Projector onto the even (HH/VV) or odd (HV/VH) parity sector of the mode
/// pair at positions (x, y).
Eigen::MatrixXcd parity_projector(std::size_t n, std::size_t x, std::size_t y, bool even);

/// Projector onto the |+> (plus=true) or |-> outcome at position pos.
Eigen::MatrixXcd diag_projector(std::size_t n, std::size_t pos, bool plus);

/// Partial trace dropping the listed positions (ascending, unique).
Eigen::MatrixXcd partial_trace(const Eigen::MatrixXcd& rho, std::size_t n,
                               const std::vector<std::size_t>& drop);

struct PipelineResult {
    double success = 0.0;
    double fidelity = 0.0;
};

/// The full canonical-policy distillation round computed on density matrices:
/// (Hadamards for the bit-flip kind) -> even-parity projectors on every probe
/// pair -> |+/-> projectors on the copy-two modes -> partner phase flips ->
/// (final Hadamards for the bit-flip kind) -> fidelity against Phi+_m.
PipelineResult run_distill_dm(const MixedState& input, bool bit_flip_kind, int m);

}  // namespace lqd::oracle
