// Idealized cross-Kerr QND parity check: a parity-check gate (PCG) writes a
// phase tag onto a coherent probe beam conditioned on the polarizations of a
// mode pair, and an X-homodyne readout measures |tag| only, so the +theta and
// -theta branches stay coherent and are merged with relative phase +1
// (perfect classical feed-forward after the readout).

#pragma once

#include <vector>

#include "lqd/state.hpp"

namespace lqd {

/// Names one coherent probe beam. A probe is written by exactly one PCG and
/// read by exactly one homodyne.
using ProbeId = int;

enum class Parity { Even, Odd };

inline char to_char(Parity p) { return p == Parity::Even ? 'E' : 'O'; }

/// Runs the mode pair (x, y) through a PCG coupled to `probe`. Per term:
/// HH adds +1 to the probe's tag, VV adds -1, HV/VH add 0. Amplitudes are
/// untouched; the probe becomes open on the returned state.
PureState apply_pcg(const PureState& state, const Mode& x, const Mode& y, ProbeId probe);

struct HomodyneOutcome {
    Parity parity;  // Even <=> |tag| = 1, Odd <=> tag = 0
    double probability;
    PureState post;
};

/// X-homodyne readout of an open probe. Terms are partitioned by |tag|; the
/// Even outcome's +1/-1 branches are merged coherently with no relative
/// phase. Outcomes with zero probability are omitted; the rest sum to 1.
std::vector<HomodyneOutcome> homodyne(const PureState& state, ProbeId probe);

/// apply_pcg followed by homodyne with a fresh probe.
std::vector<HomodyneOutcome> parity_check(const PureState& state, const Mode& x, const Mode& y);

}  // namespace lqd
