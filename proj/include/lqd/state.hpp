// Sparse polarization-photon pure states over named spatial modes.
//
// A state is a map from basis assignments (one of H/V per registered mode) to
// complex amplitudes. States are immutable values: every operation returns a
// new state. Mode registries are kept in canonical order (letter prefix, then
// numeric suffix), so "a1" < "a2" < "a10" < "b1" < "c1".

#pragma once

#include <compare>
#include <complex>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace lqd {

using Complex = std::complex<double>;

// Amplitudes below this are dropped after every operation, so branch
// cancellations are exact in effect.
inline constexpr double kPruneThreshold = 1e-14;
inline constexpr double kNormTolerance = 1e-9;

/// A named spatial mode such as "a1", "b3", "c12".
class Mode {
public:
    Mode() = default;
    explicit Mode(std::string name);

    const std::string& name() const { return name_; }

    friend bool operator==(const Mode& a, const Mode& b) { return a.name_ == b.name_; }
    friend std::strong_ordering operator<=>(const Mode& a, const Mode& b) {
        if (auto c = a.prefix_ <=> b.prefix_; c != 0) return c;
        if (auto c = a.index_ <=> b.index_; c != 0) return c;
        return a.name_ <=> b.name_;
    }

private:
    std::string name_;
    std::string prefix_;
    int index_ = 0;
};

/// Parses a space-separated list of mode names ("a1 a2 b1 b2").
std::vector<Mode> modes_from(std::string_view names);

/// Basis assignment: one 'H' or 'V' character per registry position.
using Ket = std::string;

/// The four Bell kinds, used both for the two-photon states and for the
/// logic-level states built from GHZ blocks.
enum class BellKind { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

enum class Sign { Plus, Minus };

/// Term identity: basis ket plus any pending probe phase tags (in units of
/// the cross-Kerr phase). Tags are signed integers; zero entries are omitted
/// so "tag 0" and "no tag" compare equal.
struct TermKey {
    Ket ket;
    std::map<int, int> tags;

    friend auto operator<=>(const TermKey&, const TermKey&) = default;
};

class PureState {
public:
    using TermMap = std::map<TermKey, Complex>;

    /// Builds a state over the given modes. The registry is sorted into
    /// canonical order and kets are permuted to match. With normalize=false
    /// the terms must already have unit norm (within kNormTolerance).
    PureState(std::vector<Mode> registry, TermMap terms, bool normalize = false);

    /// Low-level constructor carrying open probe ids (probes written by a
    /// parity gate but not yet read out).
    PureState(std::vector<Mode> registry, TermMap terms, std::set<int> open_probes,
              bool normalize);

    const std::vector<Mode>& registry() const { return registry_; }
    const TermMap& terms() const { return terms_; }
    const std::set<int>& open_probes() const { return open_probes_; }
    std::size_t num_modes() const { return registry_.size(); }
    bool probe_open(int probe) const { return open_probes_.count(probe) > 0; }

    /// Index of a mode in the registry; throws std::invalid_argument if the
    /// mode is not registered.
    std::size_t position(const Mode& mode) const;

    double norm() const;

    // Single-mode gates.
    PureState hadamard(const Mode& mode) const;
    PureState pauli_x(const Mode& mode) const;
    PureState pauli_z(const Mode& mode) const;

    /// Tensor product; the registries must be disjoint. The result registry
    /// is the canonical merge of both.
    PureState tensor(const PureState& other) const;

    /// Renames modes (modes absent from the map keep their name) and
    /// re-canonicalizes the registry.
    PureState relabeled(const std::map<Mode, Mode>& renames) const;

    std::string to_string() const;

private:
    std::vector<Mode> registry_;
    TermMap terms_;
    std::set<int> open_probes_;
};

// --- canonical state constructors -----------------------------------------

/// Two-photon Bell state, amplitudes +-1/sqrt(2):
///   phi+- = (HH +- VV)/sqrt2,  psi+- = (HV +- VH)/sqrt2.
PureState make_bell(BellKind kind, const Mode& x, const Mode& y);

/// m-photon GHZ state (H^m +- V^m)/sqrt2, m >= 2.
PureState make_ghz(Sign sign, const std::vector<Mode>& modes);

/// Logic Bell state over two m-photon GHZ blocks:
///   Phi+- = (G+ G+ +- G- G-)/sqrt2,  Psi+- = (G+ G- +- G- G+)/sqrt2.
PureState make_logic_bell(BellKind kind, int m, const std::vector<Mode>& modes_a,
                          const std::vector<Mode>& modes_b);

/// Logic Bell state on the default registry a1..am, b1..bm.
PureState make_logic_bell(BellKind kind, int m);

/// The state reached from Phi+_m by a bit flip on photon j (1-based) of
/// logic qubit A, on the default registry.
PureState make_upsilon(int m, int flipped_index);

std::vector<Mode> default_modes_a(int m);
std::vector<Mode> default_modes_b(int m);

// --- inner products and comparisons ----------------------------------------

/// <s1|s2>; the registries must be identical.
Complex inner_product(const PureState& s1, const PureState& s2);

/// |<target|s>|^2 in [0,1].
double fidelity_pure(const PureState& s, const PureState& target);

/// Term-by-term equality of amplitudes within tol (literal signs, not up to
/// global phase).
bool approx_equal(const PureState& a, const PureState& b, double tol = 1e-12);

// --- measurement ------------------------------------------------------------

/// One outcome of a |+/-> basis measurement: the pattern has one '+'/'-' per
/// measured mode, in the order the modes were listed. The post state drops
/// the measured modes from the registry.
struct DiagOutcome {
    std::string pattern;
    double probability;
    PureState post;
};

/// Projective measurement of the listed modes in the |+/-> basis. Enumerates
/// every outcome with nonzero probability; probabilities sum to 1.
std::vector<DiagOutcome> measure_diag(const PureState& state, const std::vector<Mode>& modes);

}  // namespace lqd
