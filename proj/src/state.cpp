#include "lqd/state.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lqd {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void prune(PureState::TermMap& terms) {
    for (auto it = terms.begin(); it != terms.end();) {
        if (std::abs(it->second) < kPruneThreshold) {
            it = terms.erase(it);
        } else {
            ++it;
        }
    }
}

double map_norm_sq(const PureState::TermMap& terms) {
    double s = 0.0;
    for (const auto& [key, amp] : terms) s += std::norm(amp);
    return s;
}

void add_term(PureState::TermMap& terms, TermKey key, Complex amp) {
    auto [it, inserted] = terms.emplace(std::move(key), amp);
    if (!inserted) it->second += amp;
}

}  // namespace

Mode::Mode(std::string name) : name_(std::move(name)) {
    if (name_.empty()) throw std::invalid_argument("mode name must not be empty");
    std::size_t i = 0;
    while (i < name_.size() && std::isalpha(static_cast<unsigned char>(name_[i]))) ++i;
    if (i == 0) throw std::invalid_argument("mode name must start with a letter: " + name_);
    prefix_ = name_.substr(0, i);
    if (i < name_.size()) {
        std::size_t digits = 0;
        int idx = 0;
        for (std::size_t j = i; j < name_.size(); ++j) {
            if (!std::isdigit(static_cast<unsigned char>(name_[j])))
                throw std::invalid_argument("mode name suffix must be numeric: " + name_);
            idx = idx * 10 + (name_[j] - '0');
            ++digits;
        }
        if (digits > 6) throw std::invalid_argument("mode index too large: " + name_);
        index_ = idx;
    }
}

std::vector<Mode> modes_from(std::string_view names) {
    std::vector<Mode> out;
    std::string current;
    for (char c : names) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!current.empty()) {
                out.emplace_back(current);
                current.clear();
            }
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty()) out.emplace_back(current);
    return out;
}

PureState::PureState(std::vector<Mode> registry, TermMap terms, bool normalize)
    : PureState(std::move(registry), std::move(terms), std::set<int>{}, normalize) {}

PureState::PureState(std::vector<Mode> registry, TermMap terms, std::set<int> open_probes,
                     bool normalize)
    : open_probes_(std::move(open_probes)) {
    const std::size_t n = registry.size();
    if (n == 0) throw std::invalid_argument("state needs at least one mode");

    // Sort the registry canonically, remembering where each input position lands.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return registry[i] < registry[j]; });
    registry_.reserve(n);
    for (std::size_t i : order) registry_.push_back(registry[i]);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (registry_[i] == registry_[i + 1])
            throw std::invalid_argument("duplicate mode in registry: " + registry_[i].name());
    }

    const bool permuted = !std::is_sorted(order.begin(), order.end());
    for (auto& [key, amp] : terms) {
        if (key.ket.size() != n)
            throw std::invalid_argument("basis ket length does not match registry size");
        for (char c : key.ket) {
            if (c != 'H' && c != 'V')
                throw std::invalid_argument("basis ket must be over {H,V}: " + key.ket);
        }
        TermKey moved = key;
        if (permuted) {
            Ket permuted_ket(n, '?');
            for (std::size_t i = 0; i < n; ++i) permuted_ket[i] = key.ket[order[i]];
            moved.ket = std::move(permuted_ket);
        }
        add_term(terms_, std::move(moved), amp);
    }
    prune(terms_);

    const double nsq = map_norm_sq(terms_);
    if (normalize) {
        if (nsq <= 0.0) throw std::invalid_argument("cannot normalize a zero state");
        const double inv = 1.0 / std::sqrt(nsq);
        for (auto& [key, amp] : terms_) amp *= inv;
    } else if (std::abs(nsq - 1.0) > kNormTolerance) {
        throw std::invalid_argument("state is not normalized (norm^2 = " + std::to_string(nsq) +
                                    ")");
    }
}

std::size_t PureState::position(const Mode& mode) const {
    auto it = std::lower_bound(registry_.begin(), registry_.end(), mode);
    if (it == registry_.end() || !(*it == mode))
        throw std::invalid_argument("unknown mode: " + mode.name());
    return static_cast<std::size_t>(it - registry_.begin());
}

double PureState::norm() const { return std::sqrt(map_norm_sq(terms_)); }

PureState PureState::hadamard(const Mode& mode) const {
    const std::size_t pos = position(mode);
    TermMap out;
    for (const auto& [key, amp] : terms_) {
        // H -> (H+V)/sqrt2, V -> (H-V)/sqrt2
        TermKey k_h = key;
        k_h.ket[pos] = 'H';
        TermKey k_v = key;
        k_v.ket[pos] = 'V';
        if (key.ket[pos] == 'H') {
            add_term(out, std::move(k_h), amp * kInvSqrt2);
            add_term(out, std::move(k_v), amp * kInvSqrt2);
        } else {
            add_term(out, std::move(k_h), amp * kInvSqrt2);
            add_term(out, std::move(k_v), -amp * kInvSqrt2);
        }
    }
    prune(out);
    return PureState(registry_, std::move(out), open_probes_, false);
}

PureState PureState::pauli_x(const Mode& mode) const {
    const std::size_t pos = position(mode);
    TermMap out;
    for (const auto& [key, amp] : terms_) {
        TermKey k = key;
        k.ket[pos] = (key.ket[pos] == 'H') ? 'V' : 'H';
        add_term(out, std::move(k), amp);
    }
    return PureState(registry_, std::move(out), open_probes_, false);
}

PureState PureState::pauli_z(const Mode& mode) const {
    const std::size_t pos = position(mode);
    TermMap out;
    for (const auto& [key, amp] : terms_) {
        add_term(out, key, key.ket[pos] == 'V' ? -amp : amp);
    }
    return PureState(registry_, std::move(out), open_probes_, false);
}

PureState PureState::tensor(const PureState& other) const {
    for (const auto& m : other.registry_) {
        if (std::binary_search(registry_.begin(), registry_.end(), m))
            throw std::invalid_argument("tensor registries overlap at mode " + m.name());
    }
    for (int p : other.open_probes_) {
        if (open_probes_.count(p))
            throw std::invalid_argument("tensor factors share open probe " + std::to_string(p));
    }

    std::vector<Mode> merged = registry_;
    merged.insert(merged.end(), other.registry_.begin(), other.registry_.end());
    std::sort(merged.begin(), merged.end());
    const std::size_t n = merged.size();

    // Positions of each factor's modes inside the merged registry.
    std::vector<std::size_t> pos_a(registry_.size()), pos_b(other.registry_.size());
    for (std::size_t i = 0; i < registry_.size(); ++i)
        pos_a[i] = static_cast<std::size_t>(
            std::lower_bound(merged.begin(), merged.end(), registry_[i]) - merged.begin());
    for (std::size_t i = 0; i < other.registry_.size(); ++i)
        pos_b[i] = static_cast<std::size_t>(
            std::lower_bound(merged.begin(), merged.end(), other.registry_[i]) - merged.begin());

    TermMap out;
    for (const auto& [ka, amp_a] : terms_) {
        for (const auto& [kb, amp_b] : other.terms_) {
            TermKey key;
            key.ket.assign(n, '?');
            for (std::size_t i = 0; i < pos_a.size(); ++i) key.ket[pos_a[i]] = ka.ket[i];
            for (std::size_t i = 0; i < pos_b.size(); ++i) key.ket[pos_b[i]] = kb.ket[i];
            key.tags = ka.tags;
            key.tags.insert(kb.tags.begin(), kb.tags.end());
            add_term(out, std::move(key), amp_a * amp_b);
        }
    }
    std::set<int> probes = open_probes_;
    probes.insert(other.open_probes_.begin(), other.open_probes_.end());
    return PureState(std::move(merged), std::move(out), std::move(probes), false);
}

PureState PureState::relabeled(const std::map<Mode, Mode>& renames) const {
    std::vector<Mode> renamed;
    renamed.reserve(registry_.size());
    for (const auto& m : registry_) {
        auto it = renames.find(m);
        renamed.push_back(it == renames.end() ? m : it->second);
    }
    TermMap terms = terms_;
    return PureState(std::move(renamed), std::move(terms), open_probes_, false);
}

std::string PureState::to_string() const {
    std::ostringstream os;
    os << "modes:";
    for (const auto& m : registry_) os << ' ' << m.name();
    os << '\n';
    for (const auto& [key, amp] : terms_) {
        os << "  ";
        if (std::abs(amp.imag()) < 1e-15) {
            os << amp.real();
        } else {
            os << '(' << amp.real() << (amp.imag() < 0 ? "" : "+") << amp.imag() << "i)";
        }
        os << " |" << key.ket << ">";
        for (const auto& [probe, tag] : key.tags)
            os << " [probe " << probe << ": " << (tag > 0 ? "+" : "") << tag << "]";
        os << '\n';
    }
    return os.str();
}

PureState make_bell(BellKind kind, const Mode& x, const Mode& y) {
    if (x == y) throw std::invalid_argument("Bell state needs two distinct modes");
    const bool phi = (kind == BellKind::PhiPlus || kind == BellKind::PhiMinus);
    const bool plus = (kind == BellKind::PhiPlus || kind == BellKind::PsiPlus);
    PureState::TermMap terms;
    if (phi) {
        terms[{"HH", {}}] = kInvSqrt2;
        terms[{"VV", {}}] = plus ? kInvSqrt2 : -kInvSqrt2;
    } else {
        terms[{"HV", {}}] = kInvSqrt2;
        terms[{"VH", {}}] = plus ? kInvSqrt2 : -kInvSqrt2;
    }
    return PureState({x, y}, std::move(terms));
}

PureState make_ghz(Sign sign, const std::vector<Mode>& modes) {
    if (modes.size() < 2) throw std::invalid_argument("GHZ state needs at least two modes");
    PureState::TermMap terms;
    terms[{Ket(modes.size(), 'H'), {}}] = kInvSqrt2;
    terms[{Ket(modes.size(), 'V'), {}}] = (sign == Sign::Plus) ? kInvSqrt2 : -kInvSqrt2;
    // All-H and all-V kets are invariant under registry reordering.
    return PureState(modes, std::move(terms));
}

PureState make_logic_bell(BellKind kind, int m, const std::vector<Mode>& modes_a,
                          const std::vector<Mode>& modes_b) {
    if (m < 2) throw std::invalid_argument("logic qubits need m >= 2 photons");
    if (modes_a.size() != static_cast<std::size_t>(m) ||
        modes_b.size() != static_cast<std::size_t>(m))
        throw std::invalid_argument("logic Bell state needs m modes per logic qubit");

    const bool phi = (kind == BellKind::PhiPlus || kind == BellKind::PhiMinus);
    const bool plus = (kind == BellKind::PhiPlus || kind == BellKind::PsiPlus);
    const double rel = plus ? 1.0 : -1.0;

    // Phi: (G+ G+ +- G- G-)/sqrt2, Psi: (G+ G- +- G- G+)/sqrt2.
    PureState first = make_ghz(Sign::Plus, modes_a)
                          .tensor(make_ghz(phi ? Sign::Plus : Sign::Minus, modes_b));
    PureState second = make_ghz(Sign::Minus, modes_a)
                           .tensor(make_ghz(phi ? Sign::Minus : Sign::Plus, modes_b));

    PureState::TermMap terms;
    for (const auto& [key, amp] : first.terms()) add_term(terms, key, amp * kInvSqrt2);
    for (const auto& [key, amp] : second.terms()) add_term(terms, key, rel * amp * kInvSqrt2);
    prune(terms);
    return PureState(first.registry(), std::move(terms));
}

std::vector<Mode> default_modes_a(int m) {
    std::vector<Mode> out;
    for (int i = 1; i <= m; ++i) out.emplace_back("a" + std::to_string(i));
    return out;
}

std::vector<Mode> default_modes_b(int m) {
    std::vector<Mode> out;
    for (int i = 1; i <= m; ++i) out.emplace_back("b" + std::to_string(i));
    return out;
}

PureState make_logic_bell(BellKind kind, int m) {
    return make_logic_bell(kind, m, default_modes_a(m), default_modes_b(m));
}

PureState make_upsilon(int m, int flipped_index) {
    if (flipped_index < 1 || flipped_index > m)
        throw std::invalid_argument("flipped photon index out of range");
    return make_logic_bell(BellKind::PhiPlus, m)
        .pauli_x(Mode("a" + std::to_string(flipped_index)));
}

Complex inner_product(const PureState& s1, const PureState& s2) {
    if (s1.registry() != s2.registry())
        throw std::invalid_argument("inner product requires identical registries");
    Complex acc = 0.0;
    const auto& a = s1.terms();
    const auto& b = s2.terms();
    // Walk the smaller map.
    if (a.size() <= b.size()) {
        for (const auto& [key, amp] : a) {
            auto it = b.find(key);
            if (it != b.end()) acc += std::conj(amp) * it->second;
        }
    } else {
        for (const auto& [key, amp] : b) {
            auto it = a.find(key);
            if (it != a.end()) acc += std::conj(it->second) * amp;
        }
    }
    return acc;
}

double fidelity_pure(const PureState& s, const PureState& target) {
    // Rounding can push |<t|s>|^2 a few ulp past 1 for normalized inputs.
    return std::clamp(std::norm(inner_product(target, s)), 0.0, 1.0);
}

bool approx_equal(const PureState& a, const PureState& b, double tol) {
    if (a.registry() != b.registry()) return false;
    for (const auto& [key, amp] : a.terms()) {
        auto it = b.terms().find(key);
        const Complex other = (it == b.terms().end()) ? Complex{0.0} : it->second;
        if (std::abs(amp - other) > tol) return false;
    }
    for (const auto& [key, amp] : b.terms()) {
        if (!a.terms().count(key) && std::abs(amp) > tol) return false;
    }
    return true;
}

std::vector<DiagOutcome> measure_diag(const PureState& state, const std::vector<Mode>& modes) {
    if (modes.empty()) throw std::invalid_argument("measure_diag needs at least one mode");
    if (modes.size() >= state.num_modes())
        throw std::invalid_argument("cannot measure away every mode");

    std::vector<std::size_t> positions;
    positions.reserve(modes.size());
    for (const auto& m : modes) positions.push_back(state.position(m));
    {
        auto sorted = positions;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("duplicate mode in measurement list");
    }

    std::vector<bool> measured(state.num_modes(), false);
    for (std::size_t p : positions) measured[p] = true;
    std::vector<Mode> kept;
    for (std::size_t i = 0; i < state.num_modes(); ++i)
        if (!measured[i]) kept.push_back(state.registry()[i]);

    const std::size_t k = modes.size();
    if (k > 16) throw std::invalid_argument("measurement outcome enumeration too large");
    const double scale = std::pow(0.5, static_cast<double>(k) / 2.0);

    std::vector<DiagOutcome> out;
    for (std::size_t bits = 0; bits < (std::size_t{1} << k); ++bits) {
        std::string pattern(k, '+');
        for (std::size_t i = 0; i < k; ++i)
            if (bits & (std::size_t{1} << i)) pattern[i] = '-';

        PureState::TermMap post;
        for (const auto& [key, amp] : state.terms()) {
            // <pattern|ket> on the measured modes: each V at a '-' mode flips the sign.
            double sign = 1.0;
            for (std::size_t i = 0; i < k; ++i)
                if (pattern[i] == '-' && key.ket[positions[i]] == 'V') sign = -sign;
            TermKey reduced;
            reduced.tags = key.tags;
            reduced.ket.reserve(kept.size());
            for (std::size_t i = 0; i < state.num_modes(); ++i)
                if (!measured[i]) reduced.ket.push_back(key.ket[i]);
            add_term(post, std::move(reduced), amp * sign * scale);
        }
        prune(post);
        const double prob = map_norm_sq(post);
        if (prob < 1e-18) continue;
        out.push_back(
            {std::move(pattern), prob, PureState(kept, std::move(post), state.open_probes(), true)});
    }
    return out;
}

}  // namespace lqd
