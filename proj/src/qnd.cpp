#include "lqd/qnd.hpp"

#include <cmath>
#include <stdexcept>

namespace lqd {

PureState apply_pcg(const PureState& state, const Mode& x, const Mode& y, ProbeId probe) {
    if (x == y) throw std::invalid_argument("PCG needs two distinct modes");
    if (state.probe_open(probe))
        throw std::invalid_argument("probe " + std::to_string(probe) + " already in use");
    const std::size_t px = state.position(x);
    const std::size_t py = state.position(y);

    PureState::TermMap out;
    for (const auto& [key, amp] : state.terms()) {
        const char cx = key.ket[px];
        const char cy = key.ket[py];
        int delta = 0;
        if (cx == 'H' && cy == 'H') delta = 1;
        if (cx == 'V' && cy == 'V') delta = -1;
        TermKey tagged = key;
        if (delta != 0) {
            const int tag = tagged.tags[probe] + delta;
            if (tag == 0) {
                tagged.tags.erase(probe);
            } else {
                tagged.tags[probe] = tag;
            }
        }
        out.emplace(std::move(tagged), amp);
    }
    std::set<int> probes = state.open_probes();
    probes.insert(probe);
    return PureState(state.registry(), std::move(out), std::move(probes), false);
}

std::vector<HomodyneOutcome> homodyne(const PureState& state, ProbeId probe) {
    if (!state.probe_open(probe))
        throw std::invalid_argument("probe " + std::to_string(probe) + " has not been written");

    PureState::TermMap even, odd;
    double p_even = 0.0, p_odd = 0.0;
    for (const auto& [key, amp] : state.terms()) {
        auto it = key.tags.find(probe);
        const int tag = (it == key.tags.end()) ? 0 : it->second;
        if (tag != 0 && tag != 1 && tag != -1)
            throw std::logic_error("probe tag magnitude exceeds one PCG unit");

        TermKey reduced = key;
        reduced.tags.erase(probe);
        if (tag == 0) {
            p_odd += std::norm(amp);
            auto [pos, inserted] = odd.emplace(std::move(reduced), amp);
            if (!inserted) pos->second += amp;
        } else {
            p_even += std::norm(amp);
            // +theta and -theta branches land on the same key: coherent merge.
            auto [pos, inserted] = even.emplace(std::move(reduced), amp);
            if (!inserted) pos->second += amp;
        }
    }

    std::set<int> probes = state.open_probes();
    probes.erase(probe);

    std::vector<HomodyneOutcome> out;
    auto emit = [&](Parity parity, double prob, PureState::TermMap terms) {
        if (prob < 1e-18) return;
        double merged = 0.0;
        for (const auto& [key, amp] : terms) merged += std::norm(amp);
        if (std::abs(merged - prob) > 1e-9)
            throw std::logic_error("homodyne sign merge changed the branch weight");
        out.push_back({parity, prob, PureState(state.registry(), std::move(terms), probes, true)});
    };
    emit(Parity::Even, p_even, std::move(even));
    emit(Parity::Odd, p_odd, std::move(odd));
    return out;
}

std::vector<HomodyneOutcome> parity_check(const PureState& state, const Mode& x, const Mode& y) {
    ProbeId fresh = 0;
    if (!state.open_probes().empty()) fresh = *state.open_probes().rbegin() + 1;
    return homodyne(apply_pcg(state, x, y, fresh), fresh);
}

}  // namespace lqd
