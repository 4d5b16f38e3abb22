#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lqd/state.hpp"
#include "test_support.hpp"

using namespace lqd;
using lqd::testing::random_state;
using lqd::testing::superpose;

namespace {
const double kInv = 1.0 / std::sqrt(2.0);

Complex amp_of(const PureState& s, const std::string& ket) {
    auto it = s.terms().find(TermKey{ket, {}});
    return it == s.terms().end() ? Complex{0.0} : it->second;
}
}  // namespace

TEST_CASE("mode ordering is (prefix, numeric index)") {
    CHECK(Mode("a1") < Mode("a2"));
    CHECK(Mode("a2") < Mode("a10"));
    CHECK(Mode("a10") < Mode("b1"));
    CHECK(Mode("b2") < Mode("c1"));
    CHECK(Mode("c5") < Mode("d2"));
    CHECK_THROWS_AS(Mode(""), std::invalid_argument);
    CHECK_THROWS_AS(Mode("1a"), std::invalid_argument);
    CHECK_THROWS_AS(Mode("a1x"), std::invalid_argument);
}

TEST_CASE("bell state construction") {
    const Mode a1("a1"), a2("a2");
    const PureState phi_plus = make_bell(BellKind::PhiPlus, a1, a2);
    CHECK(amp_of(phi_plus, "HH").real() == doctest::Approx(kInv).epsilon(1e-12));
    CHECK(amp_of(phi_plus, "VV").real() == doctest::Approx(kInv).epsilon(1e-12));

    const PureState psi_plus = make_bell(BellKind::PsiPlus, a1, a2);
    CHECK(amp_of(psi_plus, "HV").real() == doctest::Approx(kInv).epsilon(1e-12));
    CHECK(amp_of(psi_plus, "VH").real() == doctest::Approx(kInv).epsilon(1e-12));

    const PureState phi_minus = make_bell(BellKind::PhiMinus, a1, a2);
    CHECK(std::abs(inner_product(phi_plus, phi_minus)) < 1e-12);

    CHECK_THROWS_AS(make_bell(BellKind::PhiPlus, a1, a1), std::invalid_argument);
}

TEST_CASE("ghz states") {
    const PureState ghz2 = make_ghz(Sign::Plus, modes_from("a1 a2"));
    CHECK(approx_equal(ghz2, make_bell(BellKind::PhiPlus, Mode("a1"), Mode("a2"))));

    const PureState ghz3 = make_ghz(Sign::Minus, modes_from("a1 a2 a3"));
    CHECK(amp_of(ghz3, "HHH").real() == doctest::Approx(kInv).epsilon(1e-12));
    CHECK(amp_of(ghz3, "VVV").real() == doctest::Approx(-kInv).epsilon(1e-12));
    CHECK(ghz3.norm() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(make_ghz(Sign::Plus, modes_from("a1")), std::invalid_argument);
}

TEST_CASE("logic bell states expand as expected") {
    // Phi+ at m=2 expands to the 4-photon GHZ state: cross terms cancel.
    const PureState phi = make_logic_bell(BellKind::PhiPlus, 2);
    CHECK(approx_equal(phi, make_ghz(Sign::Plus, modes_from("a1 a2 b1 b2"))));

    // Psi+ = (phi+ phi- + phi- phi+)/sqrt2.
    const PureState psi = make_logic_bell(BellKind::PsiPlus, 2);
    const PureState term1 = make_bell(BellKind::PhiPlus, Mode("a1"), Mode("a2"))
                                .tensor(make_bell(BellKind::PhiMinus, Mode("b1"), Mode("b2")));
    const PureState term2 = make_bell(BellKind::PhiMinus, Mode("a1"), Mode("a2"))
                                .tensor(make_bell(BellKind::PhiPlus, Mode("b1"), Mode("b2")));
    CHECK(approx_equal(psi, superpose(term1, term2, kInv, kInv)));

    CHECK(fidelity_pure(phi, make_logic_bell(BellKind::PhiPlus, 2)) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Overlapping registries are rejected.
    CHECK_THROWS_AS(make_logic_bell(BellKind::PhiPlus, 2, modes_from("a1 a2"),
                                    modes_from("a2 b1")),
                    std::invalid_argument);
}

TEST_CASE("logic-bell orthonormality (Gram matrix)") {
    for (int m : {2, 3}) {
        const std::vector<PureState> basis{
            make_logic_bell(BellKind::PhiPlus, m), make_logic_bell(BellKind::PhiMinus, m),
            make_logic_bell(BellKind::PsiPlus, m), make_logic_bell(BellKind::PsiMinus, m)};
        for (std::size_t i = 0; i < basis.size(); ++i) {
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const Complex g = inner_product(basis[i], basis[j]);
                CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("C-GHZ collapse identity for m in {2,3,4}") {
    for (int m : {2, 3, 4}) {
        std::vector<Mode> all = default_modes_a(m);
        const auto b = default_modes_b(m);
        all.insert(all.end(), b.begin(), b.end());
        CHECK(approx_equal(make_logic_bell(BellKind::PhiPlus, m), make_ghz(Sign::Plus, all)));
        // The Psi+ analogue collapses to the 2m-photon GHZ- state.
        CHECK(approx_equal(make_logic_bell(BellKind::PsiPlus, m), make_ghz(Sign::Minus, all)));
    }
}

TEST_CASE("upsilon states") {
    // X on the flipped photon restores Phi+.
    for (int m : {2, 3, 4}) {
        for (int j = 1; j <= m; ++j) {
            const PureState ups = make_upsilon(m, j);
            CHECK(approx_equal(ups.pauli_x(Mode("a" + std::to_string(j))),
                               make_logic_bell(BellKind::PhiPlus, m)));
            CHECK(fidelity_pure(ups, make_logic_bell(BellKind::PhiPlus, m)) < 1e-12);
        }
    }

    // m=3, j=1: (V H H | G+) + (H V V | G-) structure over a1a2a3 b1b2b3.
    PureState::TermMap expected;
    expected[{"VHHHHH", {}}] = kInv;
    expected[{"HVVVVV", {}}] = kInv;
    CHECK(approx_equal(make_upsilon(3, 1),
                       PureState(modes_from("a1 a2 a3 b1 b2 b3"), std::move(expected))));

    // The (psi+ phi+ + psi- phi-)/sqrt2 form corresponds to the flip on a2;
    // the flip on a1 carries a relative minus sign instead.
    const PureState psi_p = make_bell(BellKind::PsiPlus, Mode("a1"), Mode("a2"));
    const PureState psi_m = make_bell(BellKind::PsiMinus, Mode("a1"), Mode("a2"));
    const PureState phi_p = make_bell(BellKind::PhiPlus, Mode("b1"), Mode("b2"));
    const PureState phi_m = make_bell(BellKind::PhiMinus, Mode("b1"), Mode("b2"));
    CHECK(approx_equal(make_upsilon(2, 2),
                       superpose(psi_p.tensor(phi_p), psi_m.tensor(phi_m), kInv, kInv)));
    CHECK(approx_equal(make_upsilon(2, 1),
                       superpose(psi_p.tensor(phi_p), psi_m.tensor(phi_m), kInv, -kInv)));

    CHECK_THROWS_AS(make_upsilon(2, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_upsilon(2, 3), std::invalid_argument);
}

TEST_CASE("hadamard action on bell pairs") {
    const Mode a1("a1"), a2("a2");
    const PureState phi_minus = make_bell(BellKind::PhiMinus, a1, a2);
    CHECK(approx_equal(phi_minus.hadamard(a1).hadamard(a2),
                       make_bell(BellKind::PsiPlus, a1, a2)));
    const PureState phi_plus = make_bell(BellKind::PhiPlus, a1, a2);
    CHECK(approx_equal(phi_plus.hadamard(a1).hadamard(a2), phi_plus));
    CHECK_THROWS_AS(phi_plus.hadamard(Mode("z9")), std::invalid_argument);
}

TEST_CASE("pauli gates on bell pairs and logic states") {
    const Mode a1("a1"), a2("a2");
    const PureState phi_plus = make_bell(BellKind::PhiPlus, a1, a2);
    CHECK(approx_equal(phi_plus.pauli_x(a1), make_bell(BellKind::PsiPlus, a1, a2)));
    CHECK(approx_equal(phi_plus.pauli_z(a1), make_bell(BellKind::PhiMinus, a1, a2)));

    // Z on a single photon of logic Psi+ gives logic Phi+ (m=2).
    CHECK(approx_equal(make_logic_bell(BellKind::PsiPlus, 2).pauli_z(Mode("a1")),
                       make_logic_bell(BellKind::PhiPlus, 2)));
}

TEST_CASE("gate involutions and unitarity on random states") {
    std::mt19937_64 rng(0x5eed0001);
    const auto modes = modes_from("a1 a2 b1 b2");
    for (int trial = 0; trial < 50; ++trial) {
        const PureState s = random_state(rng, modes, 8);
        const Mode& target = modes[trial % modes.size()];
        CHECK(s.hadamard(target).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.pauli_x(target).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(s.pauli_z(target).norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(approx_equal(s.hadamard(target).hadamard(target), s));
        CHECK(approx_equal(s.pauli_x(target).pauli_x(target), s));
        CHECK(approx_equal(s.pauli_z(target).pauli_z(target), s));
    }
}

TEST_CASE("registry canonicalization and relabeling") {
    // Scrambled construction order lands in canonical order.
    PureState::TermMap terms;
    terms[{"HVH", {}}] = 1.0;  // b1=H, a2=V, a1=H
    const PureState s(modes_from("b1 a2 a1"), std::move(terms));
    CHECK(s.registry() == modes_from("a1 a2 b1"));
    CHECK(amp_of(s, "HVH").real() == doctest::Approx(1.0));  // a1=H, a2=V, b1=H

    const PureState renamed = s.relabeled({{Mode("a1"), Mode("c1")}});
    CHECK(renamed.registry() == modes_from("a2 b1 c1"));
    CHECK(amp_of(renamed, "VHH").real() == doctest::Approx(1.0));

    CHECK_THROWS_AS(s.tensor(s), std::invalid_argument);
}

TEST_CASE("superpositions prune cancelled branches") {
    const Mode a1("a1"), a2("a2");
    const PureState phi_plus = make_bell(BellKind::PhiPlus, a1, a2);
    const PureState phi_minus = make_bell(BellKind::PhiMinus, a1, a2);
    const PureState vv = superpose(phi_plus, phi_minus, kInv, -kInv);
    CHECK(vv.terms().size() == 1);
    CHECK(amp_of(vv, "VV").real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("inner products") {
    const PureState phi = make_logic_bell(BellKind::PhiPlus, 2);
    const PureState psi = make_logic_bell(BellKind::PsiPlus, 2);
    CHECK(inner_product(phi, phi).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(inner_product(phi, psi)) < 1e-12);
    CHECK(fidelity_pure(make_upsilon(2, 1), phi) < 1e-12);

    const PureState other = make_bell(BellKind::PhiPlus, Mode("a1"), Mode("a2"));
    CHECK_THROWS_AS(inner_product(phi, other), std::invalid_argument);
}

TEST_CASE("diagonal-basis measurement of one photon of phi+") {
    const PureState phi = make_bell(BellKind::PhiPlus, Mode("a1"), Mode("a2"));
    const auto outcomes = measure_diag(phi, {Mode("a1")});
    REQUIRE(outcomes.size() == 2);
    for (const auto& o : outcomes) {
        CHECK(o.probability == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(o.post.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(o.post.registry() == modes_from("a2"));
    }
    CHECK_THROWS_AS(measure_diag(phi, {}), std::invalid_argument);
    CHECK_THROWS_AS(measure_diag(phi, {Mode("q7")}), std::invalid_argument);
    CHECK_THROWS_AS(measure_diag(phi, {Mode("a1"), Mode("a1")}), std::invalid_argument);
}

TEST_CASE("measurement completeness on random states") {
    std::mt19937_64 rng(0x5eed0002);
    const auto modes = modes_from("a1 a2 a3 b1");
    for (int trial = 0; trial < 40; ++trial) {
        const PureState s = random_state(rng, modes, 10);
        const std::vector<Mode> measured{modes[trial % 4], modes[(trial + 1) % 4]};
        double total = 0.0;
        for (const auto& o : measure_diag(s, measured)) {
            total += o.probability;
            CHECK(o.post.norm() == doctest::Approx(1.0).epsilon(1e-10));
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}
