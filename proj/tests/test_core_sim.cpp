#include <cmath>

#include "doctest.h"
#include "qtk/gates.hpp"
#include "qtk/rng.hpp"
#include "qtk/sim.hpp"
#include "qtk/state.hpp"
#include "support/oracles.hpp"

using namespace qtk;

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

QutritRegister two_qutrit(const std::vector<Cx>& amps) {
    return QutritRegister::from_amplitudes(2, amps);
}
}  // namespace

TEST_CASE("apply_gate identity keeps amplitudes") {
    QutritRegister st = QutritRegister::basis(3, 14);
    st.apply_gate(GateMatrix::identity(1), std::vector<int>{1});
    CHECK(st.amplitude(14) == Cx(1.0, 0.0));
    st.apply_gate(GateMatrix::identity(2), std::vector<int>{0, 2});
    CHECK(st.amplitude(14) == Cx(1.0, 0.0));
    CHECK(st.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("xx_tilde with zero angles is the identity instruction") {
    QutritRegister st(2);
    st.apply_gate(xx_tilde(0.0, 0.0, 0.0), std::vector<int>{0, 1});
    CHECK(std::abs(st.amplitude(0) - Cx(1.0, 0.0)) < 1e-15);
    CHECK(st.norm_sq() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("XX(pi/4) on |00> gives (|00> - i|11>)/sqrt2") {
    QutritRegister st(2);
    st.apply_gate(xx(kPi / 4.0), std::vector<int>{0, 1});
    CHECK(std::abs(st.amplitude(0) - Cx(kInvSqrt2, 0.0)) < 1e-12);
    CHECK(std::abs(st.amplitude(4) - Cx(0.0, -kInvSqrt2)) < 1e-12);
    CHECK(st.population(0, 2) == 0.0);
}

TEST_CASE("apply_gate rejects bad targets") {
    QutritRegister st(2);
    CHECK_THROWS_AS(st.apply_gate(xx(0.1), std::vector<int>{0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(st.apply_gate(xx(0.1), std::vector<int>{0, 2}), std::invalid_argument);
    CHECK_THROWS_AS(st.apply_gate(r_0j(1, 0.3, 0.0), std::vector<int>{0, 1}),
                    std::invalid_argument);
}

TEST_CASE("circuit_unitary of an empty circuit is the identity") {
    Circuit c;
    c.n = 2;
    const Unitary u = circuit_unitary(c, 2);
    CHECK(u.max_abs_diff(Unitary::identity(9)) == 0.0);
}

TEST_CASE("circuit_unitary matches the direct 9x9 construction for one XX") {
    HardwareProfile hw;
    Circuit c;
    c.n = 2;
    c.append(make_xx(kPi / 2.0, 0, 1, hw));
    const Unitary u = circuit_unitary(c, 2);
    const GateMatrix direct = xx(kPi / 2.0);
    double worst = 0.0;
    for (int r = 0; r < 9; ++r)
        for (int col = 0; col < 9; ++col)
            worst = std::max(worst, std::abs(u(static_cast<size_t>(r), static_cast<size_t>(col)) -
                                             direct(r, col)));
    CHECK(worst < 1e-12);
}

TEST_CASE("circuit_unitary guards the register size") {
    Circuit c;
    c.n = 7;
    CHECK_THROWS_AS(circuit_unitary(c, 7), std::domain_error);
}

TEST_CASE("embedded CnX oracle truth table") {
    // |110> -> |111>, unsatisfied controls and |2> components stay put
    CHECK(cnx_image_index(BasisOutcome{{1, 1, 0}}.index(), 3) ==
          BasisOutcome{{1, 1, 1}}.index());
    CHECK(cnx_image_index(BasisOutcome{{1, 1, 1}}.index(), 3) ==
          BasisOutcome{{1, 1, 0}}.index());
    CHECK(cnx_image_index(BasisOutcome{{0, 1, 0}}.index(), 3) ==
          BasisOutcome{{0, 1, 0}}.index());
    CHECK(cnx_image_index(BasisOutcome{{1, 1, 2}}.index(), 3) ==
          BasisOutcome{{1, 1, 2}}.index());
    const Unitary u = embedded_cnx_oracle(3);
    CHECK(u(BasisOutcome{{1, 1, 1}}.index(), BasisOutcome{{1, 1, 0}}.index()) == Cx(1.0, 0.0));
}

TEST_CASE("state_fidelity basics") {
    QutritRegister a = QutritRegister::basis(2, 4);
    QutritRegister b = QutritRegister::basis(2, 4);
    CHECK(state_fidelity(a, b) == doctest::Approx(1.0));
    QutritRegister c = QutritRegister::basis(2, 5);
    CHECK(state_fidelity(a, c) == doctest::Approx(0.0));
    QutritRegister plus =
        QutritRegister::from_amplitudes(1, {Cx(kInvSqrt2, 0), Cx(kInvSqrt2, 0), Cx(0, 0)});
    QutritRegister zero(1);
    CHECK(state_fidelity(zero, plus) == doctest::Approx(0.5).epsilon(1e-12));
    QutritRegister wrong_n(2);
    CHECK_THROWS_AS(state_fidelity(zero, wrong_n), std::invalid_argument);
}

TEST_CASE("sample_outcome: basis states, determinism, Born frequencies") {
    Rng rng(42);
    QutritRegister basis_state = QutritRegister::basis(3, BasisOutcome{{0, 1, 2}}.index());
    for (int i = 0; i < 16; ++i) {
        const BasisOutcome o = sample_outcome(basis_state, rng);
        CHECK(o.digits == std::vector<uint8_t>{0, 1, 2});
    }

    // uniform 2-qutrit superposition: every outcome within 4 sigma of 1/9
    std::vector<Cx> amps(9, Cx(1.0 / 3.0, 0.0));
    QutritRegister uniform = two_qutrit(amps);
    const int shots = 100000;
    std::vector<int> counts(9, 0);
    Rng r1(7);
    for (int i = 0; i < shots; ++i) counts[uniform.sample_index(r1)]++;
    const double tol = testing::binomial_4sigma(1.0 / 9.0, shots);
    for (int k = 0; k < 9; ++k) {
        CHECK(std::abs(counts[k] / static_cast<double>(shots) - 1.0 / 9.0) < tol);
    }

    // identical seed, identical stream
    Rng r2(7);
    std::vector<uint64_t> replay;
    for (int i = 0; i < 100; ++i) replay.push_back(uniform.sample_index(r2));
    Rng r3(7);
    for (int i = 0; i < 100; ++i) CHECK(replay[static_cast<size_t>(i)] == uniform.sample_index(r3));
}

TEST_CASE("norm stays 1 through a long random legal circuit") {
    HardwareProfile hw;
    Rng rng(5);
    QutritRegister st(3);
    Circuit c;
    c.n = 3;
    for (int i = 0; i < 1000; ++i) {
        switch (rng.below(4)) {
            case 0:
                c.append(make_r0j(1, rng.uniform() * 2 * kPi - kPi, rng.uniform() * 2 * kPi,
                                  {static_cast<int>(rng.below(3))}, hw));
                break;
            case 1:
                c.append(make_rx02_global(rng.uniform() * 2 * kPi - kPi, hw));
                break;
            case 2:
                c.append(make_rzj(1, rng.uniform() * 2 * kPi, {static_cast<int>(rng.below(3))}, hw));
                break;
            default: {
                const int a = static_cast<int>(rng.below(3));
                const int b = (a + 1 + static_cast<int>(rng.below(2))) % 3;
                c.append(make_xx(rng.uniform() * kPi - kPi / 2, a, b, hw));
            }
        }
    }
    apply_circuit_ideal(st, c);
    CHECK(std::abs(st.norm_sq() - 1.0) < 1e-9);
}

TEST_CASE("embedding consistency: apply_gate equals circuit_unitary columns") {
    HardwareProfile hw;
    for (int n = 2; n <= 4; ++n) {
        for (int q1 = 0; q1 < n; ++q1) {
            for (int q2 = 0; q2 < n; ++q2) {
                if (q1 == q2) continue;
                Circuit c;
                c.n = n;
                c.append(make_xx(0.7, q1, q2, hw));
                const Unitary u = circuit_unitary(c, n);
                for (uint64_t col = 0; col < pow3(n); ++col) {
                    QutritRegister st = QutritRegister::basis(n, col);
                    st.apply_gate(xx(0.7), std::vector<int>{q1, q2});
                    for (uint64_t row = 0; row < pow3(n); ++row) {
                        CHECK(std::abs(st.amplitude(row) - u(row, col)) < 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("target-order covariance: swapping targets conjugates by SWAP") {
    // random 2-qutrit unitary from native factors
    GateMatrix u = xx(0.37);
    GateMatrix lift_a = GateMatrix::identity(2);
    GateMatrix lift_b = GateMatrix::identity(2);
    const GateMatrix ra = r_0j(1, 1.1, 0.4) * rz_j(2, 0.9);
    const GateMatrix rb = r_0j(2, -0.7, 1.9);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c)
                for (int d = 0; d < 3; ++d) {
                    lift_a.at(a * 3 + b, c * 3 + d) = (b == d) ? ra(a, c) : Cx(0.0, 0.0);
                    lift_b.at(a * 3 + b, c * 3 + d) = (a == c) ? rb(b, d) : Cx(0.0, 0.0);
                }
    u = lift_a * u * lift_b;

    GateMatrix swapped(GateMatrix::identity(2));
    for (int r = 0; r < 9; ++r)
        for (int c = 0; c < 9; ++c)
            swapped.at((r % 3) * 3 + r / 3, (c % 3) * 3 + c / 3) = u(r, c);

    for (uint64_t col = 0; col < 27; ++col) {
        QutritRegister a = QutritRegister::basis(3, col);
        QutritRegister b = QutritRegister::basis(3, col);
        a.apply_gate(u, std::vector<int>{1, 2});
        b.apply_gate(swapped, std::vector<int>{2, 1});
        for (uint64_t row = 0; row < 27; ++row) {
            CHECK(std::abs(a.amplitude(row) - b.amplitude(row)) < 1e-12);
        }
    }
}

TEST_CASE("dense and sparse paths agree") {
    // Same ops on the same state; b's support is dropped by spreading it past
    // the support cap and folding it back.
    const int n = 8;
    const uint64_t dim = pow3(n);
    std::vector<Cx> amps(dim, Cx(0.0, 0.0));
    amps[3] = Cx(0.6, 0.0);
    amps[1100] = Cx(0.0, 0.8);
    QutritRegister a = QutritRegister::from_amplitudes(n, amps);
    QutritRegister b = a;
    CHECK(a.sparse());
    for (int q = 0; q < n; ++q) b.apply_1q(r_0j(1, kPi / 2.0, 0.3), q);
    for (int q = 0; q < n; ++q) b.apply_1q(r_0j(2, kPi / 2.0, 0.1), q);
    CHECK_FALSE(b.sparse());
    for (int q = n - 1; q >= 0; --q) b.apply_1q(r_0j(2, -kPi / 2.0, 0.1), q);
    for (int q = n - 1; q >= 0; --q) b.apply_1q(r_0j(1, -kPi / 2.0, 0.3), q);
    CHECK_FALSE(b.sparse());

    const GateMatrix g2 = xx_tilde(0.8, 0.2, -0.4);
    a.apply_2q(g2, 0, 2);
    b.apply_2q(g2, 0, 2);
    a.apply_diag_1q(1, 1.0, Cx(0.0, 1.0), Cx(-1.0, 0.0));
    b.apply_diag_1q(1, 1.0, Cx(0.0, 1.0), Cx(-1.0, 0.0));
    for (uint64_t i = 0; i < dim; ++i) {
        CHECK(std::abs(a.amplitude(i) - b.amplitude(i)) < 1e-10);
    }
}

TEST_CASE("project, relabel and reset behave like measurements") {
    Rng rng(11);
    // (|0> + |2>)/sqrt2 on qutrit 0 of two
    std::vector<Cx> amps(9, Cx(0.0, 0.0));
    amps[0] = Cx(kInvSqrt2, 0.0);
    amps[6] = Cx(kInvSqrt2, 0.0);
    QutritRegister st = two_qutrit(amps);
    const double kept = st.project_digit(0, 2, true);
    CHECK(kept == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(st.population(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    st.relabel_digit(0, 2, 1);
    CHECK(st.population(0, 1) == doctest::Approx(1.0).epsilon(1e-12));

    // reset channel lands on the requested digit regardless of the draw
    QutritRegister r2 = two_qutrit({Cx(0.5, 0), Cx(0, 0), Cx(0, 0), Cx(0.5, 0), Cx(0, 0),
                                    Cx(0, 0), Cx(0, 0.5), Cx(0, 0), Cx(0.5, 0)});
    r2.reset_to_digit(0, 2, rng);
    CHECK(r2.population(0, 2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r2.norm_sq() - 1.0) < 1e-12);
}
