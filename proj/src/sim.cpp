#include "qtk/sim.hpp"

#include <stdexcept>

#include "qtk/gates.hpp"

namespace qtk {

GateMatrix instruction_matrix(const Instruction& ins) {
    switch (ins.kind) {
        case Kind::kR0J: return r_0j(ins.j, ins.theta, ins.phi);
        case Kind::kRzJ: return rz_j(ins.j, ins.theta);
        case Kind::kXX: return xx(ins.chi);
        case Kind::kXXTilde: return xx_tilde(ins.chi, ins.chi_a, ins.chi_b);
        default: throw std::invalid_argument("instruction has no unitary");
    }
}

void apply_instruction_ideal(QutritRegister& state, const Instruction& ins) {
    if (ins.kind == Kind::kBarrier) return;
    if (ins.is_measure()) throw std::invalid_argument("cannot apply a measurement as a unitary");
    const GateMatrix m = instruction_matrix(ins);
    if (ins.is_global()) {
        for (int q = 0; q < state.n(); ++q) state.apply_1q(m, q);
        return;
    }
    if (m.arity() == 1) {
        for (int t : ins.targets) state.apply_1q(m, t);
    } else {
        state.apply_2q(m, ins.targets[0], ins.targets[1]);
    }
}

void apply_circuit_ideal(QutritRegister& state, const Circuit& c, bool stop_at_measure) {
    if (c.n != state.n()) throw std::invalid_argument("circuit size does not match register");
    validate_targets(c);
    for (const auto& ins : c.instructions) {
        if (ins.is_measure()) {
            if (stop_at_measure) return;
            throw std::invalid_argument("circuit contains a measurement");
        }
        apply_instruction_ideal(state, ins);
    }
}

Unitary circuit_unitary(const Circuit& c, int n) {
    if (n < 1 || n > 6) {
        throw std::domain_error("circuit_unitary supports n <= 6 (3^n-dim matrix)");
    }
    validate_targets(c);
    const uint64_t dim = pow3(n);
    Unitary u(dim);
    for (uint64_t col = 0; col < dim; ++col) {
        QutritRegister st = QutritRegister::basis(n, col);
        apply_circuit_ideal(st, c);
        for (uint64_t row = 0; row < dim; ++row) u.at(row, col) = st.amplitude(row);
    }
    return u;
}

uint64_t cnx_image_index(uint64_t idx, int n) {
    bool all_ones = true;
    uint64_t rest = idx;
    // digits from least significant (target, qutrit n-1) upward
    const uint64_t target_digit = rest % 3;
    rest /= 3;
    if (target_digit == 2) return idx;
    uint64_t probe = rest;
    for (int q = n - 2; q >= 0; --q) {
        const uint64_t d = probe % 3;
        probe /= 3;
        if (d == 2) return idx;
        if (d != 1) all_ones = false;
    }
    if (!all_ones) return idx;
    return rest * 3 + (1 - target_digit);
}

void apply_embedded_cnx(QutritRegister& state) {
    const int n = state.n();
    if (n < 3) throw std::invalid_argument("generalized Toffoli needs n >= 3");
    std::vector<Cx> out(state.amplitudes().size(), Cx(0.0, 0.0));
    const auto& in = state.amplitudes();
    for (uint64_t i = 0; i < in.size(); ++i) {
        if (in[i] != 0.0) out[cnx_image_index(i, n)] = in[i];
    }
    state = QutritRegister::from_amplitudes(n, std::move(out));
}

Unitary embedded_cnx_oracle(int n) {
    if (n < 3 || n > 6) throw std::domain_error("embedded_cnx_oracle matrix form needs 3 <= n <= 6");
    const uint64_t dim = pow3(n);
    Unitary u(dim);
    for (uint64_t col = 0; col < dim; ++col) u.at(cnx_image_index(col, n), col) = 1.0;
    return u;
}

}  // namespace qtk
