#pragma once

#include "qtk/circuit.hpp"
#include "qtk/gate_matrix.hpp"
#include "qtk/state.hpp"

namespace qtk {

// Matrix for a unitary instruction; throws for barriers and measurements.
GateMatrix instruction_matrix(const Instruction& ins);

// Noiseless application. Global instructions expand to every qutrit.
// Barriers are skipped; measurement instructions throw unless
// `stop_at_measure` is set (in which case application stops there).
void apply_instruction_ideal(QutritRegister& state, const Instruction& ins);
void apply_circuit_ideal(QutritRegister& state, const Circuit& c, bool stop_at_measure = false);

// Full 3^n x 3^n product of the embedded instruction unitaries, column k =
// image of basis state k. Guarded to n <= 6.
Unitary circuit_unitary(const Circuit& c, int n);

// Generalized Toffoli on the qubit subspace: flips the target (last) trit of
// any all-{0,1} basis state whose first n-1 trits are all 1; identity on any
// basis state containing a 2.
uint64_t cnx_image_index(uint64_t idx, int n);
void apply_embedded_cnx(QutritRegister& state);
Unitary embedded_cnx_oracle(int n);  // matrix form, 3 <= n <= 6

}  // namespace qtk
