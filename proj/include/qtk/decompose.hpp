#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qtk/circuit.hpp"

namespace qtk {

struct ToffoliOptions {
    int n = 3;
    // Parks idle |1> population in |2> between uses (the optional branches of
    // the construction); trades single-qudit pulses for reduced T1 exposure.
    bool stash_idle = true;
    // Appends the double-readout leak measurement.
    bool emit_leak_measure = false;
    HardwareProfile hardware{};
};

// Reversed, parameter-negated image of a unitary fragment.
std::vector<Instruction> dagger_fragment(const std::vector<Instruction>& fragment);

// Chain step: leaves qutrit q2 in |1> iff q1 and q2 both carried |1>.
// Requires q2 == q1 + 1. Contributes exactly one XX(pi/2).
std::vector<Instruction> u1(int q1, int q2, const ToffoliOptions& opts);

// Final step on the last pair: flips the target conditioned on the
// accumulated AND. Contributes exactly one XX(pi/2).
std::vector<Instruction> u2(int q1, int q2, const ToffoliOptions& opts);

// C^{N-1}X over N qutrits with 2N-3 entangling gates: U1 chain, U2, then the
// daggered U1 chain in reverse.
Circuit qutrit_toffoli(const ToffoliOptions& opts);

// Residual single-ion phases of each hardware XX instance, one (chi_a, chi_b)
// pair per XX occurrence in circuit order.
struct PhaseCalibration {
    std::vector<std::pair<double, double>> per_gate;

    static PhaseCalibration uniform(double chi_a, double chi_b, int count);
};

// Replaces every XX(chi) by XXtilde(chi, chi_a, chi_b) followed by the
// compensation pulses that restore the plain XX unitary. With individual
// ancilla control the compensation collapses to one virtual R_z^2 per ion.
Circuit expand_xxtilde(const Circuit& c, const PhaseCalibration& calib,
                       const HardwareProfile& hw);

// Two-ion Ramsey sequence: prepares (|0>+|2>)/sqrt2 (x) |2>, applies
// XXtilde(pi/2) with the given residual phases, analyzes with a global
// R^{02}_phi(-pi/2), and measures. P(|2>) on ion 0 traces
// (1 - cos(phi - chi_a))/2.
Circuit calibration_circuit(double phi, double chi_a, double chi_b, const HardwareProfile& hw);

// Trapped-ion CCX with six XX(pi/4) gates, transcribed from the native
// three-qubit transpilation.
Circuit qubit_ccx(const HardwareProfile& hw);

// Ancilla-free qubit C^{n-1}X: Gray-code phase polynomial for C^{n-1}Z
// conjugated into the X basis on the target; each CNOT lowers to one XX(pi/4)
// plus single-qubit pulses. 3 <= n <= 8.
Circuit qubit_cnx(int n, const HardwareProfile& hw);

// One CNOT in the native gate set (exactly one XX).
std::vector<Instruction> native_cnot(int control, int target, const HardwareProfile& hw);

enum class ToffoliVariant { kQubit, kQutrit, kQutritMidMeasure };

// Single-iteration three-qubit Grover search marking bitstring s (two search
// qubits, phase-kickback target). Noiseless success probability is exactly 1.
Circuit grover3(std::string_view s, ToffoliVariant variant, const HardwareProfile& hw,
                bool stash_idle = true);

// R^{01}(pi) (bare or SK1) on every qutrit whose bit is 1.
std::vector<Instruction> basis_prep(std::string_view bits, bool use_sk1,
                                    const HardwareProfile& hw);

std::string emit_dot(const Circuit& c);

}  // namespace qtk
