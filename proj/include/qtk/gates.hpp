#pragma once

#include <vector>

#include "qtk/circuit.hpp"
#include "qtk/gate_matrix.hpp"

namespace qtk {

// R^{0j}_phi(theta) = exp(-i sigma^{0j}_phi theta/2) with
// sigma_phi = sigma_x cos(phi) + sigma_y sin(phi) on span{|0>, |j>}; the
// remaining level is untouched. j in {1, 2}.
GateMatrix r_0j(int j, double theta, double phi);

// R_z^j(theta) = exp(i theta |j><j|), j in {0, 1, 2}.
GateMatrix rz_j(int j, double theta);

// XX(chi) = exp(-i chi sigma01_x (x) sigma01_x); identity on any product state
// containing |2>.
GateMatrix xx(double chi);

// XXtilde(chi, chi_a, chi_b) = exp[-i (chi sx(x)sx + chi_a P(x)I + chi_b I(x)P)]
// with P = |0><0| + |1><1| on each ion.
GateMatrix xx_tilde(double chi, double chi_a, double chi_b);

// Instruction factories; durations are stamped from the hardware profile
// (pulse time scales with |theta|/pi, virtual Z gates take no time).
Instruction make_r0j(int j, double theta, double phi, std::vector<int> targets,
                     const HardwareProfile& hw);
Instruction make_rx01(double theta, int target, const HardwareProfile& hw);
Instruction make_ry01(double theta, int target, const HardwareProfile& hw);
Instruction make_rx02_global(double theta, const HardwareProfile& hw);
Instruction make_rzj(int j, double theta, std::vector<int> targets, const HardwareProfile& hw);
Instruction make_xx(double chi, int a, int b, const HardwareProfile& hw);
Instruction make_xxtilde(double chi, double chi_a, double chi_b, int a, int b,
                         const HardwareProfile& hw);
Instruction make_barrier();
Instruction make_measure_main(const HardwareProfile& hw);
Instruction make_measure_leak(const HardwareProfile& hw);
Instruction make_measure_mid2(const HardwareProfile& hw);

// SK1 composite pulse: R^{01}_phi(theta) followed by two 2pi pulses at
// phi -/+ arccos(-theta/(4 pi)). Ideal action equals the bare rotation; under
// a common amplitude miscalibration the error is suppressed to first order.
std::vector<Instruction> sk1(double theta, double phi, int target, const HardwareProfile& hw);

// Ideal 3x3 action of an sk1 fragment with every rotation angle scaled by
// (1 + amp_error); amp_error = 0 reproduces r_0j(1, theta, phi).
GateMatrix sk1_matrix(double theta, double phi, double amp_error);

}  // namespace qtk
