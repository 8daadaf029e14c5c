#include "qtk/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace qtk {

namespace {

// Trig residue (cos(pi/2) = 6.1e-17) snaps to exact zero; permutation-like
// pulses must stay monomial for the sparse register paths.
Cx snap(Cx v) {
    double re = std::real(v);
    double im = std::imag(v);
    if (std::abs(re) < 1e-15) re = 0.0;
    if (std::abs(im) < 1e-15) im = 0.0;
    return {re, im};
}

double pulse_duration(double theta, double t_pi) { return std::abs(theta) / kPi * t_pi; }

}  // namespace

GateMatrix r_0j(int j, double theta, double phi) {
    if (j != 1 && j != 2) throw std::invalid_argument("r_0j requires j in {1,2}");
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    const Cx off0j = snap(Cx(0.0, -1.0) * Cx(std::cos(phi), -std::sin(phi)) * s);
    const Cx offj0 = snap(Cx(0.0, -1.0) * Cx(std::cos(phi), std::sin(phi)) * s);
    const Cx cc = snap(Cx(c, 0.0));

    std::vector<Cx> m(9, Cx(0.0, 0.0));
    const int spare = 3 - j;
    m[0 * 3 + 0] = cc;
    m[0 * 3 + j] = off0j;
    m[j * 3 + 0] = offj0;
    m[j * 3 + j] = cc;
    m[spare * 3 + spare] = 1.0;
    return GateMatrix::checked(1, m);
}

GateMatrix rz_j(int j, double theta) {
    if (j < 0 || j > 2) throw std::invalid_argument("rz_j requires j in {0,1,2}");
    std::vector<Cx> m(9, Cx(0.0, 0.0));
    for (int d = 0; d < 3; ++d) m[d * 3 + d] = 1.0;
    m[j * 3 + j] = snap(Cx(std::cos(theta), std::sin(theta)));
    return GateMatrix::checked(1, m);
}

GateMatrix xx(double chi) {
    const Cx c = snap(Cx(std::cos(chi), 0.0));
    const Cx ms = snap(Cx(0.0, -std::sin(chi)));
    std::vector<Cx> m(81, Cx(0.0, 0.0));
    for (int d = 0; d < 9; ++d) m[d * 9 + d] = 1.0;
    // sigma_x (x) sigma_x couples |00><->|11| and |01><->|10>.
    const int p00 = 0, p01 = 1, p10 = 3, p11 = 4;
    m[p00 * 9 + p00] = c;
    m[p11 * 9 + p11] = c;
    m[p00 * 9 + p11] = ms;
    m[p11 * 9 + p00] = ms;
    m[p01 * 9 + p01] = c;
    m[p10 * 9 + p10] = c;
    m[p01 * 9 + p10] = ms;
    m[p10 * 9 + p01] = ms;
    return GateMatrix::checked(2, m);
}

GateMatrix xx_tilde(double chi, double chi_a, double chi_b) {
    GateMatrix base = xx(chi);
    const Cx fa = snap(Cx(std::cos(chi_a), -std::sin(chi_a)));
    const Cx fb = snap(Cx(std::cos(chi_b), -std::sin(chi_b)));
    std::vector<Cx> m(81);
    for (int r = 0; r < 9; ++r) {
        const int ra = r / 3;
        const int rb = r % 3;
        Cx f(1.0, 0.0);
        if (ra < 2) f *= fa;
        if (rb < 2) f *= fb;
        for (int c = 0; c < 9; ++c) m[r * 9 + c] = snap(f * base(r, c));
    }
    return GateMatrix::checked(2, m);
}

Instruction make_r0j(int j, double theta, double phi, std::vector<int> targets,
                     const HardwareProfile& hw) {
    if (j != 1 && j != 2) throw std::invalid_argument("R0J requires j in {1,2}");
    Instruction ins;
    ins.kind = Kind::kR0J;
    ins.j = j;
    ins.theta = theta;
    ins.phi = phi;
    ins.targets = std::move(targets);
    ins.duration_s = pulse_duration(theta, j == 1 ? hw.t_pi_01 : hw.t_pi_02);
    return ins;
}

Instruction make_rx01(double theta, int target, const HardwareProfile& hw) {
    return make_r0j(1, theta, 0.0, {target}, hw);
}

Instruction make_ry01(double theta, int target, const HardwareProfile& hw) {
    return make_r0j(1, theta, kPi / 2.0, {target}, hw);
}

Instruction make_rx02_global(double theta, const HardwareProfile& hw) {
    return make_r0j(2, theta, 0.0, {}, hw);
}

Instruction make_rzj(int j, double theta, std::vector<int> targets, const HardwareProfile&) {
    if (j < 0 || j > 2) throw std::invalid_argument("RZJ requires j in {0,1,2}");
    Instruction ins;
    ins.kind = Kind::kRzJ;
    ins.j = j;
    ins.theta = theta;
    ins.targets = std::move(targets);
    ins.duration_s = 0.0;  // virtual phase gate
    return ins;
}

Instruction make_xx(double chi, int a, int b, const HardwareProfile& hw) {
    Instruction ins;
    ins.kind = Kind::kXX;
    ins.chi = chi;
    ins.targets = {a, b};
    ins.duration_s = hw.t_xx;
    return ins;
}

Instruction make_xxtilde(double chi, double chi_a, double chi_b, int a, int b,
                         const HardwareProfile& hw) {
    Instruction ins;
    ins.kind = Kind::kXXTilde;
    ins.chi = chi;
    ins.chi_a = chi_a;
    ins.chi_b = chi_b;
    ins.targets = {a, b};
    ins.duration_s = hw.t_xx;
    return ins;
}

Instruction make_barrier() {
    Instruction ins;
    ins.kind = Kind::kBarrier;
    return ins;
}

Instruction make_measure_main(const HardwareProfile& hw) {
    Instruction ins;
    ins.kind = Kind::kMeasureMain;
    ins.duration_s = hw.t_readout;
    return ins;
}

Instruction make_measure_leak(const HardwareProfile& hw) {
    Instruction ins;
    ins.kind = Kind::kMeasureLeak;
    ins.duration_s = 2.0 * hw.t_readout;
    return ins;
}

Instruction make_measure_mid2(const HardwareProfile& hw) {
    Instruction ins;
    ins.kind = Kind::kMeasureMid2;
    ins.duration_s = 2.0 * hw.t_mid_half + 2.0 * hw.t_pi_01;
    return ins;
}

std::vector<Instruction> sk1(double theta, double phi, int target, const HardwareProfile& hw) {
    if (std::abs(theta) > 2.0 * kPi) {
        throw std::invalid_argument("sk1 requires |theta| <= 2*pi");
    }
    const double corr = std::acos(-theta / (4.0 * kPi));
    std::vector<Instruction> out;
    out.push_back(make_r0j(1, theta, phi, {target}, hw));
    out.push_back(make_r0j(1, 2.0 * kPi, phi - corr, {target}, hw));
    out.push_back(make_r0j(1, 2.0 * kPi, phi + corr, {target}, hw));
    return out;
}

GateMatrix sk1_matrix(double theta, double phi, double amp_error) {
    const double g = 1.0 + amp_error;
    const double corr = std::acos(-theta / (4.0 * kPi));
    GateMatrix u = r_0j(1, theta * g, phi);
    u = r_0j(1, 2.0 * kPi * g, phi - corr) * u;
    u = r_0j(1, 2.0 * kPi * g, phi + corr) * u;
    return u;
}

}  // namespace qtk
