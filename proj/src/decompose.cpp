#include "qtk/decompose.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qtk/gates.hpp"
#include "qtk/state.hpp"

namespace qtk {

namespace {
constexpr double kHalfPi = kPi / 2.0;

void require_adjacent_pair(int q1, int q2, int n) {
    if (q1 < 0 || q2 >= n || q2 != q1 + 1) {
        throw std::invalid_argument("chain step needs an adjacent pair (q, q+1)");
    }
}
}  // namespace

std::vector<Instruction> dagger_fragment(const std::vector<Instruction>& fragment) {
    std::vector<Instruction> out;
    out.reserve(fragment.size());
    for (auto it = fragment.rbegin(); it != fragment.rend(); ++it) {
        Instruction ins = *it;
        switch (ins.kind) {
            case Kind::kR0J:
            case Kind::kRzJ:
                ins.theta = -ins.theta;
                break;
            case Kind::kXX:
            case Kind::kXXTilde:
                ins.chi = -ins.chi;
                ins.chi_a = -ins.chi_a;
                ins.chi_b = -ins.chi_b;
                break;
            case Kind::kBarrier:
                break;
            default:
                throw std::invalid_argument("cannot invert a measurement");
        }
        out.push_back(std::move(ins));
    }
    return out;
}

std::vector<Instruction> u1(int q1, int q2, const ToffoliOptions& opts) {
    require_adjacent_pair(q1, q2, opts.n);
    const auto& hw = opts.hardware;
    std::vector<Instruction> f;
    f.push_back(make_ry01(-kPi, q1, hw));
    f.push_back(make_rx02_global(-kPi, hw));
    f.push_back(make_ry01(kPi, q1, hw));
    if (opts.stash_idle) {
        if (q1 == 0 && q2 == 1) {
            for (int q = 2; q < opts.n; ++q) f.push_back(make_ry01(kPi, q, hw));
        } else {
            f.push_back(make_ry01(-kPi, q2, hw));
        }
    }
    f.push_back(make_xx(kHalfPi, q1, q2, hw));
    if (!(q1 == opts.n - 3 && q2 == opts.n - 2)) {
        f.push_back(make_rx02_global(kPi, hw));
    }
    return f;
}

std::vector<Instruction> u2(int q1, int q2, const ToffoliOptions& opts) {
    require_adjacent_pair(q1, q2, opts.n);
    const auto& hw = opts.hardware;
    std::vector<Instruction> f;
    if (opts.stash_idle) f.push_back(make_ry01(-kPi, q2, hw));
    f.push_back(make_ry01(-kPi, q1, hw));
    f.push_back(make_rx02_global(kPi, hw));
    f.push_back(make_ry01(kPi, q1, hw));
    f.push_back(make_xx(kHalfPi, q1, q2, hw));
    f.push_back(make_rx01(-kPi, q2, hw));
    f.push_back(make_rx01(-kPi, q1, hw));
    f.push_back(make_ry01(-kPi, q1, hw));
    f.push_back(make_rx02_global(-kPi, hw));
    f.push_back(make_ry01(kPi, q1, hw));
    if (opts.stash_idle) f.push_back(make_rx01(kPi, q2, hw));
    return f;
}

Circuit qutrit_toffoli(const ToffoliOptions& opts) {
    if (opts.n < 3) throw std::invalid_argument("generalized Toffoli needs n >= 3");
    if (opts.n > kMaxQutrits) throw std::invalid_argument("register too large");
    Circuit c;
    c.n = opts.n;
    for (int q = 0; q <= opts.n - 3; ++q) c.extend(u1(q, q + 1, opts));
    c.extend(u2(opts.n - 2, opts.n - 1, opts));
    for (int q = opts.n - 3; q >= 0; --q) c.extend(dagger_fragment(u1(q, q + 1, opts)));
    if (opts.stash_idle) {
        // The stash pulse pairs are not phase-neutral on the target line; the
        // net residual is a fixed pi/2 frame rotation on its |1> component,
        // undone with the free virtual gate.
        c.append(make_rzj(1, -kPi / 2.0, {opts.n - 1}, opts.hardware));
    }
    if (opts.emit_leak_measure) c.append(make_measure_leak(opts.hardware));
    return c;
}

PhaseCalibration PhaseCalibration::uniform(double chi_a, double chi_b, int count) {
    PhaseCalibration cal;
    cal.per_gate.assign(static_cast<size_t>(count), {chi_a, chi_b});
    return cal;
}

Circuit expand_xxtilde(const Circuit& c, const PhaseCalibration& calib,
                       const HardwareProfile& hw) {
    Circuit out;
    out.n = c.n;
    size_t k = 0;
    for (const auto& ins : c.instructions) {
        if (ins.kind != Kind::kXX) {
            out.append(ins);
            continue;
        }
        if (k >= calib.per_gate.size()) {
            throw std::invalid_argument("missing phase calibration entry for XX instance " +
                                        std::to_string(k));
        }
        const auto [ca, cb] = calib.per_gate[k++];
        if (!std::isfinite(ca) || !std::isfinite(cb)) {
            throw std::invalid_argument("phase calibration entries must be finite");
        }
        const int a = ins.targets[0];
        const int b = ins.targets[1];
        out.append(make_xxtilde(ins.chi, ca, cb, a, b, hw));
        if (hw.individual_02_control) {
            out.append(make_rzj(2, -ca, {a}, hw));
            out.append(make_rzj(2, -cb, {b}, hw));
        } else {
            // diag(e^{i chi}, e^{i chi}, 1) per ion, undoing the phase the
            // hardware gate put on the qubit levels.
            out.append(make_rx01(kPi, a, hw));
            out.append(make_r0j(1, -kPi, -ca, {a}, hw));
            out.append(make_rzj(1, 2.0 * ca, {a}, hw));
            out.append(make_rx01(kPi, b, hw));
            out.append(make_r0j(1, -kPi, -cb, {b}, hw));
            out.append(make_rzj(1, 2.0 * cb, {b}, hw));
        }
    }
    return out;
}

Circuit calibration_circuit(double phi, double chi_a, double chi_b, const HardwareProfile& hw) {
    Circuit c;
    c.n = 2;
    c.append(make_rx01(kPi, 0, hw));
    c.append(make_rx02_global(kHalfPi, hw));
    c.append(make_rx01(-kPi, 0, hw));
    c.append(make_rx02_global(kHalfPi, hw));
    c.append(make_xxtilde(kHalfPi, chi_a, chi_b, 0, 1, hw));
    c.append(make_r0j(2, -kHalfPi, phi, {}, hw));
    c.append(make_measure_main(hw));
    return c;
}

Circuit qubit_ccx(const HardwareProfile& hw) {
    const double q = kPi / 4.0;
    Circuit c;
    c.n = 3;
    c.append(make_ry01(kHalfPi, 0, hw));
    c.append(make_ry01(kHalfPi, 1, hw));
    c.append(make_ry01(kHalfPi, 2, hw));
    c.append(make_rx01(q, 0, hw));
    c.append(make_xx(q, 1, 2, hw));
    c.append(make_rx01(q, 1, hw));
    c.append(make_rx01(-kHalfPi, 2, hw));
    c.append(make_rzj(1, q, {2}, hw));
    c.append(make_xx(q, 0, 2, hw));
    c.append(make_rx01(-kHalfPi, 2, hw));
    c.append(make_rzj(1, -q, {2}, hw));
    c.append(make_xx(q, 1, 2, hw));
    c.append(make_ry01(kHalfPi, 1, hw));
    c.append(make_rx01(-kHalfPi, 2, hw));
    c.append(make_rzj(1, q, {2}, hw));
    c.append(make_xx(q, 0, 2, hw));
    c.append(make_xx(q, 0, 1, hw));
    c.append(make_rx01(-kHalfPi, 1, hw));
    c.append(make_ry01(-q, 2, hw));
    c.append(make_rzj(1, q, {1}, hw));
    c.append(make_rzj(1, -kHalfPi, {2}, hw));
    c.append(make_xx(q, 0, 1, hw));
    c.append(make_ry01(-kHalfPi, 0, hw));
    c.append(make_rx01(kHalfPi, 1, hw));
    return c;
}

std::vector<Instruction> native_cnot(int control, int target, const HardwareProfile& hw) {
    std::vector<Instruction> f;
    f.push_back(make_ry01(-kHalfPi, control, hw));
    f.push_back(make_xx(kPi / 4.0, control, target, hw));
    f.push_back(make_ry01(kHalfPi, control, hw));
    f.push_back(make_rx01(kHalfPi, target, hw));
    f.push_back(make_rzj(1, kHalfPi, {control}, hw));
    return f;
}

Circuit qubit_cnx(int n, const HardwareProfile& hw) {
    if (n < 3 || n > 8) throw std::invalid_argument("qubit_cnx supports 3 <= n <= 8");
    Circuit c;
    c.n = n;
    const int target = n - 1;
    const double alpha = kPi / static_cast<double>(1ull << n);

    c.append(make_ry01(-kHalfPi, target, hw));
    // C^{n-1}Z as a phase polynomial: for each level m the parities of
    // subsets containing qubit m-1 are walked in cyclic Gray order on that
    // qubit, one CNOT per step.
    for (int m = n; m >= 2; --m) {
        const int acc = m - 1;
        c.append(make_rzj(1, 2.0 * alpha, {acc}, hw));
        const uint32_t k_max = 1u << (m - 1);
        for (uint32_t k = 1; k < k_max; ++k) {
            const int bit = std::countr_zero(k);
            for (auto& ins : native_cnot(bit, acc, hw)) c.append(std::move(ins));
            const int parity = std::popcount(k ^ (k >> 1)) & 1;
            c.append(make_rzj(1, parity ? -2.0 * alpha : 2.0 * alpha, {acc}, hw));
        }
        for (auto& ins : native_cnot(m - 2, acc, hw)) c.append(std::move(ins));
    }
    c.append(make_rzj(1, 2.0 * alpha, {0}, hw));
    c.append(make_ry01(kHalfPi, target, hw));
    return c;
}

Circuit grover3(std::string_view s, ToffoliVariant variant, const HardwareProfile& hw,
                bool stash_idle) {
    if (s.size() != 2 || s.find_first_not_of("01") != std::string_view::npos) {
        throw std::invalid_argument("grover3 marks a 2-bit string");
    }
    Circuit c;
    c.n = 3;
    c.append(make_ry01(kHalfPi, 0, hw));
    c.append(make_ry01(kHalfPi, 1, hw));
    c.append(make_ry01(-kHalfPi, 2, hw));

    auto conjugate_marks = [&] {
        for (int i = 0; i < 2; ++i) {
            if (s[static_cast<size_t>(i)] == '0') c.append(make_rx01(kPi, i, hw));
        }
    };

    conjugate_marks();
    switch (variant) {
        case ToffoliVariant::kQubit: {
            const Circuit ccx = qubit_ccx(hw);
            c.extend(ccx.instructions);
            break;
        }
        case ToffoliVariant::kQutrit:
        case ToffoliVariant::kQutritMidMeasure: {
            ToffoliOptions opts;
            opts.n = 3;
            opts.stash_idle = stash_idle;
            opts.hardware = hw;
            const Circuit ccx = qutrit_toffoli(opts);
            c.extend(ccx.instructions);
            if (variant == ToffoliVariant::kQutritMidMeasure) {
                c.append(make_measure_mid2(hw));
            }
            break;
        }
    }
    conjugate_marks();

    for (int i = 0; i < 2; ++i) c.append(make_ry01(-kHalfPi, i, hw));
    for (int i = 0; i < 2; ++i) c.append(make_rx01(kPi, i, hw));
    // controlled-Z between the search qubits
    c.append(make_ry01(kHalfPi, 0, hw));
    c.append(make_ry01(kHalfPi, 1, hw));
    c.append(make_xx(kPi / 4.0, 0, 1, hw));
    c.append(make_ry01(-kHalfPi, 0, hw));
    c.append(make_ry01(-kHalfPi, 1, hw));
    c.append(make_rzj(1, -kHalfPi, {0}, hw));
    c.append(make_rzj(1, -kHalfPi, {1}, hw));
    for (int i = 0; i < 2; ++i) c.append(make_rx01(-kPi, i, hw));
    for (int i = 0; i < 2; ++i) c.append(make_ry01(kHalfPi, i, hw));

    c.append(make_measure_main(hw));
    return c;
}

std::vector<Instruction> basis_prep(std::string_view bits, bool use_sk1,
                                    const HardwareProfile& hw) {
    std::vector<Instruction> f;
    for (size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] == '0') continue;
        if (bits[i] != '1') throw std::invalid_argument("basis_prep expects a bitstring");
        if (use_sk1) {
            for (auto& ins : sk1(kPi, 0.0, static_cast<int>(i), hw)) f.push_back(std::move(ins));
        } else {
            f.push_back(make_rx01(kPi, static_cast<int>(i), hw));
        }
    }
    return f;
}

std::string emit_dot(const Circuit& c) {
    std::ostringstream os;
    os << "digraph circuit {\n  rankdir=LR;\n";
    std::vector<int> last(static_cast<size_t>(c.n), -1);
    for (size_t k = 0; k < c.instructions.size(); ++k) {
        const auto& ins = c.instructions[k];
        os << "  n" << k << " [label=\"" << kind_name(ins.kind);
        if (ins.kind == Kind::kR0J) os << " j=" << ins.j << " t=" << ins.theta << " p=" << ins.phi;
        if (ins.kind == Kind::kRzJ) os << " j=" << ins.j << " t=" << ins.theta;
        if (ins.kind == Kind::kXX) os << " chi=" << ins.chi;
        if (ins.kind == Kind::kXXTilde)
            os << " chi=" << ins.chi << " a=" << ins.chi_a << " b=" << ins.chi_b;
        os << "\"];\n";
        std::vector<int> touched;
        if (ins.is_global() && ins.kind != Kind::kBarrier) {
            for (int q = 0; q < c.n; ++q) touched.push_back(q);
        } else {
            touched = ins.targets;
        }
        for (int q : touched) {
            if (last[static_cast<size_t>(q)] >= 0) {
                os << "  n" << last[static_cast<size_t>(q)] << " -> n" << k << " [label=\"q" << q
                   << "\"];\n";
            }
            last[static_cast<size_t>(q)] = static_cast<int>(k);
        }
    }
    os << "}\n";
    return os.str();
}

}  // namespace qtk
