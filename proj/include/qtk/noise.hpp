#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qtk/circuit.hpp"
#include "qtk/gate_matrix.hpp"
#include "qtk/rng.hpp"
#include "qtk/state.hpp"

namespace qtk {

struct NoiseProfile {
    double t1 = 53e-3;
    double t2_star = 31e-3;
    double xx_fidelity = 0.963;
    double xx_leak_prob = 0.015;         // per ion per entangling gate
    double decay_branch_to_0 = 0.5;      // remainder branches to |2>
    double crosstalk_ratio = 0.02;       // spectator/target Rabi ratio
    double spam_flip_0_to_1 = 0.01;      // bright read as dark
    double spam_flip_1_to_0 = 0.01;      // dark read as bright
    double stark_phase = 0.0;            // per mid-circuit readout half, on |1>

    bool decay_enabled = true;
    bool dephasing_enabled = true;
    bool depolarizing_enabled = true;
    bool leak_enabled = true;
    bool crosstalk_enabled = true;
    bool spam_enabled = true;
    bool dd_enabled = true;              // mid-circuit dynamical decoupling

    uint64_t master_seed = 1;

    void set_spam_flip(double p) {
        spam_flip_0_to_1 = p;
        spam_flip_1_to_0 = p;
    }
    void validate() const;

    static NoiseProfile ideal();  // every channel off
};

struct ShotRecord {
    std::string outcome;          // readout bitstring, qutrit 0 first
    std::vector<uint8_t> leaked;  // double-readout flags (empty without leak readout)
    bool has_mid = false;
    bool mid_flag = false;        // any ion bright during mid-circuit readout
    uint64_t trajectory_seed = 0;

    bool any_leak() const {
        for (uint8_t f : leaked)
            if (f) return true;
        return false;
    }
};

// Serial schedule with prebuilt gate matrices, shared read-only across shots.
class ScheduledCircuit {
public:
    ScheduledCircuit(Circuit circuit, const NoiseProfile& profile);

    const Circuit& circuit() const { return circuit_; }
    double total_duration() const { return total_duration_; }
    double start_time(size_t k) const { return starts_[k]; }

    struct Step {
        size_t instruction_index = 0;
        GateMatrix matrix = GateMatrix::identity(1);
        bool has_matrix = false;
    };
    const std::vector<Step>& steps() const { return steps_; }
    const Instruction& instruction(const Step& s) const {
        return circuit_.instructions[s.instruction_index];
    }

private:
    Circuit circuit_;
    std::vector<Step> steps_;
    std::vector<double> starts_;
    double total_duration_ = 0.0;
};

ScheduledCircuit schedule(Circuit circuit, const NoiseProfile& profile);

// Trajectory channels. `dt >= 0`; deterministic given the rng state.
void apply_idle_decay(QutritRegister& state, int q, double dt, const NoiseProfile& profile,
                      Rng& rng, std::vector<uint8_t>* sticky_leaked = nullptr);
void apply_dephasing(QutritRegister& state, int q, double dt, const NoiseProfile& profile,
                     Rng& rng);
// Lumped entangling-gate error: qubit-subspace two-qubit depolarizing scaled
// so the Bell-state infidelity matches 1 - xx_fidelity, plus an absorbing
// leak jump to |2> on each ion with probability xx_leak_prob.
void apply_xx_error(QutritRegister& state, int q1, int q2, const NoiseProfile& profile, Rng& rng,
                    std::vector<uint8_t>* sticky_leaked = nullptr);
// Immediate (single-instruction) crosstalk: each chain-adjacent spectator of
// an individually addressed R01 pulse receives the epsilon-scaled rotation,
// realized stochastically.
void apply_crosstalk(QutritRegister& state, const Instruction& ins, const NoiseProfile& profile,
                     Rng& rng);

// Runs the scheduled circuit shot by shot. Refuses circuits that violate the
// hardware addressing rules or lack a final readout. Per-shot seeds derive
// from hash(master_seed, shot index), so results are independent of `jobs`.
std::vector<ShotRecord> run_shots(const ScheduledCircuit& sc, const NoiseProfile& profile,
                                  int n_shots, int jobs = 1,
                                  const HardwareProfile& hw = HardwareProfile{});
std::vector<ShotRecord> run_shots(const Circuit& circuit, const NoiseProfile& profile,
                                  int n_shots, int jobs = 1,
                                  const HardwareProfile& hw = HardwareProfile{});

// One trajectory; exposed for deterministic channel-level tests.
ShotRecord run_single_shot(const ScheduledCircuit& sc, const NoiseProfile& profile,
                           uint64_t seed);

}  // namespace qtk
