#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qtk {

enum class Kind {
    kR0J,
    kRzJ,
    kXX,
    kXXTilde,
    kBarrier,
    kMeasureMain,
    kMeasureLeak,
    kMeasureMid2,
};

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& name);

struct Instruction {
    Kind kind = Kind::kBarrier;
    int j = 0;             // R0J: 1|2, RzJ: 0|1|2
    double theta = 0.0;    // R0J / RzJ
    double phi = 0.0;      // R0J
    double chi = 0.0;      // XX / XXTilde
    double chi_a = 0.0;    // XXTilde
    double chi_b = 0.0;    // XXTilde
    std::vector<int> targets;  // empty = global
    double duration_s = 0.0;

    bool is_global() const { return targets.empty(); }
    bool is_unitary() const {
        return kind == Kind::kR0J || kind == Kind::kRzJ || kind == Kind::kXX ||
               kind == Kind::kXXTilde;
    }
    bool is_measure() const {
        return kind == Kind::kMeasureMain || kind == Kind::kMeasureLeak ||
               kind == Kind::kMeasureMid2;
    }
};

struct Circuit {
    int n = 0;
    std::vector<Instruction> instructions;

    void append(Instruction ins) { instructions.push_back(std::move(ins)); }
    void extend(const std::vector<Instruction>& fragment) {
        instructions.insert(instructions.end(), fragment.begin(), fragment.end());
    }

    int count_kind(Kind k) const;
    // Entangling-gate census (XX plus XXTilde instances).
    int xx_count() const;
    double total_duration() const;
};

struct HardwareProfile {
    bool individual_02_control = false;
    double t_pi_01 = 10e-6;
    double t_pi_02 = 10e-6;
    double t_xx = 916e-6;
    double t_readout = 0.5e-3;
    double t_mid_half = 0.25e-3;

    void validate() const;
};

struct Violation {
    size_t index;
    std::string message;
};

// Structural validation (target ranges, duplicates); throws on failure.
void validate_targets(const Circuit& c);

// Hardware addressing rules. Empty result means the circuit is runnable on the
// profile:
//   R0J j=1, XX, XXTilde        -> individually addressed targets required
//   R0J j=2, RzJ j in {0,2}     -> global only, unless individual_02_control
//   RzJ j=1                     -> individual or global
//   MEASURE_MAIN / MEASURE_LEAK -> global, terminal
//   MEASURE_MID2                -> global, anywhere
std::vector<Violation> legality_check(const Circuit& c, const HardwareProfile& profile);

}  // namespace qtk
