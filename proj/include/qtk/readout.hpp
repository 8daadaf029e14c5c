#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qtk/circuit.hpp"
#include "qtk/noise.hpp"
#include "qtk/rng.hpp"
#include "qtk/state.hpp"

namespace qtk {

// Shelving readout: Born-projects the register (trit-resolved), maps bright
// |0> -> '0' and dark {|1>,|2>} -> '1', then applies per-ion assignment flips.
// The state is left in the projected basis state.
std::string main_readout(QutritRegister& state, const NoiseProfile& profile, Rng& rng);

// Double readout: the |2> population is shelved dark for the main readout and
// deshelved bright for the second. Returns (main bitstring, per-ion leak
// flags); a flag requires dark-then-bright, with assignment flips applied
// independently to both stages.
std::pair<std::string, std::vector<uint8_t>> leak_readout(QutritRegister& state,
                                                          const NoiseProfile& profile, Rng& rng);

// Mid-circuit |2> detection: projects each qutrit onto {|2>, span{0,1}}; only
// |2> fluoresces. The readout Stark phase accrues on |1> during each half and
// is cancelled by the pi-pulse sandwich when dynamical decoupling is on.
// Returns whether any ion was bright.
bool midcircuit_measure2(QutritRegister& state, const NoiseProfile& profile, Rng& rng);

// Column-stochastic confusion matrix: entry (read, prepared).
struct ConfusionMatrix {
    int n_bits = 0;
    int shots_per_state = 0;
    std::vector<double> m;  // row-major, dim = 2^n_bits

    size_t dim() const { return 1ull << n_bits; }
    double at(size_t read, size_t prepared) const { return m[read * dim() + prepared]; }
    double& at(size_t read, size_t prepared) { return m[read * dim() + prepared]; }

    static ConfusionMatrix identity(int n_bits);
    std::string to_csv() const;
    static ConfusionMatrix from_csv(const std::string& text);
};

// Probability vector over 2^n bitstrings; may be a quasi-distribution after
// correction (entries can be negative, sum stays 1).
struct Distribution {
    int n_bits = 0;
    std::vector<double> p;

    static Distribution zeros(int n_bits);
    double& at_bits(const std::string& bits);
    std::string to_csv() const;
};

size_t bits_to_index(const std::string& bits);
std::string index_to_bits(size_t idx, int n_bits);

// Prepares all 2^n basis states with SK1 pulses and measures; column j holds
// the read-bitstring frequencies for prepared state j.
ConfusionMatrix estimate_confusion(int n, const NoiseProfile& profile,
                                   const HardwareProfile& hw, int shots_per_state,
                                   int jobs = 1);

// Factored correction operator. Solves C x = measured (the
// transpose-then-invert correction applied to the column-stochastic
// convention); construction throws if cond_1(C) > 1e6.
class SpamCorrector {
public:
    explicit SpamCorrector(const ConfusionMatrix& cm);

    Distribution correct(const Distribution& measured) const;
    // Row `read_index` of C^-1; the corrected probability of one bitstring is
    // this row dotted with the measured vector.
    std::vector<double> inverse_row(size_t read_index) const;
    double cond_1() const { return cond_; }
    size_t dim() const { return dim_; }

private:
    int n_bits_ = 0;
    size_t dim_ = 0;
    double cond_ = 0.0;
    std::vector<double> lu_, lut_;   // factored C and C^T
    std::vector<size_t> piv_, pivt_;
};

Distribution spam_correct(const Distribution& measured, const ConfusionMatrix& cm);

enum class SelectBy { kFinalLeakFlags, kMidCircuit };

struct PostSelection {
    std::vector<size_t> kept;
    double fraction = 0.0;
};

PostSelection post_select(const std::vector<ShotRecord>& records, SelectBy by);

}  // namespace qtk
