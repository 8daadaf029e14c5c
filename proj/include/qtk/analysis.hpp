#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qtk/decompose.hpp"
#include "qtk/noise.hpp"
#include "qtk/readout.hpp"

namespace qtk {

enum class Family { kQubit, kQutrit };

std::string family_name(Family f);

// Correct C^{n-1}X output for a basis input.
std::string cnx_expected_bits(const std::string& input_bits);

struct TruthTableOptions {
    int shots_per_input = 2048;
    bool postselect = false;       // qutrit family only: drop flagged shots
    bool stash_idle = true;
    bool spam_correct = true;      // estimate a confusion matrix and correct
    int confusion_shots = 512;
    int jobs = 1;
};

struct TruthTableResult {
    int n = 0;
    Family family = Family::kQutrit;
    int shots_per_input = 0;
    std::vector<double> f_raw;            // per-input correct-output frequency
    std::vector<double> f_corrected;      // quasi-probability at the correct bitstring
    std::vector<double> f_post_raw;       // post-selected (qutrit only)
    std::vector<double> f_post_corrected;
    double ftt_raw = 0.0;
    double ftt_corrected = 0.0;
    double ftt_post_raw = 0.0;
    double ftt_post_corrected = 0.0;
    double sigma_raw = 0.0;
    double sigma_corrected = 0.0;
    double sigma_post_raw = 0.0;
    double post_fraction = 0.0;           // mean kept fraction over inputs
    double mean_leak = 0.0;               // mean any-ion leak frequency
    bool has_post = false;
    bool has_corrected = false;
};

TruthTableResult truth_table_experiment(Family family, int n, const NoiseProfile& profile,
                                        const HardwareProfile& hw, const TruthTableOptions& opts);
// Same experiment around an externally supplied decomposition core.
TruthTableResult truth_table_experiment_with_circuit(const Circuit& core, Family family,
                                                     const NoiseProfile& profile,
                                                     const HardwareProfile& hw,
                                                     const TruthTableOptions& opts);

// Decomposition core used by the integrated path (qubit: explicit CCX for
// n=3, Gray-code C^{n-1}X above; qutrit: the 2N-3 construction).
Circuit decomposition_core(Family family, int n, bool stash_idle, const HardwareProfile& hw);

struct LeakScanPoint {
    int n = 0;
    double mean_leak = 0.0;
    double sigma = 0.0;                  // bootstrap 1-sigma of the mean
    std::vector<double> per_input;       // leak frequency per basis input
};

struct LeakageFit {
    double amplitude = 0.0;  // A
    double survival = 0.0;   // p
    double cov[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
    int iterations = 0;
    double rms_residual = 0.0;
};

// Nonlinear least squares of f(N) = 1 - A p^{2N-3}; deterministic
// (fixed A=1, p=0.95 start, damped Gauss-Newton, <= 500 steps, 1e-10 relative
// residual tolerance). Throws on non-convergence.
LeakageFit fit_leakage(std::span<const LeakScanPoint> points);
LeakageFit fit_leakage_xy(std::span<const std::pair<double, double>> points);

struct LeakScanResult {
    std::vector<LeakScanPoint> points;
    LeakageFit fit;
    bool stash_idle = false;
};

struct LeakScanOptions {
    int shots_per_n = 10000;
    bool stash_idle = true;
    int jobs = 1;
};

LeakScanResult leak_scan(int n_lo, int n_hi, const NoiseProfile& profile,
                         const HardwareProfile& hw, const LeakScanOptions& opts);

struct RamseyFit {
    double amplitude = 0.0;  // B >= 0 in a + B cos(phi - phi0)
    double phase = 0.0;      // phi0
    double offset = 0.0;     // a
    bool reliable = false;
};

// Linearized sinusoid fit (a + b cos phi + c sin phi); needs >= 8 points
// spanning a full period.
RamseyFit fit_ramsey(std::span<const double> phis, std::span<const double> p2);

// Maps the fringe phase to the phase the ion pair acquired during XXtilde.
double recovered_ms_phase(const RamseyFit& fit);

struct CalibrationScan {
    std::vector<double> phis;
    std::vector<double> p2;  // P(|2>) on ion 0
};

// Scans the analyzing-pulse phase over [0, 2pi]. shots == 0 runs the exact
// noiseless populations; otherwise sampled frequencies under the profile.
CalibrationScan run_calibration_scan(double chi_a, double chi_b, int points, int shots,
                                     const NoiseProfile& profile, const HardwareProfile& hw);

struct GroverResult {
    ToffoliVariant variant = ToffoliVariant::kQubit;
    int shots = 0;
    std::vector<Distribution> dist;      // readout distribution per oracle
    std::vector<Distribution> dist_post; // mid-measure variant, kept shots
    std::vector<double> p_correct;       // per marked bitstring (00,01,10,11)
    std::vector<double> p_correct_post;  // mid-measure variant
    double p_err = 0.0;
    double p_err_post = 0.0;
    double post_fraction = 0.0;
    bool has_post = false;
};

GroverResult grover_experiment(ToffoliVariant variant, int shots, const NoiseProfile& profile,
                               const HardwareProfile& hw, int jobs = 1, bool stash_idle = true);

// Exact noiseless success probability of grover3 (no sampling).
double grover_noiseless_success(const std::string& s, ToffoliVariant variant,
                                const HardwareProfile& hw, bool stash_idle = true);

// 1-sigma of the frequency counts[0]/sum(counts) under multinomial
// resampling.
double bootstrap_sigma(std::span<const uint64_t> counts, int resamples, uint64_t seed);

}  // namespace qtk
