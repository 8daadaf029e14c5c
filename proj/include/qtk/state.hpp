#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qtk/gate_matrix.hpp"
#include "qtk/rng.hpp"

namespace qtk {

inline constexpr int kMaxQutrits = 12;

constexpr uint64_t pow3(int k) {
    uint64_t v = 1;
    for (int i = 0; i < k; ++i) v *= 3;
    return v;
}

// Measurement outcome of a full register, one trit per qutrit.
struct BasisOutcome {
    std::vector<uint8_t> digits;

    uint64_t index() const;
    static BasisOutcome from_index(uint64_t idx, int n);
};

// State vector over 3^n basis states. Basis index reads qutrit 0 as the most
// significant base-3 digit. A sorted support list of (possibly) nonzero
// indices accelerates the common case of trajectories that stay close to
// basis states; once the support outgrows kMaxSupport the register falls back
// to plain dense updates for the rest of its life.
class QutritRegister {
public:
    static constexpr size_t kMaxSupport = 4096;

    explicit QutritRegister(int n);
    static QutritRegister basis(int n, uint64_t index);
    static QutritRegister basis(int n, std::span<const uint8_t> digits);
    static QutritRegister from_amplitudes(int n, std::vector<Cx> amps);

    int n() const { return n_; }
    uint64_t dim() const { return dim_; }
    const std::vector<Cx>& amplitudes() const { return amp_; }
    Cx amplitude(uint64_t idx) const { return amp_[idx]; }
    bool sparse() const { return sparse_; }
    size_t support_size() const { return sparse_ ? support_.size() : dim_; }

    int digit_at(uint64_t idx, int q) const;

    // Embeds the gate on `targets` (identity elsewhere). Throws on duplicate
    // or out-of-range targets or target count != gate arity.
    void apply_gate(const GateMatrix& gate, std::span<const int> targets);
    void apply_1q(const GateMatrix& gate, int q);
    void apply_2q(const GateMatrix& gate, int q1, int q2);
    // diag(f0, f1, f2) on qutrit q.
    void apply_diag_1q(int q, Cx f0, Cx f1, Cx f2);

    double norm_sq() const;
    void renormalize();

    // Sum of |a|^2 over basis states whose digit at q equals d (raw mass, not
    // divided by the norm).
    double population(int q, int d) const;

    // Born sample of the full register; state unchanged.
    uint64_t sample_index(Rng& rng) const;
    void collapse_to_index(uint64_t idx);

    // Keeps (or drops) the digit-d component of qutrit q and renormalizes.
    // Returns the probability mass kept, relative to the pre-projection norm.
    double project_digit(int q, int d, bool keep);
    // Moves qutrit q's digit-`from` component onto digit `to`, which must be
    // unoccupied (as after a projection).
    void relabel_digit(int q, int from, int to);
    // Born-samples qutrit q's trit, projects, and relabels it to digit d.
    void reset_to_digit(int q, int d, Rng& rng);

private:
    void drop_support();
    void rebuild_support_from(const std::vector<uint32_t>& candidates);
    void prune_support();

    int n_;
    uint64_t dim_;
    std::vector<Cx> amp_;
    std::vector<uint32_t> support_;
    bool sparse_ = true;
};

double state_fidelity(const QutritRegister& a, const QutritRegister& b);

BasisOutcome sample_outcome(const QutritRegister& state, Rng& rng);

}  // namespace qtk
