#include "qtk/state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qtk {

namespace {
// Support entries below this amplitude are round-off residue and are
// dropped.
constexpr double kPruneAmp = 1e-14;

void check_qutrit(int q, int n) {
    if (q < 0 || q >= n) throw std::invalid_argument("qutrit index out of range");
}
}  // namespace

uint64_t BasisOutcome::index() const {
    uint64_t idx = 0;
    for (uint8_t d : digits) idx = idx * 3 + d;
    return idx;
}

BasisOutcome BasisOutcome::from_index(uint64_t idx, int n) {
    BasisOutcome out;
    out.digits.assign(static_cast<size_t>(n), 0);
    for (int q = n - 1; q >= 0; --q) {
        out.digits[static_cast<size_t>(q)] = static_cast<uint8_t>(idx % 3);
        idx /= 3;
    }
    return out;
}

QutritRegister::QutritRegister(int n) : n_(n) {
    if (n < 1 || n > kMaxQutrits) throw std::invalid_argument("qutrit count must be in [1, 12]");
    dim_ = pow3(n);
    amp_.assign(dim_, Cx(0.0, 0.0));
    amp_[0] = 1.0;
    support_ = {0};
}

QutritRegister QutritRegister::basis(int n, uint64_t index) {
    QutritRegister r(n);
    if (index >= r.dim_) throw std::invalid_argument("basis index out of range");
    r.amp_[0] = 0.0;
    r.amp_[index] = 1.0;
    r.support_ = {static_cast<uint32_t>(index)};
    return r;
}

QutritRegister QutritRegister::basis(int n, std::span<const uint8_t> digits) {
    if (static_cast<int>(digits.size()) != n) {
        throw std::invalid_argument("digit count does not match register size");
    }
    uint64_t idx = 0;
    for (uint8_t d : digits) {
        if (d > 2) throw std::invalid_argument("trit must be 0, 1 or 2");
        idx = idx * 3 + d;
    }
    return basis(n, idx);
}

QutritRegister QutritRegister::from_amplitudes(int n, std::vector<Cx> amps) {
    QutritRegister r(n);
    if (amps.size() != r.dim_) throw std::invalid_argument("amplitude count must be 3^n");
    r.amp_ = std::move(amps);
    std::vector<uint32_t> cand;
    for (uint64_t i = 0; i < r.dim_; ++i) {
        if (r.amp_[i] != 0.0) cand.push_back(static_cast<uint32_t>(i));
    }
    r.rebuild_support_from(cand);
    return r;
}

int QutritRegister::digit_at(uint64_t idx, int q) const {
    return static_cast<int>((idx / pow3(n_ - 1 - q)) % 3);
}

void QutritRegister::drop_support() {
    sparse_ = false;
    support_.clear();
}

void QutritRegister::rebuild_support_from(const std::vector<uint32_t>& candidates) {
    if (candidates.size() > kMaxSupport) {
        drop_support();
        return;
    }
    support_ = candidates;
    std::sort(support_.begin(), support_.end());
    support_.erase(std::unique(support_.begin(), support_.end()), support_.end());
    sparse_ = true;
}

void QutritRegister::prune_support() {
    std::vector<uint32_t> kept;
    kept.reserve(support_.size());
    for (uint32_t i : support_) {
        if (std::abs(amp_[i]) < kPruneAmp) {
            amp_[i] = 0.0;
        } else {
            kept.push_back(i);
        }
    }
    support_ = std::move(kept);
}

void QutritRegister::apply_gate(const GateMatrix& gate, std::span<const int> targets) {
    if (static_cast<int>(targets.size()) != gate.arity()) {
        throw std::invalid_argument("target count does not match gate arity");
    }
    for (int t : targets) check_qutrit(t, n_);
    if (gate.arity() == 1) {
        apply_1q(gate, targets[0]);
    } else {
        if (targets[0] == targets[1]) throw std::invalid_argument("duplicate gate target");
        apply_2q(gate, targets[0], targets[1]);
    }
}

void QutritRegister::apply_1q(const GateMatrix& g, int q) {
    check_qutrit(q, n_);
    if (g.arity() != 1) throw std::invalid_argument("expected a 1-qutrit gate");
    const uint64_t s = pow3(n_ - 1 - q);
    const Cx* m = g.data();

    if (sparse_) {
        std::vector<uint32_t> roots;
        roots.reserve(support_.size());
        for (uint32_t idx : support_) {
            roots.push_back(idx - static_cast<uint32_t>(((idx / s) % 3) * s));
        }
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        if (roots.size() * 3 > kMaxSupport) {
            drop_support();
        } else {
            std::vector<uint32_t> next;
            next.reserve(roots.size() * 3);
            for (uint32_t root : roots) {
                const Cx a0 = amp_[root];
                const Cx a1 = amp_[root + s];
                const Cx a2 = amp_[root + 2 * s];
                for (int r = 0; r < 3; ++r) {
                    const Cx v = m[r * 3 + 0] * a0 + m[r * 3 + 1] * a1 + m[r * 3 + 2] * a2;
                    const uint64_t out = root + static_cast<uint64_t>(r) * s;
                    if (std::abs(v) < kPruneAmp) {
                        amp_[out] = 0.0;
                    } else {
                        amp_[out] = v;
                        next.push_back(static_cast<uint32_t>(out));
                    }
                }
            }
            std::sort(next.begin(), next.end());
            support_ = std::move(next);
            return;
        }
    }

    const uint64_t blocks = dim_ / (3 * s);
    for (uint64_t b = 0; b < blocks; ++b) {
        Cx* base = amp_.data() + b * 3 * s;
        for (uint64_t i = 0; i < s; ++i) {
            const Cx a0 = base[i];
            const Cx a1 = base[i + s];
            const Cx a2 = base[i + 2 * s];
            base[i] = m[0] * a0 + m[1] * a1 + m[2] * a2;
            base[i + s] = m[3] * a0 + m[4] * a1 + m[5] * a2;
            base[i + 2 * s] = m[6] * a0 + m[7] * a1 + m[8] * a2;
        }
    }
}

void QutritRegister::apply_2q(const GateMatrix& g, int q1, int q2) {
    check_qutrit(q1, n_);
    check_qutrit(q2, n_);
    if (q1 == q2) throw std::invalid_argument("duplicate gate target");
    if (g.arity() != 2) throw std::invalid_argument("expected a 2-qutrit gate");
    const uint64_t s1 = pow3(n_ - 1 - q1);
    const uint64_t s2 = pow3(n_ - 1 - q2);
    const Cx* m = g.data();

    if (sparse_) {
        std::vector<uint32_t> roots;
        roots.reserve(support_.size());
        for (uint32_t idx : support_) {
            const uint32_t d1 = static_cast<uint32_t>((idx / s1) % 3);
            const uint32_t d2 = static_cast<uint32_t>((idx / s2) % 3);
            roots.push_back(idx - static_cast<uint32_t>(d1 * s1 + d2 * s2));
        }
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
        if (roots.size() * 9 > kMaxSupport) {
            drop_support();
        } else {
            std::vector<uint32_t> next;
            next.reserve(roots.size() * 9);
            Cx in[9];
            for (uint32_t root : roots) {
                for (int d1 = 0; d1 < 3; ++d1)
                    for (int d2 = 0; d2 < 3; ++d2)
                        in[d1 * 3 + d2] = amp_[root + d1 * s1 + d2 * s2];
                for (int r = 0; r < 9; ++r) {
                    Cx v = 0.0;
                    for (int c = 0; c < 9; ++c) v += m[r * 9 + c] * in[c];
                    const uint64_t out = root + static_cast<uint64_t>(r / 3) * s1 +
                                         static_cast<uint64_t>(r % 3) * s2;
                    if (std::abs(v) < kPruneAmp) {
                        amp_[out] = 0.0;
                    } else {
                        amp_[out] = v;
                        next.push_back(static_cast<uint32_t>(out));
                    }
                }
            }
            std::sort(next.begin(), next.end());
            support_ = std::move(next);
            return;
        }
    }

    const uint64_t sA = std::max(s1, s2);
    const uint64_t sB = std::min(s1, s2);
    const uint64_t pre = dim_ / (3 * sA);
    const uint64_t mid = sA / (3 * sB);
    Cx in[9];
    for (uint64_t p = 0; p < pre; ++p) {
        for (uint64_t q = 0; q < mid; ++q) {
            const uint64_t block = p * 3 * sA + q * 3 * sB;
            for (uint64_t t = 0; t < sB; ++t) {
                const uint64_t base = block + t;
                for (int dA = 0; dA < 3; ++dA)
                    for (int dB = 0; dB < 3; ++dB) {
                        const uint64_t idx = base + dA * sA + dB * sB;
                        const int r1 = static_cast<int>(s1 == sA ? dA : dB);
                        const int r2 = static_cast<int>(s2 == sA ? dA : dB);
                        in[r1 * 3 + r2] = amp_[idx];
                    }
                for (int r = 0; r < 9; ++r) {
                    Cx v = 0.0;
                    for (int c = 0; c < 9; ++c) v += m[r * 9 + c] * in[c];
                    const int r1 = r / 3;
                    const int r2 = r % 3;
                    amp_[base + static_cast<uint64_t>(r1) * s1 + static_cast<uint64_t>(r2) * s2] = v;
                }
            }
        }
    }
}

void QutritRegister::apply_diag_1q(int q, Cx f0, Cx f1, Cx f2) {
    check_qutrit(q, n_);
    const uint64_t s = pow3(n_ - 1 - q);
    const Cx f[3] = {f0, f1, f2};
    if (sparse_) {
        bool removed = false;
        for (uint32_t idx : support_) {
            amp_[idx] *= f[(idx / s) % 3];
            if (std::abs(amp_[idx]) < kPruneAmp) removed = true;
        }
        if (removed) prune_support();
        return;
    }
    const uint64_t blocks = dim_ / (3 * s);
    for (uint64_t b = 0; b < blocks; ++b) {
        Cx* base = amp_.data() + b * 3 * s;
        for (uint64_t i = 0; i < s; ++i) {
            base[i] *= f0;
            base[i + s] *= f1;
            base[i + 2 * s] *= f2;
        }
    }
}

double QutritRegister::norm_sq() const {
    double acc = 0.0;
    if (sparse_) {
        for (uint32_t i : support_) acc += std::norm(amp_[i]);
        return acc;
    }
    for (const Cx& a : amp_) acc += std::norm(a);
    return acc;
}

void QutritRegister::renormalize() {
    const double n2 = norm_sq();
    if (n2 <= 0.0) throw std::runtime_error("cannot renormalize a zero state");
    const double inv = 1.0 / std::sqrt(n2);
    if (sparse_) {
        for (uint32_t i : support_) amp_[i] *= inv;
    } else {
        for (Cx& a : amp_) a *= inv;
    }
}

double QutritRegister::population(int q, int d) const {
    check_qutrit(q, n_);
    const uint64_t s = pow3(n_ - 1 - q);
    double acc = 0.0;
    if (sparse_) {
        for (uint32_t i : support_) {
            if (static_cast<int>((i / s) % 3) == d) acc += std::norm(amp_[i]);
        }
        return acc;
    }
    const uint64_t blocks = dim_ / (3 * s);
    for (uint64_t b = 0; b < blocks; ++b) {
        const Cx* base = amp_.data() + b * 3 * s + static_cast<uint64_t>(d) * s;
        for (uint64_t i = 0; i < s; ++i) acc += std::norm(base[i]);
    }
    return acc;
}

uint64_t QutritRegister::sample_index(Rng& rng) const {
    const double u = rng.uniform() * norm_sq();
    double acc = 0.0;
    if (sparse_) {
        uint32_t last = support_.empty() ? 0 : support_.back();
        for (uint32_t i : support_) {
            acc += std::norm(amp_[i]);
            if (u < acc) return i;
        }
        return last;
    }
    uint64_t last = 0;
    for (uint64_t i = 0; i < dim_; ++i) {
        const double p = std::norm(amp_[i]);
        if (p > 0.0) last = i;
        acc += p;
        if (u < acc) return i;
    }
    return last;
}

void QutritRegister::collapse_to_index(uint64_t idx) {
    if (idx >= dim_) throw std::invalid_argument("basis index out of range");
    if (sparse_) {
        for (uint32_t i : support_) amp_[i] = 0.0;
    } else {
        std::fill(amp_.begin(), amp_.end(), Cx(0.0, 0.0));
    }
    amp_[idx] = 1.0;
    support_ = {static_cast<uint32_t>(idx)};
    sparse_ = true;
}

double QutritRegister::project_digit(int q, int d, bool keep) {
    check_qutrit(q, n_);
    const double before = norm_sq();
    const Cx one(1.0, 0.0);
    const Cx zero(0.0, 0.0);
    Cx f[3] = {keep ? zero : one, keep ? zero : one, keep ? zero : one};
    f[d] = keep ? one : zero;
    apply_diag_1q(q, f[0], f[1], f[2]);
    const double after = norm_sq();
    if (after <= 0.0) throw std::runtime_error("projection annihilated the state");
    renormalize();
    return before > 0.0 ? after / before : 0.0;
}

void QutritRegister::reset_to_digit(int q, int d, Rng& rng) {
    check_qutrit(q, n_);
    const double n2 = norm_sq();
    const double p0 = population(q, 0);
    const double p1 = population(q, 1);
    const double u = rng.uniform() * n2;
    int t = 2;
    if (u < p0) {
        t = 0;
    } else if (u < p0 + p1) {
        t = 1;
    }
    project_digit(q, t, true);
    relabel_digit(q, t, d);
}

void QutritRegister::relabel_digit(int q, int t, int d) {
    check_qutrit(q, n_);
    if (t == d) return;
    const uint64_t s = pow3(n_ - 1 - q);
    if (sparse_) {
        std::vector<uint32_t> next;
        next.reserve(support_.size());
        const int64_t shift = (static_cast<int64_t>(d) - t) * static_cast<int64_t>(s);
        for (uint32_t i : support_) {
            if (static_cast<int>((i / s) % 3) == t) {
                const uint64_t j = static_cast<uint64_t>(static_cast<int64_t>(i) + shift);
                amp_[j] = amp_[i];
                amp_[i] = 0.0;
                next.push_back(static_cast<uint32_t>(j));
            } else {
                next.push_back(i);
            }
        }
        std::sort(next.begin(), next.end());
        support_ = std::move(next);
        return;
    }
    const uint64_t blocks = dim_ / (3 * s);
    for (uint64_t b = 0; b < blocks; ++b) {
        Cx* base = amp_.data() + b * 3 * s;
        Cx* src = base + static_cast<uint64_t>(t) * s;
        Cx* dst = base + static_cast<uint64_t>(d) * s;
        for (uint64_t i = 0; i < s; ++i) {
            dst[i] = src[i];
            src[i] = 0.0;
        }
    }
}

double state_fidelity(const QutritRegister& a, const QutritRegister& b) {
    if (a.n() != b.n()) throw std::invalid_argument("register size mismatch in fidelity");
    Cx ov = 0.0;
    for (uint64_t i = 0; i < a.dim(); ++i) ov += std::conj(a.amplitude(i)) * b.amplitude(i);
    return std::norm(ov);
}

BasisOutcome sample_outcome(const QutritRegister& state, Rng& rng) {
    return BasisOutcome::from_index(state.sample_index(rng), state.n());
}

}  // namespace qtk
