#include "qtk/noise.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "qtk/gates.hpp"
#include "qtk/readout.hpp"
#include "qtk/sim.hpp"

namespace qtk {

void NoiseProfile::validate() const {
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (t1 <= 0 || t2_star <= 0) throw std::invalid_argument("lifetimes must be positive");
    if (!prob(xx_fidelity) || !prob(xx_leak_prob) || !prob(decay_branch_to_0) ||
        !prob(spam_flip_0_to_1) || !prob(spam_flip_1_to_0)) {
        throw std::invalid_argument("noise probabilities must lie in [0,1]");
    }
    if (crosstalk_ratio < 0.0 || crosstalk_ratio >= 1.0) {
        throw std::invalid_argument("crosstalk ratio must lie in [0,1)");
    }
}

NoiseProfile NoiseProfile::ideal() {
    NoiseProfile p;
    p.decay_enabled = false;
    p.dephasing_enabled = false;
    p.depolarizing_enabled = false;
    p.leak_enabled = false;
    p.crosstalk_enabled = false;
    p.spam_enabled = false;
    return p;
}

ScheduledCircuit::ScheduledCircuit(Circuit circuit, const NoiseProfile& profile)
    : circuit_(std::move(circuit)) {
    profile.validate();
    validate_targets(circuit_);
    steps_.reserve(circuit_.instructions.size());
    starts_.reserve(circuit_.instructions.size());
    double t = 0.0;
    for (size_t k = 0; k < circuit_.instructions.size(); ++k) {
        const auto& ins = circuit_.instructions[k];
        Step s;
        s.instruction_index = k;
        if (ins.is_unitary()) {
            s.matrix = instruction_matrix(ins);
            s.has_matrix = true;
        }
        starts_.push_back(t);
        t += ins.duration_s;
        steps_.push_back(std::move(s));
    }
    total_duration_ = t;
}

ScheduledCircuit schedule(Circuit circuit, const NoiseProfile& profile) {
    return ScheduledCircuit(std::move(circuit), profile);
}

namespace {

std::array<Cx, 4> rot2(double theta, double phi) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return {Cx(c, 0.0), Cx(0.0, -1.0) * Cx(std::cos(phi), -std::sin(phi)) * s,
            Cx(0.0, -1.0) * Cx(std::cos(phi), std::sin(phi)) * s, Cx(c, 0.0)};
}

std::array<Cx, 4> mul2(const std::array<Cx, 4>& a, const std::array<Cx, 4>& b) {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3]};
}

GateMatrix embed01(const std::array<Cx, 4>& u) {
    std::vector<Cx> m(9, Cx(0.0, 0.0));
    m[0] = u[0];
    m[1] = u[1];
    m[3] = u[2];
    m[4] = u[3];
    m[8] = 1.0;
    return GateMatrix::unchecked(1, m);
}

// Spectator rotations accrued from individually addressed R01 pulses; flushed
// (Pauli-twirled) whenever the spectator is next driven, entangled, or read
// out. Within a window the rotations compose coherently, so an SK1 triple
// cancels its own crosstalk to first order.
class CrosstalkTracker {
public:
    CrosstalkTracker(int n, const NoiseProfile& profile)
        : enabled_(profile.crosstalk_enabled && profile.crosstalk_ratio > 0.0),
          eps_(profile.crosstalk_ratio),
          pend_(static_cast<size_t>(n), kId),
          dirty_(static_cast<size_t>(n), 0) {}

    void accrue(const Instruction& ins) {
        if (!enabled_ || ins.kind != Kind::kR0J || ins.j != 1 || ins.is_global()) return;
        const int n = static_cast<int>(pend_.size());
        for (int t : ins.targets) {
            for (int s : {t - 1, t + 1}) {
                if (s < 0 || s >= n) continue;
                pend_[static_cast<size_t>(s)] =
                    mul2(rot2(eps_ * ins.theta, ins.phi), pend_[static_cast<size_t>(s)]);
                dirty_[static_cast<size_t>(s)] = 1;
            }
        }
    }

    void flush(int q, QutritRegister& state, Rng& rng) {
        if (!enabled_ || !dirty_[static_cast<size_t>(q)]) return;
        const auto u = pend_[static_cast<size_t>(q)];
        pend_[static_cast<size_t>(q)] = kId;
        dirty_[static_cast<size_t>(q)] = 0;
        const double p_flip = std::norm(u[2]);
        if (rng.uniform() < p_flip && std::abs(u[1]) > 0.0 && std::abs(u[2]) > 0.0) {
            const Cx b = u[1] / std::abs(u[1]);
            const Cx c = u[2] / std::abs(u[2]);
            state.apply_1q(embed01({Cx(0.0, 0.0), b, c, Cx(0.0, 0.0)}), q);
        } else if (std::abs(u[0]) > 0.0 && std::abs(u[3]) > 0.0) {
            state.apply_diag_1q(q, u[0] / std::abs(u[0]), u[3] / std::abs(u[3]), Cx(1.0, 0.0));
        }
    }

    void flush_all(QutritRegister& state, Rng& rng) {
        for (int q = 0; q < static_cast<int>(pend_.size()); ++q) flush(q, state, rng);
    }

private:
    static constexpr std::array<Cx, 4> kId = {Cx(1.0, 0.0), Cx(0.0, 0.0), Cx(0.0, 0.0),
                                              Cx(1.0, 0.0)};
    bool enabled_;
    double eps_;
    std::vector<std::array<Cx, 4>> pend_;
    std::vector<uint8_t> dirty_;
};

const GateMatrix& pauli01(int p) {
    static const std::array<GateMatrix, 4> kP = {
        GateMatrix::identity(1),
        embed01({Cx(0, 0), Cx(1, 0), Cx(1, 0), Cx(0, 0)}),
        embed01({Cx(0, 0), Cx(0, -1), Cx(0, 1), Cx(0, 0)}),
        embed01({Cx(1, 0), Cx(0, 0), Cx(0, 0), Cx(-1, 0)}),
    };
    return kP[static_cast<size_t>(p)];
}

bool decays_this_step(double u, double p_max, const QutritRegister& state, int q) {
    const double p1 = state.population(q, 1) / state.norm_sq();
    return u < p1 * p_max;
}

}  // namespace

void apply_idle_decay(QutritRegister& state, int q, double dt, const NoiseProfile& profile,
                      Rng& rng, std::vector<uint8_t>* sticky_leaked) {
    if (!profile.decay_enabled || dt <= 0.0) return;
    const double p_max = 1.0 - std::exp(-dt / profile.t1);
    const double u = rng.uniform();
    if (u < p_max && decays_this_step(u, p_max, state, q)) {
        const bool to_ground = rng.uniform() < profile.decay_branch_to_0;
        state.project_digit(q, 1, true);
        state.relabel_digit(q, 1, to_ground ? 0 : 2);
        if (!to_ground && sticky_leaked) (*sticky_leaked)[static_cast<size_t>(q)] = 1;
        return;
    }
    state.apply_diag_1q(q, 1.0, std::exp(-dt / (2.0 * profile.t1)), 1.0);
    state.renormalize();
}

void apply_dephasing(QutritRegister& state, int q, double dt, const NoiseProfile& profile,
                     Rng& rng) {
    if (!profile.dephasing_enabled || dt <= 0.0) return;
    const double phi = rng.gaussian() * std::sqrt(2.0 * dt / profile.t2_star);
    state.apply_diag_1q(q, 1.0, Cx(std::cos(phi), std::sin(phi)), 1.0);
}

void apply_xx_error(QutritRegister& state, int q1, int q2, const NoiseProfile& profile, Rng& rng,
                    std::vector<uint8_t>* sticky_leaked) {
    if (profile.depolarizing_enabled && profile.xx_fidelity < 1.0) {
        // Uniform two-qubit Pauli on the {|0>,|1>} levels, applied with the
        // probability that makes the Bell-state infidelity from XX(pi/4)
        // equal 1 - xx_fidelity (12 of the 15 Paulis move a Bell state).
        const double p_apply = std::min(1.0, (1.0 - profile.xx_fidelity) * 15.0 / 12.0);
        if (rng.uniform() < p_apply) {
            const int k = 1 + static_cast<int>(rng.below(15));
            const int p1 = k / 4;
            const int p2 = k % 4;
            if (p1 != 0) state.apply_1q(pauli01(p1), q1);
            if (p2 != 0) state.apply_1q(pauli01(p2), q2);
        }
    }
    if (profile.leak_enabled && profile.xx_leak_prob > 0.0) {
        for (int q : {q1, q2}) {
            if (rng.uniform() < profile.xx_leak_prob) {
                state.reset_to_digit(q, 2, rng);
                if (sticky_leaked) (*sticky_leaked)[static_cast<size_t>(q)] = 1;
            }
        }
    }
}

void apply_crosstalk(QutritRegister& state, const Instruction& ins, const NoiseProfile& profile,
                     Rng& rng) {
    CrosstalkTracker tracker(state.n(), profile);
    tracker.accrue(ins);
    tracker.flush_all(state, rng);
}

ShotRecord run_single_shot(const ScheduledCircuit& sc, const NoiseProfile& profile,
                           uint64_t seed) {
    const Circuit& c = sc.circuit();
    QutritRegister state(c.n);
    Rng rng(seed);
    CrosstalkTracker xtalk(c.n, profile);
    std::vector<uint8_t> sticky(static_cast<size_t>(c.n), 0);
    ShotRecord rec;
    rec.trajectory_seed = seed;

    std::vector<uint8_t> driven(static_cast<size_t>(c.n), 0);
    for (const auto& step : sc.steps()) {
        const Instruction& ins = sc.instruction(step);

        // Decoherence accrues on the ions the pulse is not driving; the
        // driven pair's in-gate error budget is carried by apply_xx_error.
        const bool terminal_measure =
            ins.kind == Kind::kMeasureMain || ins.kind == Kind::kMeasureLeak;
        if (ins.duration_s > 0.0 && !terminal_measure) {
            std::fill(driven.begin(), driven.end(), 0);
            if (ins.is_unitary()) {
                if (ins.is_global()) {
                    std::fill(driven.begin(), driven.end(), 1);
                } else {
                    for (int t : ins.targets) driven[static_cast<size_t>(t)] = 1;
                }
            }
            for (int q = 0; q < c.n; ++q) {
                if (driven[static_cast<size_t>(q)]) continue;
                apply_idle_decay(state, q, ins.duration_s, profile, rng, &sticky);
                apply_dephasing(state, q, ins.duration_s, profile, rng);
            }
        }

        switch (ins.kind) {
            case Kind::kR0J:
            case Kind::kRzJ: {
                const bool skip_sticky =
                    (ins.kind == Kind::kR0J && ins.j == 2) || (ins.kind == Kind::kRzJ && ins.j != 1);
                if (ins.is_global()) {
                    for (int q = 0; q < c.n; ++q) {
                        xtalk.flush(q, state, rng);
                        if (skip_sticky && sticky[static_cast<size_t>(q)]) continue;
                        state.apply_1q(step.matrix, q);
                    }
                } else {
                    for (int t : ins.targets) {
                        xtalk.flush(t, state, rng);
                        if (skip_sticky && sticky[static_cast<size_t>(t)]) continue;
                        state.apply_1q(step.matrix, t);
                    }
                    xtalk.accrue(ins);
                }
                break;
            }
            case Kind::kXX:
            case Kind::kXXTilde: {
                xtalk.flush(ins.targets[0], state, rng);
                xtalk.flush(ins.targets[1], state, rng);
                state.apply_2q(step.matrix, ins.targets[0], ins.targets[1]);
                apply_xx_error(state, ins.targets[0], ins.targets[1], profile, rng, &sticky);
                break;
            }
            case Kind::kBarrier:
                break;
            case Kind::kMeasureMain: {
                xtalk.flush_all(state, rng);
                rec.outcome = main_readout(state, profile, rng);
                break;
            }
            case Kind::kMeasureLeak: {
                xtalk.flush_all(state, rng);
                auto [bits, flags] = leak_readout(state, profile, rng);
                rec.outcome = std::move(bits);
                rec.leaked = std::move(flags);
                break;
            }
            case Kind::kMeasureMid2: {
                xtalk.flush_all(state, rng);
                const bool bright = midcircuit_measure2(state, profile, rng);
                rec.has_mid = true;
                rec.mid_flag = rec.mid_flag || bright;
                break;
            }
        }
    }
    return rec;
}

namespace {
void require_runnable(const Circuit& c, const HardwareProfile& hw) {
    const auto violations = legality_check(c, hw);
    if (!violations.empty()) {
        throw std::invalid_argument("refusing illegal circuit: instruction " +
                                    std::to_string(violations.front().index) + ": " +
                                    violations.front().message);
    }
    for (const auto& ins : c.instructions) {
        if (ins.kind == Kind::kMeasureMain || ins.kind == Kind::kMeasureLeak) return;
    }
    throw std::invalid_argument("circuit has no final readout");
}
}  // namespace

std::vector<ShotRecord> run_shots(const ScheduledCircuit& sc, const NoiseProfile& profile,
                                  int n_shots, int jobs, const HardwareProfile& hw) {
    if (n_shots < 0) throw std::invalid_argument("shot count must be non-negative");
    require_runnable(sc.circuit(), hw);
    std::vector<ShotRecord> records(static_cast<size_t>(n_shots));
    auto work = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            records[static_cast<size_t>(i)] =
                run_single_shot(sc, profile, mix_seed(profile.master_seed, static_cast<uint64_t>(i)));
        }
    };
    if (jobs <= 1 || n_shots < 2) {
        work(0, n_shots);
        return records;
    }
    const int k = std::min(jobs, n_shots);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(k));
    std::exception_ptr first_error;
    std::mutex err_mu;
    for (int t = 0; t < k; ++t) {
        const int lo = static_cast<int>(static_cast<int64_t>(n_shots) * t / k);
        const int hi = static_cast<int>(static_cast<int64_t>(n_shots) * (t + 1) / k);
        pool.emplace_back([&, lo, hi] {
            try {
                work(lo, hi);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mu);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
    return records;
}

std::vector<ShotRecord> run_shots(const Circuit& circuit, const NoiseProfile& profile,
                                  int n_shots, int jobs, const HardwareProfile& hw) {
    ScheduledCircuit sc(circuit, profile);
    return run_shots(sc, profile, n_shots, jobs, hw);
}

}  // namespace qtk
