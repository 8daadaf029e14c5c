#include "qtk/readout.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qtk/decompose.hpp"
#include "qtk/gates.hpp"

namespace qtk {

namespace {

bool flip_bit(bool bit, const NoiseProfile& profile, Rng& rng) {
    if (!profile.spam_enabled) return bit;
    const double p = bit ? profile.spam_flip_1_to_0 : profile.spam_flip_0_to_1;
    return (rng.uniform() < p) ? !bit : bit;
}

}  // namespace

std::string main_readout(QutritRegister& state, const NoiseProfile& profile, Rng& rng) {
    const uint64_t idx = state.sample_index(rng);
    state.collapse_to_index(idx);
    std::string bits;
    bits.reserve(static_cast<size_t>(state.n()));
    for (int q = 0; q < state.n(); ++q) {
        const bool dark = state.digit_at(idx, q) != 0;
        bits.push_back(flip_bit(dark, profile, rng) ? '1' : '0');
    }
    return bits;
}

std::pair<std::string, std::vector<uint8_t>> leak_readout(QutritRegister& state,
                                                          const NoiseProfile& profile, Rng& rng) {
    const uint64_t idx = state.sample_index(rng);
    state.collapse_to_index(idx);
    std::string bits;
    std::vector<uint8_t> flags;
    bits.reserve(static_cast<size_t>(state.n()));
    flags.reserve(static_cast<size_t>(state.n()));
    for (int q = 0; q < state.n(); ++q) {
        const int digit = state.digit_at(idx, q);
        const bool dark_first = flip_bit(digit != 0, profile, rng);
        const bool bright_second = flip_bit(digit == 2, profile, rng);
        bits.push_back(dark_first ? '1' : '0');
        flags.push_back(static_cast<uint8_t>(dark_first && bright_second));
    }
    return {std::move(bits), std::move(flags)};
}

bool midcircuit_measure2(QutritRegister& state, const NoiseProfile& profile, Rng& rng) {
    bool any_bright = false;
    for (int q = 0; q < state.n(); ++q) {
        const double p2 = state.population(q, 2) / state.norm_sq();
        const bool bright = rng.uniform() < p2;
        state.project_digit(q, 2, bright);
        any_bright = any_bright || bright;
    }
    // Readout Stark shift accrues on |1> during each half; the pi-pulse
    // sandwich echoes it away for qubit-subspace survivors.
    const Cx half(std::cos(profile.stark_phase), std::sin(profile.stark_phase));
    const GateMatrix flip = r_0j(1, kPi, 0.0);
    const GateMatrix unflip = r_0j(1, -kPi, 0.0);
    for (int q = 0; q < state.n(); ++q) state.apply_diag_1q(q, 1.0, half, 1.0);
    if (profile.dd_enabled) {
        for (int q = 0; q < state.n(); ++q) state.apply_1q(flip, q);
        for (int q = 0; q < state.n(); ++q) state.apply_diag_1q(q, 1.0, half, 1.0);
        for (int q = 0; q < state.n(); ++q) state.apply_1q(unflip, q);
    } else {
        for (int q = 0; q < state.n(); ++q) state.apply_diag_1q(q, 1.0, half, 1.0);
    }
    return any_bright;
}

ConfusionMatrix ConfusionMatrix::identity(int n_bits) {
    ConfusionMatrix cm;
    cm.n_bits = n_bits;
    cm.m.assign(cm.dim() * cm.dim(), 0.0);
    for (size_t i = 0; i < cm.dim(); ++i) cm.at(i, i) = 1.0;
    return cm;
}

std::string ConfusionMatrix::to_csv() const {
    std::ostringstream os;
    os << "# confusion_matrix n=" << n_bits << " shots_per_state=" << shots_per_state << "\n";
    os.precision(17);
    for (size_t r = 0; r < dim(); ++r) {
        for (size_t c = 0; c < dim(); ++c) {
            if (c) os << ',';
            os << at(r, c);
        }
        os << '\n';
    }
    return os.str();
}

ConfusionMatrix ConfusionMatrix::from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("# confusion_matrix", 0) != 0) {
        throw std::invalid_argument("missing confusion matrix header");
    }
    ConfusionMatrix cm;
    {
        std::istringstream hs(line);
        std::string tok;
        while (hs >> tok) {
            if (tok.rfind("n=", 0) == 0) cm.n_bits = std::stoi(tok.substr(2));
            if (tok.rfind("shots_per_state=", 0) == 0)
                cm.shots_per_state = std::stoi(tok.substr(16));
        }
    }
    if (cm.n_bits <= 0) throw std::invalid_argument("bad confusion matrix header");
    cm.m.assign(cm.dim() * cm.dim(), 0.0);
    for (size_t r = 0; r < cm.dim(); ++r) {
        if (!std::getline(is, line)) throw std::invalid_argument("truncated confusion matrix");
        std::istringstream ls(line);
        std::string cell;
        for (size_t c = 0; c < cm.dim(); ++c) {
            if (!std::getline(ls, cell, ',')) {
                throw std::invalid_argument("short confusion matrix row");
            }
            cm.at(r, c) = std::stod(cell);
        }
    }
    for (size_t c = 0; c < cm.dim(); ++c) {
        double col = 0.0;
        for (size_t r = 0; r < cm.dim(); ++r) {
            if (cm.at(r, c) < 0.0) throw std::invalid_argument("negative confusion entry");
            col += cm.at(r, c);
        }
        if (std::abs(col - 1.0) > 1e-6) {
            throw std::invalid_argument("confusion matrix column does not sum to 1");
        }
    }
    return cm;
}

Distribution Distribution::zeros(int n_bits) {
    Distribution d;
    d.n_bits = n_bits;
    d.p.assign(1ull << n_bits, 0.0);
    return d;
}

double& Distribution::at_bits(const std::string& bits) { return p[bits_to_index(bits)]; }

std::string Distribution::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    for (size_t i = 0; i < p.size(); ++i) os << index_to_bits(i, n_bits) << ',' << p[i] << '\n';
    return os.str();
}

size_t bits_to_index(const std::string& bits) {
    size_t idx = 0;
    for (char b : bits) {
        if (b != '0' && b != '1') throw std::invalid_argument("bad bitstring");
        idx = (idx << 1) | static_cast<size_t>(b == '1');
    }
    return idx;
}

std::string index_to_bits(size_t idx, int n_bits) {
    std::string bits(static_cast<size_t>(n_bits), '0');
    for (int q = n_bits - 1; q >= 0; --q) {
        bits[static_cast<size_t>(q)] = (idx & 1) ? '1' : '0';
        idx >>= 1;
    }
    return bits;
}

ConfusionMatrix estimate_confusion(int n, const NoiseProfile& profile, const HardwareProfile& hw,
                                   int shots_per_state, int jobs) {
    if (n < 1 || n > kMaxQutrits) throw std::invalid_argument("register size out of range");
    if (shots_per_state < 1) throw std::invalid_argument("shots_per_state must be positive");
    ConfusionMatrix cm;
    cm.n_bits = n;
    cm.shots_per_state = shots_per_state;
    cm.m.assign(cm.dim() * cm.dim(), 0.0);
    for (size_t prep = 0; prep < cm.dim(); ++prep) {
        Circuit c;
        c.n = n;
        c.extend(basis_prep(index_to_bits(prep, n), /*use_sk1=*/true, hw));
        c.append(make_measure_main(hw));
        NoiseProfile run = profile;
        run.master_seed = mix_seed(profile.master_seed, 0xC0F0ull, prep);
        const auto records = run_shots(c, run, shots_per_state, jobs, hw);
        for (const auto& rec : records) cm.at(bits_to_index(rec.outcome), prep) += 1.0;
        for (size_t r = 0; r < cm.dim(); ++r) cm.at(r, prep) /= shots_per_state;
    }
    return cm;
}

namespace {

// Partial-pivot LU factorization of a dim x dim row-major matrix; `a` is
// overwritten with the factors.
void lu_factor(std::vector<double>& a, std::vector<size_t>& piv, size_t dim) {
    piv.resize(dim);
    for (size_t i = 0; i < dim; ++i) piv[i] = i;
    for (size_t k = 0; k < dim; ++k) {
        size_t best = k;
        double mag = std::abs(a[k * dim + k]);
        for (size_t r = k + 1; r < dim; ++r) {
            const double m = std::abs(a[r * dim + k]);
            if (m > mag) {
                mag = m;
                best = r;
            }
        }
        if (mag < 1e-300) throw std::runtime_error("confusion matrix is singular");
        if (best != k) {
            for (size_t c = 0; c < dim; ++c) std::swap(a[k * dim + c], a[best * dim + c]);
            std::swap(piv[k], piv[best]);
        }
        const double inv = 1.0 / a[k * dim + k];
        for (size_t r = k + 1; r < dim; ++r) {
            const double f = a[r * dim + k] * inv;
            a[r * dim + k] = f;
            if (f == 0.0) continue;
            for (size_t c = k + 1; c < dim; ++c) a[r * dim + c] -= f * a[k * dim + c];
        }
    }
}

std::vector<double> lu_solve(const std::vector<double>& a, const std::vector<size_t>& piv,
                             size_t dim, const std::vector<double>& b) {
    std::vector<double> x(dim);
    for (size_t i = 0; i < dim; ++i) x[i] = b[piv[i]];
    for (size_t r = 1; r < dim; ++r) {
        double acc = x[r];
        for (size_t c = 0; c < r; ++c) acc -= a[r * dim + c] * x[c];
        x[r] = acc;
    }
    for (size_t r = dim; r-- > 0;) {
        double acc = x[r];
        for (size_t c = r + 1; c < dim; ++c) acc -= a[r * dim + c] * x[c];
        x[r] = acc / a[r * dim + r];
    }
    return x;
}

double norm1(const std::vector<double>& m, size_t dim) {
    double worst = 0.0;
    for (size_t c = 0; c < dim; ++c) {
        double col = 0.0;
        for (size_t r = 0; r < dim; ++r) col += std::abs(m[r * dim + c]);
        worst = std::max(worst, col);
    }
    return worst;
}

}  // namespace

SpamCorrector::SpamCorrector(const ConfusionMatrix& cm)
    : n_bits_(cm.n_bits), dim_(cm.dim()), lu_(cm.m), lut_(dim_ * dim_) {
    for (size_t r = 0; r < dim_; ++r)
        for (size_t c = 0; c < dim_; ++c) lut_[c * dim_ + r] = cm.m[r * dim_ + c];
    lu_factor(lu_, piv_, dim_);
    lu_factor(lut_, pivt_, dim_);

    // cond_1 = ||C||_1 ||C^-1||_1, inverse column norms from unit solves
    double inv_norm = 0.0;
    std::vector<double> e(dim_, 0.0);
    for (size_t c = 0; c < dim_; ++c) {
        e[c] = 1.0;
        const auto col = lu_solve(lu_, piv_, dim_, e);
        e[c] = 0.0;
        double sum = 0.0;
        for (double v : col) sum += std::abs(v);
        inv_norm = std::max(inv_norm, sum);
    }
    cond_ = norm1(cm.m, dim_) * inv_norm;
    if (cond_ > 1e6) {
        throw std::runtime_error("confusion matrix too ill-conditioned to invert (cond_1 ~ " +
                                 std::to_string(cond_) + ")");
    }
}

Distribution SpamCorrector::correct(const Distribution& measured) const {
    if (measured.p.size() != dim_) {
        throw std::invalid_argument("distribution does not match confusion matrix size");
    }
    Distribution out;
    out.n_bits = measured.n_bits;
    out.p = lu_solve(lu_, piv_, dim_, measured.p);
    return out;
}

std::vector<double> SpamCorrector::inverse_row(size_t read_index) const {
    // row r of C^-1 equals (C^T)^-1 e_r
    std::vector<double> e(dim_, 0.0);
    e[read_index] = 1.0;
    return lu_solve(lut_, pivt_, dim_, e);
}

Distribution spam_correct(const Distribution& measured, const ConfusionMatrix& cm) {
    return SpamCorrector(cm).correct(measured);
}

PostSelection post_select(const std::vector<ShotRecord>& records, SelectBy by) {
    if (records.empty()) throw std::invalid_argument("post-selection needs at least one shot");
    PostSelection sel;
    for (size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        const bool keep = (by == SelectBy::kFinalLeakFlags) ? !r.any_leak()
                                                            : !(r.has_mid && r.mid_flag);
        if (keep) sel.kept.push_back(i);
    }
    sel.fraction = static_cast<double>(sel.kept.size()) / static_cast<double>(records.size());
    return sel;
}

}  // namespace qtk
