#include "qtk/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>

#include "qtk/gates.hpp"
#include "qtk/sim.hpp"

namespace qtk {

std::string family_name(Family f) { return f == Family::kQubit ? "qubit" : "qutrit"; }

std::string cnx_expected_bits(const std::string& input_bits) {
    std::string out = input_bits;
    const size_t n = out.size();
    bool all_ones = true;
    for (size_t i = 0; i + 1 < n; ++i) all_ones = all_ones && out[i] == '1';
    if (all_ones) out[n - 1] = (out[n - 1] == '1') ? '0' : '1';
    return out;
}

Circuit decomposition_core(Family family, int n, bool stash_idle, const HardwareProfile& hw) {
    if (family == Family::kQubit) {
        if (n == 3) return qubit_ccx(hw);
        return qubit_cnx(n, hw);
    }
    ToffoliOptions opts;
    opts.n = n;
    opts.stash_idle = stash_idle;
    opts.hardware = hw;
    return qutrit_toffoli(opts);
}

namespace {

struct InputRun {
    Distribution dist_raw;
    Distribution dist_post;
    uint64_t correct_raw = 0;
    uint64_t total_raw = 0;
    uint64_t correct_post = 0;
    uint64_t total_post = 0;
    uint64_t leaked_shots = 0;
};

InputRun run_input(const ScheduledCircuit& sc, const NoiseProfile& profile,
                   const HardwareProfile& hw, const std::string& expected, int shots, int jobs,
                   bool qutrit_readout) {
    InputRun out;
    const int n = sc.circuit().n;
    out.dist_raw = Distribution::zeros(n);
    out.dist_post = Distribution::zeros(n);
    const auto records = run_shots(sc, profile, shots, jobs, hw);
    const size_t expect_idx = bits_to_index(expected);
    for (const auto& rec : records) {
        const size_t idx = bits_to_index(rec.outcome);
        out.dist_raw.p[idx] += 1.0;
        out.total_raw += 1;
        out.correct_raw += (idx == expect_idx) ? 1 : 0;
        if (rec.any_leak()) out.leaked_shots += 1;
        if (qutrit_readout && !rec.any_leak()) {
            out.dist_post.p[idx] += 1.0;
            out.total_post += 1;
            out.correct_post += (idx == expect_idx) ? 1 : 0;
        }
    }
    for (double& v : out.dist_raw.p) v /= static_cast<double>(out.total_raw);
    if (out.total_post > 0) {
        for (double& v : out.dist_post.p) v /= static_cast<double>(out.total_post);
    }
    return out;
}

double mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

uint64_t binomial_draw(uint64_t n, double p, Rng& rng) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    const double mu = static_cast<double>(n) * p;
    const double var = mu * (1.0 - p);
    if (n > 64 && var > 9.0) {
        const double v = mu + std::sqrt(var) * rng.gaussian();
        const double clamped = std::clamp(v, 0.0, static_cast<double>(n));
        return static_cast<uint64_t>(clamped + 0.5);
    }
    uint64_t k = 0;
    for (uint64_t i = 0; i < n; ++i) k += (rng.uniform() < p) ? 1 : 0;
    return k;
}

// Bootstrap sigma of row . m under multinomial resampling of the measured
// distribution m (total `shots` draws), via conditional binomials.
double corrected_bootstrap_sigma(const std::vector<double>& row, const std::vector<double>& m,
                                 uint64_t shots, int resamples, uint64_t seed) {
    Rng rng(seed);
    double sum = 0.0, sum2 = 0.0;
    std::vector<double> boot(m.size());
    for (int r = 0; r < resamples; ++r) {
        uint64_t remaining = shots;
        double mass = 1.0;
        double dot = 0.0;
        for (size_t j = 0; j < m.size(); ++j) {
            if (remaining == 0 || mass <= 0.0) break;
            const double q = std::clamp(m[j] / mass, 0.0, 1.0);
            const uint64_t k =
                (j + 1 == m.size()) ? remaining : binomial_draw(remaining, q, rng);
            dot += row[j] * static_cast<double>(k);
            remaining -= k;
            mass -= m[j];
        }
        const double f = dot / static_cast<double>(shots);
        sum += f;
        sum2 += f * f;
    }
    const double avg = sum / resamples;
    const double var = std::max(0.0, sum2 / resamples - avg * avg);
    return std::sqrt(var * resamples / (resamples - 1.0));
}

}  // namespace

TruthTableResult truth_table_experiment_with_circuit(const Circuit& core, Family family,
                                                     const NoiseProfile& profile,
                                                     const HardwareProfile& hw,
                                                     const TruthTableOptions& opts) {
    const int n = core.n;
    if (n < 3) throw std::invalid_argument("truth tables need n >= 3");
    if (opts.shots_per_input < 1) throw std::invalid_argument("shots_per_input must be positive");
    const bool qutrit_readout = family == Family::kQutrit;
    const size_t n_inputs = 1ull << n;

    TruthTableResult res;
    res.n = n;
    res.family = family;
    res.shots_per_input = opts.shots_per_input;
    res.has_post = qutrit_readout && opts.postselect;
    res.has_corrected = opts.spam_correct;

    std::unique_ptr<SpamCorrector> corrector;
    if (opts.spam_correct) {
        NoiseProfile cm_prof = profile;
        cm_prof.master_seed = mix_seed(profile.master_seed, 0xCF00ull);
        const ConfusionMatrix cm =
            estimate_confusion(n, cm_prof, hw, opts.confusion_shots, opts.jobs);
        corrector = std::make_unique<SpamCorrector>(cm);
    }

    std::vector<double> leak_freq;
    std::vector<double> sig2_raw, sig2_corr, sig2_post;
    std::vector<double> post_fractions;
    for (size_t x = 0; x < n_inputs; ++x) {
        const std::string bits = index_to_bits(x, n);
        const std::string expected = cnx_expected_bits(bits);

        Circuit c;
        c.n = n;
        c.extend(basis_prep(bits, /*use_sk1=*/true, hw));
        c.extend(core.instructions);
        c.append(qutrit_readout ? make_measure_leak(hw) : make_measure_main(hw));

        NoiseProfile run = profile;
        run.master_seed = mix_seed(profile.master_seed, 0x77AAull, x);
        ScheduledCircuit sc(c, run);
        const InputRun r =
            run_input(sc, run, hw, expected, opts.shots_per_input, opts.jobs, qutrit_readout);

        const double f_raw =
            static_cast<double>(r.correct_raw) / static_cast<double>(r.total_raw);
        res.f_raw.push_back(f_raw);
        leak_freq.push_back(static_cast<double>(r.leaked_shots) /
                            static_cast<double>(r.total_raw));
        {
            const uint64_t counts[2] = {r.correct_raw, r.total_raw - r.correct_raw};
            const double s = bootstrap_sigma(counts, 400, mix_seed(run.master_seed, 0xB001ull));
            sig2_raw.push_back(s * s);
        }
        if (corrector) {
            const Distribution corr = corrector->correct(r.dist_raw);
            res.f_corrected.push_back(corr.p[bits_to_index(expected)]);
            const auto row = corrector->inverse_row(bits_to_index(expected));
            const double s =
                corrected_bootstrap_sigma(row, r.dist_raw.p, r.total_raw, 200,
                                          mix_seed(run.master_seed, 0xB004ull));
            sig2_corr.push_back(s * s);
        }
        if (res.has_post) {
            post_fractions.push_back(static_cast<double>(r.total_post) /
                                     static_cast<double>(r.total_raw));
            // an input whose every shot was discarded carries no post-selected
            // information; fall back to the raw frequency
            const double f_post = r.total_post > 0 ? static_cast<double>(r.correct_post) /
                                                         static_cast<double>(r.total_post)
                                                   : f_raw;
            res.f_post_raw.push_back(f_post);
            if (r.total_post > 0) {
                const uint64_t counts[2] = {r.correct_post, r.total_post - r.correct_post};
                const double s =
                    bootstrap_sigma(counts, 400, mix_seed(run.master_seed, 0xB002ull));
                sig2_post.push_back(s * s);
            }
            if (corrector && r.total_post > 0) {
                const Distribution corr = corrector->correct(r.dist_post);
                res.f_post_corrected.push_back(corr.p[bits_to_index(expected)]);
            }
        }
    }

    res.ftt_raw = mean(res.f_raw);
    res.ftt_corrected = mean(res.f_corrected);
    res.ftt_post_raw = mean(res.f_post_raw);
    res.ftt_post_corrected = mean(res.f_post_corrected);
    res.mean_leak = mean(leak_freq);
    res.post_fraction = mean(post_fractions);
    res.sigma_raw =
        std::sqrt(std::accumulate(sig2_raw.begin(), sig2_raw.end(), 0.0)) /
        static_cast<double>(n_inputs);
    if (!sig2_corr.empty()) {
        res.sigma_corrected =
            std::sqrt(std::accumulate(sig2_corr.begin(), sig2_corr.end(), 0.0)) /
            static_cast<double>(n_inputs);
    }
    if (!sig2_post.empty()) {
        res.sigma_post_raw =
            std::sqrt(std::accumulate(sig2_post.begin(), sig2_post.end(), 0.0)) /
            static_cast<double>(n_inputs);
    }
    return res;
}

TruthTableResult truth_table_experiment(Family family, int n, const NoiseProfile& profile,
                                        const HardwareProfile& hw,
                                        const TruthTableOptions& opts) {
    const Circuit core = decomposition_core(family, n, opts.stash_idle, hw);
    return truth_table_experiment_with_circuit(core, family, profile, hw, opts);
}

LeakScanResult leak_scan(int n_lo, int n_hi, const NoiseProfile& profile,
                         const HardwareProfile& hw, const LeakScanOptions& opts) {
    if (n_lo < 3 || n_hi < n_lo) throw std::invalid_argument("bad leak-scan range");
    if (opts.shots_per_n < 1) throw std::invalid_argument("shots_per_n must be positive");
    LeakScanResult res;
    res.stash_idle = opts.stash_idle;
    for (int n = n_lo; n <= n_hi; ++n) {
        ToffoliOptions topts;
        topts.n = n;
        topts.stash_idle = opts.stash_idle;
        topts.emit_leak_measure = true;
        topts.hardware = hw;
        const Circuit core = qutrit_toffoli(topts);

        // round-robin the shot budget over the basis inputs
        const size_t n_inputs = 1ull << n;
        const uint64_t base = static_cast<uint64_t>(opts.shots_per_n) / n_inputs;
        const uint64_t extra = static_cast<uint64_t>(opts.shots_per_n) % n_inputs;
        LeakScanPoint pt;
        pt.n = n;
        uint64_t leaked_total = 0, shots_total = 0;
        for (size_t x = 0; x < n_inputs; ++x) {
            const int shots = static_cast<int>(base + (x < extra ? 1 : 0));
            if (shots == 0) continue;
            Circuit c;
            c.n = n;
            c.extend(basis_prep(index_to_bits(x, n), /*use_sk1=*/true, hw));
            c.extend(core.instructions);

            NoiseProfile run = profile;
            run.master_seed = mix_seed(profile.master_seed, 0x1EA4ull + static_cast<uint64_t>(n), x);
            const auto records = run_shots(c, run, shots, opts.jobs, hw);
            uint64_t leaked = 0;
            for (const auto& rec : records) leaked += rec.any_leak() ? 1 : 0;
            pt.per_input.push_back(static_cast<double>(leaked) / shots);
            leaked_total += leaked;
            shots_total += static_cast<uint64_t>(shots);
        }
        pt.mean_leak = static_cast<double>(leaked_total) / static_cast<double>(shots_total);
        const uint64_t counts[2] = {leaked_total, shots_total - leaked_total};
        pt.sigma = bootstrap_sigma(counts, 400,
                                   mix_seed(profile.master_seed, 0xB003ull,
                                            static_cast<uint64_t>(n)));
        res.points.push_back(std::move(pt));
    }
    res.fit = fit_leakage(res.points);
    return res;
}

LeakageFit fit_leakage(std::span<const LeakScanPoint> points) {
    std::vector<std::pair<double, double>> xy;
    xy.reserve(points.size());
    for (const auto& p : points) xy.emplace_back(static_cast<double>(p.n), p.mean_leak);
    return fit_leakage_xy(xy);
}

LeakageFit fit_leakage_xy(std::span<const std::pair<double, double>> points) {
    if (points.size() < 3) throw std::invalid_argument("leakage fit needs at least 3 points");
    double A = 1.0;
    double p = 0.95;
    double lambda = 1e-3;
    const int max_iter = 500;
    auto residuals = [&points](double a, double q, std::vector<double>& r) {
        double rss = 0.0;
        r.resize(points.size());
        for (size_t i = 0; i < points.size(); ++i) {
            const double g = 2.0 * points[i].first - 3.0;
            const double f = 1.0 - a * std::pow(q, g);
            r[i] = f - points[i].second;
            rss += r[i] * r[i];
        }
        return rss;
    };
    std::vector<double> r;
    double rss = residuals(A, p, r);
    int it = 0;
    for (; it < max_iter; ++it) {
        // J columns: d f / dA = -p^g ;  d f / dp = -A g p^(g-1)
        double jtj[2][2] = {{0, 0}, {0, 0}};
        double jtr[2] = {0, 0};
        for (size_t i = 0; i < points.size(); ++i) {
            const double g = 2.0 * points[i].first - 3.0;
            const double pg = std::pow(p, g);
            const double ja = -pg;
            const double jp = -A * g * pg / p;
            jtj[0][0] += ja * ja;
            jtj[0][1] += ja * jp;
            jtj[1][1] += jp * jp;
            jtr[0] += ja * r[i];
            jtr[1] += jp * r[i];
        }
        jtj[1][0] = jtj[0][1];
        const double d0 = jtj[0][0] * (1.0 + lambda);
        const double d1 = jtj[1][1] * (1.0 + lambda);
        const double det = d0 * d1 - jtj[0][1] * jtj[1][0];
        if (std::abs(det) < 1e-300) break;
        const double dA = (-jtr[0] * d1 + jtr[1] * jtj[0][1]) / det;
        const double dp = (jtr[0] * jtj[1][0] - jtr[1] * d0) / det;
        double A_new = A + dA;
        double p_new = std::clamp(p + dp, 1e-6, 1.0);
        std::vector<double> r_new;
        const double rss_new = residuals(A_new, p_new, r_new);
        if (rss_new <= rss) {
            const double rel = std::abs(rss - rss_new) / std::max(rss, 1e-300);
            A = A_new;
            p = p_new;
            r = std::move(r_new);
            rss = rss_new;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-10) break;
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) {
                throw std::runtime_error(
                    "leakage fit failed to converge; rms residual " +
                    std::to_string(std::sqrt(rss / static_cast<double>(points.size()))));
            }
        }
    }
    if (it == max_iter) {
        throw std::runtime_error("leakage fit exceeded the iteration budget; rms residual " +
                                 std::to_string(std::sqrt(rss / static_cast<double>(points.size()))));
    }

    LeakageFit fit;
    fit.amplitude = A;
    fit.survival = p;
    fit.iterations = it + 1;
    fit.rms_residual = std::sqrt(rss / static_cast<double>(points.size()));
    // covariance ~ sigma^2 (J^T J)^-1
    double jtj[2][2] = {{0, 0}, {0, 0}};
    for (size_t i = 0; i < points.size(); ++i) {
        const double g = 2.0 * points[i].first - 3.0;
        const double pg = std::pow(p, g);
        const double ja = -pg;
        const double jp = -A * g * pg / p;
        jtj[0][0] += ja * ja;
        jtj[0][1] += ja * jp;
        jtj[1][1] += jp * jp;
    }
    jtj[1][0] = jtj[0][1];
    const double dof = std::max<double>(1.0, static_cast<double>(points.size()) - 2.0);
    const double s2 = rss / dof;
    const double det = jtj[0][0] * jtj[1][1] - jtj[0][1] * jtj[1][0];
    if (std::abs(det) > 1e-300) {
        fit.cov[0][0] = s2 * jtj[1][1] / det;
        fit.cov[0][1] = -s2 * jtj[0][1] / det;
        fit.cov[1][0] = -s2 * jtj[1][0] / det;
        fit.cov[1][1] = s2 * jtj[0][0] / det;
    }
    return fit;
}

RamseyFit fit_ramsey(std::span<const double> phis, std::span<const double> p2) {
    if (phis.size() != p2.size()) throw std::invalid_argument("phi/value length mismatch");
    if (phis.size() < 8) throw std::invalid_argument("ramsey fit needs at least 8 points");
    const auto [lo, hi] = std::minmax_element(phis.begin(), phis.end());
    if (*hi - *lo < 2.0 * kPi - 1e-9) {
        throw std::invalid_argument("ramsey scan must span a full period");
    }
    // normal equations for y = a + b cos(phi) + c sin(phi)
    double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    double v[3] = {0, 0, 0};
    for (size_t i = 0; i < phis.size(); ++i) {
        const double basis[3] = {1.0, std::cos(phis[i]), std::sin(phis[i])};
        for (int r = 0; r < 3; ++r) {
            v[r] += basis[r] * p2[i];
            for (int c = 0; c < 3; ++c) m[r][c] += basis[r] * basis[c];
        }
    }
    // gaussian elimination, 3x3
    for (int k = 0; k < 3; ++k) {
        int best = k;
        for (int r = k + 1; r < 3; ++r)
            if (std::abs(m[r][k]) > std::abs(m[best][k])) best = r;
        if (std::abs(m[best][k]) < 1e-300) throw std::runtime_error("degenerate ramsey system");
        std::swap(m[k], m[best]);
        std::swap(v[k], v[best]);
        for (int r = 0; r < 3; ++r) {
            if (r == k) continue;
            const double f = m[r][k] / m[k][k];
            for (int c = k; c < 3; ++c) m[r][c] -= f * m[k][c];
            v[r] -= f * v[k];
        }
    }
    const double a = v[0] / m[0][0];
    const double b = v[1] / m[1][1];
    const double c = v[2] / m[2][2];

    RamseyFit fit;
    fit.offset = a;
    fit.amplitude = std::hypot(b, c);
    fit.phase = std::atan2(c, b);
    fit.reliable = fit.amplitude > 1e-8;
    return fit;
}

double recovered_ms_phase(const RamseyFit& fit) {
    // P2(phi) = 1/2 - cos(phi - chi)/2, so the fitted fringe sits at
    // phi0 = chi + pi.
    double chi = fit.phase - kPi;
    while (chi <= -kPi) chi += 2.0 * kPi;
    while (chi > kPi) chi -= 2.0 * kPi;
    return chi;
}

CalibrationScan run_calibration_scan(double chi_a, double chi_b, int points, int shots,
                                     const NoiseProfile& profile, const HardwareProfile& hw) {
    if (points < 8) throw std::invalid_argument("calibration scan needs at least 8 points");
    CalibrationScan scan;
    for (int k = 0; k < points; ++k) {
        const double phi = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(points - 1);
        scan.phis.push_back(phi);
        const Circuit c = calibration_circuit(phi, chi_a, chi_b, hw);
        if (shots == 0) {
            QutritRegister st(2);
            apply_circuit_ideal(st, c, /*stop_at_measure=*/true);
            scan.p2.push_back(st.population(0, 2));
        } else {
            NoiseProfile run = profile;
            run.master_seed = mix_seed(profile.master_seed, 0xCA1Bull, static_cast<uint64_t>(k));
            const auto records = run_shots(c, run, shots, 1, hw);
            // ion 0 has no |1> population in this sequence, so dark == |2>
            uint64_t dark = 0;
            for (const auto& rec : records) dark += rec.outcome[0] == '1' ? 1 : 0;
            scan.p2.push_back(static_cast<double>(dark) / static_cast<double>(shots));
        }
    }
    return scan;
}

GroverResult grover_experiment(ToffoliVariant variant, int shots, const NoiseProfile& profile,
                               const HardwareProfile& hw, int jobs, bool stash_idle) {
    if (shots < 1) throw std::invalid_argument("shots must be positive");
    GroverResult res;
    res.variant = variant;
    res.shots = shots;
    res.has_post = variant == ToffoliVariant::kQutritMidMeasure;
    double err_sum = 0.0, err_post_sum = 0.0, frac_sum = 0.0;
    const char* marks[4] = {"00", "01", "10", "11"};
    for (int s = 0; s < 4; ++s) {
        const Circuit c = grover3(marks[s], variant, hw, stash_idle);
        NoiseProfile run = profile;
        run.master_seed = mix_seed(profile.master_seed, 0x6E0Bull, static_cast<uint64_t>(s));
        const auto records = run_shots(c, run, shots, jobs, hw);
        Distribution d = Distribution::zeros(3);
        Distribution dp = Distribution::zeros(3);
        uint64_t hit = 0, hit_post = 0, kept = 0;
        for (const auto& rec : records) {
            d.p[bits_to_index(rec.outcome)] += 1.0;
            const bool correct = rec.outcome[0] == marks[s][0] && rec.outcome[1] == marks[s][1];
            hit += correct ? 1 : 0;
            if (res.has_post && !rec.mid_flag) {
                dp.p[bits_to_index(rec.outcome)] += 1.0;
                kept += 1;
                hit_post += correct ? 1 : 0;
            }
        }
        for (double& v : d.p) v /= shots;
        res.dist.push_back(std::move(d));
        const double p = static_cast<double>(hit) / shots;
        res.p_correct.push_back(p);
        err_sum += 1.0 - p;
        if (res.has_post) {
            if (kept > 0) {
                for (double& v : dp.p) v /= static_cast<double>(kept);
            }
            res.dist_post.push_back(std::move(dp));
            const double pp = kept > 0 ? static_cast<double>(hit_post) / kept : 0.0;
            res.p_correct_post.push_back(pp);
            err_post_sum += 1.0 - pp;
            frac_sum += static_cast<double>(kept) / shots;
        }
    }
    res.p_err = err_sum / 4.0;
    if (res.has_post) {
        res.p_err_post = err_post_sum / 4.0;
        res.post_fraction = frac_sum / 4.0;
    }
    return res;
}

double grover_noiseless_success(const std::string& s, ToffoliVariant variant,
                                const HardwareProfile& hw, bool stash_idle) {
    const Circuit c = grover3(s, variant, hw, stash_idle);
    QutritRegister st(3);
    for (const auto& ins : c.instructions) {
        if (ins.kind == Kind::kMeasureMid2) {
            NoiseProfile ideal = NoiseProfile::ideal();
            Rng rng(1);
            midcircuit_measure2(st, ideal, rng);
            continue;
        }
        if (ins.is_measure()) break;
        apply_instruction_ideal(st, ins);
    }
    // P(search qubits read s): dark ions (digits 1 and 2) read '1'.
    double p = 0.0;
    for (uint64_t idx = 0; idx < st.dim(); ++idx) {
        const char b0 = st.digit_at(idx, 0) != 0 ? '1' : '0';
        const char b1 = st.digit_at(idx, 1) != 0 ? '1' : '0';
        if (b0 == s[0] && b1 == s[1]) p += std::norm(st.amplitude(idx));
    }
    return p;
}

double bootstrap_sigma(std::span<const uint64_t> counts, int resamples, uint64_t seed) {
    if (counts.empty()) throw std::invalid_argument("bootstrap needs counts");
    if (resamples < 2) throw std::invalid_argument("bootstrap needs >= 2 resamples");
    uint64_t total = 0;
    for (uint64_t c : counts) total += c;
    if (total == 0) throw std::invalid_argument("bootstrap needs at least one shot");
    const double p0 = static_cast<double>(counts[0]) / static_cast<double>(total);
    if (p0 == 0.0 || p0 == 1.0) return 0.0;

    Rng rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (int r = 0; r < resamples; ++r) {
        uint64_t hits = 0;
        for (uint64_t i = 0; i < total; ++i) hits += (rng.uniform() < p0) ? 1 : 0;
        const double f = static_cast<double>(hits) / static_cast<double>(total);
        sum += f;
        sum2 += f * f;
    }
    const double m = sum / resamples;
    const double var = std::max(0.0, sum2 / resamples - m * m);
    return std::sqrt(var * resamples / (resamples - 1.0));
}

}  // namespace qtk
