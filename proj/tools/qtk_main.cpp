#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "qtk/analysis.hpp"
#include "qtk/circuit_json.hpp"
#include "qtk/decompose.hpp"
#include "qtk/gates.hpp"
#include "qtk/report.hpp"

using nlohmann::json;
using namespace qtk;

namespace {

struct GlobalOpts {
    std::optional<uint64_t> seed;
    int jobs = 1;
    std::string config_path;

    // precedence: --seed, then the config file, then QTK_SEED
    RunProfiles profiles() const {
        RunProfiles rp;
        if (!config_path.empty()) rp = load_config(config_path);
        if (seed) {
            rp.noise.master_seed = *seed;
        } else if (!rp.seed_from_config) {
            if (const char* env = std::getenv("QTK_SEED")) {
                rp.noise.master_seed = std::stoull(env);
            }
        }
        return rp;
    }
};

json result_header(const std::string& command, const RunProfiles& rp) {
    json j;
    j["schema"] = "1";
    j["command"] = command;
    j["seed"] = rp.noise.master_seed;
    return j;
}

void write_output(const json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
    } else {
        write_text_file(path, text);
    }
}

Family parse_family(const std::string& name) {
    if (name == "qubit") return Family::kQubit;
    if (name == "qutrit") return Family::kQutrit;
    throw CLI::ValidationError("--family must be qubit or qutrit");
}

std::pair<int, int> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const int v = std::stoi(text);
        return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
}

json truth_table_json(const TruthTableResult& r) {
    json j;
    j["n"] = r.n;
    j["family"] = family_name(r.family);
    j["shots_per_input"] = r.shots_per_input;
    j["ftt_raw"] = r.ftt_raw;
    j["sigma_raw"] = r.sigma_raw;
    j["mean_leak"] = r.mean_leak;
    j["f_raw"] = r.f_raw;
    if (r.has_corrected) {
        j["ftt_corrected"] = r.ftt_corrected;
        j["sigma_corrected"] = r.sigma_corrected;
        j["f_corrected"] = r.f_corrected;
    }
    if (r.has_post) {
        j["ftt_post_raw"] = r.ftt_post_raw;
        j["sigma_post_raw"] = r.sigma_post_raw;
        j["post_fraction"] = r.post_fraction;
        j["f_post_raw"] = r.f_post_raw;
        if (r.has_corrected) {
            j["ftt_post_corrected"] = r.ftt_post_corrected;
            j["f_post_corrected"] = r.f_post_corrected;
        }
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qutrit Toffoli compiler and noisy trapped-ion simulator"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--seed", g.seed, "master seed (overrides config and QTK_SEED)");
    app.add_option("--jobs", g.jobs, "shot-level threads (results independent of this)")
        ->check(CLI::Range(1, 256));
    app.add_option("--config", g.config_path, "noise/hardware key = value file");

    // ---- decompose ----
    auto* dec = app.add_subcommand("decompose", "emit a Toffoli decomposition as circuit JSON");
    std::string dec_family = "qutrit";
    int dec_n = 3;
    bool dec_no_stash = false, dec_leak_measure = false;
    std::string dec_out, dec_emit;
    dec->add_option("--family", dec_family, "qubit|qutrit");
    dec->add_option("-n,--n", dec_n, "register size")->required();
    dec->add_flag("--no-stash", dec_no_stash, "disable the idle |1> stash branches");
    dec->add_flag("--leak-measure", dec_leak_measure, "append the double-readout measurement");
    dec->add_option("-o,--out", dec_out, "output path (default stdout)");
    dec->add_option("--emit", dec_emit, "json (default) or dot");

    // ---- truth-table ----
    auto* tt = app.add_subcommand("truth-table", "reconstruct a C^{N-1}X truth table");
    std::string tt_family = "qutrit", tt_out, tt_csv, tt_circuit, tt_range = "3", tt_plot;
    int tt_shots = 2048, tt_confusion_shots = 512;
    bool tt_postselect = false, tt_no_stash = false, tt_no_correct = false;
    tt->add_option("--family", tt_family, "qubit|qutrit");
    tt->add_option("-n,--n", tt_range, "register size or range a..b");
    tt->add_option("--shots", tt_shots, "shots per input state");
    tt->add_option("--confusion-shots", tt_confusion_shots, "shots per basis state for SPAM");
    tt->add_flag("--postselect", tt_postselect, "add leak post-selected columns");
    tt->add_flag("--no-stash", tt_no_stash, "disable the idle |1> stash branches");
    tt->add_flag("--no-correct", tt_no_correct, "skip SPAM correction");
    tt->add_option("--circuit", tt_circuit, "run this circuit JSON instead of the built-in core");
    tt->add_option("-o,--out", tt_out, "result JSON path");
    tt->add_option("--csv", tt_csv, "per-input CSV path");
    tt->add_option("--plot", tt_plot, "SVG of F_tt vs N (range mode)");

    // ---- grover ----
    auto* gr = app.add_subcommand("grover", "three-qubit Grover search");
    std::string gr_variant = "qutrit", gr_out;
    int gr_shots = 2048;
    bool gr_no_stash = false;
    gr->add_option("--variant", gr_variant, "qubit|qutrit|qutrit-mid");
    gr->add_option("--shots", gr_shots, "shots per oracle");
    gr->add_flag("--no-stash", gr_no_stash, "disable the idle |1> stash branches");
    gr->add_option("-o,--out", gr_out, "result JSON path");

    // ---- leak-scan ----
    auto* ls = app.add_subcommand("leak-scan", "leakage probability vs register size + fit");
    std::string ls_range = "3..10", ls_out, ls_csv, ls_plot;
    int ls_shots = 10000;
    bool ls_no_stash = false;
    ls->add_option("--n-range", ls_range, "range a..b");
    ls->add_option("--shots", ls_shots, "total shots per register size");
    ls->add_flag("--no-stash", ls_no_stash, "disable the idle |1> stash branches");
    ls->add_option("-o,--out", ls_out, "result JSON path");
    ls->add_option("--csv", ls_csv, "leak CSV path (N,mean_leak,sigma)");
    ls->add_option("--plot", ls_plot, "SVG path");

    // ---- calibrate ----
    auto* cal = app.add_subcommand("calibrate", "Ramsey scan of the XX residual phase");
    double cal_chi_a = 0.0, cal_chi_b = 0.0;
    int cal_points = 17, cal_shots = 0;
    std::string cal_out;
    cal->add_option("--chi-a", cal_chi_a, "injected chi_A (rad)");
    cal->add_option("--chi-b", cal_chi_b, "injected chi_B (rad)");
    cal->add_option("--points", cal_points, "scan points over [0, 2pi]");
    cal->add_option("--shots", cal_shots, "shots per point (0 = exact populations)");
    cal->add_option("-o,--out", cal_out, "result JSON path");

    // ---- fit ----
    auto* fit = app.add_subcommand("fit", "fit 1 - A p^{2N-3} to a leak CSV");
    std::string fit_in, fit_out;
    fit->add_option("--input", fit_in, "leak CSV path")->required();
    fit->add_option("-o,--out", fit_out, "result JSON path");

    // ---- confusion ----
    auto* conf = app.add_subcommand("confusion", "estimate a readout confusion matrix");
    int conf_n = 3, conf_shots = 1024;
    std::string conf_out;
    conf->add_option("-n,--n", conf_n, "register size")->required();
    conf->add_option("--shots-per-state", conf_shots, "shots per basis state");
    conf->add_option("-o,--out", conf_out, "CSV path (default stdout)");

    for (auto* sub : app.get_subcommands({})) sub->fallthrough();
    CLI11_PARSE(app, argc, argv);

    try {
        const RunProfiles rp = g.profiles();
        const NoiseProfile& noise = rp.noise;
        const HardwareProfile& hw = rp.hardware;

        if (*dec) {
            const Family family = parse_family(dec_family);
            const Circuit c = decomposition_core(family, dec_n, !dec_no_stash, hw);
            Circuit out_c = c;
            if (dec_leak_measure) out_c.append(make_measure_leak(hw));
            std::cerr << "family=" << dec_family << " n=" << dec_n
                      << " xx_gates=" << out_c.xx_count()
                      << " instructions=" << out_c.instructions.size()
                      << " duration_s=" << out_c.total_duration() << "\n";
            if (dec_emit == "dot") {
                const std::string dot = emit_dot(out_c);
                if (dec_out.empty()) {
                    std::cout << dot;
                } else {
                    write_text_file(dec_out, dot);
                }
            } else if (dec_emit.empty() || dec_emit == "json") {
                const std::string text = circuit_to_json(out_c);
                if (dec_out.empty()) {
                    std::cout << text;
                } else {
                    write_text_file(dec_out, text);
                }
            } else {
                throw std::invalid_argument("--emit must be json or dot");
            }
        } else if (*tt) {
            const Family family = parse_family(tt_family);
            const auto [n_lo, n_hi] = parse_range(tt_range);
            TruthTableOptions opts;
            opts.shots_per_input = tt_shots;
            opts.postselect = tt_postselect;
            opts.stash_idle = !tt_no_stash;
            opts.spam_correct = !tt_no_correct;
            opts.confusion_shots = tt_confusion_shots;
            opts.jobs = g.jobs;

            json j = result_header("truth-table", rp);
            json rows = json::array();
            std::vector<double> xs, ys;
            std::ostringstream csv;
            csv.precision(17);
            csv << "n,input,f_raw,f_corrected,f_post_raw\n";
            for (int n = n_lo; n <= n_hi; ++n) {
                NoiseProfile run = noise;
                run.master_seed = mix_seed(noise.master_seed, 0x7700ull, static_cast<uint64_t>(n));
                TruthTableResult r;
                if (!tt_circuit.empty()) {
                    const Circuit core = load_circuit(tt_circuit);
                    if (core.n != n) throw std::invalid_argument("--circuit size mismatch with -n");
                    r = truth_table_experiment_with_circuit(core, family, run, hw, opts);
                } else {
                    r = truth_table_experiment(family, n, run, hw, opts);
                }
                rows.push_back(truth_table_json(r));
                xs.push_back(n);
                ys.push_back(r.ftt_raw);
                for (size_t x = 0; x < r.f_raw.size(); ++x) {
                    csv << n << ',' << index_to_bits(x, n) << ',' << r.f_raw[x] << ','
                        << (r.has_corrected ? r.f_corrected[x] : 0.0) << ','
                        << (r.has_post ? r.f_post_raw[x] : 0.0) << '\n';
                }
            }
            j["results"] = std::move(rows);
            write_output(j, tt_out);
            if (!tt_csv.empty()) write_text_file(tt_csv, csv.str());
            if (!tt_plot.empty()) {
                write_text_file(tt_plot,
                                svg_line_chart("truth-table fidelity", "N", "F_tt", xs,
                                               {{"F_tt raw", "#c0392b", ys}}));
            }
        } else if (*gr) {
            ToffoliVariant variant;
            if (gr_variant == "qubit") variant = ToffoliVariant::kQubit;
            else if (gr_variant == "qutrit") variant = ToffoliVariant::kQutrit;
            else if (gr_variant == "qutrit-mid") variant = ToffoliVariant::kQutritMidMeasure;
            else throw std::invalid_argument("--variant must be qubit|qutrit|qutrit-mid");
            const GroverResult r =
                grover_experiment(variant, gr_shots, noise, hw, g.jobs, !gr_no_stash);
            json j = result_header("grover", rp);
            j["variant"] = gr_variant;
            j["shots_per_oracle"] = gr_shots;
            j["p_correct"] = r.p_correct;
            j["p_err"] = r.p_err;
            json dists = json::array();
            for (const auto& d : r.dist) dists.push_back(d.p);
            j["distributions"] = std::move(dists);
            if (r.has_post) {
                j["p_correct_post"] = r.p_correct_post;
                j["p_err_post"] = r.p_err_post;
                j["post_fraction"] = r.post_fraction;
                json pdists = json::array();
                for (const auto& d : r.dist_post) pdists.push_back(d.p);
                j["distributions_post"] = std::move(pdists);
            }
            write_output(j, gr_out);
        } else if (*ls) {
            const auto [n_lo, n_hi] = parse_range(ls_range);
            LeakScanOptions opts;
            opts.shots_per_n = ls_shots;
            opts.stash_idle = !ls_no_stash;
            opts.jobs = g.jobs;
            const LeakScanResult r = leak_scan(n_lo, n_hi, noise, hw, opts);
            json j = result_header("leak-scan", rp);
            j["stash_idle"] = r.stash_idle;
            json pts = json::array();
            std::vector<double> xs, ys, fitted;
            for (const auto& p : r.points) {
                pts.push_back({{"n", p.n}, {"mean_leak", p.mean_leak}, {"sigma", p.sigma}});
                xs.push_back(p.n);
                ys.push_back(p.mean_leak);
                fitted.push_back(1.0 - r.fit.amplitude *
                                           std::pow(r.fit.survival, 2.0 * p.n - 3.0));
            }
            j["points"] = std::move(pts);
            j["fit"] = {{"A", r.fit.amplitude},
                        {"p", r.fit.survival},
                        {"rms_residual", r.fit.rms_residual},
                        {"sigma_A", std::sqrt(std::max(0.0, r.fit.cov[0][0]))},
                        {"sigma_p", std::sqrt(std::max(0.0, r.fit.cov[1][1]))}};
            write_output(j, ls_out);
            if (!ls_csv.empty()) write_text_file(ls_csv, leak_points_to_csv(r.points));
            if (!ls_plot.empty()) {
                write_text_file(ls_plot, svg_line_chart("leakage vs register size", "N",
                                                        "P(any leak)", xs,
                                                        {{"measured", "#c0392b", ys},
                                                         {"fit", "#2980b9", fitted}}));
            }
        } else if (*cal) {
            const CalibrationScan scan =
                run_calibration_scan(cal_chi_a, cal_chi_b, cal_points, cal_shots, noise, hw);
            const RamseyFit rf = fit_ramsey(scan.phis, scan.p2);
            json j = result_header("calibrate", rp);
            j["chi_a_injected"] = cal_chi_a;
            j["chi_b_injected"] = cal_chi_b;
            j["points"] = cal_points;
            j["shots_per_point"] = cal_shots;
            j["fit"] = {{"amplitude", rf.amplitude},
                        {"phase", rf.phase},
                        {"offset", rf.offset},
                        {"reliable", rf.reliable}};
            j["recovered_chi_a"] = recovered_ms_phase(rf);
            write_output(j, cal_out);
        } else if (*fit) {
            const auto pts = leak_points_from_csv(read_text_file(fit_in));
            const LeakageFit lf = fit_leakage_xy(pts);
            json j = result_header("fit", rp);
            j["input"] = fit_in;
            j["fit"] = {{"A", lf.amplitude},
                        {"p", lf.survival},
                        {"rms_residual", lf.rms_residual},
                        {"sigma_A", std::sqrt(std::max(0.0, lf.cov[0][0]))},
                        {"sigma_p", std::sqrt(std::max(0.0, lf.cov[1][1]))}};
            write_output(j, fit_out);
        } else if (*conf) {
            const ConfusionMatrix cm = estimate_confusion(conf_n, noise, hw, conf_shots, g.jobs);
            if (conf_out.empty()) {
                std::cout << cm.to_csv();
            } else {
                write_text_file(conf_out, cm.to_csv());
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
