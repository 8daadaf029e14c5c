#include "qtk/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qtk {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw std::invalid_argument("config key " + key + ": expected a boolean, got '" + v + "'");
}

}  // namespace

RunProfiles parse_config_text(const std::string& text) {
    RunProfiles out;
    std::istringstream is(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        auto d = [&] { return std::stod(val); };

        NoiseProfile& np = out.noise;
        HardwareProfile& hp = out.hardware;
        if (key == "t1") np.t1 = d();
        else if (key == "t2_star") np.t2_star = d();
        else if (key == "xx_fidelity") np.xx_fidelity = d();
        else if (key == "xx_leak_prob") np.xx_leak_prob = d();
        else if (key == "decay_branch_to_0") np.decay_branch_to_0 = d();
        else if (key == "crosstalk_ratio") np.crosstalk_ratio = d();
        else if (key == "spam_flip") np.set_spam_flip(d());
        else if (key == "spam_flip_0_to_1") np.spam_flip_0_to_1 = d();
        else if (key == "spam_flip_1_to_0") np.spam_flip_1_to_0 = d();
        else if (key == "stark_phase") np.stark_phase = d();
        else if (key == "decay_enabled") np.decay_enabled = parse_bool(val, key);
        else if (key == "dephasing_enabled") np.dephasing_enabled = parse_bool(val, key);
        else if (key == "depolarizing_enabled") np.depolarizing_enabled = parse_bool(val, key);
        else if (key == "leak_enabled") np.leak_enabled = parse_bool(val, key);
        else if (key == "crosstalk_enabled") np.crosstalk_enabled = parse_bool(val, key);
        else if (key == "spam_enabled") np.spam_enabled = parse_bool(val, key);
        else if (key == "dd_enabled") np.dd_enabled = parse_bool(val, key);
        else if (key == "master_seed") {
            np.master_seed = std::stoull(val);
            out.seed_from_config = true;
        }
        else if (key == "individual_02_control") hp.individual_02_control = parse_bool(val, key);
        else if (key == "t_pi_01") hp.t_pi_01 = d();
        else if (key == "t_pi_02") hp.t_pi_02 = d();
        else if (key == "t_xx") hp.t_xx = d();
        else if (key == "t_readout") hp.t_readout = d();
        else if (key == "t_mid_half") hp.t_mid_half = d();
        else {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        }
    }
    out.noise.validate();
    out.hardware.validate();
    return out;
}

RunProfiles load_config(const std::string& path) { return parse_config_text(read_text_file(path)); }

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& x,
                           const std::vector<SvgSeries>& series) {
    const int w = 640, h = 420, ml = 70, mr = 30, mt = 45, mb = 55;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (!x.empty()) {
        xmin = *std::min_element(x.begin(), x.end());
        xmax = *std::max_element(x.begin(), x.end());
    }
    bool first = true;
    for (const auto& s : series) {
        for (double v : s.y) {
            if (first) {
                ymin = ymax = v;
                first = false;
            }
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    const double ypad = 0.05 * (ymax - ymin);
    ymin -= ypad;
    ymax += ypad;

    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double v) { return h - mb - (v - ymin) / (ymax - ymin) * (h - mt - mb); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
       << "</text>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr << "\" y2=\""
       << h - mb << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << h - mb
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 14
       << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    os << "<text x=\"18\" y=\"" << (mt + h - mb) / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
       << (mt + h - mb) / 2 << ")\">" << y_label << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0;
        const double yv = ymin + (ymax - ymin) * k / 4.0;
        os << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 18
           << "\" text-anchor=\"middle\" font-size=\"11\">" << xv << "</text>\n";
        os << "<text x=\"" << ml - 8 << "\" y=\"" << py(yv) + 4
           << "\" text-anchor=\"end\" font-size=\"11\">" << yv << "</text>\n";
    }
    int legend_y = mt + 6;
    for (const auto& s : series) {
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
        for (size_t i = 0; i < x.size() && i < s.y.size(); ++i) {
            os << px(x[i]) << ',' << py(s.y[i]) << ' ';
        }
        os << "\"/>\n";
        for (size_t i = 0; i < x.size() && i < s.y.size(); ++i) {
            os << "<circle cx=\"" << px(x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\""
               << s.color << "\"/>\n";
        }
        os << "<text x=\"" << w - mr - 6 << "\" y=\"" << legend_y
           << "\" text-anchor=\"end\" font-size=\"12\" fill=\"" << s.color << "\">" << s.label
           << "</text>\n";
        legend_y += 16;
    }
    os << "</svg>\n";
    return os.str();
}

std::string leak_points_to_csv(const std::vector<LeakScanPoint>& points) {
    std::ostringstream os;
    os.precision(17);
    os << "N,mean_leak,sigma\n";
    for (const auto& p : points) os << p.n << ',' << p.mean_leak << ',' << p.sigma << '\n';
    return os.str();
}

std::vector<std::pair<double, double>> leak_points_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line.rfind("N,mean_leak", 0) != 0) {
        throw std::invalid_argument("expected leak CSV header N,mean_leak,sigma");
    }
    std::vector<std::pair<double, double>> out;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string a, b;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',')) {
            throw std::invalid_argument("short leak CSV row");
        }
        out.emplace_back(std::stod(a), std::stod(b));
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace qtk
