#include "qtk/circuit.hpp"

#include <set>
#include <stdexcept>

namespace qtk {

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::kR0J: return "R0J";
        case Kind::kRzJ: return "RZJ";
        case Kind::kXX: return "XX";
        case Kind::kXXTilde: return "XXTILDE";
        case Kind::kBarrier: return "BARRIER";
        case Kind::kMeasureMain: return "MEASURE_MAIN";
        case Kind::kMeasureLeak: return "MEASURE_LEAK";
        case Kind::kMeasureMid2: return "MEASURE_MID2";
    }
    return "?";
}

Kind kind_from_name(const std::string& name) {
    if (name == "R0J") return Kind::kR0J;
    if (name == "RZJ") return Kind::kRzJ;
    if (name == "XX") return Kind::kXX;
    if (name == "XXTILDE") return Kind::kXXTilde;
    if (name == "BARRIER") return Kind::kBarrier;
    if (name == "MEASURE_MAIN") return Kind::kMeasureMain;
    if (name == "MEASURE_LEAK") return Kind::kMeasureLeak;
    if (name == "MEASURE_MID2") return Kind::kMeasureMid2;
    throw std::invalid_argument("unknown instruction kind: " + name);
}

int Circuit::count_kind(Kind k) const {
    int c = 0;
    for (const auto& i : instructions) c += (i.kind == k) ? 1 : 0;
    return c;
}

int Circuit::xx_count() const { return count_kind(Kind::kXX) + count_kind(Kind::kXXTilde); }

double Circuit::total_duration() const {
    double t = 0.0;
    for (const auto& i : instructions) t += i.duration_s;
    return t;
}

void HardwareProfile::validate() const {
    if (t_pi_01 <= 0 || t_pi_02 <= 0 || t_xx <= 0 || t_readout <= 0 || t_mid_half <= 0) {
        throw std::invalid_argument("hardware durations must be positive");
    }
}

void validate_targets(const Circuit& c) {
    for (size_t k = 0; k < c.instructions.size(); ++k) {
        const auto& ins = c.instructions[k];
        std::set<int> seen;
        for (int t : ins.targets) {
            if (t < 0 || t >= c.n) {
                throw std::invalid_argument("instruction " + std::to_string(k) +
                                            ": target out of range");
            }
            if (!seen.insert(t).second) {
                throw std::invalid_argument("instruction " + std::to_string(k) +
                                            ": duplicate target");
            }
        }
        if (ins.duration_s < 0) {
            throw std::invalid_argument("instruction " + std::to_string(k) +
                                        ": negative duration");
        }
    }
}

std::vector<Violation> legality_check(const Circuit& c, const HardwareProfile& profile) {
    std::vector<Violation> out;
    auto flag = [&out](size_t idx, std::string msg) { out.push_back({idx, std::move(msg)}); };

    bool seen_terminal = false;
    for (size_t k = 0; k < c.instructions.size(); ++k) {
        const auto& ins = c.instructions[k];
        if (seen_terminal) flag(k, "instruction after final readout");
        switch (ins.kind) {
            case Kind::kR0J:
                if (ins.j != 1 && ins.j != 2) {
                    flag(k, "R0J requires j in {1,2}");
                } else if (ins.j == 1) {
                    if (ins.is_global()) flag(k, "R01 pulses are individually addressed");
                } else if (!ins.is_global() && !profile.individual_02_control) {
                    flag(k, "R02 is driven by the global microwave field");
                }
                break;
            case Kind::kRzJ:
                if (ins.j < 0 || ins.j > 2) {
                    flag(k, "RZJ requires j in {0,1,2}");
                } else if (ins.j != 1 && !ins.is_global() && !profile.individual_02_control) {
                    flag(k, "RZ on levels 0/2 shifts the global microwave phase");
                }
                break;
            case Kind::kXX:
            case Kind::kXXTilde:
                if (ins.targets.size() != 2) flag(k, "entangling gate needs two targets");
                break;
            case Kind::kBarrier:
                break;
            case Kind::kMeasureMain:
            case Kind::kMeasureLeak:
                if (!ins.is_global()) flag(k, "final readout acts on the whole register");
                seen_terminal = true;
                break;
            case Kind::kMeasureMid2:
                if (!ins.is_global()) flag(k, "mid-circuit readout acts on the whole register");
                break;
        }
    }
    return out;
}

}  // namespace qtk
