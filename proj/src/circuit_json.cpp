#include "qtk/circuit_json.hpp"

#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace qtk {

using nlohmann::json;

namespace {

json params_json(const Instruction& ins) {
    json p = json::object();
    switch (ins.kind) {
        case Kind::kR0J:
            p["j"] = ins.j;
            p["theta"] = ins.theta;
            p["phi"] = ins.phi;
            break;
        case Kind::kRzJ:
            p["j"] = ins.j;
            p["theta"] = ins.theta;
            break;
        case Kind::kXX:
            p["chi"] = ins.chi;
            break;
        case Kind::kXXTilde:
            p["chi"] = ins.chi;
            p["chi_a"] = ins.chi_a;
            p["chi_b"] = ins.chi_b;
            break;
        default:
            break;
    }
    return p;
}

void read_params(const json& p, Instruction& ins) {
    auto need = [&p](const char* key) -> const json& {
        auto it = p.find(key);
        if (it == p.end()) throw std::invalid_argument(std::string("missing param: ") + key);
        return *it;
    };
    size_t expected = 0;
    switch (ins.kind) {
        case Kind::kR0J:
            ins.j = need("j").get<int>();
            ins.theta = need("theta").get<double>();
            ins.phi = need("phi").get<double>();
            expected = 3;
            break;
        case Kind::kRzJ:
            ins.j = need("j").get<int>();
            ins.theta = need("theta").get<double>();
            expected = 2;
            break;
        case Kind::kXX:
            ins.chi = need("chi").get<double>();
            expected = 1;
            break;
        case Kind::kXXTilde:
            ins.chi = need("chi").get<double>();
            ins.chi_a = need("chi_a").get<double>();
            ins.chi_b = need("chi_b").get<double>();
            expected = 3;
            break;
        default:
            expected = 0;
            break;
    }
    if (p.size() != expected) {
        throw std::invalid_argument(std::string("unexpected params for ") + kind_name(ins.kind));
    }
}

}  // namespace

std::string circuit_to_json(const Circuit& c) {
    json j;
    j["n"] = c.n;
    json arr = json::array();
    for (const auto& ins : c.instructions) {
        json e;
        e["kind"] = kind_name(ins.kind);
        e["targets"] = ins.targets;
        e["params"] = params_json(ins);
        e["duration_s"] = ins.duration_s;
        arr.push_back(std::move(e));
    }
    j["instructions"] = std::move(arr);
    return j.dump(2) + "\n";
}

Circuit circuit_from_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.is_object() || !j.contains("n") || !j.contains("instructions")) {
        throw std::invalid_argument("circuit JSON needs {\"n\", \"instructions\"}");
    }
    Circuit c;
    c.n = j["n"].get<int>();
    if (c.n < 1 || c.n > 12) {
        throw std::invalid_argument("circuit size out of range");
    }
    for (const auto& e : j["instructions"]) {
        Instruction ins;
        ins.kind = kind_from_name(e.at("kind").get<std::string>());
        ins.targets = e.at("targets").get<std::vector<int>>();
        read_params(e.at("params"), ins);
        ins.duration_s = e.at("duration_s").get<double>();
        if (ins.duration_s < 0) throw std::invalid_argument("negative duration");
        c.instructions.push_back(std::move(ins));
    }
    validate_targets(c);
    return c;
}

Circuit load_circuit(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open circuit file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return circuit_from_json(text);
}

void save_circuit(const Circuit& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write circuit file: " + path);
    out << circuit_to_json(c);
}

}  // namespace qtk
