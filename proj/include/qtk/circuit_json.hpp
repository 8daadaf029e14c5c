#pragma once

#include <string>

#include "qtk/circuit.hpp"

namespace qtk {

// {"n": int, "instructions": [{"kind", "targets", "params", "duration_s"}]}
// emit(parse(emit(c))) is byte-identical and parse(emit(c)) == c bit-exactly.
std::string circuit_to_json(const Circuit& c);
Circuit circuit_from_json(const std::string& text);

Circuit load_circuit(const std::string& path);
void save_circuit(const Circuit& c, const std::string& path);

}  // namespace qtk
