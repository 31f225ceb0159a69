#pragma once
#include <stdexcept>
#include <string>

#include "sbmlp/circuit.hpp"

namespace sbmlp::circuits {

// Parse error with 1-based line/column position.
struct ParseError : std::runtime_error {
    ParseError(std::string msg, int line, int col)
        : std::runtime_error("line " + std::to_string(line) + ", col " + std::to_string(col) +
                             ": " + msg),
          line(line),
          col(col) {}
    int line;
    int col;
};

// Circuit DSL:
//   circuit width=<m> depth=<L>
//   layer <l>:
//     w<j> = OP(w<i>[, w<k>])
// Wires are 1-based and reference the previous layer; unlisted wires get an
// implicit COPY. '#' starts a comment.
BooleanCircuit parse_circuit(const std::string& text);

} // namespace sbmlp::circuits
