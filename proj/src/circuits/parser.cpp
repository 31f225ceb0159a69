#include "sbmlp/circuit_parser.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <sstream>

namespace sbmlp::circuits {

namespace {

struct Cursor {
    const std::string& line;
    int line_no;
    std::size_t pos = 0;

    int col() const { return static_cast<int>(pos) + 1; }
    void skip_ws() {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    }
    bool done() {
        skip_ws();
        return pos >= line.size() || line[pos] == '#';
    }
    bool accept(char c) {
        skip_ws();
        if (pos < line.size() && line[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "' " + what, line_no, col());
    }
    std::string ident() {
        skip_ws();
        std::size_t start = pos;
        while (pos < line.size() && (std::isalnum(static_cast<unsigned char>(line[pos])) || line[pos] == '_'))
            ++pos;
        if (pos == start) throw ParseError("expected identifier", line_no, col());
        return line.substr(start, pos - start);
    }
    std::size_t number() {
        skip_ws();
        std::size_t start = pos;
        while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) ++pos;
        if (pos == start) throw ParseError("expected number", line_no, col());
        return std::stoull(line.substr(start, pos - start));
    }
};

std::optional<GateOp> op_from_name(const std::string& name) {
    if (name == "AND") return GateOp::And;
    if (name == "OR") return GateOp::Or;
    if (name == "XOR") return GateOp::Xor;
    if (name == "NOT") return GateOp::Not;
    if (name == "COPY") return GateOp::Copy;
    if (name == "CONST0") return GateOp::Const0;
    if (name == "CONST1") return GateOp::Const1;
    return std::nullopt;
}

std::uint32_t parse_wire(Cursor& c, std::size_t width) {
    c.skip_ws();
    int col = c.col();
    std::string id = c.ident();
    if (id.size() < 2 || id[0] != 'w')
        throw ParseError("expected wire reference 'w<j>'", c.line_no, col);
    std::size_t idx = 0;
    for (std::size_t i = 1; i < id.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(id[i])))
            throw ParseError("bad wire name '" + id + "'", c.line_no, col);
        idx = idx * 10 + static_cast<std::size_t>(id[i] - '0');
    }
    if (idx < 1 || idx > width)
        throw ParseError("wire w" + std::to_string(idx) + " outside width " + std::to_string(width),
                         c.line_no, col);
    return static_cast<std::uint32_t>(idx - 1);
}

} // namespace

BooleanCircuit parse_circuit(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;

    std::size_t width = 0, depth = 0;
    bool header_seen = false;
    std::vector<std::vector<Gate>> layers;
    std::vector<bool> assigned;
    std::size_t cur_layer = 0; // 1-based once inside a layer block

    auto open_layer = [&](std::size_t l, int ln, int col) {
        if (l != cur_layer + 1)
            throw ParseError("layer " + std::to_string(l) + " out of order (expected " +
                                 std::to_string(cur_layer + 1) + ")",
                             ln, col);
        if (l > depth) throw ParseError("layer exceeds declared depth", ln, col);
        std::vector<Gate> layer(width);
        for (std::size_t j = 0; j < width; ++j)
            layer[j] = Gate{GateOp::Copy, static_cast<std::uint32_t>(j), 0};
        layers.push_back(std::move(layer));
        assigned.assign(width, false);
        cur_layer = l;
    };

    while (std::getline(in, raw)) {
        ++line_no;
        Cursor c{raw, line_no};
        if (c.done()) continue;

        if (!header_seen) {
            std::string kw = c.ident();
            if (kw != "circuit") throw ParseError("expected 'circuit' header", line_no, 1);
            std::string wkey = c.ident();
            if (wkey != "width") throw ParseError("expected 'width=<m>'", line_no, c.col());
            c.expect('=', "after width");
            width = c.number();
            std::string dkey = c.ident();
            if (dkey != "depth") throw ParseError("expected 'depth=<L>'", line_no, c.col());
            c.expect('=', "after depth");
            depth = c.number();
            if (width == 0) throw ParseError("width must be positive", line_no, 1);
            if (!c.done()) throw ParseError("trailing junk after header", line_no, c.col());
            header_seen = true;
            continue;
        }

        c.skip_ws();
        int start_col = c.col();
        std::string first = c.ident();
        if (first == "layer") {
            std::size_t l = c.number();
            c.expect(':', "after layer number");
            if (!c.done()) throw ParseError("trailing junk after layer header", line_no, c.col());
            open_layer(l, line_no, start_col);
            continue;
        }

        // Gate line: w<j> = OP(args)
        if (cur_layer == 0) throw ParseError("gate line outside a layer block", line_no, start_col);
        if (first.size() < 2 || first[0] != 'w')
            throw ParseError("expected 'layer <l>:' or 'w<j> = ...'", line_no, start_col);
        std::size_t target = 0;
        for (std::size_t i = 1; i < first.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(first[i])))
                throw ParseError("bad wire name '" + first + "'", line_no, start_col);
            target = target * 10 + static_cast<std::size_t>(first[i] - '0');
        }
        if (target < 1 || target > width)
            throw ParseError("wire outside declared width", line_no, start_col);
        if (assigned[target - 1])
            throw ParseError("wire w" + std::to_string(target) + " assigned twice", line_no,
                             start_col);
        c.expect('=', "after wire");
        int op_col = c.col();
        std::string op_name = c.ident();
        auto op = op_from_name(op_name);
        if (!op) throw ParseError("unknown gate op '" + op_name + "'", line_no, op_col);
        Gate g;
        g.op = *op;
        int arity = gate_arity(*op);
        c.expect('(', "after gate op");
        if (arity == 0) {
            if (c.accept(')')) {
            } else {
                throw ParseError(std::string(gate_op_name(*op)) + " takes no arguments", line_no,
                                 c.col());
            }
        } else {
            g.in0 = parse_wire(c, width);
            if (arity == 2) {
                if (!c.accept(','))
                    throw ParseError(std::string(gate_op_name(*op)) + " needs two arguments",
                                     line_no, c.col());
                g.in1 = parse_wire(c, width);
            } else if (c.accept(',')) {
                throw ParseError(std::string(gate_op_name(*op)) + " takes one argument", line_no,
                                 c.col());
            }
            c.expect(')', "to close argument list");
        }
        if (!c.done()) throw ParseError("trailing junk after gate", line_no, c.col());
        layers[cur_layer - 1][target - 1] = g;
        assigned[target - 1] = true;
    }

    if (!header_seen) throw ParseError("empty circuit text", 1, 1);
    if (layers.size() != depth)
        throw ParseError("declared depth " + std::to_string(depth) + " but found " +
                             std::to_string(layers.size()) + " layers",
                         line_no, 1);
    return BooleanCircuit(width, std::move(layers));
}

} // namespace sbmlp::circuits
