#pragma once
#include <cstdint>
#include <map>
#include <vector>

#include "sbmlp/circuit.hpp"

namespace sbmlp::circuits {

// Unique multilinear polynomial of a boolean function: integer-weighted sum
// of ANDs of input-variable subsets (the empty subset is the constant term).
class AndPolynomial {
public:
    using Term = std::vector<std::uint32_t>; // sorted variable indices

    static AndPolynomial constant(long long c);
    static AndPolynomial variable(std::uint32_t k);

    const std::map<Term, long long>& terms() const { return terms_; }
    long long coefficient(const Term& t) const;

    bool eval(const features::BooleanVector& b) const;
    long long eval_int(const features::BooleanVector& b) const;

    long long l1_norm() const; // sum |coefficients|, constant included
    std::size_t max_term_size() const;

    AndPolynomial operator+(const AndPolynomial& o) const;
    AndPolynomial operator-(const AndPolynomial& o) const;
    AndPolynomial operator*(const AndPolynomial& o) const; // multilinear product

    static AndPolynomial apply_gate(GateOp op, const AndPolynomial& a, const AndPolynomial& b);

private:
    void add_term(Term t, long long c);
    std::map<Term, long long> terms_;
};

// One polynomial per output wire, in terms of the circuit's input variables.
// Guard: requires 2^depth <= 24 (max term size) and caps intermediate term
// counts; throws std::invalid_argument / std::runtime_error beyond them.
std::vector<AndPolynomial> and_decomposition(const BooleanCircuit& c);

} // namespace sbmlp::circuits
