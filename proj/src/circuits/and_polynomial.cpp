#include "sbmlp/and_polynomial.hpp"

#include <algorithm>
#include <stdexcept>

namespace sbmlp::circuits {

AndPolynomial AndPolynomial::constant(long long c) {
    AndPolynomial p;
    if (c != 0) p.terms_[{}] = c;
    return p;
}

AndPolynomial AndPolynomial::variable(std::uint32_t k) {
    AndPolynomial p;
    p.terms_[{k}] = 1;
    return p;
}

long long AndPolynomial::coefficient(const Term& t) const {
    auto it = terms_.find(t);
    return it == terms_.end() ? 0 : it->second;
}

void AndPolynomial::add_term(Term t, long long c) {
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(std::move(t), c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

long long AndPolynomial::eval_int(const features::BooleanVector& b) const {
    long long v = 0;
    for (const auto& [term, coeff] : terms_) {
        bool all = true;
        for (auto k : term)
            if (!b.get(k)) {
                all = false;
                break;
            }
        if (all) v += coeff;
    }
    return v;
}

bool AndPolynomial::eval(const features::BooleanVector& b) const {
    long long v = eval_int(b);
    if (v != 0 && v != 1)
        throw std::logic_error("AndPolynomial: non-boolean value at a boolean point");
    return v == 1;
}

long long AndPolynomial::l1_norm() const {
    long long n = 0;
    for (const auto& [term, coeff] : terms_) n += coeff < 0 ? -coeff : coeff;
    return n;
}

std::size_t AndPolynomial::max_term_size() const {
    std::size_t n = 0;
    for (const auto& [term, coeff] : terms_) n = std::max(n, term.size());
    return n;
}

AndPolynomial AndPolynomial::operator+(const AndPolynomial& o) const {
    AndPolynomial r = *this;
    for (const auto& [term, coeff] : o.terms_) r.add_term(term, coeff);
    return r;
}

AndPolynomial AndPolynomial::operator-(const AndPolynomial& o) const {
    AndPolynomial r = *this;
    for (const auto& [term, coeff] : o.terms_) r.add_term(term, -coeff);
    return r;
}

AndPolynomial AndPolynomial::operator*(const AndPolynomial& o) const {
    constexpr std::size_t kTermCap = 1u << 20;
    AndPolynomial r;
    for (const auto& [ta, ca] : terms_) {
        for (const auto& [tb, cb] : o.terms_) {
            Term merged;
            merged.reserve(ta.size() + tb.size());
            std::set_union(ta.begin(), ta.end(), tb.begin(), tb.end(), std::back_inserter(merged));
            r.add_term(std::move(merged), ca * cb);
            if (r.terms_.size() > kTermCap)
                throw std::runtime_error("AndPolynomial: term explosion beyond guard");
        }
    }
    return r;
}

AndPolynomial AndPolynomial::apply_gate(GateOp op, const AndPolynomial& a, const AndPolynomial& b) {
    switch (op) {
        case GateOp::And: return a * b;
        case GateOp::Or: return a + b - a * b; // inclusion-exclusion
        case GateOp::Xor: {
            AndPolynomial ab = a * b; // x + y - 2(x AND y)
            return a + b - ab - ab;
        }
        case GateOp::Not: return constant(1) - a;
        case GateOp::Copy: return a;
        case GateOp::Const0: return constant(0);
        case GateOp::Const1: return constant(1);
    }
    return constant(0);
}

std::vector<AndPolynomial> and_decomposition(const BooleanCircuit& c) {
    if ((1ull << c.depth()) > 24)
        throw std::invalid_argument("and_decomposition: 2^depth exceeds the fan-in guard (24)");
    std::vector<AndPolynomial> cur(c.width());
    for (std::size_t k = 0; k < c.width(); ++k)
        cur[k] = AndPolynomial::variable(static_cast<std::uint32_t>(k));
    for (const auto& layer : c.layers()) {
        std::vector<AndPolynomial> next(c.width());
        for (std::size_t j = 0; j < c.width(); ++j) {
            const Gate& g = layer[j];
            next[j] = AndPolynomial::apply_gate(g.op, cur[g.in0], cur[g.in1]);
        }
        cur = std::move(next);
    }
    return cur;
}

} // namespace sbmlp::circuits
