#include "sbmlp/compose_and_or.hpp"

#include <stdexcept>

#include "sbmlp/kernels.hpp"

namespace sbmlp::circuits {

AndOrComposition compose_and_or(const std::vector<double>& r1, const std::vector<double>& r2,
                                double eps) {
    if (r1.size() != r2.size()) throw std::invalid_argument("compose_and_or: dim mismatch");
    if (!(eps < 0.25)) throw std::invalid_argument("compose_and_or: requires eps < 1/4");
    const std::size_t d = r1.size();

    AndOrComposition comp;
    core::DenseMatrix w1(2, d);
    for (std::size_t i = 0; i < d; ++i) {
        w1.at(0, i) = r1[i];
        w1.at(1, i) = r2[i];
    }
    comp.net.add_layer({std::move(w1), {0.0, 0.0}, core::ActivationKind::relu()});

    // Second layer: u = ReLU(n1 + n2 - 1), and pass-throughs ReLU(n1), ReLU(n2)
    // (exact since n1, n2 >= 0).
    core::DenseMatrix w2(3, 2);
    w2.at(0, 0) = 1.0;
    w2.at(0, 1) = 1.0;
    w2.at(1, 0) = 1.0;
    w2.at(2, 1) = 1.0;
    comp.net.add_layer({std::move(w2), {-1.0, 0.0, 0.0}, core::ActivationKind::relu()});

    comp.and_readoff = {1.0, 0.0, 0.0};
    comp.or_readoff = {-1.0, 1.0, 1.0};
    return comp;
}

double AndOrComposition::read_and(const std::vector<double>& activation) const {
    return kernels::dot(and_readoff.data(), activation.data(), activation.size());
}

double AndOrComposition::read_or(const std::vector<double>& activation) const {
    return kernels::dot(or_readoff.data(), activation.data(), activation.size());
}

} // namespace sbmlp::circuits
