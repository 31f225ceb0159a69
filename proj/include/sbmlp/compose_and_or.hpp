#pragma once
#include <vector>

#include "sbmlp/mlp_network.hpp"

namespace sbmlp::circuits {

// Two read-off neurons n1 = ReLU(r1.a), n2 = ReLU(r2.a) plus one extra unit
// u = ReLU(n1 + n2 - 1). AND reads u; OR reads n1 + n2 - u. Both are exact on
// boolean read-offs and move by at most 2*eps under eps-bounded input error.
struct AndOrComposition {
    core::MlpNetwork net; // 2 layers: [n1, n2] then [u, n1', n2'] (pass-through)
    std::vector<double> and_readoff; // over the final layer
    std::vector<double> or_readoff;

    double read_and(const std::vector<double>& activation) const;
    double read_or(const std::vector<double>& activation) const;
};

// eps is the certified input read-off error; must be < 1/4.
AndOrComposition compose_and_or(const std::vector<double>& r1, const std::vector<double>& r2,
                                double eps);

} // namespace sbmlp::circuits
