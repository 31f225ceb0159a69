#include "sbmlp/activations.hpp"

#include <stdexcept>

#include "sbmlp/kernels.hpp"

namespace sbmlp::core {

ActivationKind ActivationKind::staircase(int a) {
    if (a < 1) throw std::invalid_argument("staircase: a must be >= 1");
    return {StaircaseRound, a};
}

std::vector<double> relu(const std::vector<double>& x) {
    std::vector<double> y(x.size());
    kernels::relu(x.data(), y.data(), x.size());
    return y;
}

static inline double relu1(double v) { return v > 0.0 ? v : 0.0; }

double round01(double x) { return 3.0 * (relu1(x - 1.0 / 3.0) - relu1(x - 2.0 / 3.0)); }

static double round_0a(double x, int a) {
    double s = 0.0;
    for (int t = 0; t < a; ++t) s += round01(x - t);
    return s;
}

double staircase_round(double x, int a) {
    if (a < 1) throw std::invalid_argument("staircase_round: a must be >= 1");
    return round_0a(x, a) - round_0a(-x, a);
}

void apply_activation(const ActivationKind& act, double* x, std::size_t n) {
    if (act.kind == ActivationKind::Relu) {
        kernels::relu(x, x, n);
    } else {
        for (std::size_t i = 0; i < n; ++i) x[i] = staircase_round(x[i], act.a);
    }
}

StaircaseRelus staircase_as_relus(int a) {
    if (a < 1) throw std::invalid_argument("staircase_as_relus: a must be >= 1");
    StaircaseRelus s;
    // round_{[0,a]}(x): per shift t, +3 ReLU(x - t - 1/3) and -3 ReLU(x - t - 2/3).
    for (int t = 0; t < a; ++t) {
        s.coeff.push_back(3.0);
        s.threshold.push_back(t + 1.0 / 3.0);
        s.coeff.push_back(-3.0);
        s.threshold.push_back(t + 2.0 / 3.0);
    }
    // -round_{[0,a]}(-x): ReLU(-x - t - 1/3) = ReLU(-(x + t + 1/3)); fold sign
    // into the coefficient with mirrored thresholds.
    for (int t = 0; t < a; ++t) {
        s.coeff.push_back(-3.0);
        s.threshold.push_back(-(t + 1.0 / 3.0));
        s.coeff.push_back(3.0);
        s.threshold.push_back(-(t + 2.0 / 3.0));
    }
    return s;
}

double StaircaseRelus::eval(double x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < coeff.size(); ++j) {
        // Mirrored units act on -x; encode by threshold sign bookkeeping:
        // first half are ReLU(x - t), second half ReLU(-x + t) with t stored negated.
        if (j < coeff.size() / 2)
            v += coeff[j] * relu1(x - threshold[j]);
        else
            v += coeff[j] * relu1(-x + threshold[j]);
    }
    return v;
}

} // namespace sbmlp::core
