#pragma once
#include <cstddef>
#include <vector>

namespace sbmlp::core {

// Nonlinearity attached to an MLP layer: plain ReLU or the piecewise-linear
// staircase round_{[-a,a]} (a >= 1) built from 4a ReLUs.
struct ActivationKind {
    enum Kind { Relu, StaircaseRound } kind = Relu;
    int a = 0; // staircase half-range; >= 1 when kind == StaircaseRound

    static ActivationKind relu() { return {Relu, 0}; }
    static ActivationKind staircase(int a);

    bool operator==(const ActivationKind&) const = default;
};

std::vector<double> relu(const std::vector<double>& x);

// round_{[0,1]}(x) = 3(ReLU(x - 1/3) - ReLU(x - 2/3))
double round01(double x);
// Nearest-integer staircase on [-a, a]: round_{[0,a]}(x) - round_{[0,a]}(-x).
double staircase_round(double x, int a);

void apply_activation(const ActivationKind& act, double* x, std::size_t n);

// Explicit 4a-ReLU realization of staircase_round: sum_j c_j * ReLU(x - t_j).
// Compiled networks stay pure-ReLU by substituting this expansion.
struct StaircaseRelus {
    std::vector<double> coeff;
    std::vector<double> threshold;
    double eval(double x) const;
};
StaircaseRelus staircase_as_relus(int a);

} // namespace sbmlp::core
