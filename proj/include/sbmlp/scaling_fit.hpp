#pragma once
#include <string>
#include <vector>

namespace sbmlp::harness {

struct ScalingFit {
    double exponent = 0.0;
    double intercept = 0.0; // in log space
    double residual = 0.0;  // rms of log residuals
    std::size_t points = 0;
    std::string x_column;
    std::string y_column;
};

// Least squares on (log x, log y); requires >= 3 points and positive values.
ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y);

// Column-based variant over a parsed CSV (header + rows of strings).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const; // throws if missing
    static CsvTable read(const std::string& path);
};

ScalingFit fit_scaling_csv(const CsvTable& table, const std::string& x_column,
                           const std::string& y_column);

} // namespace sbmlp::harness
