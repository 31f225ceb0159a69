#include "sbmlp/scaling_fit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sbmlp::harness {

ScalingFit fit_scaling(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_scaling: length mismatch");
    if (x.size() < 3) throw std::invalid_argument("fit_scaling: need at least 3 points");
    std::vector<double> lx(x.size()), ly(y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw std::invalid_argument("fit_scaling: nonpositive values");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= static_cast<double>(lx.size());
    my /= static_cast<double>(ly.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_scaling: degenerate x values");
    ScalingFit fit;
    fit.exponent = sxy / sxx;
    fit.intercept = my - fit.exponent * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        double r = ly[i] - (fit.intercept + fit.exponent * lx[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / static_cast<double>(lx.size()));
    fit.points = lx.size();
    return fit;
}

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::invalid_argument("csv: missing column '" + name + "'");
}

CsvTable CsvTable::read(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open csv: " + path);
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cur;
        for (char ch : s) {
            if (ch == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(ch);
            }
        }
        cells.push_back(cur);
        return cells;
    };
    if (!std::getline(f, line)) throw std::runtime_error("csv is empty: " + path);
    t.header = split(line);
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        t.rows.push_back(split(line));
    }
    return t;
}

ScalingFit fit_scaling_csv(const CsvTable& table, const std::string& x_column,
                           const std::string& y_column) {
    std::size_t xi = table.column(x_column);
    std::size_t yi = table.column(y_column);
    std::vector<double> x, y;
    for (const auto& row : table.rows) {
        if (xi >= row.size() || yi >= row.size()) continue;
        if (row[xi].empty() || row[yi].empty()) continue;
        double xv = 0.0, yv = 0.0;
        auto rx = std::from_chars(row[xi].data(), row[xi].data() + row[xi].size(), xv);
        auto ry = std::from_chars(row[yi].data(), row[yi].data() + row[yi].size(), yv);
        if (rx.ec != std::errc() || ry.ec != std::errc()) continue;
        x.push_back(xv);
        y.push_back(yv);
    }
    ScalingFit fit = fit_scaling(x, y);
    fit.x_column = x_column;
    fit.y_column = y_column;
    return fit;
}

} // namespace sbmlp::harness
