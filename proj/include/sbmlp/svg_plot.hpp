#pragma once
#include <optional>
#include <string>

#include "sbmlp/scaling_fit.hpp"

namespace sbmlp::harness {

struct PlotSpec {
    std::string x_column;
    std::string y_column;
    std::string title = "";
    bool with_fit = true;
    int width = 640;
    int height = 480;
};

// Self-contained log-log scatter SVG (plus the fitted line when requested).
// Deterministic bytes for fixed input. Throws on empty data or a missing
// column; no file is written in that case.
void emit_plot(const CsvTable& table, const PlotSpec& spec, const std::string& out_path);

} // namespace sbmlp::harness
