#include "sbmlp/svg_plot.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sbmlp::harness {

namespace {

std::string fixed(double v, int digits = 2) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

} // namespace

void emit_plot(const CsvTable& table, const PlotSpec& spec, const std::string& out_path) {
    std::size_t xi = table.column(spec.x_column);
    std::size_t yi = table.column(spec.y_column);
    std::vector<double> x, y;
    for (const auto& row : table.rows) {
        if (xi >= row.size() || yi >= row.size() || row[xi].empty() || row[yi].empty()) continue;
        double xv = 0.0, yv = 0.0;
        auto rx = std::from_chars(row[xi].data(), row[xi].data() + row[xi].size(), xv);
        auto ry = std::from_chars(row[yi].data(), row[yi].data() + row[yi].size(), yv);
        if (rx.ec != std::errc() || ry.ec != std::errc()) continue;
        if (!(xv > 0.0) || !(yv > 0.0)) continue;
        x.push_back(xv);
        y.push_back(yv);
    }
    if (x.empty()) throw std::invalid_argument("emit_plot: no plottable rows");

    double lx_min = std::log10(x[0]), lx_max = lx_min;
    double ly_min = std::log10(y[0]), ly_max = ly_min;
    for (std::size_t i = 0; i < x.size(); ++i) {
        lx_min = std::min(lx_min, std::log10(x[i]));
        lx_max = std::max(lx_max, std::log10(x[i]));
        ly_min = std::min(ly_min, std::log10(y[i]));
        ly_max = std::max(ly_max, std::log10(y[i]));
    }
    if (lx_max == lx_min) { lx_min -= 0.5; lx_max += 0.5; }
    if (ly_max == ly_min) { ly_min -= 0.5; ly_max += 0.5; }
    const double margin = 48.0;
    const double w = spec.width - 2 * margin;
    const double h = spec.height - 2 * margin;
    auto px = [&](double lx) { return margin + (lx - lx_min) / (lx_max - lx_min) * w; };
    auto py = [&](double ly) { return spec.height - margin - (ly - ly_min) / (ly_max - ly_min) * h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\""
        << spec.height << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << spec.width << "\" height=\"" << spec.height
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << spec.width / 2 << "\" y=\"20\" text-anchor=\"middle\">"
        << (spec.title.empty() ? spec.y_column + " vs " + spec.x_column : spec.title)
        << "</text>\n";
    // axes
    svg << "<line x1=\"" << fixed(margin) << "\" y1=\"" << fixed(spec.height - margin)
        << "\" x2=\"" << fixed(spec.width - margin) << "\" y2=\"" << fixed(spec.height - margin)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << fixed(margin) << "\" y1=\"" << fixed(margin) << "\" x2=\""
        << fixed(margin) << "\" y2=\"" << fixed(spec.height - margin)
        << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << spec.width / 2 << "\" y=\"" << spec.height - 12
        << "\" text-anchor=\"middle\">log10 " << spec.x_column << "</text>\n";
    svg << "<text x=\"16\" y=\"" << spec.height / 2 << "\" transform=\"rotate(-90 16 "
        << spec.height / 2 << ")\" text-anchor=\"middle\">log10 " << spec.y_column
        << "</text>\n";

    if (spec.with_fit && x.size() >= 3) {
        ScalingFit fit = fit_scaling(x, y);
        // natural-log fit; convert to the log10 frame for drawing
        double ly0 = (fit.intercept + fit.exponent * (lx_min * std::log(10.0))) / std::log(10.0);
        double ly1 = (fit.intercept + fit.exponent * (lx_max * std::log(10.0))) / std::log(10.0);
        svg << "<line x1=\"" << fixed(px(lx_min)) << "\" y1=\"" << fixed(py(ly0)) << "\" x2=\""
            << fixed(px(lx_max)) << "\" y2=\"" << fixed(py(ly1))
            << "\" stroke=\"steelblue\" stroke-width=\"1.5\"/>\n";
        svg << "<text x=\"" << fixed(margin + 6) << "\" y=\"" << fixed(margin + 14)
            << "\">slope " << fixed(fit.exponent, 4) << "</text>\n";
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
        svg << "<circle cx=\"" << fixed(px(std::log10(x[i]))) << "\" cy=\""
            << fixed(py(std::log10(y[i]))) << "\" r=\"3\" fill=\"crimson\"/>\n";
    }
    svg << "</svg>\n";

    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_plot: cannot open " + out_path);
    f << svg.str();
}

} // namespace sbmlp::harness
