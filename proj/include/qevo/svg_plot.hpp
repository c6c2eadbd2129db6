#pragma once

#include <string>
#include <vector>

namespace qevo {

struct PlotSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};

// Writes one SVG line chart (static vector image, no external tooling).
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series);

struct AggregateInput {
    std::string label;  // legend prefix, e.g. "gate"
    std::string path;   // aggregate CSV produced by aggregate_csv
};

// Renders the standard chart set (score, total coins, own coins, own coin
// rate, gate counts) with best and average series per input. Returns the
// written file paths; empty inputs are skipped with a warning on stderr.
std::vector<std::string> render_plots(const std::vector<AggregateInput>& inputs,
                                      const std::string& out_dir);

}  // namespace qevo
