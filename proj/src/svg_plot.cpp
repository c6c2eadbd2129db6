#include "qevo/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "qevo/csv.hpp"

namespace qevo {

namespace {

constexpr double kWidth = 680.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 64.0, kRight = 16.0, kTop = 36.0, kBottom = 48.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
    double lo = 0.0, hi = 1.0;
    double scale(double v, double out_lo, double out_hi) const {
        return out_lo + (v - lo) / (hi - lo) * (out_hi - out_lo);
    }
};

Range fit_range(const std::vector<PlotSeries>& series, bool use_x) {
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const PlotSeries& s : series) {
        const auto& vs = use_x ? s.xs : s.ys;
        for (double v : vs) {
            if (first) {
                lo = hi = v;
                first = false;
            } else {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (first) return {0.0, 1.0};
    if (lo == hi) {
        lo -= 1.0;
        hi += 1.0;
    } else {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi};
}

std::string tick_text(double v) {
    const double rounded = std::round(v * 1000.0) / 1000.0;
    return format_double(rounded == 0.0 ? 0.0 : rounded);
}

std::string escape_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<PlotSeries>& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);

    const Range xr = fit_range(series, true);
    const Range yr = fit_range(series, false);
    const double x0 = kLeft, x1 = kWidth - kRight;
    const double y0 = kHeight - kBottom, y1 = kTop;  // SVG y grows downward

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"14\">" << escape_xml(title) << "</text>\n";

    // axes
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
        << "\" stroke=\"black\"/>\n";

    constexpr int kTicks = 5;
    for (int i = 0; i < kTicks; ++i) {
        const double f = static_cast<double>(i) / (kTicks - 1);
        const double xv = xr.lo + f * (xr.hi - xr.lo);
        const double xpix = xr.scale(xv, x0, x1);
        out << "<line x1=\"" << xpix << "\" y1=\"" << y0 << "\" x2=\"" << xpix << "\" y2=\""
            << y0 + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << xpix << "\" y=\"" << y0 + 18
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_text(xv) << "</text>\n";
        const double yv = yr.lo + f * (yr.hi - yr.lo);
        const double ypix = yr.scale(yv, y0, y1);
        out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << ypix << "\" x2=\"" << x0 << "\" y2=\""
            << ypix << "\" stroke=\"black\"/>\n";
        out << "<line x1=\"" << x0 << "\" y1=\"" << ypix << "\" x2=\"" << x1 << "\" y2=\"" << ypix
            << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << x0 - 8 << "\" y=\"" << ypix + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
            << tick_text(yv) << "</text>\n";
    }
    out << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << escape_xml(x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
        << (y0 + y1) / 2 << ")\">" << escape_xml(y_label) << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < series[s].xs.size(); ++i) {
            out << xr.scale(series[s].xs[i], x0, x1) << ',' << yr.scale(series[s].ys[i], y0, y1)
                << ' ';
        }
        out << "\"/>\n";
        const double ly = kTop + 16.0 * static_cast<double>(s) + 8.0;
        out << "<line x1=\"" << x1 - 150 << "\" y1=\"" << ly << "\" x2=\"" << x1 - 130
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << x1 - 126 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape_xml(series[s].label)
            << "</text>\n";
    }
    out << "</svg>\n";
}

std::vector<std::string> render_plots(const std::vector<AggregateInput>& inputs,
                                      const std::string& out_dir) {
    struct ChartDef {
        const char* file;
        const char* title;
        const char* y_label;
        std::vector<std::pair<const char*, const char*>> columns;  // column, legend suffix
    };
    static const std::vector<ChartDef> kCharts{
        {"score", "Score per generation", "score",
         {{"best_score_mean", "best"}, {"avg_score_mean", "avg"}}},
        {"total_coins", "Total coins collected", "coins",
         {{"best_total_coins_mean", "best"}, {"avg_total_coins_mean", "avg"}}},
        {"own_coins", "Own coins collected", "coins",
         {{"best_own_coins_mean", "best"}, {"avg_own_coins_mean", "avg"}}},
        {"own_coin_rate", "Own coin rate", "rate",
         {{"best_own_coin_rate_mean", "best"}, {"avg_own_coin_rate_mean", "avg"}}},
        {"gate_counts", "Gate count of the best circuit", "gates",
         {{"best_gates_total_mean", "total"}, {"best_gates_param_mean", "parameterized"}}},
    };

    struct Loaded {
        std::string label;
        CsvTable table;
    };
    std::vector<Loaded> loaded;
    for (const AggregateInput& input : inputs) {
        CsvTable table = read_csv(input.path);
        if (table.rows.empty()) {
            std::cerr << "warning: " << input.path << " has no data rows, skipping\n";
            continue;
        }
        loaded.push_back({input.label, std::move(table)});
    }

    std::vector<std::string> written;
    if (loaded.empty()) {
        std::cerr << "warning: no plot data, nothing rendered\n";
        return written;
    }
    std::filesystem::create_directories(out_dir);

    for (const ChartDef& chart : kCharts) {
        std::vector<PlotSeries> series;
        for (const Loaded& in : loaded) {
            const std::size_t gen_col = in.table.column("generation");
            for (const auto& [column, suffix] : chart.columns) {
                PlotSeries s;
                s.label = in.label.empty() ? std::string(suffix) : in.label + " " + suffix;
                const std::size_t col = in.table.column(column);
                for (const auto& row : in.table.rows) {
                    s.xs.push_back(parse_double(row[gen_col]));
                    s.ys.push_back(parse_double(row[col]));
                }
                series.push_back(std::move(s));
            }
        }
        const std::string path =
            (std::filesystem::path(out_dir) / (std::string(chart.file) + ".svg")).string();
        write_line_chart(path, chart.title, "generation", chart.y_label, series);
        written.push_back(path);
    }
    return written;
}

}  // namespace qevo
