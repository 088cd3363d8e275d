#include "vshift/svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vshift/errors.hpp"
#include "vshift/textio.hpp"

namespace vshift {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 160;  // legend column
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 48;

constexpr const char* kPalette[] = {"#1f77b4", "#2ca02c", "#ff7f0e", "#d62728",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& text) {
    std::string out;
    for (char c : text) {
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

std::string render_line_chart(const std::string& title, const std::string& x_label,
                              const std::string& y_label,
                              const std::vector<SvgSeries>& series) {
    if (series.empty()) {
        throw DomainError("a chart needs at least one series");
    }
    double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
    bool first = true;
    for (const SvgSeries& s : series) {
        if (s.points.empty()) {
            throw DomainError("series '" + s.label + "' has no points");
        }
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) {
                throw DomainError("series '" + s.label + "' has a non-finite point");
            }
            if (first) {
                x_min = x_max = x;
                y_min = y_max = y;
                first = false;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
        }
    }
    if (x_max == x_min) x_max = x_min + 1.0;
    if (y_max == y_min) y_max = y_min + 1.0;
    const double y_pad = (y_max - y_min) * 0.05;
    y_min -= y_pad;
    y_max += y_pad;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) {
        return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w;
    };
    auto py = [&](double y) {
        return kMarginTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
       << "\">\n";
    os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"16\">"
       << esc(title) << "</text>\n";

    // Axes.
    os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\""
       << kMarginLeft << "\" y2=\"" << kMarginTop + plot_h
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop + plot_h
       << "\" x2=\"" << kMarginLeft + plot_w << "\" y2=\"" << kMarginTop + plot_h
       << "\" stroke=\"black\"/>\n";

    const int ticks = 5;
    for (int t = 0; t <= ticks; ++t) {
        const double fx = x_min + (x_max - x_min) * t / ticks;
        const double fy = y_min + (y_max - y_min) * t / ticks;
        const double tx = px(fx);
        const double ty = py(fy);
        os << "<line x1=\"" << format_fixed(tx, 2) << "\" y1=\"" << kMarginTop + plot_h
           << "\" x2=\"" << format_fixed(tx, 2) << "\" y2=\""
           << kMarginTop + plot_h + 5 << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << format_fixed(tx, 2) << "\" y=\""
           << kMarginTop + plot_h + 20
           << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_fixed(fx, 2) << "</text>\n";
        os << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << format_fixed(ty, 2)
           << "\" x2=\"" << kMarginLeft << "\" y2=\"" << format_fixed(ty, 2)
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << format_fixed(ty + 4, 2)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
           << format_fixed(fy, 2) << "</text>\n";
    }
    os << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 10
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       << esc(x_label) << "</text>\n";
    os << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
          "transform=\"rotate(-90 16 "
       << kMarginTop + plot_h / 2 << ")\">" << esc(y_label) << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t j = 0; j < series[i].points.size(); ++j) {
            if (j) os << ' ';
            os << format_fixed(px(series[i].points[j].first), 2) << ','
               << format_fixed(py(series[i].points[j].second), 2);
        }
        os << "\"/>\n";
        const double ly = kMarginTop + 14.0 + 18.0 * static_cast<double>(i);
        os << "<line x1=\"" << kWidth - kMarginRight + 12 << "\" y1=\""
           << format_fixed(ly - 4, 2) << "\" x2=\"" << kWidth - kMarginRight + 36
           << "\" y2=\"" << format_fixed(ly - 4, 2) << "\" stroke=\"" << color
           << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << kWidth - kMarginRight + 42 << "\" y=\""
           << format_fixed(ly, 2)
           << "\" font-family=\"sans-serif\" font-size=\"12\">" << esc(series[i].label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace vshift
