#include "krdoa/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "krdoa/io.hpp"

namespace krdoa {

namespace {

constexpr double kWidth = 860.0;
constexpr double kHeight = 560.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 30.0;
constexpr double kTop = 50.0;
constexpr double kBottom = 70.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string esc(const std::string& s) {
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

// Round tick spacing to 1/2/5 times a power of ten.
double nice_step(double span, int target_ticks) {
    const double raw = span / std::max(target_ticks, 2);
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step = 10.0;
    if (norm <= 1.0) step = 1.0;
    else if (norm <= 2.0) step = 2.0;
    else if (norm <= 5.0) step = 5.0;
    return step * mag;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const PlotSpec& spec,
                    const std::vector<PlotSeries>& series) {
    if (series.empty()) throw std::runtime_error("svg plot: no series to draw");

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    size_t points = 0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size()) throw std::runtime_error("svg plot: x/y size mismatch");
        for (size_t i = 0; i < s.x.size(); ++i) {
            double y = s.y[i];
            if (spec.log_y && !(y > 0.0)) continue;  // log axis skips nonpositive values
            if (spec.log_y) y = std::log10(y);
            if (!std::isfinite(s.x[i]) || !std::isfinite(y)) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
            ++points;
        }
    }
    if (points == 0) throw std::runtime_error("svg plot: no finite data points");
    if (xmax == xmin) { xmin -= 1.0; xmax += 1.0; }
    if (ymax == ymin) { ymin -= 1.0; ymax += 1.0; }

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    const auto map_x = [&](double v) { return kLeft + (v - xmin) / (xmax - xmin) * plot_w; };
    const auto map_y = [&](double v) {
        const double t = spec.log_y ? std::log10(v) : v;
        return kTop + (ymax - t) / (ymax - ymin) * plot_h;
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" font-size=\"18\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\">" << esc(spec.title) << "</text>\n";

    // frame
    svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
        << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";

    // x ticks
    const double xstep = nice_step(xmax - xmin, 8);
    for (double v = std::ceil(xmin / xstep) * xstep; v <= xmax + 1e-9 * xstep; v += xstep) {
        const double px = map_x(v);
        svg << "<line x1=\"" << px << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << px << "\" y2=\""
            << kTop + plot_h + 6 << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << px << "\" y1=\"" << kTop << "\" x2=\"" << px << "\" y2=\""
            << kTop + plot_h << "\" stroke=\"#dddddd\"/>\n";
        svg << "<text x=\"" << px << "\" y=\"" << kTop + plot_h + 22
            << "\" font-size=\"12\" text-anchor=\"middle\" font-family=\"sans-serif\">"
            << tick_label(v) << "</text>\n";
    }

    // y ticks
    if (spec.log_y) {
        for (int d = static_cast<int>(std::floor(ymin)); d <= static_cast<int>(std::ceil(ymax)); ++d) {
            if (d < ymin - 1e-9 || d > ymax + 1e-9) continue;
            const double py = kTop + (ymax - d) / (ymax - ymin) * plot_h;
            svg << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << py << "\" x2=\"" << kLeft
                << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
            svg << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\"" << kLeft + plot_w
                << "\" y2=\"" << py << "\" stroke=\"#dddddd\"/>\n";
            svg << "<text x=\"" << kLeft - 10 << "\" y=\"" << py + 4
                << "\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\">1e" << d
                << "</text>\n";
        }
    } else {
        const double ystep = nice_step(ymax - ymin, 6);
        for (double v = std::ceil(ymin / ystep) * ystep; v <= ymax + 1e-9 * ystep; v += ystep) {
            const double py = kTop + (ymax - v) / (ymax - ymin) * plot_h;
            svg << "<line x1=\"" << kLeft - 6 << "\" y1=\"" << py << "\" x2=\"" << kLeft
                << "\" y2=\"" << py << "\" stroke=\"black\"/>\n";
            svg << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\"" << kLeft + plot_w
                << "\" y2=\"" << py << "\" stroke=\"#dddddd\"/>\n";
            svg << "<text x=\"" << kLeft - 10 << "\" y=\"" << py + 4
                << "\" font-size=\"12\" text-anchor=\"end\" font-family=\"sans-serif\">"
                << tick_label(v) << "</text>\n";
        }
    }

    // axis labels
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 18
        << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\">"
        << esc(spec.x_label) << "</text>\n";
    svg << "<text x=\"22\" y=\"" << kTop + plot_h / 2
        << "\" font-size=\"14\" text-anchor=\"middle\" font-family=\"sans-serif\" transform=\"rotate(-90 22 "
        << kTop + plot_h / 2 << ")\">" << esc(spec.y_label) << "</text>\n";

    // series
    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
        std::ostringstream pts;
        bool open = false;
        std::string polylines;
        for (size_t i = 0; i < series[s].x.size(); ++i) {
            const double y = series[s].y[i];
            const bool drawable = std::isfinite(series[s].x[i]) && std::isfinite(y) &&
                                  (!spec.log_y || y > 0.0);
            if (!drawable) {
                if (open) {
                    polylines += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                                 "\" stroke-width=\"1.5\" points=\"" + pts.str() + "\"/>\n";
                    pts.str("");
                    open = false;
                }
                continue;
            }
            pts << map_x(series[s].x[i]) << ',' << map_y(y) << ' ';
            open = true;
        }
        if (open)
            polylines += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                         "\" stroke-width=\"1.5\" points=\"" + pts.str() + "\"/>\n";
        svg << polylines;
    }

    // legend
    const double lx = kLeft + plot_w - 200.0;
    double ly = kTop + 14.0;
    svg << "<rect x=\"" << lx - 10 << "\" y=\"" << ly - 12 << "\" width=\"205\" height=\""
        << 20.0 * static_cast<double>(series.size()) + 8 << "\" fill=\"white\" stroke=\"#888888\"/>\n";
    for (size_t s = 0; s < series.size(); ++s) {
        const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
        svg << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 26 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << lx + 32 << "\" y=\"" << ly + 4
            << "\" font-size=\"12\" font-family=\"sans-serif\">" << esc(series[s].name)
            << "</text>\n";
        ly += 20.0;
    }

    svg << "</svg>\n";
    write_text_file(path, svg.str());
}

}  // namespace krdoa
