#include "lrm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <limits>
#include <sstream>

#include "lrm/csv.hpp"

namespace lrm {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kMarginL = 64.0;
constexpr double kMarginR = 20.0;
constexpr double kMarginT = 40.0;
constexpr double kMarginB = 48.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

void header(std::ostringstream& out, bool deterministic) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    if (!deterministic) {
        std::time_t now = std::time(nullptr);
        char stamp[64];
        std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out << "<!-- generated " << stamp << " -->\n";
    }
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

// "nice" tick spacing covering [lo, hi] with about n intervals
std::vector<double> ticks(double lo, double hi, int n) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / n;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * f >= raw) {
            step = mag * f;
            break;
        }
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) out.push_back(t);
    return out;
}

}  // namespace

void write_line_plot(const std::string& path, const LinePlot& plot) {
    double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
    double ylo = xlo, yhi = -xlo;
    auto scan = [&](const std::vector<double>& xs, const std::vector<double>& ys) {
        for (size_t i = 0; i < xs.size(); ++i) {
            const double x = plot.log2_x ? std::log2(xs[i]) : xs[i];
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
            ylo = std::min(ylo, ys[i]);
            yhi = std::max(yhi, ys[i]);
        }
    };
    for (const auto& s : plot.series) scan(s.x, s.y);
    for (const auto& m : plot.markers) scan(m.x, m.y);
    if (!std::isfinite(xlo)) {
        xlo = 0.0;
        xhi = 1.0;
    }
    if (!std::isfinite(ylo)) {
        ylo = 0.0;
        yhi = 1.0;
    }
    if (xhi == xlo) xhi = xlo + 1.0;
    if (yhi == ylo) {
        yhi = ylo + 0.5;
        ylo -= 0.5;
    }
    const double ypad = 0.05 * (yhi - ylo);
    ylo -= ypad;
    yhi += ypad;

    const double plot_w = kWidth - kMarginL - kMarginR;
    const double plot_h = kHeight - kMarginT - kMarginB;
    auto px = [&](double x) {
        const double v = plot.log2_x ? std::log2(x) : x;
        return kMarginL + (v - xlo) / (xhi - xlo) * plot_w;
    };
    auto py = [&](double y) { return kMarginT + (yhi - y) / (yhi - ylo) * plot_h; };

    std::ostringstream out;
    header(out, plot.deterministic);

    // embedded data
    for (const auto& s : plot.series) {
        out << "<!-- data " << s.label << ":";
        for (size_t i = 0; i < s.x.size(); ++i)
            out << " " << fmt_double(s.x[i]) << "," << fmt_double(s.y[i]);
        out << " -->\n";
    }
    for (const auto& m : plot.markers) {
        out << "<!-- markers " << m.label << ":";
        for (size_t i = 0; i < m.x.size(); ++i)
            out << " " << fmt_double(m.x[i]) << "," << fmt_double(m.y[i]);
        out << " -->\n";
    }

    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
        << "font-family=\"sans-serif\">" << plot.title << "</text>\n";

    // axes
    out << "<rect x=\"" << kMarginL << "\" y=\"" << kMarginT << "\" width=\"" << plot_w
        << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";
    for (double t : ticks(xlo, xhi, 6)) {
        const double x = kMarginL + (t - xlo) / (xhi - xlo) * plot_w;
        out << "<line x1=\"" << num(x) << "\" y1=\"" << num(kMarginT + plot_h) << "\" x2=\""
            << num(x) << "\" y2=\"" << num(kMarginT + plot_h + 5) << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << num(x) << "\" y=\"" << num(kMarginT + plot_h + 18)
            << "\" text-anchor=\"middle\" font-size=\"11\" font-family=\"sans-serif\">"
            << (plot.log2_x ? "2^" + fmt_double(t) : fmt_double(t)) << "</text>\n";
    }
    for (double t : ticks(ylo, yhi, 6)) {
        const double y = kMarginT + (yhi - t) / (yhi - ylo) * plot_h;
        out << "<line x1=\"" << num(kMarginL - 5) << "\" y1=\"" << num(y) << "\" x2=\""
            << num(kMarginL) << "\" y2=\"" << num(y) << "\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << num(kMarginL - 8) << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\" font-size=\"11\" font-family=\"sans-serif\">" << fmt_double(t)
            << "</text>\n";
    }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" << plot.x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << kHeight / 2
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\" "
        << "transform=\"rotate(-90 16 " << kHeight / 2 << ")\">" << plot.y_label << "</text>\n";

    double legend_y = kMarginT + 14;
    for (const auto& s : plot.series) {
        if (!s.points_only) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < s.x.size(); ++i)
                out << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
            out << "\"/>\n";
        } else {
            for (size_t i = 0; i < s.x.size(); ++i)
                out << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
                    << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
        }
        if (!s.label.empty()) {
            out << "<rect x=\"" << num(kMarginL + 8) << "\" y=\"" << num(legend_y - 8)
                << "\" width=\"14\" height=\"3\" fill=\"" << s.color << "\"/>\n";
            out << "<text x=\"" << num(kMarginL + 26) << "\" y=\"" << num(legend_y)
                << "\" font-size=\"11\" font-family=\"sans-serif\">" << s.label << "</text>\n";
            legend_y += 16;
        }
    }
    for (const auto& m : plot.markers) {
        for (size_t i = 0; i < m.x.size(); ++i) {
            const double cx = px(m.x[i]);
            const double cy = py(m.y[i]);
            if (m.shape == "triangle")
                out << "<path d=\"M " << num(cx) << " " << num(cy - 5) << " L " << num(cx - 4.3)
                    << " " << num(cy + 2.5) << " L " << num(cx + 4.3) << " " << num(cy + 2.5)
                    << " Z\" fill=\"" << m.color << "\"/>\n";
            else
                out << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"4\" fill=\""
                    << m.color << "\"/>\n";
        }
        if (!m.label.empty()) {
            out << "<circle cx=\"" << num(kMarginL + 15) << "\" cy=\"" << num(legend_y - 4)
                << "\" r=\"4\" fill=\"" << m.color << "\"/>\n";
            out << "<text x=\"" << num(kMarginL + 26) << "\" y=\"" << num(legend_y)
                << "\" font-size=\"11\" font-family=\"sans-serif\">" << m.label << "</text>\n";
            legend_y += 16;
        }
    }
    out << "</svg>\n";
    write_text_file(path, out.str());
}

void write_heatmap(const std::string& path, const Matrix& values, const std::string& title,
                   bool deterministic) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : values.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(hi > lo)) hi = lo + 1.0;

    const double plot_w = kWidth - kMarginL - kMarginR;
    const double plot_h = kHeight - kMarginT - kMarginB;
    const double cw = plot_w / static_cast<double>(values.cols);
    const double ch = plot_h / static_cast<double>(values.rows);

    std::ostringstream out;
    header(out, deterministic);
    out << "<!-- data " << values.rows << "x" << values.cols << ":";
    for (double v : values.data) out << " " << fmt_double(v);
    out << " -->\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\" "
        << "font-family=\"sans-serif\">" << title << "</text>\n";
    for (size_t i = 0; i < values.rows; ++i)
        for (size_t j = 0; j < values.cols; ++j) {
            const double u = (values.at(i, j) - lo) / (hi - lo);
            // blue(low) -> white -> red(high)
            const int r = static_cast<int>(255 * std::min(1.0, 2.0 * u));
            const int b = static_cast<int>(255 * std::min(1.0, 2.0 * (1.0 - u)));
            const int g = static_cast<int>(255 * (1.0 - std::abs(2.0 * u - 1.0)));
            out << "<rect x=\"" << num(kMarginL + static_cast<double>(j) * cw) << "\" y=\""
                << num(kMarginT + static_cast<double>(i) * ch) << "\" width=\"" << num(cw + 0.5)
                << "\" height=\"" << num(ch + 0.5) << "\" fill=\"rgb(" << r << "," << g << "," << b
                << ")\"/>\n";
        }
    out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 10
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">scale: "
        << fmt_double(lo) << " to " << fmt_double(hi) << "</text>\n";
    out << "</svg>\n";
    write_text_file(path, out.str());
}

}  // namespace lrm
