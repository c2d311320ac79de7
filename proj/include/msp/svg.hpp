#ifndef MSP_SVG_HPP
#define MSP_SVG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "msp/errors.hpp"

// Minimal self-contained SVG plots. CSV is the data contract; these are previews.
namespace msp::svg {

struct Series
{
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct Axes
{
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_x = false;
};

namespace detail {

constexpr double W = 640.0, H = 420.0, L = 70.0, R = 20.0, T = 36.0, B = 52.0;

inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char ch : s) {
        switch (ch) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += ch;
        }
    }
    return out;
}

inline std::string frame(const Axes& ax, double x0, double x1, double y0, double y1)
{
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<rect x=\"" + num(L) + "\" y=\"" + num(T) + "\" width=\"" + num(W - L - R) + "\" height=\"" +
         num(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";
    s += "<text x=\"" + num(W / 2) + "\" y=\"20\" text-anchor=\"middle\">" + escape(ax.title) + "</text>\n";
    s += "<text x=\"" + num(W / 2) + "\" y=\"" + num(H - 12) + "\" text-anchor=\"middle\">" + escape(ax.xlabel) +
         "</text>\n";
    s += "<text x=\"16\" y=\"" + num(H / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + num(H / 2) +
         ")\">" + escape(ax.ylabel) + "</text>\n";
    // corner tick labels
    const std::string xl = ax.log_x ? num(std::pow(10.0, x0)) : num(x0);
    const std::string xr = ax.log_x ? num(std::pow(10.0, x1)) : num(x1);
    s += "<text x=\"" + num(L) + "\" y=\"" + num(H - B + 16) + "\" text-anchor=\"start\">" + xl + "</text>\n";
    s += "<text x=\"" + num(W - R) + "\" y=\"" + num(H - B + 16) + "\" text-anchor=\"end\">" + xr + "</text>\n";
    s += "<text x=\"" + num(L - 4) + "\" y=\"" + num(H - B) + "\" text-anchor=\"end\">" + num(y0) + "</text>\n";
    s += "<text x=\"" + num(L - 4) + "\" y=\"" + num(T + 10) + "\" text-anchor=\"end\">" + num(y1) + "</text>\n";
    return s;
}

} // namespace detail

inline std::string line_plot(const Axes& ax, const std::vector<Series>& series)
{
    using namespace detail;
    if (series.empty())
        throw InvalidArgument("line_plot: no series");
    auto tx = [&](double x) { return ax.log_x ? std::log10(x) : x; };
    double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (ax.log_x && !(s.x[i] > 0.0)))
                continue;
            x0 = std::min(x0, tx(s.x[i]));
            x1 = std::max(x1, tx(s.x[i]));
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > x0))
        x1 = x0 + 1.0;
    if (!(y1 > y0))
        y1 = y0 + 1.0;
    std::string out = frame(ax, x0, x1, y0, y1);
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.y[i]) || (ax.log_x && !(s.x[i] > 0.0)))
                continue;
            const double px = L + (tx(s.x[i]) - x0) / (x1 - x0) * (W - L - R);
            const double py = H - B - (s.y[i] - y0) / (y1 - y0) * (H - T - B);
            pts += num(px) + "," + num(py) + " ";
        }
        const char* col = colors[k % 6];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts +
               "\"/>\n";
        out += "<text x=\"" + num(W - R - 6) + "\" y=\"" + num(T + 16 + 14 * static_cast<double>(k)) +
               "\" text-anchor=\"end\" fill=\"" + col + "\">" + escape(s.label) + "</text>\n";
    }
    return out + "</svg>\n";
}

/// Heat map of z (rows = y, cols = x) on a white-to-red ramp clamped to [0, 1].
/// Large grids are max-pooled to at most max_cells per axis. With
/// cone_slope > 0 a dashed line y = cone_slope x is drawn on top.
inline std::string heatmap(const Axes& ax, const std::vector<double>& x, const std::vector<double>& y,
                           const Eigen::MatrixXd& full, double cone_slope = 0.0, Eigen::Index max_cells = 128)
{
    using namespace detail;
    if (static_cast<std::size_t>(full.rows()) != y.size() || static_cast<std::size_t>(full.cols()) != x.size() ||
        x.size() < 2 || y.size() < 2 || max_cells < 1)
        throw InvalidArgument("heatmap: shape mismatch");
    const Eigen::Index by = (full.rows() + max_cells - 1) / max_cells;
    const Eigen::Index bx = (full.cols() + max_cells - 1) / max_cells;
    Eigen::MatrixXd z((full.rows() + by - 1) / by, (full.cols() + bx - 1) / bx);
    for (Eigen::Index j = 0; j < z.rows(); ++j)
        for (Eigen::Index i = 0; i < z.cols(); ++i)
            z(j, i) = full.block(j * by, i * bx, std::min(by, full.rows() - j * by), std::min(bx, full.cols() - i * bx))
                          .maxCoeff();
    const double x0 = x.front(), x1 = x.back(), y0 = y.front(), y1 = y.back();
    std::string out = frame(ax, x0, x1, y0, y1);
    const double cw = (W - L - R) / static_cast<double>(z.cols());
    const double ch = (H - T - B) / static_cast<double>(z.rows());
    for (Eigen::Index j = 0; j < z.rows(); ++j)
        for (Eigen::Index i = 0; i < z.cols(); ++i) {
            const double v = std::clamp(z(j, i), 0.0, 1.0);
            if (v < 1e-3)
                continue;
            const int r = 255;
            const int gb = static_cast<int>(std::lround(255.0 * (1.0 - v)));
            char fill[16];
            std::snprintf(fill, sizeof fill, "#%02x%02x%02x", r, gb, gb);
            out += "<rect x=\"" + num(L + static_cast<double>(i) * cw) + "\" y=\"" +
                   num(H - B - static_cast<double>(j + 1) * ch) + "\" width=\"" + num(cw + 0.05) + "\" height=\"" +
                   num(ch + 0.05) + "\" fill=\"" + fill + "\"/>\n";
        }
    if (cone_slope > 0.0) {
        const double xe = std::min(x1, y1 / cone_slope);
        auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
        auto py = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };
        out += "<line x1=\"" + num(px(std::max(x0, y0 / cone_slope))) + "\" y1=\"" +
               num(py(std::max(y0, cone_slope * x0))) + "\" x2=\"" + num(px(xe)) + "\" y2=\"" +
               num(py(cone_slope * xe)) + "\" stroke=\"black\" stroke-dasharray=\"6,4\"/>\n";
    }
    return out + "</svg>\n";
}

} // namespace msp::svg

#endif
