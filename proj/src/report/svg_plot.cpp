#include <algorithm>
#include <cmath>
#include <sstream>

#include "femkit/report.hpp"
#include "femkit/util.hpp"

namespace femkit::report {

namespace {

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
                          "#59a14f", "#edc948", "#b07aa1", "#9c755f"};
constexpr int kPaletteSize = 8;
constexpr double kMarginLeft = 64;
constexpr double kMarginRight = 150; // legend space
constexpr double kMarginTop = 44;
constexpr double kMarginBottom = 52;

std::string esc(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string num(double v) { return util::format_double(v); }

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range padded(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) return {0.0, 1.0};
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = (hi - lo) * 0.06;
    return {lo - pad, hi + pad};
}

class Frame {
public:
    Frame(int width, int height, Range xr, Range yr)
        : w_(width), h_(height), xr_(xr), yr_(yr) {}

    double px(double x) const {
        return kMarginLeft + (x - xr_.lo) / (xr_.hi - xr_.lo) * (w_ - kMarginLeft - kMarginRight);
    }
    double py(double y) const {
        return h_ - kMarginBottom -
               (y - yr_.lo) / (yr_.hi - yr_.lo) * (h_ - kMarginTop - kMarginBottom);
    }

    void open(std::ostringstream& out, const std::string& title, const std::string& x_label,
              const std::string& y_label) const {
        out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_
            << "\" viewBox=\"0 0 " << w_ << " " << h_ << "\" font-family=\"sans-serif\">\n";
        out << "<rect width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"white\"/>\n";
        out << "<text x=\"" << w_ / 2.0 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << esc(title) << "</text>\n";
        // axes
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << (h_ - kMarginBottom) << "\" x2=\""
            << (w_ - kMarginRight) << "\" y2=\"" << (h_ - kMarginBottom)
            << "\" stroke=\"#333\"/>\n";
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
            << "\" y2=\"" << (h_ - kMarginBottom) << "\" stroke=\"#333\"/>\n";
        // ticks
        for (int i = 0; i <= 4; ++i) {
            const double fx = xr_.lo + (xr_.hi - xr_.lo) * i / 4.0;
            const double fy = yr_.lo + (yr_.hi - yr_.lo) * i / 4.0;
            const double tx = px(fx);
            const double ty = py(fy);
            out << "<line x1=\"" << tx << "\" y1=\"" << (h_ - kMarginBottom) << "\" x2=\"" << tx
                << "\" y2=\"" << (h_ - kMarginBottom + 5) << "\" stroke=\"#333\"/>\n";
            out << "<text x=\"" << tx << "\" y=\"" << (h_ - kMarginBottom + 20)
                << "\" text-anchor=\"middle\" font-size=\"11\">" << format_tick(fx) << "</text>\n";
            out << "<line x1=\"" << (kMarginLeft - 5) << "\" y1=\"" << ty << "\" x2=\""
                << kMarginLeft << "\" y2=\"" << ty << "\" stroke=\"#333\"/>\n";
            out << "<text x=\"" << (kMarginLeft - 9) << "\" y=\"" << (ty + 4)
                << "\" text-anchor=\"end\" font-size=\"11\">" << format_tick(fy) << "</text>\n";
        }
        out << "<text x=\"" << (kMarginLeft + (w_ - kMarginLeft - kMarginRight) / 2.0) << "\" y=\""
            << (h_ - 12) << "\" text-anchor=\"middle\" font-size=\"13\">" << esc(x_label)
            << "</text>\n";
        out << "<text x=\"18\" y=\"" << (kMarginTop + (h_ - kMarginTop - kMarginBottom) / 2.0)
            << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
            << (kMarginTop + (h_ - kMarginTop - kMarginBottom) / 2.0) << ")\">" << esc(y_label)
            << "</text>\n";
    }

    static std::string format_tick(double v) {
        // short fixed form keeps the axis readable
        std::ostringstream out;
        const double rounded = std::round(v * 1000.0) / 1000.0;
        out << rounded;
        return out.str();
    }

private:
    int w_;
    int h_;
    Range xr_;
    Range yr_;
};

} // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<Series>& series,
                           int width, int height) {
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool any = false;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (!any) {
                xlo = xhi = s.x[i];
                ylo = yhi = s.y[i];
                any = true;
            } else {
                xlo = std::min(xlo, s.x[i]);
                xhi = std::max(xhi, s.x[i]);
                ylo = std::min(ylo, s.y[i]);
                yhi = std::max(yhi, s.y[i]);
            }
        }
    }

    const Frame frame(width, height, padded(xlo, xhi), padded(ylo, yhi));
    std::ostringstream out;
    frame.open(out, title, x_label, y_label);
    if (!any)
        out << "<text x=\"" << width / 2.0 << "\" y=\"" << height / 2.0
            << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"#777\">no data</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % kPaletteSize];
        std::ostringstream points;
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            points << num(frame.px(s.x[i])) << "," << num(frame.py(s.y[i])) << " ";
        }
        const std::string pts = points.str();
        if (!pts.empty())
            out << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
        // legend entry
        const double ly = kMarginTop + 18.0 * static_cast<double>(si);
        out << "<line x1=\"" << (width - kMarginRight + 12) << "\" y1=\"" << ly << "\" x2=\""
            << (width - kMarginRight + 34) << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << (width - kMarginRight + 40) << "\" y=\"" << (ly + 4)
            << "\" font-size=\"12\">" << esc(s.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

std::string scatter_svg(const std::string& title, const std::string& x_label,
                        const std::string& y_label, const std::vector<ScatterPoint>& points,
                        int width, int height) {
    double xlo = 0, xhi = 1, ylo = 0, yhi = 1;
    bool any = false;
    for (const auto& p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
        if (!any) {
            xlo = xhi = p.x;
            ylo = yhi = p.y;
            any = true;
        } else {
            xlo = std::min(xlo, p.x);
            xhi = std::max(xhi, p.x);
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
        }
    }

    const Frame frame(width, height, padded(xlo, xhi), padded(ylo, yhi));
    std::ostringstream out;
    frame.open(out, title, x_label, y_label);
    if (!any)
        out << "<text x=\"" << width / 2.0 << "\" y=\"" << height / 2.0
            << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"#777\">no data</text>\n";

    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
        const char* color = kPalette[i % kPaletteSize];
        out << "<circle cx=\"" << num(frame.px(p.x)) << "\" cy=\"" << num(frame.py(p.y))
            << "\" r=\"5\" fill=\"" << color << "\"/>\n";
        if (!p.label.empty())
            out << "<text x=\"" << num(frame.px(p.x) + 8) << "\" y=\"" << num(frame.py(p.y) - 6)
                << "\" font-size=\"11\">" << esc(p.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

} // namespace femkit::report
