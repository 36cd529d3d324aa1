// Minimal self-contained SVG line-plot writer (axes, optional log scaling,
// polylines, legend). CSV stays the canonical output; this exists so report
// bundles need no plotting framework.
#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace jpo::svg {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    std::string label;
    bool dotted = false;
};

class Plot {
  public:
    Plot(std::string title, std::string xlabel, std::string ylabel,
         bool logx = false, bool logy = false)
        : title_(std::move(title)), xlabel_(std::move(xlabel)),
          ylabel_(std::move(ylabel)), logx_(logx), logy_(logy) {}

    void add(Series s) { series_.push_back(std::move(s)); }

    void write(const std::string& path) const {
        const double w = 800, h = 500, ml = 70, mr = 160, mt = 40, mb = 55;
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& s : series_) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                double x = tx(s.x[i]), y = ty(s.y[i]);
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                xmin = std::min(xmin, x); xmax = std::max(xmax, x);
                ymin = std::min(ymin, y); ymax = std::max(ymax, y);
            }
        }
        if (xmin > xmax) { xmin = 0; xmax = 1; }
        if (ymin > ymax) { ymin = 0; ymax = 1; }
        if (xmax == xmin) { xmax = xmin + 1; }
        if (ymax == ymin) { ymax = ymin + 1; }
        double ypad = 0.05 * (ymax - ymin);
        ymin -= ypad; ymax += ypad;

        auto px = [&](double x) {
            return ml + (tx(x) - xmin) / (xmax - xmin) * (w - ml - mr);
        };
        auto py = [&](double y) {
            return h - mb - (ty(y) - ymin) / (ymax - ymin) * (h - mt - mb);
        };

        std::ostringstream os;
        os.precision(6);
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
           << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
           << "\">\n";
        os << "<rect width=\"" << w << "\" height=\"" << h
           << "\" fill=\"white\"/>\n";
        os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\""
           << (w - ml - mr) << "\" height=\"" << (h - mt - mb)
           << "\" fill=\"none\" stroke=\"black\"/>\n";
        os << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"22\" "
              "text-anchor=\"middle\" font-size=\"15\">"
           << title_ << "</text>\n";
        os << "<text x=\"" << (ml + (w - ml - mr) / 2) << "\" y=\"" << (h - 12)
           << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel_
           << "</text>\n";
        os << "<text x=\"18\" y=\"" << (mt + (h - mt - mb) / 2)
           << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
           << (mt + (h - mt - mb) / 2) << ")\">" << ylabel_ << "</text>\n";

        for (double t : ticks(xmin, xmax, logx_)) {
            double x = ml + (t - xmin) / (xmax - xmin) * (w - ml - mr);
            os << "<line x1=\"" << x << "\" y1=\"" << (h - mb) << "\" x2=\""
               << x << "\" y2=\"" << (h - mb + 5) << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << x << "\" y=\"" << (h - mb + 18)
               << "\" text-anchor=\"middle\" font-size=\"11\">"
               << tick_label(t, logx_) << "</text>\n";
        }
        for (double t : ticks(ymin, ymax, logy_)) {
            double y = h - mb - (t - ymin) / (ymax - ymin) * (h - mt - mb);
            os << "<line x1=\"" << (ml - 5) << "\" y1=\"" << y << "\" x2=\""
               << ml << "\" y2=\"" << y << "\" stroke=\"black\"/>\n";
            os << "<text x=\"" << (ml - 8) << "\" y=\"" << (y + 4)
               << "\" text-anchor=\"end\" font-size=\"11\">"
               << tick_label(t, logy_) << "</text>\n";
        }

        int li = 0;
        for (const auto& s : series_) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color
               << "\" stroke-width=\"1.2\"";
            if (s.dotted) os << " stroke-dasharray=\"4 4\"";
            os << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                double x = tx(s.x[i]), y = ty(s.y[i]);
                if (!std::isfinite(x) || !std::isfinite(y)) continue;
                os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
            os << "\"/>\n";
            if (!s.label.empty()) {
                double lx = w - mr + 12, ly = mt + 16 + 18 * li++;
                os << "<line x1=\"" << lx << "\" y1=\"" << (ly - 4)
                   << "\" x2=\"" << (lx + 22) << "\" y2=\"" << (ly - 4)
                   << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
                if (s.dotted) os << " stroke-dasharray=\"4 4\"";
                os << "/>\n<text x=\"" << (lx + 27) << "\" y=\"" << ly
                   << "\" font-size=\"12\">" << s.label << "</text>\n";
            }
        }
        os << "</svg>\n";

        std::ofstream out(path, std::ios::trunc);
        out << os.str();
    }

  private:
    double tx(double v) const { return logx_ ? std::log10(v) : v; }
    double ty(double v) const { return logy_ ? std::log10(v) : v; }

    static std::vector<double> ticks(double lo, double hi, bool log) {
        std::vector<double> t;
        if (log) {
            for (double d = std::ceil(lo); d <= std::floor(hi) + 1e-9; d += 1.0)
                t.push_back(d);
            if (t.empty()) t = {lo, hi};
            return t;
        }
        double span = hi - lo;
        double step = std::pow(10.0, std::floor(std::log10(span / 4.0)));
        if (span / step > 8.0) step *= 2.0;
        for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span;
             v += step)
            t.push_back(v);
        return t;
    }

    static std::string tick_label(double t, bool log) {
        std::ostringstream os;
        os.precision(4);
        if (log)
            os << "1e" << static_cast<int>(std::lround(t));
        else
            os << t;
        return os.str();
    }

    std::string title_, xlabel_, ylabel_;
    bool logx_, logy_;
    std::vector<Series> series_;
};

}  // namespace jpo::svg
