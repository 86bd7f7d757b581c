#pragma once

#include <wigner/experiments/histogram.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace wigner {

namespace detail {
inline std::string xml_escape(const std::string& s) {
  std::string out;
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

inline std::string fmt(double x, int digits = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

/// Roughly five round tick positions covering [lo, hi].
inline std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) { step = m * mag; break; }
  std::vector<double> t;
  for (double x = std::ceil(lo / step) * step; x <= hi + 1e-9 * span; x += step) t.push_back(std::abs(x) < 1e-12 * step ? 0.0 : x);
  return t;
}
}  // namespace detail

/// Static SVG document made of rectangular plot panels.
class SvgDocument {
 public:
  SvgDocument(double width, double height) : width_(width), height_(height) {}

  class Panel {
   public:
    Panel(SvgDocument& doc, double x, double y, double w, double h, double x0, double x1, double y0, double y1)
        : doc_(doc), px_(x), py_(y), pw_(w), ph_(h), x0_(x0), x1_(x1), y0_(y0), y1_(y1) {}

    double sx(double x) const { return px_ + pw_ * (x - x0_) / (x1_ - x0_); }
    double sy(double y) const { return py_ + ph_ * (1.0 - (y - y0_) / (y1_ - y0_)); }

    void axes(const std::string& title, const std::string& xlabel, const std::string& ylabel) {
      auto& o = doc_.body_;
      o << "<rect x=\"" << detail::fmt(px_, 6) << "\" y=\"" << detail::fmt(py_, 6) << "\" width=\""
        << detail::fmt(pw_, 6) << "\" height=\"" << detail::fmt(ph_, 6)
        << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
      for (double t : detail::nice_ticks(x0_, x1_)) {
        const double X = sx(t);
        o << "<line x1=\"" << detail::fmt(X, 6) << "\" y1=\"" << detail::fmt(py_ + ph_, 6) << "\" x2=\""
          << detail::fmt(X, 6) << "\" y2=\"" << detail::fmt(py_ + ph_ + 4, 6) << "\" stroke=\"#333\"/>\n";
        doc_.text(X, py_ + ph_ + 16, detail::fmt(t), 10, "middle");
      }
      for (double t : detail::nice_ticks(y0_, y1_)) {
        const double Y = sy(t);
        o << "<line x1=\"" << detail::fmt(px_ - 4, 6) << "\" y1=\"" << detail::fmt(Y, 6) << "\" x2=\""
          << detail::fmt(px_, 6) << "\" y2=\"" << detail::fmt(Y, 6) << "\" stroke=\"#333\"/>\n";
        doc_.text(px_ - 6, Y + 3, detail::fmt(t), 10, "end");
      }
      doc_.text(px_ + pw_ / 2, py_ - 8, title, 12, "middle");
      doc_.text(px_ + pw_ / 2, py_ + ph_ + 32, xlabel, 11, "middle");
      if (!ylabel.empty()) {
        doc_.body_ << "<text x=\"" << detail::fmt(px_ - 40, 6) << "\" y=\"" << detail::fmt(py_ + ph_ / 2, 6)
                   << "\" font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"middle\" transform=\"rotate(-90 "
                   << detail::fmt(px_ - 40, 6) << " " << detail::fmt(py_ + ph_ / 2, 6) << ")\">"
                   << detail::xml_escape(ylabel) << "</text>\n";
      }
    }

    void bars(const Histogram& h, const std::string& fill) {
      for (std::size_t b = 0; b < h.bins(); ++b) {
        const double d = std::min(h.densities[b], y1_);
        if (d <= 0.0) continue;
        const double xa = sx(std::max(h.edges[b], x0_)), xb = sx(std::min(h.edges[b + 1], x1_));
        if (xb <= xa) continue;
        doc_.body_ << "<rect x=\"" << detail::fmt(xa, 7) << "\" y=\"" << detail::fmt(sy(d), 7) << "\" width=\""
                   << detail::fmt(xb - xa, 7) << "\" height=\"" << detail::fmt(sy(0.0) - sy(d), 7) << "\" fill=\""
                   << fill << "\" stroke=\"#555\" stroke-width=\"0.3\"/>\n";
      }
    }

    void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke, double width = 1.5,
                  const std::string& dash = "") {
      if (pts.empty()) return;
      doc_.body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << detail::fmt(width)
                 << "\"" << (dash.empty() ? "" : " stroke-dasharray=\"" + dash + "\"") << " points=\"";
      for (const auto& [x, y] : pts) {
        const double yy = std::clamp(y, y0_, y1_);
        doc_.body_ << detail::fmt(sx(x), 7) << "," << detail::fmt(sy(yy), 7) << " ";
      }
      doc_.body_ << "\"/>\n";
    }

    void curve(const std::function<double(double)>& f, const std::string& stroke, std::size_t samples = 400) {
      std::vector<std::pair<double, double>> pts;
      for (std::size_t i = 0; i <= samples; ++i) {
        const double x = x0_ + (x1_ - x0_) * static_cast<double>(i) / static_cast<double>(samples);
        pts.emplace_back(x, f(x));
      }
      polyline(pts, stroke);
    }

    void note(const std::string& s, int line = 0) {
      doc_.text(px_ + pw_ - 6, py_ + 14 + 13 * line, s, 10, "end");
    }

   private:
    SvgDocument& doc_;
    double px_, py_, pw_, ph_;
    double x0_, x1_, y0_, y1_;
  };

  Panel panel(double x, double y, double w, double h, double x0, double x1, double y0, double y1) {
    return Panel(*this, x, y, w, h, x0, x1, y0, y1);
  }

  void text(double x, double y, const std::string& s, int size = 12, const std::string& anchor = "start") {
    body_ << "<text x=\"" << detail::fmt(x, 6) << "\" y=\"" << detail::fmt(y, 6) << "\" font-size=\"" << size
          << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << detail::xml_escape(s)
          << "</text>\n";
  }

  std::string str() const {
    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fmt(width_, 6) << "\" height=\""
      << detail::fmt(height_, 6) << "\" viewBox=\"0 0 " << detail::fmt(width_, 6) << " " << detail::fmt(height_, 6)
      << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
    return o.str();
  }

 private:
  double width_, height_;
  std::ostringstream body_;
};

}  // namespace wigner
