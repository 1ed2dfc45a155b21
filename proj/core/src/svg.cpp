#include "nanophase/svg.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nanophase/serialize.hpp"

namespace nanophase {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 20.0;
constexpr double kBottom = 50.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                "#8c564b", "#e377c2", "#17becf", "#7f7f7f"};

const char* colour(std::size_t i) { return kPalette[i % std::size(kPalette)]; }

std::string fixed(double v) {
  // Two decimals are plenty for pixel coordinates and keep files small.
  const double r = std::round(v * 100.0) / 100.0;
  return format_number(r == 0.0 ? 0.0 : r);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

class Canvas {
 public:
  Canvas(double x_lo, double x_hi, double y_lo, double y_hi) : x_lo_(x_lo), x_hi_(x_hi), y_lo_(y_lo), y_hi_(y_hi) {
    if (!(x_hi_ > x_lo_)) x_hi_ = x_lo_ + 1.0;
    if (!(y_hi_ > y_lo_)) y_hi_ = y_lo_ + 1.0;
  }

  double px(double x) const { return kLeft + (x - x_lo_) / (x_hi_ - x_lo_) * (kWidth - kLeft - kRight); }
  double py(double y) const { return kHeight - kBottom - (y - y_lo_) / (y_hi_ - y_lo_) * (kHeight - kTop - kBottom); }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const char* stroke,
                double width = 1.5, bool closed = false) {
    if (xs.empty()) return;
    body_ += closed ? "<polygon" : "<polyline";
    body_ += " fill=\"none\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + fixed(width) + "\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) body_ += ' ';
      body_ += fixed(px(xs[i])) + "," + fixed(py(ys[i]));
    }
    body_ += "\"/>\n";
  }

  void circle(double x, double y, double r, const char* fill, double opacity = 1.0) {
    body_ += "<circle cx=\"" + fixed(px(x)) + "\" cy=\"" + fixed(py(y)) + "\" r=\"" + fixed(r) + "\" fill=\"" +
             fill + "\" fill-opacity=\"" + fixed(opacity) + "\"/>\n";
  }

  void rect(double x0, double x1, double y0, double y1, const char* fill) {
    const double left = px(x0);
    const double top = py(y1);
    body_ += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(top) + "\" width=\"" + fixed(px(x1) - left) +
             "\" height=\"" + fixed(py(y0) - top) + "\" fill=\"" + fill + "\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }

  std::string finish(const std::string& x_label, const std::string& y_label) const {
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) + "\" height=\"" +
                    fixed(kHeight) + "\" viewBox=\"0 0 " + fixed(kWidth) + " " + fixed(kHeight) +
                    "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += body_;
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    s += "<path d=\"M" + fixed(x0) + "," + fixed(y1) + " V" + fixed(y0) + " H" + fixed(x1) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int t = 0; t <= 4; ++t) {
      const double fx = x_lo_ + (x_hi_ - x_lo_) * t / 4.0;
      const double fy = y_lo_ + (y_hi_ - y_lo_) * t / 4.0;
      s += "<text x=\"" + fixed(px(fx)) + "\" y=\"" + fixed(y0 + 16) + "\" text-anchor=\"middle\">" + tick(fx) +
           "</text>\n";
      s += "<text x=\"" + fixed(x0 - 6) + "\" y=\"" + fixed(py(fy) + 4) + "\" text-anchor=\"end\">" + tick(fy) +
           "</text>\n";
    }
    s += "<text x=\"" + fixed((x0 + x1) / 2) + "\" y=\"" + fixed(kHeight - 10) + "\" text-anchor=\"middle\">" +
         escape(x_label) + "</text>\n";
    s += "<text transform=\"translate(16," + fixed((y0 + y1) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         escape(y_label) + "</text>\n";
    s += "</svg>\n";
    return s;
  }

 private:
  static std::string tick(double v) {
    const double mag = std::abs(v);
    const double scale = mag >= 100 ? 1.0 : mag >= 1 ? 100.0 : 10000.0;
    const double r = std::round(v * scale) / scale;
    return format_number(r == 0.0 ? 0.0 : r);
  }

  double x_lo_, x_hi_, y_lo_, y_hi_;
  std::string body_;
};

}  // namespace

std::string svg_bic_curve(const BicSweep& sweep) {
  std::vector<double> ks, values;
  for (const auto& [k, e] : sweep.entries) {
    if (!e.ok()) continue;
    ks.push_back(static_cast<double>(k));
    values.push_back(e.fit->bic);
  }
  const auto [lo, hi] = values.empty() ? std::pair{0.0, 1.0}
                                       : std::pair{*std::min_element(values.begin(), values.end()),
                                                   *std::max_element(values.begin(), values.end())};
  const double pad = 0.05 * (hi - lo);
  Canvas c(static_cast<double>(sweep.k_min) - 0.5, static_cast<double>(sweep.k_max) + 0.5, lo - pad, hi + pad);
  c.polyline(ks, values, colour(0));
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const bool best = static_cast<std::size_t>(ks[i]) == sweep.optimal_k;
    c.circle(ks[i], values[i], best ? 6.0 : 3.5, best ? colour(1) : colour(0));
  }
  return c.finish("number of components", "BIC");
}

std::string svg_pdf_overlay(const PdfOverlay& overlay, const std::string& x_label) {
  double y_hi = 0.0;
  for (const auto& b : overlay.histogram) y_hi = std::max(y_hi, b.density);
  for (double v : overlay.mixture_pdf) y_hi = std::max(y_hi, v);
  const double x_lo = overlay.grid.empty() ? 0.0 : overlay.grid.front();
  const double x_hi = overlay.grid.empty() ? 1.0 : overlay.grid.back();
  Canvas c(x_lo, x_hi, 0.0, 1.05 * y_hi);
  for (const auto& b : overlay.histogram) c.rect(b.lo, b.hi, 0.0, b.density, "#c7c7c7");
  for (std::size_t j = 0; j < overlay.component_pdfs.size(); ++j) {
    c.polyline(overlay.grid, overlay.component_pdfs[j], colour(j + 1), 1.2);
  }
  c.polyline(overlay.grid, overlay.mixture_pdf, "black", 2.0);
  return c.finish(x_label, "probability density");
}

std::string svg_ellipses(const EllipseSet& set, const FeatureMatrix& data, const std::string& x_label,
                         const std::string& y_label) {
  double x_lo = HUGE_VAL, x_hi = -HUGE_VAL, y_lo = HUGE_VAL, y_hi = -HUGE_VAL;
  auto extend = [&](double x, double y) {
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
    y_lo = std::min(y_lo, y);
    y_hi = std::max(y_hi, y);
  };
  for (std::size_t i = 0; i < data.rows(); ++i) extend(data(i, 0), data(i, 1));
  for (const auto& line : set.isolines)
    for (const auto& p : line.points) extend(p[0], p[1]);
  if (!(x_hi >= x_lo)) x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  Canvas c(x_lo, x_hi, y_lo, y_hi);
  for (std::size_t i = 0; i < data.rows(); ++i) c.circle(data(i, 0), data(i, 1), 2.0, "#555555", 0.5);
  for (const auto& line : set.isolines) {
    std::vector<double> xs, ys;
    for (const auto& p : line.points) {
      xs.push_back(p[0]);
      ys.push_back(p[1]);
    }
    c.polyline(xs, ys, colour(line.component), 1.5, true);
  }
  for (std::size_t j = 0; j < set.means.size(); ++j) c.circle(set.means[j][0], set.means[j][1], 4.0, colour(j));
  return c.finish(x_label, y_label);
}

std::string svg_cv_scores(const CvReport& report) {
  double y_lo = 1.0;
  for (const auto& s : report.per_size)
    for (double v : s.folds.scores) y_lo = std::min(y_lo, v);
  const double x_hi = report.per_size.empty() ? 1.0 : static_cast<double>(report.per_size.back().size);
  const double x_lo = report.per_size.empty() ? 0.0 : static_cast<double>(report.per_size.front().size);
  const double pad = 0.05 * std::max(x_hi - x_lo, 1.0);
  Canvas c(x_lo - pad, x_hi + pad, std::min(y_lo, 0.0) - 0.02, 1.02);
  std::vector<double> xs, means;
  for (const auto& s : report.per_size) {
    for (double v : s.folds.scores) c.circle(static_cast<double>(s.size), v, 2.5, colour(0), 0.4);
    xs.push_back(static_cast<double>(s.size));
    means.push_back(s.mean);
  }
  c.polyline(xs, means, colour(1), 2.0);
  c.polyline({x_lo - pad, x_hi + pad}, {report.config.min_score, report.config.min_score}, "#999999", 1.0);
  return c.finish("data size", "adjusted Rand index");
}

}  // namespace nanophase
