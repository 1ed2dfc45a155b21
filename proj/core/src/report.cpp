#include "nanophase/report.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nanophase/error.hpp"

namespace nanophase {

PhaseTable phase_table(const FitResult& fit, const std::string& material, const std::vector<std::string>& features) {
  if (!fit.converged) {
    throw Error(ErrorKind::Unconverged, "fit did not converge after " + std::to_string(fit.n_iterations) +
                                            " iterations; refusing to tabulate");
  }
  const MixtureModel& model = fit.model;
  if (features.size() != model.dim()) throw Error(ErrorKind::InputFormat, "feature names do not match dimension");

  PhaseTable table;
  table.material = material;
  table.dim = model.dim();
  table.features = features;
  const std::string prefix = model.dim() == 1 ? features.front() : "P";
  std::size_t label = 1;
  for (std::size_t j : model.first_mean_order()) {
    const auto& c = model[j];
    PhaseRow row;
    row.label = prefix + "_" + std::to_string(label++);
    row.mean.assign(c.mean.begin(), c.mean.begin() + static_cast<std::ptrdiff_t>(model.dim()));
    if (model.dim() == 1) row.std_dev.push_back(std::sqrt(c.covariance.xx));
    row.percentage = 100.0 * c.weight;
    table.rows.push_back(std::move(row));
  }
  return table;
}

VolumeFraction volume_fraction(const MixtureModel& model, double cu_reference_modulus) {
  if (model.size() < 2) throw Error(ErrorKind::UndefinedFraction, "volume fraction needs at least two components");
  VolumeFraction vf;
  double nearest = HUGE_VAL;
  for (std::size_t j = 0; j < model.size(); ++j) {
    const double d = std::abs(model[j].mean[0] - cu_reference_modulus);
    if (d < nearest) {
      nearest = d;
      vf.cu_component = j;
    }
  }
  vf.cu_fraction = model[vf.cu_component].weight;
  // Weights sum to one, so the complement is the sum of the other weights and adds back to exactly 1.
  vf.cr_fraction = 1.0 - vf.cu_fraction;
  return vf;
}

PdfOverlay pdf_overlay(std::span<const double> values, const MixtureModel& model, std::size_t bins) {
  if (model.dim() != 1) throw Error(ErrorKind::InputFormat, "PDF overlay needs a one-dimensional fit");
  if (values.empty()) throw Error(ErrorKind::EmptyInput, "no values to histogram");
  if (bins == 0) throw Error(ErrorKind::InputFormat, "histogram needs at least one bin");

  const auto [min_it, max_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *min_it;
  const double hi = *max_it;
  const double n = static_cast<double>(values.size());

  PdfOverlay out;
  const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
  out.histogram.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out.histogram[b].lo = lo + width * static_cast<double>(b);
    out.histogram[b].hi = b + 1 == bins ? std::max(hi, lo + width) : lo + width * static_cast<double>(b + 1);
  }
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    ++out.histogram[std::min(b, bins - 1)].count;
  }
  for (auto& bin : out.histogram) bin.density = static_cast<double>(bin.count) / (n * (bin.hi - bin.lo));

  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  double pooled_sd = std::sqrt(var / n);
  if (pooled_sd == 0.0) {
    // Constant sample: widen by the broadest component instead.
    for (const auto& c : model.components()) pooled_sd = std::max(pooled_sd, std::sqrt(c.covariance.xx));
  }

  const double g_lo = lo - 3.0 * pooled_sd;
  const double g_hi = hi + 3.0 * pooled_sd;
  out.grid.resize(kPdfGridPoints);
  out.mixture_pdf.assign(kPdfGridPoints, 0.0);
  out.component_pdfs.assign(model.size(), std::vector<double>(kPdfGridPoints, 0.0));
  for (std::size_t g = 0; g < kPdfGridPoints; ++g) {
    const double x = g_lo + (g_hi - g_lo) * static_cast<double>(g) / static_cast<double>(kPdfGridPoints - 1);
    out.grid[g] = x;
    for (std::size_t j = 0; j < model.size(); ++j) {
      const double p = model[j].weight * gaussian_density(Point{x, 0.0}, model[j], 1);
      out.component_pdfs[j][g] = p;
      out.mixture_pdf[g] += p;
    }
  }
  return out;
}

EllipseAxes ellipse_axes(const Covariance& s) {
  const double det = s.xx * s.yy - s.xy * s.xy;
  if (!(s.xx > 0.0) || !(det > 0.0) || !std::isfinite(det)) {
    throw Error(ErrorKind::NumericalDegeneracy, "covariance is not positive definite");
  }
  const double half_trace = 0.5 * (s.xx + s.yy);
  const double spread = std::hypot(0.5 * (s.xx - s.yy), s.xy);
  const double l1 = half_trace + spread;
  const double l2 = det / l1;  // avoids cancellation in half_trace - spread
  EllipseAxes axes;
  axes.major = std::sqrt(l1);
  axes.minor = std::sqrt(l2);
  axes.angle = 0.5 * std::atan2(2.0 * s.xy, s.xx - s.yy);
  return axes;
}

EllipseSet ellipse_isolines(const MixtureModel& model, std::span<const double> levels) {
  if (model.dim() != 2) throw Error(ErrorKind::InputFormat, "ellipse isolines need a two-dimensional fit");
  EllipseSet out;
  for (std::size_t j = 0; j < model.size(); ++j) {
    const auto& c = model[j];
    const EllipseAxes axes = ellipse_axes(c.covariance);
    const double ca = std::cos(axes.angle);
    const double sa = std::sin(axes.angle);
    out.means.push_back(c.mean);
    for (double r : levels) {
      Isoline line{j, r, {}};
      line.points.reserve(kEllipsePoints);
      for (std::size_t i = 0; i < kEllipsePoints; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(kEllipsePoints);
        const double u = r * axes.major * std::cos(t);
        const double v = r * axes.minor * std::sin(t);
        line.points.push_back(Point{c.mean[0] + ca * u - sa * v, c.mean[1] + sa * u + ca * v});
      }
      out.isolines.push_back(std::move(line));
    }
  }
  return out;
}

}  // namespace nanophase
