#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nanophase/mixture.hpp"

namespace nanophase {

struct PhaseRow {
  std::string label;           // E_1, H_2 or P_1 for joint fits
  std::vector<double> mean;    // one entry per feature, GPa
  std::vector<double> std_dev; // empty for 2D tables
  double percentage = 0.0;     // 100 * weight
};

struct PhaseTable {
  std::string material;
  std::size_t dim = 1;
  std::vector<std::string> features;  // feature names, e.g. {"E"} or {"E", "H"}
  std::vector<PhaseRow> rows;         // ascending first-feature mean
};

/// One row per component. Refuses (Unconverged) a fit that did not converge.
PhaseTable phase_table(const FitResult& fit, const std::string& material,
                       const std::vector<std::string>& features = {"E"});

struct VolumeFraction {
  /// Index (in model order) of the component nearest the Cu reference modulus.
  std::size_t cu_component = 0;
  double cu_fraction = 0.0;
  /// Sum of every other component's weight.
  double cr_fraction = 0.0;
};

/// The component whose first-coordinate mean is nearest the reference is Cu-rich;
/// the rest counts as Cr. Throws UndefinedFraction for a single component.
VolumeFraction volume_fraction(const MixtureModel& model, double cu_reference_modulus);

inline constexpr double kPureCuModulus = 118.80;

struct HistogramBin {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  double density = 0.0;  // count / (N * width)
};

struct PdfOverlay {
  std::vector<HistogramBin> histogram;
  std::vector<double> grid;
  std::vector<double> mixture_pdf;
  /// Weighted component curves alpha_j * N(x | mu_j, sigma_j), one per component.
  std::vector<std::vector<double>> component_pdfs;
};

inline constexpr std::size_t kDefaultHistogramBins = 20;
inline constexpr std::size_t kPdfGridPoints = 512;

/// Density histogram of the values plus mixture and component PDFs on a 512-point grid
/// spanning the data range widened by three pooled standard deviations on each side.
PdfOverlay pdf_overlay(std::span<const double> values, const MixtureModel& model,
                       std::size_t bins = kDefaultHistogramBins);

struct Isoline {
  std::size_t component = 0;
  double level = 0.0;  // Mahalanobis radius
  std::vector<Point> points;
};

struct EllipseSet {
  std::vector<Point> means;
  std::vector<Isoline> isolines;
};

inline constexpr std::size_t kEllipsePoints = 128;

/// Per component and level, a closed polyline {x : (x - mu)^T Sigma^-1 (x - mu) = r^2}.
EllipseSet ellipse_isolines(const MixtureModel& model, std::span<const double> levels);

struct EllipseAxes {
  double major = 0.0;  // semi-axis for r = 1
  double minor = 0.0;
  double angle = 0.0;  // radians, direction of the major axis
};

/// Eigen-decomposition of a symmetric positive definite 2x2 covariance.
EllipseAxes ellipse_axes(const Covariance& covariance);

}  // namespace nanophase
