#pragma once

#include <string>

#include "nanophase/feature_matrix.hpp"
#include "nanophase/model_select.hpp"
#include "nanophase/report.hpp"
#include "nanophase/validation.hpp"

namespace nanophase {

// Minimal static SVG renderings of the plot tables. Output is deterministic.

std::string svg_bic_curve(const BicSweep& sweep);
std::string svg_pdf_overlay(const PdfOverlay& overlay, const std::string& x_label);
std::string svg_ellipses(const EllipseSet& set, const FeatureMatrix& data, const std::string& x_label,
                         const std::string& y_label);
std::string svg_cv_scores(const CvReport& report);

}  // namespace nanophase
