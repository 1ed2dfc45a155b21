#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "nanophase/mixture.hpp"
#include "nanophase/model_select.hpp"
#include "nanophase/report.hpp"
#include "nanophase/validation.hpp"

namespace nanophase {

// Structured outputs are JSON with a fixed key order and shortest round-trip numbers,
// so the same inputs always produce the same bytes.

std::string to_structured(const FitResult& fit);
std::string to_structured(const BicSweep& sweep);
std::string to_structured(const CvReport& report);
std::string to_structured(const std::map<std::size_t, CvReport>& scan);
std::string to_structured(const PhaseTable& table);

/// Shortest decimal that parses back to the same double.
std::string format_number(double value);

/// k, log_likelihood, d, bic, converged (failed k have empty numeric fields).
std::string bic_table_csv(const BicSweep& sweep);
/// size, n_folds, fold, score; failed folds carry an empty score.
std::string cv_table_csv(const CvReport& report);
/// k, size, mean, std_dev, min, verdict.
std::string scan_table_csv(const std::map<std::size_t, CvReport>& scan);
std::string histogram_csv(const PdfOverlay& overlay);
/// x, mixture, component_1 ... component_k.
std::string pdf_curves_csv(const PdfOverlay& overlay);
/// component, level, x, y; plus a "mean" row per component.
std::string ellipse_csv(const EllipseSet& set);

std::string phase_table_text(const PhaseTable& table);

}  // namespace nanophase
