#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "nanophase/mixture.hpp"

namespace nanophase {

/// Free parameters of a k-component mixture in `dim` dimensions:
/// k*dim means + covariance entries + (k - 1) weights. Full covariance in 1D gives 3k - 1.
int param_count(std::size_t k_components, std::size_t dim, CovarianceType type = CovarianceType::Full);

/// -2 ln L + d ln n.
double bic(double log_likelihood, int d, std::size_t n);

/// The d ln n term alone; also the reference scale for judging BIC gaps.
double bic_penalty(int d, std::size_t n);

struct SweepEntry {
  std::size_t k = 0;
  std::optional<FitResult> fit;
  /// Set when every restart degenerated or the fit could not run.
  std::string failure;

  bool ok() const noexcept { return fit.has_value(); }
};

/// Fits over a contiguous range of component counts with the BIC-optimal choice.
struct BicSweep {
  std::size_t k_min = 1;
  std::size_t k_max = 1;
  std::map<std::size_t, SweepEntry> entries;
  std::size_t optimal_k = 0;
  std::size_t n_points = 0;

  const FitResult& optimal() const { return *entries.at(optimal_k).fit; }
};

struct SweepConfig {
  std::size_t k_min = 1;
  std::size_t k_max = 9;
  FitConfig fit;
  /// Worker threads for independent per-k fits; 0 picks hardware concurrency.
  std::size_t threads = 0;
};

/// One fit_em per k in [k_min, k_max]. Failed k are recorded and skipped for the optimum.
/// Throws NumericalDegeneracy if no k succeeds.
BicSweep sweep(const FeatureMatrix& data, const SweepConfig& config);

/// Argmin over successful entries; exact ties go to the smaller k.
std::size_t select_optimal_k(const std::map<std::size_t, SweepEntry>& entries);

struct BicMargin {
  std::size_t optimal_k = 0;
  std::size_t runner_up_k = 0;
  /// BIC(runner-up) - BIC(optimal), always >= 0.
  double margin = 0.0;
  /// d ln N for the optimal model, for judging whether the margin is decisive.
  double reference_scale = 0.0;
};

/// Throws InsufficientSweep with fewer than two successful entries.
BicMargin bic_margin(const BicSweep& sweep);

}  // namespace nanophase
