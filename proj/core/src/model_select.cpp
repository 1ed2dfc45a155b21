#include "nanophase/model_select.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "nanophase/error.hpp"
#include "parallel.hpp"

namespace nanophase {

int param_count(std::size_t k_components, std::size_t dim, CovarianceType type) {
  const auto k = static_cast<int>(k_components);
  const auto d = static_cast<int>(dim);
  const int cov_entries = type == CovarianceType::Full ? d * (d + 1) / 2 : d;
  return k * d + k * cov_entries + (k - 1);
}

double bic_penalty(int d, std::size_t n) { return static_cast<double>(d) * std::log(static_cast<double>(n)); }

double bic(double log_likelihood, int d, std::size_t n) { return -2.0 * log_likelihood + bic_penalty(d, n); }

std::size_t select_optimal_k(const std::map<std::size_t, SweepEntry>& entries) {
  std::size_t best_k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [k, entry] : entries) {
    if (!entry.ok()) continue;
    if (entry.fit->bic < best) {
      best = entry.fit->bic;
      best_k = k;
    }
  }
  return best_k;
}

BicSweep sweep(const FeatureMatrix& data, const SweepConfig& config) {
  if (config.k_min < 1 || config.k_max < config.k_min) {
    throw Error(ErrorKind::InputFormat, "k range must satisfy 1 <= k_min <= k_max");
  }
  if (config.k_max > data.rows()) {
    throw Error(ErrorKind::InsufficientData, "k_max " + std::to_string(config.k_max) + " exceeds " +
                                                 std::to_string(data.rows()) + " data points");
  }
  const std::size_t count = config.k_max - config.k_min + 1;
  std::vector<SweepEntry> slots(count);
  detail::parallel_for(count, config.threads, [&](std::size_t idx) {
    SweepEntry& entry = slots[idx];
    entry.k = config.k_min + idx;
    try {
      entry.fit = fit_em(data, entry.k, config.fit);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NumericalDegeneracy) throw;
      entry.failure = e.what();
    }
  });

  BicSweep result;
  result.k_min = config.k_min;
  result.k_max = config.k_max;
  result.n_points = data.rows();
  for (auto& entry : slots) result.entries.emplace(entry.k, std::move(entry));
  result.optimal_k = select_optimal_k(result.entries);
  if (result.optimal_k == 0) throw Error(ErrorKind::NumericalDegeneracy, "every k in the sweep failed");
  return result;
}

BicMargin bic_margin(const BicSweep& sweep) {
  std::vector<const SweepEntry*> ok;
  for (const auto& [k, entry] : sweep.entries)
    if (entry.ok()) ok.push_back(&entry);
  if (ok.size() < 2) throw Error(ErrorKind::InsufficientSweep, "margin needs at least two successful fits");

  const std::size_t best_k = select_optimal_k(sweep.entries);
  const SweepEntry* best = nullptr;
  const SweepEntry* runner = nullptr;
  for (const SweepEntry* e : ok) {
    if (e->k == best_k) {
      best = e;
    } else if (runner == nullptr || e->fit->bic < runner->fit->bic) {
      runner = e;
    }
  }
  BicMargin m;
  m.optimal_k = best_k;
  m.runner_up_k = runner->k;
  m.margin = runner->fit->bic - best->fit->bic;
  m.reference_scale = bic_penalty(best->fit->param_count, best->fit->n_points);
  return m;
}

}  // namespace nanophase
