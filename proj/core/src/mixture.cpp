#include "nanophase/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include "nanophase/error.hpp"
#include "nanophase/model_select.hpp"
#include "nanophase/random.hpp"
#include "seeding.hpp"

namespace nanophase {
namespace {

constexpr double kMinEffectiveCount = 1e-8;
constexpr double kLog2Pi = 1.8378770664093454836;

// Smallest-to-largest eigenvalue ratio below which a 2D covariance counts as collapsed.
constexpr double kMinEigenRatio = 1e-6;

// Per-component constants for evaluating log(alpha_j) + log N(x | mu_j, Sigma_j).
struct ComponentTerms {
  double log_scale = 0.0;  // log weight + log normalizer
  Point mean{0.0, 0.0};
  // 1D: ixx = 1 / variance. 2D: Cholesky factors, q = (dx * ixx)^2 + ((dy - slope * dx) * iyy)^2.
  double ixx = 0.0, slope = 0.0, iyy = 0.0;
};

// a*d - b*c with one rounding (Kahan); nearly singular covariances lose everything otherwise.
double det2(double a, double d, double b, double c) {
  const double w = b * c;
  const double err = std::fma(-b, c, w);
  return std::fma(a, d, -w) + err;
}

// True when the floor, not the data, holds the covariance up in some direction, or the
// ellipse is so thin that rounding in the entries swamps its short axis. EM is no longer
// monotone on such a component, so the driver treats it like an empty one.
bool collapsed(const Covariance& s, std::size_t dim, double floor) {
  if (dim == 1) return s.xx < 2.0 * floor;
  const double half_trace = 0.5 * (s.xx + s.yy);
  const double large = half_trace + std::hypot(0.5 * (s.xx - s.yy), s.xy);
  const double small = det2(s.xx, s.yy, s.xy, s.xy) / large;
  return small < 2.0 * floor || small < kMinEigenRatio * large;
}

ComponentTerms prepare(const GaussianComponent& c, std::size_t dim, double log_weight) {
  ComponentTerms t;
  t.mean = c.mean;
  const Covariance& s = c.covariance;
  if (dim == 1) {
    if (!(s.xx > 0.0) || !std::isfinite(s.xx)) {
      throw Error(ErrorKind::NumericalDegeneracy, "component variance is not positive");
    }
    t.ixx = 1.0 / s.xx;
    t.log_scale = log_weight - 0.5 * (kLog2Pi + std::log(s.xx));
    return t;
  }
  const double det = det2(s.xx, s.yy, s.xy, s.xy);
  if (!(s.xx > 0.0) || !(det > 0.0) || !std::isfinite(det)) {
    throw Error(ErrorKind::NumericalDegeneracy, "component covariance is not positive definite");
  }
  t.ixx = 1.0 / std::sqrt(s.xx);
  t.slope = s.xy / s.xx;
  t.iyy = 1.0 / std::sqrt(det / s.xx);
  t.log_scale = log_weight - kLog2Pi - 0.5 * std::log(det);
  return t;
}

std::vector<ComponentTerms> prepare_all(const MixtureModel& model) {
  std::vector<ComponentTerms> terms;
  terms.reserve(model.size());
  for (const auto& c : model.components()) terms.push_back(prepare(c, model.dim(), std::log(c.weight)));
  return terms;
}

inline double log_term(const ComponentTerms& t, double x, double y, std::size_t dim) {
  const double dx = x - t.mean[0];
  if (dim == 1) return t.log_scale - 0.5 * dx * dx * t.ixx;
  const double z1 = dx * t.ixx;
  const double z2 = (y - t.mean[1] - t.slope * dx) * t.iyy;
  return t.log_scale - 0.5 * (z1 * z1 + z2 * z2);
}

inline double log_term(const ComponentTerms& t, const FeatureMatrix& data, std::size_t i, std::size_t dim) {
  return log_term(t, data(i, 0), dim == 2 ? data(i, 1) : 0.0, dim);
}

// Fills responsibilities (if given) and per-point log mixture densities; returns ln L.
double expectation(const FeatureMatrix& data, const std::vector<ComponentTerms>& terms, Responsibilities* resp,
                   std::vector<double>* point_log_density) {
  const std::size_t n = data.rows();
  const std::size_t k = terms.size();
  const std::size_t dim = data.dim();
  std::vector<double> logs(k);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      logs[j] = log_term(terms[j], data, i, dim);
      peak = std::max(peak, logs[j]);
    }
    if (!std::isfinite(peak)) {
      throw Error(ErrorKind::NumericalDegeneracy, "mixture density underflows at point " + std::to_string(i));
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      logs[j] = std::exp(logs[j] - peak);
      sum += logs[j];
    }
    const double point_ll = peak + std::log(sum);
    if (resp != nullptr) {
      for (std::size_t j = 0; j < k; ++j) (*resp)(i, j) = logs[j] / sum;
    }
    if (point_log_density != nullptr) (*point_log_density)[i] = point_ll;
    total += point_ll;
  }
  return total;
}

void check_data(const FeatureMatrix& data, const MixtureModel& model) {
  if (data.rows() == 0) throw Error(ErrorKind::EmptyInput, "no data points");
  if (data.dim() != model.dim()) throw Error(ErrorKind::InputFormat, "data and model dimensions differ");
}

struct MStepOutcome {
  std::vector<GaussianComponent> components;
  std::vector<std::size_t> empty;
};

MStepOutcome maximization(const FeatureMatrix& data, const Responsibilities& resp, const MStepOptions& options) {
  const std::size_t n = data.rows();
  const std::size_t k = resp.cols();
  const std::size_t dim = data.dim();
  MStepOutcome out;
  out.components.resize(k);

  std::vector<double> counts(k, 0.0);
  std::vector<Point> sums(k, Point{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      const double r = resp(i, j);
      counts[j] += r;
      sums[j][0] += r * data(i, 0);
      if (dim == 2) sums[j][1] += r * data(i, 1);
    }
  }
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);

  for (std::size_t j = 0; j < k; ++j) {
    if (counts[j] < kMinEffectiveCount) {
      out.empty.push_back(j);
      continue;
    }
    auto& c = out.components[j];
    c.mean = {sums[j][0] / counts[j], dim == 2 ? sums[j][1] / counts[j] : 0.0};
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = resp(i, j);
      const double dx = data(i, 0) - c.mean[0];
      sxx += r * dx * dx;
      if (dim == 2) {
        const double dy = data(i, 1) - c.mean[1];
        sxy += r * dx * dy;
        syy += r * dy * dy;
      }
    }
    if (dim == 1) {
      c.covariance = Covariance::scalar(sxx / counts[j] + options.regularization);
    } else {
      c.covariance.xx = sxx / counts[j] + options.regularization;
      c.covariance.yy = syy / counts[j] + options.regularization;
      c.covariance.xy = options.covariance_type == CovarianceType::Full ? sxy / counts[j] : 0.0;
    }
    c.weight = counts[j] / total;
  }
  return out;
}

Covariance pooled_covariance(const FeatureMatrix& data, const MStepOptions& options) {
  Responsibilities ones(data.rows(), 1);
  for (std::size_t i = 0; i < data.rows(); ++i) ones(i, 0) = 1.0;
  return maximization(data, ones, options).components.front().covariance;
}

struct RunOutcome {
  std::optional<FitResult> result;
  std::string failure;
};

RunOutcome run_em(const FeatureMatrix& data, std::size_t k, const FitConfig& config, std::uint64_t run_seed) {
  const std::size_t n = data.rows();
  const std::size_t dim = data.dim();
  const MStepOptions options{config.regularization, config.covariance_type};
  Rng rng(run_seed);

  const Covariance pooled = pooled_covariance(data, options);
  std::vector<GaussianComponent> init;
  for (const Point& mean : detail::seed_kmeanspp(data, k, rng)) {
    init.push_back(GaussianComponent{1.0 / static_cast<double>(k), mean, pooled});
  }

  try {
    MixtureModel model(dim, std::move(init));
    Responsibilities resp(n, k);
    std::vector<double> point_ll(n);
    FitResult fit{model, 0.0, {}, 0, false, config.seed, 0.0, 0, n, {}, {}, 1, 0};
    std::size_t reseeds = 0;
    double previous = 0.0;

    for (std::size_t iter = 0;; ++iter) {
      const double ll = expectation(data, prepare_all(model), &resp, &point_ll);
      fit.log_likelihood_trace.push_back(ll);
      const bool at_reseed = !fit.reseed_iterations.empty() && fit.reseed_iterations.back() == iter;
      if (iter > 0 && !at_reseed && std::abs(ll - previous) < config.tolerance) {
        fit.converged = true;
      }
      previous = ll;
      if (fit.converged || iter == config.max_iterations) {
        fit.model = model;
        fit.log_likelihood = ll;
        fit.responsibilities = std::move(resp);
        fit.n_iterations = iter;
        return {std::move(fit), {}};
      }

      MStepOutcome next = maximization(data, resp, options);
      for (std::size_t j = 0; j < k; ++j) {
        const bool listed = std::find(next.empty.begin(), next.empty.end(), j) != next.empty.end();
        if (!listed && collapsed(next.components[j].covariance, dim, config.regularization)) next.empty.push_back(j);
      }
      std::sort(next.empty.begin(), next.empty.end());
      if (!next.empty.empty()) {
        if (++reseeds > config.max_reseeds) return {std::nullopt, "component emptied too often"};
        // Re-seed each dead component at a distinct lowest-density point.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return point_ll[a] < point_ll[b]; });
        for (std::size_t e = 0; e < next.empty.size(); ++e) {
          next.components[next.empty[e]] =
              GaussianComponent{1.0 / static_cast<double>(k), data.point(order[e % n]), pooled};
        }
        double wsum = 0.0;
        for (const auto& c : next.components) wsum += c.weight;
        for (auto& c : next.components) c.weight /= wsum;
        fit.reseed_iterations.push_back(iter + 1);
      }
      model = MixtureModel(dim, std::move(next.components));
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NumericalDegeneracy) throw;
    return {std::nullopt, e.what()};
  }
}

}  // namespace

MixtureModel::MixtureModel(std::size_t dim, std::vector<GaussianComponent> components)
    : dim_(dim), components_(std::move(components)) {
  if (dim_ < 1 || dim_ > kMaxDim) throw Error(ErrorKind::InputFormat, "mixture dimension must be 1 or 2");
  if (components_.empty()) throw Error(ErrorKind::InputFormat, "mixture needs at least one component");
  double sum = 0.0;
  for (const auto& c : components_) {
    if (!(c.weight > 0.0) || c.weight > 1.0) {
      throw Error(ErrorKind::InputFormat, "component weight must lie in (0, 1]");
    }
    for (std::size_t d = 0; d < dim_; ++d) {
      if (!std::isfinite(c.mean[d])) throw Error(ErrorKind::NumericalDegeneracy, "component mean is not finite");
    }
    prepare(c, dim_, 0.0);
    sum += c.weight;
  }
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw Error(ErrorKind::InputFormat, "component weights must sum to 1");
  }
}

std::vector<std::size_t> MixtureModel::first_mean_order() const {
  std::vector<std::size_t> order(components_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return components_[a].mean[0] < components_[b].mean[0];
  });
  return order;
}

MixtureModel MixtureModel::sorted_by_first_mean() const {
  std::vector<GaussianComponent> sorted;
  for (std::size_t j : first_mean_order()) sorted.push_back(components_[j]);
  return MixtureModel(dim_, std::move(sorted));
}

Responsibilities Responsibilities::permuted_columns(std::span<const std::size_t> order) const {
  Responsibilities out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = (*this)(i, order[j]);
  return out;
}

double gaussian_log_density(const Point& x, const GaussianComponent& component, std::size_t dim) {
  return log_term(prepare(component, dim, 0.0), x[0], x[1], dim);
}

double gaussian_density(const Point& x, const GaussianComponent& component, std::size_t dim) {
  return std::exp(gaussian_log_density(x, component, dim));
}

double log_likelihood(const FeatureMatrix& data, const MixtureModel& model) {
  check_data(data, model);
  return expectation(data, prepare_all(model), nullptr, nullptr);
}

Responsibilities e_step(const FeatureMatrix& data, const MixtureModel& model) {
  check_data(data, model);
  Responsibilities resp(data.rows(), model.size());
  expectation(data, prepare_all(model), &resp, nullptr);
  return resp;
}

MixtureModel m_step(const FeatureMatrix& data, const Responsibilities& resp, const MStepOptions& options) {
  if (data.rows() == 0) throw Error(ErrorKind::EmptyInput, "no data points");
  if (resp.rows() != data.rows() || resp.cols() == 0) {
    throw Error(ErrorKind::InputFormat, "responsibilities do not match the data");
  }
  MStepOutcome out = maximization(data, resp, options);
  if (!out.empty.empty()) {
    throw Error(ErrorKind::EmptyComponent, "component " + std::to_string(out.empty.front()) + " has no mass");
  }
  return MixtureModel(data.dim(), std::move(out.components));
}

FitResult fit_em(const FeatureMatrix& data, std::size_t k_components, const FitConfig& config) {
  if (k_components < 1) throw Error(ErrorKind::InputFormat, "k_components must be at least 1");
  if (data.rows() < k_components) {
    throw Error(ErrorKind::InsufficientData, "need at least " + std::to_string(k_components) + " points, have " +
                                                 std::to_string(data.rows()));
  }
  for (double v : data.values()) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InputFormat, "data contains non-finite values");
  }

  const std::size_t restarts = std::max<std::size_t>(1, config.n_restarts);
  std::optional<FitResult> best;
  std::size_t degenerate = 0;
  std::string last_failure;
  for (std::size_t r = 0; r < restarts; ++r) {
    RunOutcome run = run_em(data, k_components, config, derive_seed(config.seed, {r}));
    if (!run.result) {
      ++degenerate;
      last_failure = run.failure;
      continue;
    }
    if (!best || run.result->log_likelihood > best->log_likelihood) best = std::move(run.result);
  }
  if (!best) {
    throw Error(ErrorKind::NumericalDegeneracy, "all " + std::to_string(restarts) +
                                                    " restarts degenerated: " + last_failure);
  }

  const auto order = best->model.first_mean_order();
  best->model = best->model.sorted_by_first_mean();
  best->responsibilities = best->responsibilities.permuted_columns(order);
  best->restarts_run = restarts;
  best->restarts_degenerate = degenerate;
  best->param_count = param_count(k_components, data.dim(), config.covariance_type);
  best->bic = bic(best->log_likelihood, best->param_count, data.rows());
  return std::move(*best);
}

Prediction predict(const MixtureModel& model, const Point& point) {
  const auto terms = prepare_all(model);
  FeatureMatrix one = FeatureMatrix::from_rows(model.dim(), {point.begin(), point.begin() + model.dim()});
  Prediction p;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const double l = log_term(terms[j], one, 0, model.dim());
    if (l > best) {
      best = l;
      p.component = j;
    }
  }
  Responsibilities resp(1, model.size());
  expectation(one, terms, &resp, nullptr);
  p.posterior.assign(resp.row(0).begin(), resp.row(0).end());
  return p;
}

std::vector<int> predict_labels(const MixtureModel& model, const FeatureMatrix& data) {
  check_data(data, model);
  const auto terms = prepare_all(model);
  std::vector<int> labels(data.rows(), 0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const double l = log_term(terms[j], data, i, data.dim());
      if (l > best) {
        best = l;
        labels[i] = static_cast<int>(j);
      }
    }
  }
  return labels;
}

MixtureSample sample(const MixtureModel& model, std::size_t n, std::uint64_t seed) {
  const std::size_t dim = model.dim();
  const std::size_t k = model.size();
  std::vector<double> cumulative(k);
  double acc = 0.0;
  for (std::size_t j = 0; j < k; ++j) cumulative[j] = (acc += model[j].weight);

  struct Factor {
    double a, b, c;  // lower Cholesky factor [[a, 0], [b, c]]
  };
  std::vector<Factor> factors;
  for (const auto& comp : model.components()) {
    const Covariance& s = comp.covariance;
    const double a = std::sqrt(s.xx);
    if (dim == 1) {
      factors.push_back({a, 0.0, 0.0});
    } else {
      const double b = s.xy / a;
      factors.push_back({a, b, std::sqrt(s.yy - b * b)});
    }
  }

  Rng rng(seed);
  MixtureSample out{FeatureMatrix(n, dim), std::vector<int>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    std::size_t j = 0;
    while (j + 1 < k && u >= cumulative[j]) ++j;
    out.components[i] = static_cast<int>(j);
    const auto& comp = model[j];
    const double z1 = rng.normal();
    out.points(i, 0) = comp.mean[0] + factors[j].a * z1;
    if (dim == 2) {
      const double z2 = rng.normal();
      out.points(i, 1) = comp.mean[1] + factors[j].b * z1 + factors[j].c * z2;
    }
  }
  return out;
}

}  // namespace nanophase
