#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nanophase/error.hpp"
#include "nanophase/mixture.hpp"
#include "nanophase/presets.hpp"
#include "support/oracles.hpp"

using namespace nanophase;

namespace {

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InputFormat;
}

GaussianComponent c1(double w, double mean, double var) { return {w, {mean, 0.0}, Covariance::scalar(var)}; }

MixtureModel model_1d(std::vector<std::array<double, 3>> wmv) {
  std::vector<GaussianComponent> cs;
  for (const auto& [w, m, v] : wmv) cs.push_back(c1(w, m, v));
  return MixtureModel(1, cs);
}

const MixtureModel kCuCr25Modulus =
    model_1d({{0.645, 145.55, 14.12 * 14.12}, {0.226, 226.50, 38.42 * 38.42}, {0.129, 337.02, 31.69 * 31.69}});

FeatureMatrix draw(std::mt19937_64& gen, std::size_t n, const std::vector<double>& means,
                   const std::vector<double>& sds, const std::vector<double>& weights) {
  const auto d = oracle::draw_mixture_1d(gen, n, means, sds, weights);
  return FeatureMatrix::from_column(d.values);
}

}  // namespace

TEST(Model, ValidatesConstruction) {
  EXPECT_EQ(kind_of([] { MixtureModel(3, {c1(1.0, 0, 1)}); }), ErrorKind::InputFormat);
  EXPECT_EQ(kind_of([] { MixtureModel(1, {}); }), ErrorKind::InputFormat);
  EXPECT_EQ(kind_of([] { model_1d({{0.5, 0, 1}, {0.4, 1, 1}}); }), ErrorKind::InputFormat);
  EXPECT_EQ(kind_of([] { model_1d({{1.0, 0, 1}, {0.0, 1, 1}}); }), ErrorKind::InputFormat);
  EXPECT_ANY_THROW(model_1d({{1.0, 0, -1}}));
  EXPECT_ANY_THROW(MixtureModel(2, {{1.0, {0, 0}, {1.0, 2.0, 1.0}}}));
}

TEST(Model, SortedByFirstMean) {
  const auto m = model_1d({{0.2, 300, 1}, {0.5, 100, 4}, {0.3, 200, 9}});
  const auto s = m.sorted_by_first_mean();
  EXPECT_EQ(m.first_mean_order(), (std::vector<std::size_t>{1, 2, 0}));
  EXPECT_DOUBLE_EQ(s[0].mean[0], 100);
  EXPECT_DOUBLE_EQ(s[0].weight, 0.5);
  EXPECT_DOUBLE_EQ(s[2].covariance.xx, 1);
}

TEST(Density, StandardNormalModes) {
  EXPECT_NEAR(gaussian_density({0, 0}, c1(1, 0, 1), 1), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(gaussian_density({0, 0}, {1, {0, 0}, {1, 0, 1}}, 2), 1.0 / (2.0 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(gaussian_density({0, 0}, c1(1, 0, 1), 1), 0.398942, 1e-6);
  EXPECT_NEAR(gaussian_density({0, 0}, {1, {0, 0}, {1, 0, 1}}, 2), 0.159155, 1e-6);
}

TEST(Density, PureCopperModulusPeak) {
  const double d = gaussian_density({118.80, 0}, c1(1, 118.80, 9.45 * 9.45), 1);
  EXPECT_NEAR(d, 1.0 / (9.45 * std::sqrt(2.0 * std::numbers::pi)), 1e-17);
  // The commonly quoted 0.042218 is a rounding of 0.0422161.
  EXPECT_NEAR(d, 0.042218, 5e-6);
}

TEST(Density, MatchesOracleAwayFromMode) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int t = 0; t < 200; ++t) {
    const double a = 0.5 + std::abs(u(gen)), b = 0.5 + std::abs(u(gen));
    const double r = 0.9 * u(gen) / 3.0;
    const GaussianComponent c{1, {u(gen), u(gen)}, {a, r * std::sqrt(a * b), b}};
    const Point x{u(gen), u(gen)};
    const double expected =
        oracle::normal_pdf_2d(x[0], x[1], c.mean[0], c.mean[1], c.covariance.xx, c.covariance.xy, c.covariance.yy);
    ASSERT_NEAR(gaussian_density(x, c, 2), expected, 1e-12 * std::max(1.0, expected));
    ASSERT_NEAR(gaussian_log_density(x, c, 2), std::log(expected), 1e-10);
  }
}

TEST(Density, SingularCovarianceIsDegenerate) {
  EXPECT_EQ(kind_of([] { gaussian_density({0, 0}, c1(1, 0, 0), 1); }), ErrorKind::NumericalDegeneracy);
}

TEST(Density, PropertyIntegratesToOne) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> mean(-500, 500), sd(0.01, 80);
  for (int t = 0; t < 50; ++t) {
    const double m = mean(gen), s = sd(gen);
    const auto c = c1(1, m, s * s);
    const double area = oracle::trapezoid([&](double x) { return gaussian_density({x, 0}, c, 1); }, m - 8 * s,
                                          m + 8 * s, 4000);
    ASSERT_NEAR(area, 1.0, 1e-6);
  }
}

TEST(LogLikelihood, SinglePointAndSum) {
  const auto m = model_1d({{1, 0, 1}});
  const double one = log_likelihood(FeatureMatrix::from_column(std::vector<double>{0.0}), m);
  EXPECT_NEAR(one, -0.918939, 1e-6);
  EXPECT_EQ(log_likelihood(FeatureMatrix::from_column(std::vector<double>{0.0, 0.0}), m), 2.0 * one);
}

TEST(LogLikelihood, CuCr60ModulusPerPointRange) {
  const MixtureModel& model = find_preset("cucr60-1d-E")->model;
  std::mt19937_64 gen(300);
  std::vector<double> means, sds, weights;
  for (const auto& c : model.components()) {
    means.push_back(c.mean[0]);
    sds.push_back(std::sqrt(c.covariance.xx));
    weights.push_back(c.weight);
  }
  const FeatureMatrix data = draw(gen, 300, means, sds, weights);
  const double ll = log_likelihood(data, model);
  EXPECT_NEAR(ll, oracle::direct_log_likelihood(data, model), 1e-9 * std::abs(ll));
  EXPECT_GT(ll / 300.0, -10.0);
  EXPECT_LT(ll / 300.0, -4.0);
}

TEST(LogLikelihood, FarOutlierStaysFinite) {
  const auto m = model_1d({{0.5, 0, 1}, {0.5, 10, 1}});
  const double ll = log_likelihood(FeatureMatrix::from_column(std::vector<double>{1e4}), m);
  EXPECT_TRUE(std::isfinite(ll));
  EXPECT_NEAR(ll, std::log(0.5) - 0.5 * std::log(2 * std::numbers::pi) - 0.5 * (1e4 - 10) * (1e4 - 10), 1e-6);
}

TEST(EStep, SingleComponentIsAllOnes) {
  const auto r = e_step(FeatureMatrix::from_column(std::vector<double>{1, 2, 3}), model_1d({{1, 0, 1}}));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r(i, 0), 1.0);
}

TEST(EStep, SymmetricPair) {
  const auto m = model_1d({{0.5, -1, 1}, {0.5, 1, 1}});
  const auto r = e_step(FeatureMatrix::from_column(std::vector<double>{0.0, 1.0}), m);
  EXPECT_NEAR(r(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(r(0, 1), 0.5, 1e-15);
  const double ratio = std::exp(-2.0);
  EXPECT_NEAR(r(1, 0), ratio / (1 + ratio), 1e-14);
  EXPECT_NEAR(r(1, 1), 1 / (1 + ratio), 1e-14);
  EXPECT_NEAR(r(1, 0), 0.1192, 1e-4);
  EXPECT_NEAR(r(1, 1), 0.8808, 1e-4);
}

TEST(EStep, PropertyRowsSumToOne) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 100; ++t) {
    const std::size_t k = 1 + gen() % 5;
    std::vector<GaussianComponent> cs;
    for (std::size_t j = 0; j < k; ++j) {
      const double a = 0.01 + 10 * u(gen), b = 0.01 + 10 * u(gen);
      cs.push_back({1.0 / static_cast<double>(k), {100 * u(gen), 10 * u(gen)}, {a, 0.5 * (u(gen) - 0.5) * std::sqrt(a * b), b}});
    }
    const MixtureModel m(2, cs);
    FeatureMatrix x(50, 2);
    for (std::size_t i = 0; i < 50; ++i) {
      x(i, 0) = 200 * u(gen) - 50;
      x(i, 1) = 30 * u(gen) - 10;
    }
    const auto r = e_step(x, m);
    for (std::size_t i = 0; i < 50; ++i) {
      double s = 0;
      for (double v : r.row(i)) {
        ASSERT_GE(v, 0.0);
        s += v;
      }
      ASSERT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(MStep, SingleComponentIsSampleMoments) {
  const std::vector<double> x{1, 2, 4, 8, 16};
  Responsibilities r(5, 1);
  for (std::size_t i = 0; i < 5; ++i) r(i, 0) = 1;
  const auto m = m_step(FeatureMatrix::from_column(x), r);
  EXPECT_DOUBLE_EQ(m[0].mean[0], 6.2);
  EXPECT_NEAR(m[0].covariance.xx, 29.76 + 1e-6, 1e-12);
  EXPECT_EQ(m[0].weight, 1.0);
}

TEST(MStep, HardAssignmentsGiveSubsetMoments) {
  const std::vector<double> x{0, 2, 10, 14, 18};
  Responsibilities r(5, 2);
  for (std::size_t i = 0; i < 5; ++i) r(i, i < 2 ? 0 : 1) = 1;
  const auto m = m_step(FeatureMatrix::from_column(x), r, {0.0, CovarianceType::Full});
  EXPECT_DOUBLE_EQ(m[0].mean[0], 1);
  EXPECT_DOUBLE_EQ(m[0].covariance.xx, 1);
  EXPECT_DOUBLE_EQ(m[1].mean[0], 14);
  EXPECT_NEAR(m[1].covariance.xx, 32.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(m[0].weight, 0.4);
}

TEST(MStep, EvenSplitOfTwoPoints) {
  Responsibilities r(2, 2);
  for (std::size_t i = 0; i < 2; ++i) r(i, 0) = r(i, 1) = 0.5;
  const auto m = m_step(FeatureMatrix::from_column(std::vector<double>{-1, 1}), r);
  for (std::size_t j = 0; j < 2; ++j) {
    EXPECT_EQ(m[j].mean[0], 0.0);
    EXPECT_NEAR(m[j].covariance.xx, 1 + 1e-6, 1e-15);
    EXPECT_EQ(m[j].weight, 0.5);
  }
}

TEST(MStep, DiagonalDropsCorrelation) {
  FeatureMatrix x = FeatureMatrix::from_rows(2, {0, 0, 1, 1, 2, 2, 3, 3.5});
  Responsibilities r(4, 1);
  for (std::size_t i = 0; i < 4; ++i) r(i, 0) = 1;
  EXPECT_NE(m_step(x, r)[0].covariance.xy, 0.0);
  EXPECT_EQ(m_step(x, r, {1e-6, CovarianceType::Diagonal})[0].covariance.xy, 0.0);
}

TEST(MStep, EmptyComponentIsReported) {
  Responsibilities r(3, 2);
  for (std::size_t i = 0; i < 3; ++i) r(i, 0) = 1;
  EXPECT_EQ(kind_of([&] { m_step(FeatureMatrix::from_column(std::vector<double>{1, 2, 3}), r); }),
            ErrorKind::EmptyComponent);
}

TEST(MStep, PropertyWeightsSumToOneAndFloorHolds) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + gen() % 60, k = 1 + gen() % 6, dim = 1 + gen() % 2;
    FeatureMatrix x(n, dim);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < dim; ++d) x(i, d) = 400 * u(gen);
    Responsibilities r(n, k);
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t j = 0; j < k; ++j) s += (r(i, j) = 0.01 + u(gen));
      for (std::size_t j = 0; j < k; ++j) r(i, j) /= s;
    }
    const auto m = m_step(x, r);
    double total = 0;
    for (const auto& c : m.components()) {
      total += c.weight;
      const double tr = c.covariance.xx + (dim == 2 ? c.covariance.yy : 0.0);
      const double det = dim == 2 ? c.covariance.xx * c.covariance.yy - c.covariance.xy * c.covariance.xy
                                  : c.covariance.xx;
      const double small = dim == 2 ? det / (0.5 * tr + std::sqrt(0.25 * tr * tr - det)) : det;
      ASSERT_GE(small, 1e-6 * (1 - 1e-6));
    }
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(FitEm, SingleComponentClosedForm) {
  std::mt19937_64 gen(77);
  std::normal_distribution<double> z(0, 1);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> x(20 + gen() % 300);
    for (double& v : x) v = 200 + 30 * z(gen);
    long double mean = 0, var = 0;
    for (double v : x) mean += v;
    mean /= x.size();
    for (double v : x) var += (v - mean) * (v - mean);
    var /= x.size();
    FitConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(t) * 1000;
    const auto fit = fit_em(FeatureMatrix::from_column(x), 1, cfg);
    EXPECT_NEAR(fit.model[0].mean[0], static_cast<double>(mean), 1e-10);
    EXPECT_NEAR(fit.model[0].covariance.xx, static_cast<double>(var) + 1e-6, 1e-10);
    EXPECT_TRUE(fit.converged);
  }
}

TEST(FitEm, FewerPointsThanComponents) {
  EXPECT_EQ(kind_of([] { fit_em(FeatureMatrix::from_column(std::vector<double>{1, 2}), 3); }),
            ErrorKind::InsufficientData);
}

TEST(FitEm, ResultInvariants) {
  std::mt19937_64 gen(8);
  const FeatureMatrix data = draw(gen, 300, {100, 200, 300}, {10, 10, 10}, {0.3, 0.3, 0.4});
  FitConfig cfg;
  cfg.seed = 4;
  const auto fit = fit_em(data, 3, cfg);
  EXPECT_EQ(fit.n_points, 300u);
  EXPECT_EQ(fit.param_count, 8);
  EXPECT_EQ(fit.bic, -2.0 * fit.log_likelihood + 8 * std::log(300.0));
  EXPECT_NEAR(fit.log_likelihood, oracle::direct_log_likelihood(data, fit.model), 1e-9 * std::abs(fit.log_likelihood));
  for (std::size_t j = 1; j < 3; ++j) EXPECT_LT(fit.model[j - 1].mean[0], fit.model[j].mean[0]);
  for (std::size_t i = 0; i < 300; ++i) {
    double s = 0;
    for (double v : fit.responsibilities.row(i)) s += v;
    ASSERT_NEAR(s, 1.0, 1e-9);
  }
  EXPECT_EQ(fit.restarts_run, 10u);
}

TEST(FitEm, SameSeedSameFit) {
  std::mt19937_64 gen(10);
  const FeatureMatrix data = draw(gen, 200, {100, 200}, {15, 15}, {0.5, 0.5});
  FitConfig cfg;
  cfg.seed = 3;
  const auto a = fit_em(data, 2, cfg), b = fit_em(data, 2, cfg);
  EXPECT_EQ(a.model, b.model);
  EXPECT_EQ(a.log_likelihood_trace, b.log_likelihood_trace);
}

TEST(FitEm, RecoversCuCr25ModulusParameters) {
  int good = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto s = sample(kCuCr25Modulus, 600, seed);
    FitConfig cfg;
    cfg.seed = seed;
    const auto fit = fit_em(s.points, 3, cfg);
    bool ok = true;
    for (std::size_t j = 0; j < 3; ++j) {
      ok = ok && std::abs(fit.model[j].mean[0] / kCuCr25Modulus[j].mean[0] - 1) <= 0.05;
      ok = ok && std::abs(fit.model[j].weight - kCuCr25Modulus[j].weight) <= 0.05;
    }
    good += ok;
  }
  EXPECT_GE(good, 18);
}

TEST(FitEm, PropertyLikelihoodNeverDrops) {
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> z(0, 1);
  for (int run = 0; run < 150; ++run) {
    const std::size_t dim = 1 + run % 2, k = 1 + gen() % 4, n = 20 + gen() % 150;
    FeatureMatrix x(n, dim);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t d = 0; d < dim; ++d) x(i, d) = 50 * (i % 3) + (1 + 10 * u(gen)) * z(gen);
    FitConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(run);
    cfg.n_restarts = 1;
    FitResult fit = [&] {
      try {
        return fit_em(x, k, cfg);
      } catch (const Error&) {
        return FitResult{MixtureModel(1, {c1(1, 0, 1)})};
      }
    }();
    const auto& t = fit.log_likelihood_trace;
    for (std::size_t i = 1; i < t.size(); ++i) {
      if (std::find(fit.reseed_iterations.begin(), fit.reseed_iterations.end(), i) != fit.reseed_iterations.end())
        continue;
      ASSERT_GE(t[i], t[i - 1] - 1e-9) << "run " << run << " iteration " << i;
    }
  }
}

TEST(FitEm, PropertyScalingCarriesThrough) {
  std::mt19937_64 gen(14);
  for (double c : {0.01, 2.5, 40.0}) {
    const FeatureMatrix data = draw(gen, 250, {100, 160, 260}, {12, 20, 18}, {0.4, 0.3, 0.3});
    // A fixed iteration count from one start: every EM iterate is equivariant, the stopping point need not be.
    FitConfig base;
    base.seed = 5;
    base.n_restarts = 1;
    base.tolerance = 0.0;
    base.max_iterations = 300;
    FitConfig scaled = base;
    scaled.regularization = base.regularization * c * c;
    const auto a = fit_em(data, 3, base);
    const auto b = fit_em(data.scaled(c), 3, scaled);
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(b.model[j].mean[0], c * a.model[j].mean[0], 1e-6 * c * std::abs(a.model[j].mean[0]));
      EXPECT_NEAR(std::sqrt(b.model[j].covariance.xx), c * std::sqrt(a.model[j].covariance.xx),
                  1e-6 * c * std::sqrt(a.model[j].covariance.xx));
      EXPECT_NEAR(b.model[j].weight, a.model[j].weight, 1e-9);
    }
  }
}

TEST(Predict, ComponentAtItsMean) {
  const auto m = model_1d({{0.3, 0, 1}, {0.4, 50, 1}, {0.3, 100, 1}});
  EXPECT_EQ(predict(m, {50, 0}).component, 1u);
  EXPECT_EQ(predict(m, {100, 0}).component, 2u);
}

TEST(Predict, TieGoesToLowerIndex) {
  const auto m = model_1d({{0.5, 1, 1}, {0.5, -1, 1}});
  const auto p = predict(m, {0, 0});
  EXPECT_EQ(p.component, 0u);
  EXPECT_DOUBLE_EQ(p.posterior[0], p.posterior[1]);
}

TEST(Predict, CuCr60JointFitPoint) {
  const MixtureModel& m = find_preset("cucr60-2d")->model;
  const Point x{383, 3.0};
  std::size_t best = 0;
  double best_p = -1;
  for (std::size_t j = 0; j < m.size(); ++j) {
    const auto& c = m[j];
    const double p = c.weight * oracle::normal_pdf_2d(x[0], x[1], c.mean[0], c.mean[1], c.covariance.xx,
                                                      c.covariance.xy, c.covariance.yy);
    if (p > best_p) best_p = p, best = j;
  }
  EXPECT_DOUBLE_EQ(m[best].mean[0], 383.35);
  EXPECT_EQ(predict(m, x).component, best);
  EXPECT_DOUBLE_EQ(m[predict(m, x).component].mean[1], 3.02);
}

TEST(Sample, StandardNormalMoments) {
  const auto s = sample(model_1d({{1, 0, 1}}), 10000, 17);
  double mean = 0, var = 0;
  for (double v : s.points.values()) mean += v;
  mean /= 10000;
  for (double v : s.points.values()) var += (v - mean) * (v - mean);
  var /= 10000;
  EXPECT_NEAR(mean, 0, 0.05);
  EXPECT_NEAR(var, 1, 0.1);
}

TEST(Sample, OccupancyFollowsWeights) {
  const auto s = sample(kCuCr25Modulus, 10000, 18);
  std::vector<double> counts(3, 0);
  for (int c : s.components) counts[static_cast<std::size_t>(c)] += 1;
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(counts[j] / 10000, kCuCr25Modulus[j].weight, 0.02);
}

TEST(Sample, DeterministicAndEmptyAllowed) {
  EXPECT_EQ(sample(kCuCr25Modulus, 500, 3).points, sample(kCuCr25Modulus, 500, 3).points);
  EXPECT_NE(sample(kCuCr25Modulus, 500, 3).points, sample(kCuCr25Modulus, 500, 4).points);
  EXPECT_EQ(sample(kCuCr25Modulus, 0, 3).points.rows(), 0u);
}
