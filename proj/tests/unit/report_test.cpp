#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <json.hpp>

#include "nanophase/error.hpp"
#include "nanophase/report.hpp"
#include "nanophase/serialize.hpp"
#include "nanophase/svg.hpp"

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

MixtureModel model_1d(std::vector<std::array<double, 3>> wmv) {
  std::vector<GaussianComponent> cs;
  for (const auto& [w, m, v] : wmv) cs.push_back({w, {m, 0}, Covariance::scalar(v)});
  return MixtureModel(1, cs);
}

FitResult converged(MixtureModel m) {
  FitResult f{std::move(m)};
  f.converged = true;
  return f;
}

}  // namespace

TEST(PhaseTable, PureCopperSingleRow) {
  const auto t = phase_table(converged(model_1d({{1.0, 118.80, 9.45 * 9.45}})), "Cu");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0].label, "E_1");
  EXPECT_DOUBLE_EQ(t.rows[0].percentage, 100.0);
  EXPECT_NEAR(t.rows[0].std_dev[0], 9.45, 1e-12);
}

TEST(PhaseTable, PercentagesFromWeights) {
  const auto t = phase_table(converged(model_1d({{0.645, 145.55, 1}, {0.226, 226.50, 1}, {0.129, 337.02, 1}})), "CuCr25");
  ASSERT_EQ(t.rows.size(), 3u);
  EXPECT_NEAR(t.rows[0].percentage, 64.5, 1e-9);
  EXPECT_NEAR(t.rows[1].percentage, 22.6, 1e-9);
  EXPECT_NEAR(t.rows[2].percentage, 12.9, 1e-9);
}

TEST(PhaseTable, RowsSortedByModulus) {
  const auto t = phase_table(converged(model_1d({{0.2, 300, 1}, {0.5, 100, 1}, {0.3, 200, 1}})), "x");
  EXPECT_EQ(t.rows[0].mean[0], 100);
  EXPECT_EQ(t.rows[1].mean[0], 200);
  EXPECT_EQ(t.rows[2].mean[0], 300);
  EXPECT_EQ(t.rows[2].label, "E_3");
}

TEST(PhaseTable, RefusesUnconvergedFit) {
  FitResult f{model_1d({{1.0, 1, 1}})};
  EXPECT_EQ(kind_of([&] { phase_table(f, "x"); }), ErrorKind::Unconverged);
}

TEST(PhaseTable, PropertyPercentagesSumToHundred) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.001, 1);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = 1 + gen() % 9;
    std::vector<double> w(k);
    double s = 0;
    for (double& v : w) s += (v = u(gen));
    std::vector<std::array<double, 3>> cs;
    for (std::size_t j = 0; j < k; ++j) cs.push_back({w[j] / s, 500 * u(gen), 1 + u(gen)});
    cs.back()[0] = 1.0;
    for (std::size_t j = 0; j + 1 < k; ++j) cs.back()[0] -= cs[j][0];
    const auto table = phase_table(converged(model_1d(cs)), "x");
    double total = 0;
    for (std::size_t j = 0; j < k; ++j) {
      total += table.rows[j].percentage;
      if (j) ASSERT_LE(table.rows[j - 1].mean[0], table.rows[j].mean[0]);
    }
    ASSERT_NEAR(total, 100.0, 0.1);
  }
}

TEST(PhaseTable, JointFitLabels) {
  const MixtureModel m(2, {{0.4, {150, 1.2}, {1, 0, 1}}, {0.6, {300, 3.1}, {1, 0, 1}}});
  const auto t = phase_table(converged(m), "CuCr25", {"E", "H"});
  EXPECT_EQ(t.dim, 2u);
  EXPECT_EQ(t.rows[0].label, "P_1");
  EXPECT_EQ(t.rows[1].mean, (std::vector<double>{300, 3.1}));
}

TEST(VolumeFraction, PublishedWeights) {
  const auto a = volume_fraction(model_1d({{0.611, 144.91, 1}, {0.271, 220.92, 1}, {0.118, 340.52, 1}}), kPureCuModulus);
  EXPECT_NEAR(a.cr_fraction, 0.389, 1e-12);
  EXPECT_EQ(a.cu_component, 0u);
  const auto b = volume_fraction(model_1d({{0.645, 145.55, 1}, {0.226, 226.50, 1}, {0.129, 337.02, 1}}), kPureCuModulus);
  EXPECT_NEAR(b.cr_fraction, 0.355, 1e-12);
  EXPECT_DOUBLE_EQ(volume_fraction(model_1d({{0.5, 120, 1}, {0.5, 290, 1}}), kPureCuModulus).cr_fraction, 0.5);
}

TEST(VolumeFraction, NearestComponentIsCopper) {
  const auto v = volume_fraction(model_1d({{0.3, 300, 1}, {0.7, 125, 1}}), kPureCuModulus);
  EXPECT_EQ(v.cu_component, 1u);
  EXPECT_NEAR(v.cu_fraction, 0.7, 1e-15);
}

TEST(VolumeFraction, PropertyFractionsComplement) {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> u(0.01, 1);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = 2 + gen() % 6;
    std::vector<std::array<double, 3>> cs;
    double s = 0;
    for (std::size_t j = 0; j < k; ++j) s += (cs.emplace_back(std::array<double, 3>{u(gen), 100 + 300 * u(gen), 1}))[0];
    for (auto& c : cs) c[0] /= s;
    double rest = 1.0;
    for (std::size_t j = 0; j + 1 < k; ++j) rest -= cs[j][0];
    cs.back()[0] = rest;
    const auto v = volume_fraction(model_1d(cs), kPureCuModulus);
    ASSERT_EQ(v.cr_fraction + v.cu_fraction, 1.0);
  }
}

TEST(VolumeFraction, SingleComponentUndefined) {
  EXPECT_EQ(kind_of([] { volume_fraction(model_1d({{1, 120, 1}}), kPureCuModulus); }), ErrorKind::UndefinedFraction);
}

TEST(PdfOverlay, SingleComponentCurveIsMixture) {
  const auto m = model_1d({{1, 10, 4}});
  const std::vector<double> x{6, 8, 9, 10, 10, 11, 12, 14};
  const auto o = pdf_overlay(x, m);
  ASSERT_EQ(o.grid.size(), kPdfGridPoints);
  ASSERT_EQ(o.component_pdfs.size(), 1u);
  EXPECT_EQ(o.component_pdfs[0], o.mixture_pdf);
  EXPECT_EQ(o.histogram.size(), kDefaultHistogramBins);
  std::size_t count = 0;
  double area = 0;
  for (const auto& b : o.histogram) {
    count += b.count;
    area += b.density * (b.hi - b.lo);
  }
  EXPECT_EQ(count, x.size());
  EXPECT_NEAR(area, 1.0, 1e-12);
  EXPECT_LE(o.grid.front(), 6.0 - 3 * std::sqrt(4.0) + 1e-9);
}

TEST(PdfOverlay, ComponentsAddUpToMixture) {
  const auto m = model_1d({{0.3, 0, 1}, {0.7, 5, 2}});
  const auto o = pdf_overlay(std::vector<double>{-1, 0, 4, 5, 6}, m, 7);
  EXPECT_EQ(o.histogram.size(), 7u);
  for (std::size_t i = 0; i < o.grid.size(); ++i)
    ASSERT_NEAR(o.component_pdfs[0][i] + o.component_pdfs[1][i], o.mixture_pdf[i], 1e-15);
}

TEST(Ellipse, IdentityIsUnitCircle) {
  const MixtureModel m(2, {{1, {3, -2}, {1, 0, 1}}});
  const std::vector<double> levels{1};
  const auto set = ellipse_isolines(m, levels);
  ASSERT_EQ(set.isolines.size(), 1u);
  EXPECT_EQ(set.isolines[0].points.size(), kEllipsePoints);
  for (const auto& p : set.isolines[0].points) ASSERT_NEAR(std::hypot(p[0] - 3, p[1] + 2), 1.0, 1e-9);
}

TEST(Ellipse, DiagonalAndCorrelatedAxes) {
  const auto d = ellipse_axes({4, 0, 1});
  EXPECT_NEAR(d.major, 2, 1e-12);
  EXPECT_NEAR(d.minor, 1, 1e-12);
  EXPECT_NEAR(d.angle, 0, 1e-12);
  const auto c = ellipse_axes({2, 1, 2});
  EXPECT_NEAR(c.major, std::sqrt(3.0), 1e-12);
  EXPECT_NEAR(c.minor, 1, 1e-12);
  EXPECT_NEAR(c.angle, std::numbers::pi / 4, 1e-12);
  EXPECT_EQ(kind_of([] { ellipse_axes({1, 2, 1}); }), ErrorKind::NumericalDegeneracy);
}

TEST(Ellipse, PointsLieOnMahalanobisLevel) {
  const GaussianComponent c{1, {100, 2}, {400, 3, 0.09}};
  const MixtureModel m(2, {c});
  const std::vector<double> levels{1, 2};
  const auto set = ellipse_isolines(m, levels);
  const double det = c.covariance.xx * c.covariance.yy - c.covariance.xy * c.covariance.xy;
  for (const auto& iso : set.isolines)
    for (const auto& p : iso.points) {
      const double dx = p[0] - 100, dy = p[1] - 2;
      const double q = (c.covariance.yy * dx * dx - 2 * c.covariance.xy * dx * dy + c.covariance.xx * dy * dy) / det;
      ASSERT_NEAR(std::sqrt(q), iso.level, 1e-9);
    }
}

TEST(Serialize, ShortestRoundTripNumbers) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e21, 145.55, 0.0})
    EXPECT_EQ(std::stod(format_number(v)), v) << format_number(v);
  EXPECT_EQ(format_number(0.1), "0.1");
}

TEST(Serialize, PhaseTableIsStructured) {
  const auto t = phase_table(converged(model_1d({{0.645, 145.55, 4}, {0.355, 300, 9}})), "CuCr25");
  const auto j = nlohmann::json::parse(to_structured(t));
  EXPECT_EQ(j["material"], "CuCr25");
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(to_structured(t), to_structured(t));
  EXPECT_NE(phase_table_text(t).find("E_2"), std::string::npos);
}

TEST(Svg, RendersWellFormedDocuments) {
  const auto m = model_1d({{0.3, 0, 1}, {0.7, 5, 2}});
  const std::string s = svg_pdf_overlay(pdf_overlay(std::vector<double>{-1, 0, 4, 5, 6}, m), "E (GPa)");
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}
