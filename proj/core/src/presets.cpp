#include "nanophase/presets.hpp"

#include <algorithm>
#include <cmath>

#include "nanophase/error.hpp"
#include "nanophase/random.hpp"

namespace nanophase {
namespace {

struct Phase1D {
  double mean, sd, weight;
};

struct Phase2D {
  double e_mean, h_mean, e_sd, h_sd, weight;
};

MixtureModel model_1d(std::initializer_list<Phase1D> phases) {
  double total = 0.0;
  for (const auto& p : phases) total += p.weight;
  std::vector<GaussianComponent> comps;
  for (const auto& p : phases) {
    comps.push_back({p.weight / total, Point{p.mean, 0.0}, Covariance::scalar(p.sd * p.sd)});
  }
  return MixtureModel(1, std::move(comps));
}

// Joint presets carry diagonal covariances: the published joint fits list means and
// weights only, so per-feature spreads come from the 1D fits of the same material.
MixtureModel model_2d(std::initializer_list<Phase2D> phases) {
  double total = 0.0;
  for (const auto& p : phases) total += p.weight;
  std::vector<GaussianComponent> comps;
  for (const auto& p : phases) {
    comps.push_back({p.weight / total, Point{p.e_mean, p.h_mean}, Covariance{p.e_sd * p.e_sd, 0.0, p.h_sd * p.h_sd}});
  }
  return MixtureModel(2, std::move(comps));
}

std::vector<MixturePreset> build_presets() {
  const std::vector<Feature> e{Feature::Modulus};
  const std::vector<Feature> h{Feature::Hardness};
  const std::vector<Feature> eh{Feature::Modulus, Feature::Hardness};
  std::vector<MixturePreset> p;

  p.push_back({"cu-1d-E", "Cu", "cu", e, model_1d({{118.80, 9.45, 1.0}}),
               "reported 1D fit, pure Cu modulus at 1 um depth", "cu-1d-H"});
  p.push_back({"cu-1d-H", "Cu", "cu", h, model_1d({{0.91, 0.06, 1.0}}),
               "reported 1D fit, pure Cu hardness at 1 um depth", "cu-1d-E"});
  p.push_back({"cr-1d-E", "Cr", "cr", e, model_1d({{371.24, 10.54, 1.0}}),
               "reported 1D fit, pure Cr modulus at 1 um depth", "cr-1d-H"});
  p.push_back({"cr-1d-H", "Cr", "cr", h, model_1d({{3.21, 0.10, 1.0}}),
               "reported 1D fit, pure Cr hardness at 1 um depth", "cr-1d-E"});

  p.push_back({"cucr25-1d-E", "CuCr25", "cucr25", e,
               model_1d({{145.55, 14.12, 0.645}, {226.50, 38.42, 0.226}, {337.02, 31.69, 0.129}}),
               "reported 1D fit, CuCr25 modulus at 1 um depth (513 indents)", "cucr25-1d-H"});
  p.push_back({"cucr25-1d-H", "CuCr25", "cucr25", h,
               model_1d({{1.14, 0.09, 0.501}, {1.47, 0.23, 0.226}, {2.92, 0.62, 0.273}}),
               "reported 1D fit, CuCr25 hardness at 1 um depth (513 indents)", "cucr25-1d-E"});
  p.push_back({"cucr60-1d-E", "CuCr60", "cucr60", e,
               model_1d({{177.35, 24.17, 0.522}, {272.17, 29.75, 0.224}, {379.32, 34.34, 0.254}}),
               "reported 1D fit, CuCr60 modulus at 1 um depth (366 indents)", "cucr60-1d-H"});
  p.push_back({"cucr60-1d-H", "CuCr60", "cucr60", h, model_1d({{1.45, 0.22, 0.500}, {2.96, 0.56, 0.500}}),
               "reported 1D fit, CuCr60 hardness at 1 um depth (366 indents)", "cucr60-1d-E"});

  p.push_back({"cucr25-2d", "CuCr25", "cucr25", eh,
               model_2d({{144.91, 1.17, 14.12, 0.09, 0.611},
                         {220.92, 2.25, 38.42, 0.23, 0.271},
                         {340.52, 3.18, 31.69, 0.62, 0.118}}),
               "reported joint (E, H) fit, CuCr25 means and weights; spreads from the 1D fits", ""});
  p.push_back({"cucr60-2d", "CuCr60", "cucr60", eh,
               model_2d({{172.32, 1.42, 24.17, 0.22, 0.434},
                         {262.63, 2.67, 29.75, 0.56, 0.346},
                         {383.35, 3.02, 34.34, 0.56, 0.220}}),
               "reported joint (E, H) fit, CuCr60 means and weights; spreads from the 1D fits", ""});

  p.push_back({"cucr60-merged-1d-E", "CuCr60", "cucr60", e,
               model_1d({{175.12, 24.10, 0.460}, {269.55, 34.10, 0.285}, {373.37, 37.46, 0.255}}),
               "reported 1D fit, merged CuCr60 indent areas, modulus", "cucr60-merged-1d-H"});
  p.push_back({"cucr60-merged-1d-H", "CuCr60", "cucr60", h, model_1d({{1.45, 0.22, 0.428}, {2.98, 0.65, 0.572}}),
               "reported 1D fit, merged CuCr60 indent areas, hardness", "cucr60-merged-1d-E"});
  p.push_back({"cucr60-merged-2d", "CuCr60", "cucr60", eh,
               model_2d({{170.49, 1.42, 24.10, 0.22, 0.385},
                         {264.73, 2.78, 34.10, 0.65, 0.404},
                         {379.28, 3.70, 37.46, 0.65, 0.211}}),
               "reported joint (E, H) fit, merged CuCr60 indent areas; spreads from the 1D fits", ""});
  return p;
}

}  // namespace

const std::vector<MixturePreset>& mixture_presets() {
  static const std::vector<MixturePreset> presets = build_presets();
  return presets;
}

const MixturePreset* find_preset(std::string_view name) {
  const auto& all = mixture_presets();
  const auto it = std::find_if(all.begin(), all.end(), [&](const MixturePreset& p) { return p.name == name; });
  return it == all.end() ? nullptr : &*it;
}

SyntheticData synthesize(const MixturePreset& preset, const SynthOptions& options) {
  if (options.n == 0) throw Error(ErrorKind::EmptyInput, "synthetic sample size must be positive");
  if (options.outlier_fraction < 0.0 || options.outlier_fraction > 1.0) {
    throw Error(ErrorKind::InputFormat, "outlier fraction must lie in [0, 1]");
  }
  const std::size_t n = options.n;
  const MixtureSample primary = sample(preset.model, n, derive_seed(options.seed, {1}));

  std::vector<double> modulus(n), hardness(n);
  if (preset.features.size() == 2) {
    for (std::size_t i = 0; i < n; ++i) {
      modulus[i] = primary.points(i, 0);
      hardness[i] = primary.points(i, 1);
    }
  } else {
    const MixturePreset* other = find_preset(preset.companion);
    if (other == nullptr) throw Error(ErrorKind::InputFormat, "preset " + preset.name + " has no companion");
    const MixtureSample second = sample(other->model, n, derive_seed(options.seed, {2}));
    const bool is_modulus = preset.features.front() == Feature::Modulus;
    for (std::size_t i = 0; i < n; ++i) {
      modulus[i] = is_modulus ? primary.points(i, 0) : second.points(i, 0);
      hardness[i] = is_modulus ? second.points(i, 0) : primary.points(i, 0);
    }
  }

  Rng rng(derive_seed(options.seed, {3}));
  const auto columns = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  std::vector<IndentRecord> records(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& r = records[i];
    r.modulus = modulus[i];
    r.hardness = hardness[i];
    r.depth = options.depth_mean + options.depth_sd * rng.normal();
    r.pos_x = options.grid_spacing * static_cast<double>(i % columns);
    r.pos_y = options.grid_spacing * static_cast<double>(i / columns);
    r.source_id = options.source_id;
  }

  SyntheticData out;
  out.planted_outlier.assign(n, false);
  const auto n_outliers = static_cast<std::size_t>(std::llround(options.outlier_fraction * static_cast<double>(n)));
  if (n_outliers > 0) {
    const auto filter = filter_preset(preset.filter).value_or(CleaningFilter{800, 1200, 1e-6, 1e4, 1e-6, 1e3});
    const auto order = rng.permutation(n);
    for (std::size_t o = 0; o < n_outliers; ++o) {
      auto& r = records[order[o]];
      switch (rng.below(3)) {
        case 0:  // failed or shallow indent
          r.depth = rng.uniform() < 0.5 ? filter.depth_min - 50.0 - 400.0 * rng.uniform()
                                        : filter.depth_max + 50.0 + 800.0 * rng.uniform();
          break;
        case 1:  // unrealistically stiff
          r.modulus = filter.e_max * (1.1 + 0.5 * rng.uniform());
          break;
        default:  // unrealistically hard
          r.hardness = filter.h_max * (1.1 + 0.5 * rng.uniform());
          break;
      }
      out.planted_outlier[order[o]] = true;
    }
  }
  out.components = primary.components;
  out.dataset = Dataset(std::move(records), n, std::nullopt, {options.source_id});
  return out;
}

}  // namespace nanophase
