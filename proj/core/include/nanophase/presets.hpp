#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nanophase/ingest.hpp"
#include "nanophase/mixture.hpp"

namespace nanophase {

/// A published mixture fit used to generate synthetic indentation data.
struct MixturePreset {
  std::string name;              // "cucr25-1d-E", "cucr60-2d", ...
  std::string material;          // "CuCr25"
  std::string filter;            // matching filter_preset name
  std::vector<Feature> features;  // modelled features, column order of the model
  MixtureModel model;
  /// Where the numbers come from.
  std::string provenance;
  /// For 1D presets: the preset that fills the other feature's column.
  std::string companion;
};

const std::vector<MixturePreset>& mixture_presets();

/// nullptr when no preset has that name.
const MixturePreset* find_preset(std::string_view name);

struct SynthOptions {
  std::size_t n = 500;
  std::uint64_t seed = 0;
  /// Fraction of rows pushed outside the preset's cleaning filter.
  double outlier_fraction = 0.0;
  double depth_mean = 1000.0;  // nm
  double depth_sd = 50.0;
  double grid_spacing = 10.0;  // um
  std::string source_id = "synthetic";
};

struct SyntheticData {
  Dataset dataset;
  /// Generating component of the modelled feature(s), per record.
  std::vector<int> components;
  std::vector<bool> planted_outlier;
};

/// Draws n indentation records from a preset on a square indent grid.
SyntheticData synthesize(const MixturePreset& preset, const SynthOptions& options);

}  // namespace nanophase
