#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nanophase/feature_matrix.hpp"

namespace nanophase {

enum class Feature { Modulus, Hardness };

std::string_view to_string(Feature feature) noexcept;

/// One indent: modulus and hardness in GPa, depth in nm, grid position in um.
struct IndentRecord {
  double modulus = 0.0;
  double hardness = 0.0;
  double depth = 0.0;
  double pos_x = 0.0;
  double pos_y = 0.0;
  std::string source_id;

  friend bool operator==(const IndentRecord&, const IndentRecord&) = default;
};

/// Closed acceptance windows for depth, modulus and hardness.
struct CleaningFilter {
  double depth_min = 0.0;
  double depth_max = 0.0;
  double e_min = 0.0;
  double e_max = 0.0;
  double h_min = 0.0;
  double h_max = 0.0;

  /// Throws InputFormat unless every min is strictly below its max.
  void validate() const;
  bool accepts(const IndentRecord& record) const noexcept;

  friend bool operator==(const CleaningFilter&, const CleaningFilter&) = default;
};

/// Filter presets: "cucr25", "cucr60", "cu", "cr".
std::optional<CleaningFilter> filter_preset(std::string_view name);
std::vector<std::string> filter_preset_names();

/// Immutable collection of indentation records plus its cleaning provenance.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<IndentRecord> records, std::size_t n_raw,
          std::optional<CleaningFilter> filter_applied, std::vector<std::string> sources);

  const std::vector<IndentRecord>& records() const noexcept { return records_; }
  std::size_t n_raw() const noexcept { return n_raw_; }
  std::size_t n_clean() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  /// n_clean / n_raw, or 0 for an empty raw set.
  double retention() const noexcept;
  const std::optional<CleaningFilter>& filter_applied() const noexcept { return filter_; }
  const std::vector<std::string>& sources() const noexcept { return sources_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<IndentRecord> records_;
  std::size_t n_raw_ = 0;
  std::optional<CleaningFilter> filter_;
  std::vector<std::string> sources_;
};

/// Column contract for delimited text input and output.
struct FormatDescriptor {
  std::string modulus_column = "E_GPa";
  std::string hardness_column = "H_GPa";
  std::string depth_column = "depth_nm";
  std::string x_column = "x_um";
  std::string y_column = "y_um";
  /// Read when present; otherwise every row gets default_source.
  std::string source_column = "source_id";
  std::string default_source = "input";
  char delimiter = ',';
};

struct RowRejections {
  static constexpr std::size_t kMaxReported = 10;

  std::size_t count = 0;
  /// 1-based line numbers of the first kMaxReported rejected rows.
  std::vector<std::size_t> first_lines;
};

struct ParseResult {
  Dataset dataset;
  RowRejections rejections;
};

ParseResult parse_records(std::istream& in, const FormatDescriptor& format = {});
ParseResult parse_records(std::string_view text, const FormatDescriptor& format = {});

/// Keeps records inside every window of the filter; throws AllFilteredError if none survive.
Dataset clean(const Dataset& dataset, const CleaningFilter& filter);

/// Concatenates datasets. All must carry the same filter, or none.
Dataset merge(std::span<const Dataset> datasets);

std::vector<double> marginal(const Dataset& dataset, Feature feature);

/// One column per requested feature (one or two), rows in record order.
FeatureMatrix feature_table(const Dataset& dataset, std::span<const Feature> features);

/// Writes the records with the descriptor's columns plus the source column.
void write_csv(std::ostream& out, const Dataset& dataset, const FormatDescriptor& format = {});

}  // namespace nanophase
