#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace nanophase {

inline constexpr std::size_t kMaxDim = 2;

/// A point in feature space. Only the first `dim` coordinates are meaningful.
using Point = std::array<double, kMaxDim>;

/// Row-major N x D table of feature values, D in {1, 2}.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t dim);

  /// Takes ownership of row-major values; values.size() must be a multiple of dim.
  static FeatureMatrix from_rows(std::size_t dim, std::vector<double> values);
  static FeatureMatrix from_column(std::span<const double> column);

  std::size_t rows() const noexcept { return dim_ == 0 ? 0 : values_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  bool empty() const noexcept { return values_.empty(); }

  double operator()(std::size_t row, std::size_t col) const { return values_[row * dim_ + col]; }
  double& operator()(std::size_t row, std::size_t col) { return values_[row * dim_ + col]; }

  Point point(std::size_t row) const {
    Point p{0.0, 0.0};
    for (std::size_t d = 0; d < dim_; ++d) p[d] = values_[row * dim_ + d];
    return p;
  }

  std::span<const double> values() const noexcept { return values_; }

  /// Rows at the given indices, in the given order.
  FeatureMatrix select(std::span<const std::size_t> indices) const;
  FeatureMatrix scaled(double factor) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t dim_ = 1;
  std::vector<double> values_;
};

}  // namespace nanophase
