#include "nanophase/feature_matrix.hpp"

#include "nanophase/error.hpp"

namespace nanophase {

FeatureMatrix::FeatureMatrix(std::size_t rows, std::size_t dim) : dim_(dim), values_(rows * dim, 0.0) {
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorKind::InputFormat, "feature dimension must be 1 or 2");
}

FeatureMatrix FeatureMatrix::from_rows(std::size_t dim, std::vector<double> values) {
  if (dim < 1 || dim > kMaxDim) throw Error(ErrorKind::InputFormat, "feature dimension must be 1 or 2");
  if (values.size() % dim != 0) throw Error(ErrorKind::InputFormat, "value count is not a multiple of the dimension");
  FeatureMatrix m;
  m.dim_ = dim;
  m.values_ = std::move(values);
  return m;
}

FeatureMatrix FeatureMatrix::from_column(std::span<const double> column) {
  return from_rows(1, std::vector<double>(column.begin(), column.end()));
}

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> indices) const {
  std::vector<double> out;
  out.reserve(indices.size() * dim_);
  for (std::size_t i : indices)
    for (std::size_t d = 0; d < dim_; ++d) out.push_back(values_[i * dim_ + d]);
  return from_rows(dim_, std::move(out));
}

FeatureMatrix FeatureMatrix::scaled(double factor) const {
  FeatureMatrix m = *this;
  for (double& v : m.values_) v *= factor;
  return m;
}

}  // namespace nanophase
