#include <algorithm>
#include <unordered_map>
#include <vector>

#include "nanophase/error.hpp"
#include "nanophase/stats.hpp"

namespace nanophase {
namespace {

__extension__ typedef __int128 i128;

i128 pairs(std::size_t count) { return static_cast<i128>(count) * (static_cast<i128>(count) - 1) / 2; }

// Maps arbitrary label values onto 0..m-1 in order of first appearance.
std::vector<std::size_t> compact(std::span<const int> labels, std::size_t& distinct) {
  std::unordered_map<int, std::size_t> ids;
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (int l : labels) out.push_back(ids.try_emplace(l, ids.size()).first->second);
  distinct = ids.size();
  return out;
}

}  // namespace

double adjusted_rand(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::InputFormat, "labelings differ in length");
  if (a.size() < 2) throw Error(ErrorKind::InputFormat, "adjusted Rand index needs at least two points");

  std::size_t ka = 0, kb = 0;
  const auto ca = compact(a, ka);
  const auto cb = compact(b, kb);
  std::vector<std::size_t> table(ka * kb, 0), rows(ka, 0), cols(kb, 0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    ++table[ca[i] * kb + cb[i]];
    ++rows[ca[i]];
    ++cols[cb[i]];
  }

  i128 index = 0, sum_a = 0, sum_b = 0;
  for (std::size_t v : table) index += pairs(v);
  for (std::size_t v : rows) sum_a += pairs(v);
  for (std::size_t v : cols) sum_b += pairs(v);
  const i128 total = pairs(a.size());

  // (index - E) / (max - E) with E = sum_a sum_b / total and max = (sum_a + sum_b) / 2,
  // multiplied through by 2 total so only the final division rounds.
  const i128 numerator = 2 * (index * total - sum_a * sum_b);
  const i128 denominator = (sum_a + sum_b) * total - 2 * sum_a * sum_b;
  // Zero only for identical trivial partitions (all-in-one or all-singletons).
  if (denominator == 0) return 1.0;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

double adjusted_rand(const Labeling& a, const Labeling& b) { return adjusted_rand(a.labels, b.labels); }

}  // namespace nanophase
