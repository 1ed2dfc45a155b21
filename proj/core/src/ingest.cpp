#include "nanophase/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "nanophase/error.hpp"

namespace nanophase {
namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return fields;
}

std::optional<double> parse_number(std::string_view field) {
  if (field.empty()) return std::nullopt;
  if (field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

std::optional<std::size_t> find_column(const std::vector<std::string_view>& header, std::string_view name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) return std::nullopt;
  return static_cast<std::size_t>(std::distance(header.begin(), it));
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

std::vector<std::string> unique_sources(const std::vector<IndentRecord>& records) {
  std::vector<std::string> sources;
  for (const auto& r : records)
    if (std::find(sources.begin(), sources.end(), r.source_id) == sources.end()) sources.push_back(r.source_id);
  return sources;
}

}  // namespace

std::string_view to_string(Feature feature) noexcept {
  return feature == Feature::Modulus ? "E" : "H";
}

void CleaningFilter::validate() const {
  const auto check = [](double lo, double hi, const char* name) {
    if (!(lo < hi)) throw Error(ErrorKind::InputFormat, std::string("filter ") + name + " min must be below max");
  };
  check(depth_min, depth_max, "depth");
  check(e_min, e_max, "modulus");
  check(h_min, h_max, "hardness");
}

bool CleaningFilter::accepts(const IndentRecord& r) const noexcept {
  return r.depth >= depth_min && r.depth <= depth_max && r.modulus >= e_min && r.modulus <= e_max &&
         r.hardness >= h_min && r.hardness <= h_max;
}

std::optional<CleaningFilter> filter_preset(std::string_view name) {
  // Pure metals get no published E/H window; wide positive bounds keep the depth window only.
  if (name == "cucr25") return CleaningFilter{800.0, 1200.0, 100.0, 400.0, 0.8, 4.5};
  if (name == "cucr60") return CleaningFilter{800.0, 1200.0, 100.0, 500.0, 1.0, 5.0};
  if (name == "cu" || name == "cr") return CleaningFilter{800.0, 1200.0, 1e-6, 1e4, 1e-6, 1e3};
  return std::nullopt;
}

std::vector<std::string> filter_preset_names() { return {"cucr25", "cucr60", "cu", "cr"}; }

Dataset::Dataset(std::vector<IndentRecord> records, std::size_t n_raw, std::optional<CleaningFilter> filter_applied,
                 std::vector<std::string> sources)
    : records_(std::move(records)), n_raw_(n_raw), filter_(std::move(filter_applied)), sources_(std::move(sources)) {
  if (records_.size() > n_raw_) throw Error(ErrorKind::InputFormat, "dataset has more records than raw rows");
}

double Dataset::retention() const noexcept {
  return n_raw_ == 0 ? 0.0 : static_cast<double>(records_.size()) / static_cast<double>(n_raw_);
}

ParseResult parse_records(std::istream& in, const FormatDescriptor& format) {
  std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_records(std::string_view(text), format);
}

ParseResult parse_records(std::string_view text, const FormatDescriptor& format) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  std::vector<std::pair<std::size_t, std::string_view>> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(start, end - start);
    if (!trim(line).empty()) lines.emplace_back(line_no, line);
    start = end + 1;
  }
  if (lines.empty()) throw Error(ErrorKind::EmptyInput, "input is empty");

  const auto header = split(lines.front().second, format.delimiter);
  const auto require = [&](const std::string& name) {
    auto col = find_column(header, name);
    if (!col) throw Error(ErrorKind::InputFormat, "missing column '" + name + "'");
    return *col;
  };
  const std::size_t e_col = require(format.modulus_column);
  const std::size_t h_col = require(format.hardness_column);
  const std::size_t d_col = require(format.depth_column);
  const auto x_col = find_column(header, format.x_column);
  const auto y_col = find_column(header, format.y_column);
  const auto s_col = format.source_column.empty() ? std::nullopt : find_column(header, format.source_column);

  if (lines.size() == 1) throw Error(ErrorKind::EmptyInput, "input has a header but no data rows");

  std::vector<IndentRecord> records;
  records.reserve(lines.size() - 1);
  RowRejections rejections;
  const auto reject = [&](std::size_t n) {
    ++rejections.count;
    if (rejections.first_lines.size() < RowRejections::kMaxReported) rejections.first_lines.push_back(n);
  };

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto [number, line] = lines[li];
    const auto fields = split(line, format.delimiter);
    const auto field = [&](std::size_t col) -> std::string_view {
      return col < fields.size() ? fields[col] : std::string_view{};
    };
    const auto e = parse_number(field(e_col));
    const auto h = parse_number(field(h_col));
    const auto d = parse_number(field(d_col));
    if (!e || !h || !d) {
      reject(number);
      continue;
    }
    IndentRecord r{*e, *h, *d, 0.0, 0.0, format.default_source};
    bool ok = true;
    for (auto [col, target] : {std::pair{x_col, &r.pos_x}, std::pair{y_col, &r.pos_y}}) {
      if (!col || field(*col).empty()) continue;
      const auto v = parse_number(field(*col));
      if (!v) ok = false;
      else *target = *v;
    }
    if (!ok) {
      reject(number);
      continue;
    }
    if (s_col && !field(*s_col).empty()) r.source_id = std::string(field(*s_col));
    records.push_back(std::move(r));
  }

  if (records.empty()) {
    throw Error(ErrorKind::EmptyInput,
                "every data row was rejected (" + std::to_string(rejections.count) + " rows)");
  }
  const std::size_t n = records.size();
  auto sources = unique_sources(records);
  return ParseResult{Dataset(std::move(records), n, std::nullopt, std::move(sources)), std::move(rejections)};
}

Dataset clean(const Dataset& dataset, const CleaningFilter& filter) {
  filter.validate();
  if (dataset.n_raw() == 0) throw Error(ErrorKind::EmptyInput, "cannot clean an empty dataset");
  std::vector<IndentRecord> kept;
  kept.reserve(dataset.n_clean());
  std::copy_if(dataset.records().begin(), dataset.records().end(), std::back_inserter(kept),
               [&](const IndentRecord& r) { return filter.accepts(r); });
  if (kept.empty()) throw AllFilteredError("filter removed every record (retention 0)", 0.0);
  return Dataset(std::move(kept), dataset.n_raw(), filter, dataset.sources());
}

Dataset merge(std::span<const Dataset> datasets) {
  if (datasets.empty()) throw Error(ErrorKind::EmptyInput, "nothing to merge");
  const auto& filter = datasets.front().filter_applied();
  std::vector<IndentRecord> records;
  std::size_t n_raw = 0;
  std::vector<std::string> sources;
  for (const auto& ds : datasets) {
    if (ds.filter_applied() != filter) {
      throw Error(ErrorKind::IncompatibleMerge, "datasets were cleaned with different filters");
    }
    records.insert(records.end(), ds.records().begin(), ds.records().end());
    n_raw += ds.n_raw();
    for (const auto& s : ds.sources())
      if (std::find(sources.begin(), sources.end(), s) == sources.end()) sources.push_back(s);
  }
  return Dataset(std::move(records), n_raw, filter, std::move(sources));
}

std::vector<double> marginal(const Dataset& dataset, Feature feature) {
  if (dataset.empty()) throw Error(ErrorKind::EmptyInput, "dataset is empty");
  std::vector<double> out;
  out.reserve(dataset.n_clean());
  for (const auto& r : dataset.records()) out.push_back(feature == Feature::Modulus ? r.modulus : r.hardness);
  return out;
}

FeatureMatrix feature_table(const Dataset& dataset, std::span<const Feature> features) {
  if (dataset.empty()) throw Error(ErrorKind::EmptyInput, "dataset is empty");
  if (features.empty() || features.size() > kMaxDim) {
    throw Error(ErrorKind::InputFormat, "feature table needs one or two features");
  }
  std::vector<double> values;
  values.reserve(dataset.n_clean() * features.size());
  for (const auto& r : dataset.records())
    for (Feature f : features) values.push_back(f == Feature::Modulus ? r.modulus : r.hardness);
  return FeatureMatrix::from_rows(features.size(), std::move(values));
}

void write_csv(std::ostream& out, const Dataset& dataset, const FormatDescriptor& format) {
  const char sep = format.delimiter;
  std::string text;
  text += format.modulus_column + sep + format.hardness_column + sep + format.depth_column + sep + format.x_column +
          sep + format.y_column + sep + format.source_column + '\n';
  for (const auto& r : dataset.records()) {
    for (double v : {r.modulus, r.hardness, r.depth, r.pos_x, r.pos_y}) {
      append_number(text, v);
      text += sep;
    }
    text += r.source_id;
    text += '\n';
  }
  out << text;
}

}  // namespace nanophase
