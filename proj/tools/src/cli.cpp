#include "nanophase/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nanophase/error.hpp"
#include "nanophase/ingest.hpp"
#include "nanophase/mixture.hpp"
#include "nanophase/model_select.hpp"
#include "nanophase/presets.hpp"
#include "nanophase/report.hpp"
#include "nanophase/serialize.hpp"
#include "nanophase/svg.hpp"
#include "nanophase/validation.hpp"
#include "nanophase/version.hpp"

namespace nanophase::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct Options {
  std::string command;
  std::vector<std::string> inputs;
  std::string preset;
  std::string feature;
  std::size_t k = 3;
  std::size_t report_k = 0;  // 0: choose by BIC
  std::size_t k_min = 1;
  std::size_t k_max = 9;
  std::vector<std::size_t> folds{2, 3, 4, 5, 6, 7};
  std::vector<std::size_t> k_list{2, 3, 4, 5};
  std::uint64_t seed = 0;
  std::size_t step = 50;
  std::string out = ".";
  std::string format = "text";
  std::size_t n = 500;
  double outliers = 0.0;
  std::string algorithm = "gmm";
  double cu_ref = kPureCuModulus;
  std::size_t restarts = 10;
  std::size_t bins = kDefaultHistogramBins;
  std::vector<double> levels{1.0, 2.0};
  std::size_t threads = 0;
};

// Flags that shape each command's output. The manifest records exactly these, so a
// replay reproduces the run; --out, --format and --threads do not change the artifacts.
const std::map<std::string, std::vector<std::string>> kCommandFlags{
    {"synth", {"--preset", "--n", "--seed", "--outliers"}},
    {"clean", {"--input", "--preset"}},
    {"fit", {"--input", "--preset", "--feature", "--k", "--seed", "--restarts"}},
    {"sweep", {"--input", "--preset", "--feature", "--kmin", "--kmax", "--seed", "--restarts"}},
    {"validate",
     {"--input", "--preset", "--feature", "--k", "--folds", "--step", "--algorithm", "--seed", "--restarts"}},
    {"scan-k",
     {"--input", "--preset", "--feature", "--klist", "--folds", "--step", "--algorithm", "--seed", "--restarts"}},
    {"report",
     {"--input", "--preset", "--feature", "--k", "--kmax", "--seed", "--restarts", "--cu-ref", "--bins", "--levels"}},
};

template <class T>
std::string join(const std::vector<T>& values) {
  std::string s;
  for (const auto& v : values) {
    if (!s.empty()) s += ',';
    if constexpr (std::is_floating_point_v<T>) {
      s += format_number(v);
    } else {
      s += std::to_string(v);
    }
  }
  return s;
}

std::vector<std::string> canonical_arguments(const Options& o) {
  std::vector<std::string> args;
  for (const auto& flag : kCommandFlags.at(o.command)) {
    if (flag == "--input") {
      for (const auto& path : o.inputs) args.insert(args.end(), {flag, path});
      continue;
    }
    std::string value;
    if (flag == "--preset") value = o.preset;
    else if (flag == "--feature") value = o.feature;
    else if (flag == "--k") value = std::to_string(o.command == "report" ? o.report_k : o.k);
    else if (flag == "--kmin") value = std::to_string(o.k_min);
    else if (flag == "--kmax") value = std::to_string(o.k_max);
    else if (flag == "--folds") value = join(o.folds);
    else if (flag == "--klist") value = join(o.k_list);
    else if (flag == "--seed") value = std::to_string(o.seed);
    else if (flag == "--step") value = std::to_string(o.step);
    else if (flag == "--n") value = std::to_string(o.n);
    else if (flag == "--outliers") value = format_number(o.outliers);
    else if (flag == "--algorithm") value = o.algorithm;
    else if (flag == "--cu-ref") value = format_number(o.cu_ref);
    else if (flag == "--restarts") value = std::to_string(o.restarts);
    else if (flag == "--bins") value = std::to_string(o.bins);
    else if (flag == "--levels") value = join(o.levels);
    if (value.empty()) continue;
    args.insert(args.end(), {flag, value});
  }
  return args;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InputFormat, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

class Run {
 public:
  Run(Options options, std::ostream& out, std::ostream& err) : o_(std::move(options)), out_(out), err_(err) {}

  int execute() {
    fs::create_directories(o_.out);
    resolve_inputs();
    resolve_feature();
    if (o_.command == "synth") synth();
    else if (o_.command == "clean") clean_command();
    else if (o_.command == "fit") fit();
    else if (o_.command == "sweep") sweep_command();
    else if (o_.command == "validate") validate();
    else if (o_.command == "scan-k") scan();
    else report();
    write_manifest();
    return 0;
  }

 private:
  void resolve_inputs() {
    if (o_.command == "synth" || !o_.inputs.empty()) return;
    const fs::path cleaned = fs::path(o_.out) / "clean.csv";
    o_.inputs.push_back((fs::exists(cleaned) ? cleaned : fs::path(o_.out) / "data.csv").string());
  }

  // --preset names either a cleaning filter or a mixture preset (whose filter is used).
  std::optional<CleaningFilter> filter() const {
    if (o_.preset.empty()) return std::nullopt;
    if (auto f = filter_preset(o_.preset)) return f;
    if (const auto* p = find_preset(o_.preset)) return filter_preset(p->filter);
    throw Error(ErrorKind::InputFormat, "unknown preset '" + o_.preset + "'");
  }

  void resolve_feature() {
    if (o_.command == "synth" || o_.command == "clean") {
      o_.feature.clear();
      return;
    }
    if (o_.feature.empty()) {
      const auto* p = find_preset(o_.preset);
      if (p != nullptr) {
        for (Feature f : p->features) o_.feature += to_string(f);
      } else {
        o_.feature = "E";
      }
    }
    if (o_.feature != "E" && o_.feature != "H" && o_.feature != "EH") {
      throw Error(ErrorKind::InputFormat, "feature must be E, H or EH");
    }
  }

  std::vector<Feature> features() const {
    std::vector<Feature> f;
    if (o_.feature.find('E') != std::string::npos) f.push_back(Feature::Modulus);
    if (o_.feature.find('H') != std::string::npos) f.push_back(Feature::Hardness);
    return f;
  }

  std::vector<std::string> feature_names() const {
    std::vector<std::string> names;
    for (Feature f : features()) names.emplace_back(to_string(f));
    return names;
  }

  Dataset load() {
    const auto f = filter();
    std::vector<Dataset> parts;
    for (const auto& path : o_.inputs) {
      const std::string text = read_file(path);
      input_records_.push_back({{"path", path}, {"bytes", text.size()}, {"fnv1a64", fnv1a64(text)}});
      FormatDescriptor format;
      format.default_source = fs::path(path).stem().string();
      ParseResult parsed = parse_records(std::string_view(text), format);
      if (parsed.rejections.count > 0) {
        err_ << "warning: " << path << ": rejected " << parsed.rejections.count << " rows (first lines "
             << join(parsed.rejections.first_lines) << ")\n";
        rejected_ += parsed.rejections.count;
      }
      parts.push_back(f ? nanophase::clean(parsed.dataset, *f) : std::move(parsed.dataset));
    }
    return parts.size() == 1 ? std::move(parts.front()) : merge(parts);
  }

  FeatureMatrix load_features() {
    const Dataset data = load();
    const auto f = features();
    return feature_table(data, f);
  }

  FitConfig fit_config() const {
    FitConfig c;
    c.seed = o_.seed;
    c.n_restarts = o_.restarts;
    return c;
  }

  CvConfig cv_config() const {
    CvConfig c;
    c.k_components = o_.k;
    c.n_folds_range = o_.folds;
    c.seed = o_.seed;
    c.size_step = o_.step;
    c.fit = fit_config();
    c.threads = o_.threads;
    if (o_.algorithm == "gmm") {
      c.algorithm = ClusteringAlgorithm::Gmm;
    } else if (o_.algorithm == "kmeans") {
      c.algorithm = ClusteringAlgorithm::KMeans;
    } else {
      throw Error(ErrorKind::InputFormat, "algorithm must be gmm or kmeans");
    }
    return c;
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = fs::path(o_.out) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::InputFormat, "cannot write '" + path.string() + "'");
    f << content;
    outputs_.push_back(name);
  }

  void emit(const std::string& structured, const std::string& text) {
    out_ << (o_.format == "structured" ? structured : text);
  }

  void synth() {
    const MixturePreset* preset = find_preset(o_.preset);
    if (preset == nullptr) throw Error(ErrorKind::InputFormat, "unknown synthetic preset '" + o_.preset + "'");
    SynthOptions so;
    so.n = o_.n;
    so.seed = o_.seed;
    so.outlier_fraction = o_.outliers;
    so.source_id = preset->name;
    const SyntheticData data = synthesize(*preset, so);

    std::ostringstream csv;
    write_csv(csv, data.dataset);
    write("data.csv", csv.str());
    std::string comps = "row,component,planted_outlier\n";
    for (std::size_t i = 0; i < data.components.size(); ++i) {
      comps += std::to_string(i) + "," + std::to_string(data.components[i] + 1) + "," +
               (data.planted_outlier[i] ? "true" : "false") + "\n";
    }
    write("components.csv", comps);

    json j;
    j["preset"] = preset->name;
    j["material"] = preset->material;
    j["provenance"] = preset->provenance;
    j["n"] = o_.n;
    j["seed"] = o_.seed;
    j["outlier_fraction"] = o_.outliers;
    j["planted_outliers"] = std::count(data.planted_outlier.begin(), data.planted_outlier.end(), true);
    const std::string s = j.dump(2) + "\n";
    write("synth.json", s);
    emit(s, "wrote " + std::to_string(o_.n) + " synthetic records (" + preset->name + ") to " +
                (fs::path(o_.out) / "data.csv").string() + "\n");
  }

  void clean_command() {
    if (o_.preset.empty()) throw Error(ErrorKind::InputFormat, "clean needs --preset");
    const auto f = filter();
    std::vector<Dataset> raw;
    std::size_t n_raw = 0;
    for (const auto& path : o_.inputs) {
      const std::string text = read_file(path);
      input_records_.push_back({{"path", path}, {"bytes", text.size()}, {"fnv1a64", fnv1a64(text)}});
      FormatDescriptor format;
      format.default_source = fs::path(path).stem().string();
      ParseResult parsed = parse_records(std::string_view(text), format);
      rejected_ += parsed.rejections.count;
      n_raw += parsed.dataset.n_raw();
      raw.push_back(nanophase::clean(parsed.dataset, *f));
    }
    const Dataset cleaned = raw.size() == 1 ? std::move(raw.front()) : merge(raw);
    std::ostringstream csv;
    write_csv(csv, cleaned);
    write("clean.csv", csv.str());

    const double retention = n_raw == 0 ? 0.0 : static_cast<double>(cleaned.n_clean()) / static_cast<double>(n_raw);
    json j;
    j["preset"] = o_.preset;
    j["n_raw"] = n_raw;
    j["n_clean"] = cleaned.n_clean();
    j["retention"] = retention;
    j["rejected_rows"] = rejected_;
    const std::string s = j.dump(2) + "\n";
    write("clean.json", s);
    std::ostringstream text;
    text << "kept " << cleaned.n_clean() << " of " << n_raw << " records, retention " << std::fixed
         << std::setprecision(4) << retention << "\n";
    emit(s, text.str());
  }

  std::string fit_text(const FitResult& fit) const {
    std::ostringstream os;
    os << "k=" << fit.model.size() << " lnL=" << format_number(fit.log_likelihood) << " d=" << fit.param_count
       << " BIC=" << format_number(fit.bic) << " converged=" << (fit.converged ? "yes" : "no") << "\n";
    for (std::size_t j = 0; j < fit.model.size(); ++j) {
      const auto& c = fit.model[j];
      os << "  component " << j + 1 << ": weight=" << format_number(c.weight) << " mean=" << format_number(c.mean[0]);
      if (fit.model.dim() == 2) os << "," << format_number(c.mean[1]);
      os << " var=" << format_number(c.covariance.xx);
      if (fit.model.dim() == 2) os << "," << format_number(c.covariance.yy) << " cov=" << format_number(c.covariance.xy);
      os << "\n";
    }
    return os.str();
  }

  void fit() {
    const FeatureMatrix data = load_features();
    const FitResult result = fit_em(data, o_.k, fit_config());
    const std::string s = to_structured(result);
    write("fit.json", s);
    emit(s, fit_text(result));
  }

  BicSweep run_sweep(const FeatureMatrix& data, std::size_t k_min, std::size_t k_max) const {
    SweepConfig c;
    c.k_min = k_min;
    c.k_max = std::min(k_max, data.rows());
    c.fit = fit_config();
    c.threads = o_.threads;
    if (c.k_max < c.k_min) c.k_max = k_max;  // let sweep() report the shortage
    return nanophase::sweep(data, c);
  }

  void sweep_command() {
    const FeatureMatrix data = load_features();
    const BicSweep result = run_sweep(data, o_.k_min, o_.k_max);
    const std::string s = to_structured(result);
    write("sweep.json", s);
    const std::string table = bic_table_csv(result);
    write("bic.csv", table);
    write("bic.svg", svg_bic_curve(result));
    emit(s, table + "optimal_k " + std::to_string(result.optimal_k) + "\n");
  }

  void validate() {
    const FeatureMatrix data = load_features();
    const CvReport result = data_size_sweep(data, cv_config());
    const std::string s = to_structured(result);
    write("cv.json", s);
    write("cv.csv", cv_table_csv(result));
    write("cv.svg", svg_cv_scores(result));
    std::ostringstream text;
    text << "size,mean,std_dev,min,failures\n";
    for (const auto& r : result.per_size) {
      text << r.size << "," << format_number(r.mean) << "," << format_number(r.std_dev) << "," << format_number(r.min)
           << "," << r.folds.failures.size() << "\n";
    }
    text << "verdict " << (result.verdict ? "sufficient" : "insufficient") << "\n";
    emit(s, text.str());
  }

  void scan() {
    const FeatureMatrix data = load_features();
    const auto result = cluster_count_scan(data, o_.k_list, cv_config());
    const std::string s = to_structured(result);
    write("scan.json", s);
    write("scan.csv", scan_table_csv(result));
    std::ostringstream text;
    for (const auto& [k, r] : result) {
      const auto& last = r.largest();
      text << "k=" << k << " size=" << last.size << " mean=" << format_number(last.mean)
           << " std=" << format_number(last.std_dev) << " min=" << format_number(last.min)
           << " verdict=" << (r.verdict ? "sufficient" : "insufficient") << "\n";
    }
    emit(s, text.str());
  }

  void report() {
    const Dataset dataset = load();
    const auto feats = features();
    const FeatureMatrix data = feature_table(dataset, feats);

    json j;
    FitResult fit = [&] {
      if (o_.report_k > 0) return fit_em(data, o_.report_k, fit_config());
      const BicSweep s = run_sweep(data, 1, o_.k_max);
      write("bic.csv", bic_table_csv(s));
      write("bic.svg", svg_bic_curve(s));
      j["selected_by"] = "bic";
      return s.optimal();
    }();
    if (!j.contains("selected_by")) j["selected_by"] = "fixed";

    const std::string material = dataset.sources().empty() ? "sample" : dataset.sources().front();
    const PhaseTable table = phase_table(fit, material, feature_names());
    write("phases.json", to_structured(table));
    const std::string table_text = phase_table_text(table);
    write("phases.txt", table_text);

    j["n_points"] = data.rows();
    j["n_components"] = fit.model.size();
    j["fit"] = json::parse(to_structured(fit));
    j["phases"] = json::parse(to_structured(table));
    std::string fraction_text;
    if (fit.model.size() >= 2 && feats.front() == Feature::Modulus) {
      const VolumeFraction vf = volume_fraction(fit.model, o_.cu_ref);
      j["volume_fraction"] = {{"cu_reference_modulus", o_.cu_ref},
                              {"cu_component", vf.cu_component + 1},
                              {"cu_fraction", vf.cu_fraction},
                              {"cr_fraction", vf.cr_fraction}};
      fraction_text = "Cr fraction " + format_number(std::round(vf.cr_fraction * 1e4) / 1e4) + "\n";
    } else {
      j["volume_fraction"] = nullptr;
    }

    if (data.dim() == 1) {
      const auto values = data.values();
      const PdfOverlay overlay = pdf_overlay(values, fit.model, o_.bins);
      write("histogram.csv", histogram_csv(overlay));
      write("pdf.csv", pdf_curves_csv(overlay));
      write("pdf.svg", svg_pdf_overlay(overlay, feature_names().front() + " [GPa]"));
    } else {
      const EllipseSet set = ellipse_isolines(fit.model, o_.levels);
      write("ellipses.csv", ellipse_csv(set));
      const auto names = feature_names();
      write("ellipses.svg", svg_ellipses(set, data, names[0] + " [GPa]", names[1] + " [GPa]"));
    }
    const std::string s = j.dump(2) + "\n";
    write("report.json", s);
    emit(s, table_text + fraction_text);
  }

  void write_manifest() {
    json m;
    m["tool"] = "nanophase";
    m["version"] = kVersion;
    m["command"] = o_.command;
    m["arguments"] = canonical_arguments(o_);
    m["seed"] = o_.seed;
    m["inputs"] = input_records_;
    std::sort(outputs_.begin(), outputs_.end());
    outputs_.erase(std::unique(outputs_.begin(), outputs_.end()), outputs_.end());
    m["outputs"] = outputs_;
    const fs::path path = fs::path(o_.out) / "manifest.json";
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << m.dump(2) << "\n";
  }

  Options o_;
  std::ostream& out_;
  std::ostream& err_;
  json input_records_ = json::array();
  std::vector<std::string> outputs_;
  std::size_t rejected_ = 0;
};

void add_flag(CLI::App* sub, const std::string& flag, Options& o) {
  if (flag == "--k" && sub->get_name() == "report") {
    sub->add_option("--k", o.report_k, "number of components (default: BIC optimum up to --kmax)");
    return;
  }
  if (flag == "--input") sub->add_option("--input", o.inputs, "input CSV (repeatable); default <out>/clean.csv or <out>/data.csv");
  else if (flag == "--preset") sub->add_option("--preset", o.preset, "filter or synthetic preset name");
  else if (flag == "--feature") sub->add_option("--feature", o.feature, "E, H or EH");
  else if (flag == "--k") sub->add_option("--k", o.k, "number of components");
  else if (flag == "--kmin") sub->add_option("--kmin", o.k_min, "smallest component count");
  else if (flag == "--kmax") sub->add_option("--kmax", o.k_max, "largest component count");
  else if (flag == "--folds") sub->add_option("--folds", o.folds, "fold counts, comma separated")->delimiter(',');
  else if (flag == "--klist") sub->add_option("--klist", o.k_list, "candidate component counts")->delimiter(',');
  else if (flag == "--seed") sub->add_option("--seed", o.seed, "base random seed");
  else if (flag == "--step") sub->add_option("--step", o.step, "data size increment");
  else if (flag == "--n") sub->add_option("--n", o.n, "number of synthetic records");
  else if (flag == "--outliers") sub->add_option("--outliers", o.outliers, "fraction of planted outliers");
  else if (flag == "--algorithm") sub->add_option("--algorithm", o.algorithm, "gmm or kmeans");
  else if (flag == "--cu-ref") sub->add_option("--cu-ref", o.cu_ref, "Cu reference modulus [GPa]");
  else if (flag == "--restarts") sub->add_option("--restarts", o.restarts, "EM restarts per fit");
  else if (flag == "--bins") sub->add_option("--bins", o.bins, "histogram bins");
  else if (flag == "--levels") sub->add_option("--levels", o.levels, "ellipse Mahalanobis radii")->delimiter(',');
}

std::string error_line(std::string_view kind, int code, const std::string& message) {
  return "error kind=" + std::string(kind) + " exit=" + std::to_string(code) + " message=" + json(message).dump() + "\n";
}

}  // namespace

int run_pipeline(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  Options o;
  std::string replay;
  CLI::App app{"Gaussian-mixture phase analysis of nanoindentation maps", "nanophase"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(0, 1);
  app.add_option("--replay", replay, "re-run the command recorded in a manifest");
  app.add_option("--out", o.out, "output directory for --replay");
  app.add_option("--format", o.format, "stdout format for --replay")->check(CLI::IsMember({"text", "structured"}));

  const std::map<std::string, std::string> descriptions{
      {"synth", "draw synthetic indentation data from a published mixture"},
      {"clean", "apply a cleaning filter and report retention"},
      {"fit", "fit a k-component Gaussian mixture"},
      {"sweep", "fit k = kmin..kmax and pick the BIC optimum"},
      {"validate", "cross-validated clustering stability over data sizes"},
      {"scan-k", "stability sweep for several component counts"},
      {"report", "phase table, volume fraction and plot artifacts"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, flags] : kCommandFlags) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    for (const auto& flag : flags) add_flag(sub, flag, o);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--format", o.format, "stdout format")->check(CLI::IsMember({"text", "structured"}));
    if (name != "synth" && name != "clean") sub->add_option("--threads", o.threads, "worker threads (0 = all cores)");
    subs.push_back(sub);
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (!replay.empty()) {
      const json m = json::parse(std::ifstream(replay), nullptr, false);
      if (m.is_discarded() || !m.contains("command") || !m.contains("arguments")) {
        throw Error(ErrorKind::InputFormat, "'" + replay + "' is not a manifest");
      }
      std::vector<std::string> again{m["command"].get<std::string>()};
      for (const auto& a : m["arguments"]) again.push_back(a.get<std::string>());
      again.insert(again.end(), {"--out", o.out, "--format", o.format});
      return run_pipeline(again, out, err);
    }
    const auto chosen = app.get_subcommands();
    if (chosen.empty()) throw CLI::RequiredError("a subcommand");
    o.command = chosen.front()->get_name();
    return Run(std::move(o), out, err).execute();
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << app.help();
    err << error_line("usage", 2, e.what());
    return 2;
  } catch (const Error& e) {
    const int code = exit_code(e.kind());
    err << error_line(to_string(e.kind()), code, e.what());
    return code;
  } catch (const std::exception& e) {
    err << error_line("internal", 1, e.what());
    return 1;
  }
}

}  // namespace nanophase::cli
