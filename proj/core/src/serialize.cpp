#include "nanophase/serialize.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "nanophase/error.hpp"

namespace nanophase {
namespace {

using json = nlohmann::ordered_json;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json model_json(const MixtureModel& model) {
  json comps = json::array();
  for (const auto& c : model.components()) {
    json comp;
    comp["weight"] = c.weight;
    if (model.dim() == 1) {
      comp["mean"] = json::array({c.mean[0]});
      comp["covariance"] = json::array({json::array({c.covariance.xx})});
    } else {
      comp["mean"] = json::array({c.mean[0], c.mean[1]});
      comp["covariance"] = json::array({json::array({c.covariance.xx, c.covariance.xy}),
                                        json::array({c.covariance.xy, c.covariance.yy})});
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

json fit_json(const FitResult& fit) {
  json j;
  j["dimension"] = fit.model.dim();
  j["n_components"] = fit.model.size();
  j["components"] = model_json(fit.model);
  j["log_likelihood"] = number_or_null(fit.log_likelihood);
  j["bic"] = number_or_null(fit.bic);
  j["param_count"] = fit.param_count;
  j["n_points"] = fit.n_points;
  j["seed"] = fit.seed;
  j["converged"] = fit.converged;
  j["n_iterations"] = fit.n_iterations;
  j["restarts_run"] = fit.restarts_run;
  j["restarts_degenerate"] = fit.restarts_degenerate;
  return j;
}

json sweep_json(const BicSweep& sweep) {
  json j;
  j["k_min"] = sweep.k_min;
  j["k_max"] = sweep.k_max;
  j["n_points"] = sweep.n_points;
  j["optimal_k"] = sweep.optimal_k;
  json entries = json::array();
  for (const auto& [k, e] : sweep.entries) {
    json row;
    row["k"] = k;
    row["ok"] = e.ok();
    if (e.ok()) {
      row["fit"] = fit_json(*e.fit);
    } else {
      row["failure"] = e.failure;
    }
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  try {
    const BicMargin m = bic_margin(sweep);
    j["margin"] = {{"runner_up_k", m.runner_up_k}, {"bic_gap", m.margin}, {"reference_scale", m.reference_scale}};
  } catch (const Error&) {
    j["margin"] = nullptr;
  }
  return j;
}

json cv_config_json(const CvConfig& c) {
  json j;
  j["k_components"] = c.k_components;
  j["n_folds"] = c.n_folds_range;
  j["algorithm"] = std::string(to_string(c.algorithm));
  j["seed"] = c.seed;
  j["size_step"] = c.size_step;
  j["min_score"] = c.min_score;
  j["max_std"] = c.max_std;
  j["n_restarts"] = c.fit.n_restarts;
  j["tolerance"] = c.fit.tolerance;
  j["max_iterations"] = c.fit.max_iterations;
  return j;
}

json cv_json(const CvReport& report) {
  json j;
  j["config"] = cv_config_json(report.config);
  j["n_points"] = report.n_points;
  json sizes = json::array();
  for (const auto& s : report.per_size) {
    json row;
    row["size"] = s.size;
    row["mean"] = s.mean;
    row["std_dev"] = s.std_dev;
    row["min"] = s.min;
    row["scores"] = s.folds.scores;
    json failures = json::array();
    for (const auto& f : s.folds.failures) {
      failures.push_back({{"n_folds", f.n_folds}, {"fold", f.fold}, {"reason", f.reason}});
    }
    row["failures"] = std::move(failures);
    sizes.push_back(std::move(row));
  }
  j["per_size"] = std::move(sizes);
  j["verdict"] = report.verdict;
  return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string to_structured(const FitResult& fit) { return dump(fit_json(fit)); }
std::string to_structured(const BicSweep& sweep) { return dump(sweep_json(sweep)); }
std::string to_structured(const CvReport& report) { return dump(cv_json(report)); }

std::string to_structured(const std::map<std::size_t, CvReport>& scan) {
  json j = json::array();
  for (const auto& [k, report] : scan) {
    json row;
    row["k"] = k;
    row["verdict"] = report.verdict;
    row["report"] = cv_json(report);
    j.push_back(std::move(row));
  }
  return dump(j);
}

std::string to_structured(const PhaseTable& table) {
  json j;
  j["material"] = table.material;
  j["dimension"] = table.dim;
  j["features"] = table.features;
  json rows = json::array();
  for (const auto& r : table.rows) {
    json row;
    row["label"] = r.label;
    row["mean"] = r.mean;
    if (!r.std_dev.empty()) row["std_dev"] = r.std_dev;
    row["percentage"] = r.percentage;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return dump(j);
}

std::string bic_table_csv(const BicSweep& sweep) {
  std::string out = "k,log_likelihood,d,bic,converged\n";
  for (const auto& [k, e] : sweep.entries) {
    out += std::to_string(k) + ",";
    if (e.ok()) {
      out += format_number(e.fit->log_likelihood) + "," + std::to_string(e.fit->param_count) + "," +
             format_number(e.fit->bic) + "," + (e.fit->converged ? "true" : "false");
    } else {
      out += ",,,false";
    }
    out += "\n";
  }
  return out;
}

std::string cv_table_csv(const CvReport& report) {
  std::string out = "size,n_folds,fold,score\n";
  for (const auto& s : report.per_size) {
    for (std::size_t n_folds : report.config.n_folds_range) {
      const auto it = s.folds.by_n_folds.find(n_folds);
      std::size_t next = 0;
      for (std::size_t fold = 0; fold < n_folds; ++fold) {
        bool failed = false;
        for (const auto& f : s.folds.failures) failed = failed || (f.n_folds == n_folds && f.fold == fold);
        out += std::to_string(s.size) + "," + std::to_string(n_folds) + "," + std::to_string(fold) + ",";
        if (!failed && it != s.folds.by_n_folds.end()) out += format_number(it->second.at(next++));
        out += "\n";
      }
    }
  }
  return out;
}

std::string scan_table_csv(const std::map<std::size_t, CvReport>& scan) {
  std::string out = "k,size,mean,std_dev,min,verdict\n";
  for (const auto& [k, report] : scan) {
    for (const auto& s : report.per_size) {
      const bool ok = sufficiency_verdict(s, report.config.min_score, report.config.max_std);
      out += std::to_string(k) + "," + std::to_string(s.size) + "," + format_number(s.mean) + "," +
             format_number(s.std_dev) + "," + format_number(s.min) + "," + (ok ? "true" : "false") + "\n";
    }
  }
  return out;
}

std::string histogram_csv(const PdfOverlay& overlay) {
  std::string out = "lo,hi,count,density\n";
  for (const auto& b : overlay.histogram) {
    out += format_number(b.lo) + "," + format_number(b.hi) + "," + std::to_string(b.count) + "," +
           format_number(b.density) + "\n";
  }
  return out;
}

std::string pdf_curves_csv(const PdfOverlay& overlay) {
  std::string out = "x,mixture";
  for (std::size_t j = 0; j < overlay.component_pdfs.size(); ++j) out += ",component_" + std::to_string(j + 1);
  out += "\n";
  for (std::size_t g = 0; g < overlay.grid.size(); ++g) {
    out += format_number(overlay.grid[g]) + "," + format_number(overlay.mixture_pdf[g]);
    for (const auto& c : overlay.component_pdfs) out += "," + format_number(c[g]);
    out += "\n";
  }
  return out;
}

std::string ellipse_csv(const EllipseSet& set) {
  std::string out = "component,level,x,y\n";
  for (std::size_t j = 0; j < set.means.size(); ++j) {
    out += std::to_string(j + 1) + ",mean," + format_number(set.means[j][0]) + "," + format_number(set.means[j][1]) +
           "\n";
  }
  for (const auto& line : set.isolines) {
    for (const auto& p : line.points) {
      out += std::to_string(line.component + 1) + "," + format_number(line.level) + "," + format_number(p[0]) + "," +
             format_number(p[1]) + "\n";
    }
  }
  return out;
}

std::string phase_table_text(const PhaseTable& table) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << table.material << " (" << table.dim << "D)\n";
  os << std::left << std::setw(8) << "phase";
  for (const auto& f : table.features) os << std::right << std::setw(12) << (f + " [GPa]");
  if (table.dim == 1) os << std::setw(12) << "std";
  os << std::setw(12) << "percent" << "\n";
  for (const auto& r : table.rows) {
    os << std::left << std::setw(8) << r.label << std::right;
    for (double m : r.mean) os << std::setw(12) << m;
    for (double s : r.std_dev) os << std::setw(12) << s;
    os << std::setw(12) << std::setprecision(1) << r.percentage << std::setprecision(2) << "\n";
  }
  return os.str();
}

}  // namespace nanophase
