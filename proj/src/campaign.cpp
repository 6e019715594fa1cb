#include "feasimap/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "feasimap/errors.hpp"
#include "feasimap/feasibility.hpp"
#include "feasimap/normal.hpp"
#include "feasimap/sampling.hpp"
#include "feasimap/search.hpp"

namespace fs = std::filesystem;

namespace feasimap {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool is_known_method(const std::string& m) {
  if (m == "lhs-only") return true;
  try {
    parse_acquisition(m);
    return true;
  } catch (const InputError&) {
    return false;
  }
}

// --- flat TOML subset -------------------------------------------------------

std::string strip(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> parse_string_array(const std::string& value, const std::string& key) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']')
    throw InputError("config: expected array for " + key);
  std::vector<std::string> out;
  std::string inner = value.substr(1, value.size() - 2);
  std::stringstream ss(inner);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (item.empty()) continue;
    if (item.size() < 2 || item.front() != '"' || item.back() != '"')
      throw InputError("config: array entries for " + key + " must be quoted strings");
    out.push_back(item.substr(1, item.size() - 2));
  }
  return out;
}

}  // namespace

void CampaignConfig::validate() const {
  if (problems.empty()) throw InputError("campaign: no problems listed");
  if (methods.empty()) throw InputError("campaign: no methods listed");
  for (const auto& p : problems) problem_by_id(p);
  for (const auto& m : methods)
    if (!is_known_method(m)) throw InputError("campaign: unknown method " + m);
  if (reps < 1) throw InputError("campaign: reps must be >= 1");
  if (validation_samples < 1) throw InputError("campaign: validation_samples must be >= 1");
  if (budget_multiplier < 1 || acq_eval_multiplier < 1)
    throw InputError("campaign: multipliers must be >= 1");
  if (output_dir.empty()) throw InputError("campaign: output_dir empty");
}

CampaignConfig load_campaign_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file: " + path);
  CampaignConfig cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));

    auto as_long = [&](const std::string& v) {
      try {
        return std::stoll(v);
      } catch (...) {
        throw InputError("config: bad integer for " + key);
      }
    };
    if (key == "problems") cfg.problems = parse_string_array(value, key);
    else if (key == "methods") cfg.methods = parse_string_array(value, key);
    else if (key == "reps") cfg.reps = static_cast<int>(as_long(value));
    else if (key == "validation_samples") cfg.validation_samples = static_cast<int>(as_long(value));
    else if (key == "budget_multiplier") cfg.budget_multiplier = static_cast<int>(as_long(value));
    else if (key == "acq_eval_multiplier")
      cfg.acq_eval_multiplier = static_cast<int>(as_long(value));
    else if (key == "master_seed") cfg.master_seed = static_cast<std::uint64_t>(as_long(value));
    else if (key == "workers") cfg.workers = static_cast<int>(as_long(value));
    else if (key == "gp_restarts") cfg.gp_restarts = static_cast<int>(as_long(value));
    else if (key == "pbe_entropy_floor") cfg.pbe_entropy_floor = std::stod(value);
    else if (key == "output_dir") {
      if (value.size() < 2 || value.front() != '"' || value.back() != '"')
        throw InputError("config: output_dir must be a quoted string");
      cfg.output_dir = value.substr(1, value.size() - 2);
    } else {
      throw InputError("config: unknown key " + key);
    }
  }
  return cfg;
}

namespace {

// --- manifest ---------------------------------------------------------------

std::string run_tag(const std::string& problem, const std::string& method, int rep) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d", rep);
  return problem + "_" + method + "_rep" + buf;
}

nlohmann::json record_to_json(const RunRecord& r) {
  nlohmann::json j;
  j["problem"] = r.problem;
  j["method"] = r.method;
  j["rep"] = r.rep;
  j["status"] = r.aborted ? "aborted" : "done";
  if (!r.error.empty()) j["error"] = r.error;
  if (std::isnan(r.informedness_value)) j["informedness"] = nullptr;
  else j["informedness"] = r.informedness_value;
  j["tp"] = r.cm.tp;
  j["fp"] = r.cm.fp;
  j["tn"] = r.cm.tn;
  j["fn"] = r.cm.fn;
  j["trace_file"] = r.trace_file;
  j["model_file"] = r.model_file;
  return j;
}

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  r.problem = j.at("problem").get<std::string>();
  r.method = j.at("method").get<std::string>();
  r.rep = j.at("rep").get<int>();
  r.aborted = j.at("status").get<std::string>() == "aborted";
  if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
  r.informedness_value = j.at("informedness").is_null() ? kNan : j["informedness"].get<double>();
  r.cm.tp = j.value("tp", 0);
  r.cm.fp = j.value("fp", 0);
  r.cm.tn = j.value("tn", 0);
  r.cm.fn = j.value("fn", 0);
  r.trace_file = j.value("trace_file", "");
  r.model_file = j.value("model_file", "");
  return r;
}

std::vector<RunRecord> load_manifest(const fs::path& path) {
  std::vector<RunRecord> records;
  std::ifstream in(path);
  if (!in) return records;
  nlohmann::json j = nlohmann::json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded() || !j.contains("runs")) return records;
  for (const auto& jr : j["runs"]) records.push_back(record_from_json(jr));
  return records;
}

void save_manifest(const fs::path& path, const std::vector<RunRecord>& records) {
  nlohmann::json j;
  j["runs"] = nlohmann::json::array();
  for (const auto& r : records) j["runs"].push_back(record_to_json(r));
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    out << j.dump(1) << "\n";
  }
  fs::rename(tmp, path);  // atomic swap keeps the manifest consistent
}

// --- single run -------------------------------------------------------------

RunRecord execute_run(const CampaignConfig& cfg, const std::string& problem,
                      const std::string& method, int rep) {
  const ProblemSpec& spec = problem_by_id(problem);
  RunRecord record;
  record.problem = problem;
  record.method = method;
  record.rep = rep;
  record.informedness_value = kNan;

  SearchConfig sc;
  sc.problem_id = problem;
  if (method != "lhs-only") sc.acquisition = parse_acquisition(method);
  sc.budget = static_cast<std::size_t>(cfg.budget_multiplier) * spec.dimension;
  sc.acq_max_evals = static_cast<long>(cfg.acq_eval_multiplier) * spec.dimension;
  sc.rep_index = rep;
  sc.master_seed = cfg.master_seed;
  sc.fit.restarts = cfg.gp_restarts;
  sc.acq_options.pbe_entropy_floor = cfg.pbe_entropy_floor;

  const std::string tag = run_tag(problem, method, rep);
  const fs::path out_dir(cfg.output_dir);

  try {
    SearchResult result = run_search(sc);

    // Fixed validation set per (problem, rep), shared across methods.
    SamplePlan plan{static_cast<std::size_t>(cfg.validation_samples), spec.dimension, spec.bounds,
                    search_stream(cfg.master_seed, problem, "validation", rep)};
    const Matrix validation = uniform_random(plan);

    ConfusionMatrix cm;
    JointScratch scratch;
    const double log_half = std::log(0.5);
    for (std::size_t i = 0; i < validation.rows(); ++i) {
      const auto& jp = joint_predict(result.surrogate, validation.row(i), scratch);
      const bool predicted = log_prob_feasible(jp) > log_half;
      const bool actual = true_feasible(spec, validation.row(i));
      if (actual && predicted) ++cm.tp;
      else if (actual && !predicted) ++cm.fn;
      else if (!actual && predicted) ++cm.fp;
      else ++cm.tn;
    }
    record.cm = cm;
    record.informedness_value = informedness(cm);

    record.trace_file = (fs::path("traces") / (tag + ".csv")).string();
    record.model_file = (fs::path("models") / (tag + ".json")).string();
    {
      std::ofstream out(out_dir / record.trace_file);
      out << trace_to_csv(result.trace, spec.dimension, spec.num_constraints);
    }
    {
      std::ofstream out(out_dir / record.model_file);
      out << result.surrogate.to_json() << "\n";
    }
    {
      std::ofstream out(out_dir / "confusion" / (tag + ".csv"));
      out << "tp,fp,tn,fn\n"
          << cm.tp << "," << cm.fp << "," << cm.tn << "," << cm.fn << "\n";
    }
  } catch (const std::exception& e) {
    record.aborted = true;
    record.error = e.what();
  }
  return record;
}

// --- summary ----------------------------------------------------------------

struct MethodStats {
  std::vector<double> values;  // indexed by rep; NaN where aborted/undefined
  int n_runs = 0;
  int n_aborted = 0;
};

std::string build_summary_csv(const CampaignConfig& cfg, const std::vector<RunRecord>& records) {
  std::string csv = "problem,method,median_informedness,mad,n_runs,n_aborted,p_vs_best,"
                    "equivalent_to_best\n";
  for (const auto& problem : cfg.problems) {
    std::map<std::string, MethodStats> stats;
    for (const auto& method : cfg.methods) {
      auto& s = stats[method];
      s.values.assign(cfg.reps, kNan);
      for (const auto& r : records) {
        if (r.problem != problem || r.method != method) continue;
        if (r.rep < 0 || r.rep >= cfg.reps) continue;
        if (r.aborted) {
          ++s.n_aborted;
          continue;
        }
        s.values[r.rep] = r.informedness_value;
        ++s.n_runs;
      }
    }

    std::optional<MethodComparison> comparison;
    if (cfg.methods.size() >= 2) {
      std::map<std::string, std::vector<double>> per_method;
      for (const auto& [method, s] : stats) per_method[method] = s.values;
      try {
        comparison = best_and_equivalents(per_method, 0.05, "lhs-only");
      } catch (const InputError&) {
        // Nothing comparable (e.g. every run aborted); emit plain medians.
      }
    }

    for (const auto& method : cfg.methods) {
      const auto& s = stats.at(method);
      std::vector<double> clean;
      for (double v : s.values)
        if (!std::isnan(v)) clean.push_back(v);
      double median = kNan, mad = kNan;
      if (!clean.empty()) {
        const MedianMad mm = median_mad(clean);
        median = mm.median;
        mad = mm.mad;
      }
      std::string p_vs_best, equivalent = "true";
      if (comparison) {
        if (method == comparison->best_method) {
          p_vs_best = "";
          equivalent = "true";
        } else {
          const auto it = comparison->p_values.find(method);
          if (it != comparison->p_values.end()) p_vs_best = format_double(it->second);
          const bool eq = std::find(comparison->equivalent.begin(), comparison->equivalent.end(),
                                    method) != comparison->equivalent.end();
          equivalent = eq ? "true" : "false";
        }
      }
      csv += problem + "," + method + "," + format_double(median) + "," + format_double(mad) +
             "," + std::to_string(s.n_runs) + "," + std::to_string(s.n_aborted) + "," +
             p_vs_best + "," + equivalent + "\n";
    }
  }
  return csv;
}

}  // namespace

CampaignOutcome run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  const fs::path out_dir(cfg.output_dir);
  fs::create_directories(out_dir / "traces");
  fs::create_directories(out_dir / "models");
  fs::create_directories(out_dir / "confusion");

  const fs::path manifest_path = out_dir / "manifest.json";
  std::vector<RunRecord> records = load_manifest(manifest_path);

  auto already_recorded = [&records](const std::string& p, const std::string& m, int rep) {
    return std::any_of(records.begin(), records.end(), [&](const RunRecord& r) {
      return r.problem == p && r.method == m && r.rep == rep;
    });
  };

  struct Job {
    std::string problem, method;
    int rep;
  };
  std::vector<Job> jobs;
  CampaignOutcome outcome;
  for (const auto& problem : cfg.problems)
    for (const auto& method : cfg.methods)
      for (int rep = 0; rep < cfg.reps; ++rep) {
        if (already_recorded(problem, method, rep)) ++outcome.skipped;
        else jobs.push_back({problem, method, rep});
      }

  std::mutex manifest_mutex;
  std::atomic<std::size_t> next_job{0};
  const int hardware = static_cast<int>(std::thread::hardware_concurrency());
  const int workers = std::max(1, std::min<int>(cfg.workers > 0 ? cfg.workers : hardware,
                                                static_cast<int>(jobs.size())));

  auto worker = [&]() {
    while (true) {
      const std::size_t i = next_job.fetch_add(1);
      if (i >= jobs.size()) break;
      const Job& job = jobs[i];
      RunRecord record = execute_run(cfg, job.problem, job.method, job.rep);
      std::lock_guard<std::mutex> lock(manifest_mutex);
      records.push_back(std::move(record));
      save_manifest(manifest_path, records);
      ++outcome.executed;
      if (records.back().aborted) ++outcome.aborted;
    }
  };

  if (jobs.size() <= 1 || workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Deterministic manifest order regardless of scheduling.
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.problem, a.method, a.rep) < std::tie(b.problem, b.method, b.rep);
  });
  save_manifest(manifest_path, records);

  const fs::path summary_path = out_dir / "summary.csv";
  {
    std::ofstream out(summary_path);
    out << build_summary_csv(cfg, records);
  }
  outcome.summary_path = summary_path.string();
  return outcome;
}

std::string emit_grid(const std::string& problem_id, const std::string& model_file,
                      std::size_t resolution) {
  const ProblemSpec& spec = problem_by_id(problem_id);
  if (spec.dimension > 2)
    throw InputError("emit_grid: only 1-D and 2-D problems are supported");
  if (resolution < 2) throw InputError("emit_grid: resolution must be >= 2");

  std::ifstream in(model_file);
  if (!in) throw InputError("emit_grid: cannot open model file " + model_file);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const MultiSurrogate surr = MultiSurrogate::from_json(buffer.str());
  if (surr.dimension() != spec.dimension)
    throw InputError("emit_grid: model dimension does not match problem");

  std::string csv;
  for (std::size_t d = 0; d < spec.dimension; ++d) csv += "x_" + std::to_string(d) + ",";
  for (std::size_t l = 0; l < surr.num_constraints(); ++l) csv += "mu_" + std::to_string(l) + ",";
  for (std::size_t l = 0; l < surr.num_constraints(); ++l)
    csv += "sigma_" + std::to_string(l) + ",";
  csv += "p_feasible,predicted_label,true_label\n";

  JointScratch scratch;
  auto emit_point = [&](std::span<const double> x) {
    const auto& jp = joint_predict(surr, x, scratch);
    const double p = prob_feasible(jp);
    for (double v : x) csv += format_double(v) + ",";
    for (double v : jp.means) csv += format_double(v) + ",";
    for (double v : jp.stds) csv += format_double(v) + ",";
    csv += format_double(p) + ",";
    csv += (p > 0.5) ? "1," : "0,";
    csv += true_feasible(spec, x) ? "1\n" : "0\n";
  };

  auto coord = [&](std::size_t d, std::size_t i) {
    return spec.bounds[d].first + (spec.bounds[d].second - spec.bounds[d].first) *
                                      static_cast<double>(i) /
                                      static_cast<double>(resolution - 1);
  };
  if (spec.dimension == 1) {
    for (std::size_t i = 0; i < resolution; ++i) {
      const double x[1] = {coord(0, i)};
      emit_point(x);
    }
  } else {
    for (std::size_t i = 0; i < resolution; ++i)
      for (std::size_t j = 0; j < resolution; ++j) {
        const double x[2] = {coord(0, i), coord(1, j)};
        emit_point(x);
      }
  }
  return csv;
}

std::string compare_report(const std::string& output_dir) {
  const fs::path manifest_path = fs::path(output_dir) / "manifest.json";
  const std::vector<RunRecord> records = load_manifest(manifest_path);
  if (records.empty())
    throw InputError("compare_report: no manifest (or empty) in " + output_dir);

  std::vector<std::string> problems, methods;
  int max_rep = 0;
  for (const auto& r : records) {
    if (std::find(problems.begin(), problems.end(), r.problem) == problems.end())
      problems.push_back(r.problem);
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
      methods.push_back(r.method);
    max_rep = std::max(max_rep, r.rep);
  }

  std::string report;
  char line[256];
  std::snprintf(line, sizeof line, "%-8s", "problem");
  report += line;
  for (const auto& m : methods) {
    std::snprintf(line, sizeof line, " %20s", m.c_str());
    report += line;
  }
  report += "\n";

  for (const auto& problem : problems) {
    std::map<std::string, std::vector<double>> per_method;
    for (const auto& method : methods) {
      std::vector<double> vals(max_rep + 1, kNan);
      bool any = false;
      for (const auto& r : records)
        if (r.problem == problem && r.method == method && !r.aborted) {
          vals[r.rep] = r.informedness_value;
          any = true;
        }
      if (any) per_method[method] = std::move(vals);
    }
    std::optional<MethodComparison> comparison;
    if (per_method.size() >= 2) comparison = best_and_equivalents(per_method, 0.05, "lhs-only");

    std::snprintf(line, sizeof line, "%-8s", problem.c_str());
    report += line;
    for (const auto& method : methods) {
      const auto it = per_method.find(method);
      if (it == per_method.end()) {
        std::snprintf(line, sizeof line, " %20s", "-");
        report += line;
        continue;
      }
      std::vector<double> clean;
      for (double v : it->second)
        if (!std::isnan(v)) clean.push_back(v);
      if (clean.empty()) {
        std::snprintf(line, sizeof line, " %20s", "nan");
        report += line;
        continue;
      }
      const MedianMad mm = median_mad(clean);
      char mark = ' ';
      if (comparison) {
        if (method == comparison->best_method) mark = '*';
        else if (std::find(comparison->equivalent.begin(), comparison->equivalent.end(),
                           method) != comparison->equivalent.end())
          mark = '+';
      }
      char cell[64];
      std::snprintf(cell, sizeof cell, "%.2f%% (%.1e)%c", 100.0 * mm.median, mm.mad, mark);
      std::snprintf(line, sizeof line, " %20s", cell);
      report += line;
    }
    report += "\n";
  }
  report += "\n* best median; + statistically equivalent to best (one-sided, Bonferroni).\n";
  return report;
}

}  // namespace feasimap
