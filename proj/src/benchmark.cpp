#include "mapso/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "mapso/errors.hpp"
#include "mapso/format.hpp"
#include "mapso/rng.hpp"

namespace mapso {

namespace fs = std::filesystem;
using nlohmann::json;

void ExperimentPlan::validate() const {
  if (algorithms.empty()) throw InputError("plan: no algorithms");
  if (functions.empty()) throw InputError("plan: no functions");
  if (dimension < 2) throw InputError("plan: dimension must be at least 2");
  if (pop_size < 2) throw InputError("plan: pop_size must be at least 2");
  if (runs < 2) throw InputError("plan: runs must be at least 2");
  if (budget_evals() < pop_size) throw InputError("plan: evaluation budget is smaller than pop_size");
  std::set<std::string> seen;
  for (const auto& a : algorithms) {
    if (a.name.empty()) throw InputError("plan: algorithm with empty name");
    if (a.name.find_first_of("/\\,\n") != std::string::npos) {
      throw InputError("plan: algorithm name '" + a.name + "' contains a reserved character");
    }
    if (!seen.insert(a.name).second) throw InputError("plan: duplicate algorithm '" + a.name + "'");
  }
  seen.clear();
  const auto known = classic_suite_names();
  for (const auto& f : functions) {
    if (std::find(known.begin(), known.end(), f) == known.end()) {
      throw InputError("plan: unknown function '" + f + "'");
    }
    if (!seen.insert(f).second) throw InputError("plan: duplicate function '" + f + "'");
  }
}

ExperimentPlan default_plan() {
  ExperimentPlan p;
  p.algorithms = {{"mapso", presets::mapso()},   {"icpso", presets::icpso()},
                  {"ldwpso", presets::ldwpso()}, {"liwpso", presets::liwpso()},
                  {"rwpso", presets::rwpso()},   {"aiwpso", presets::aiwpso()}};
  p.functions = classic_suite_names();
  p.dimension = 10;
  p.runs = 15;
  return p;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::size_t algorithm, std::size_t function,
                          std::size_t run) noexcept {
  std::uint64_t h = mix64(base_seed ^ mix64(algorithm));
  h = mix64(h ^ mix64(function));
  return mix64(h ^ mix64(run));
}

// ---- JSON ------------------------------------------------------------------

namespace {

json ipso_json(double omega, double c, double alpha) {
  return {{"omega", omega}, {"c", c}, {"alpha", alpha}};
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

json schedule_to_json(const ScheduleSpec& spec) {
  return std::visit(
      [](const auto& s) -> json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, schedule::Constant>) {
          json j = ipso_json(s.params.omega, s.params.c, s.params.alpha);
          j["type"] = "constant";
          return j;
        } else if constexpr (std::is_same_v<T, schedule::Mapso>) {
          const auto& c = s.config;
          return {{"type", "mapso"},     {"v_max", c.v_max},     {"v_min", c.v_min},
                  {"rho_max", c.rho_max}, {"rho_min", c.rho_min}, {"f_max", c.f_max},
                  {"f_min", c.f_min},     {"t1_frac", c.t1_frac}, {"t2_frac", c.t2_frac}};
        } else if constexpr (std::is_same_v<T, schedule::LinearInertia>) {
          return {{"type", "linear_inertia"}, {"omega_start", s.omega_start},
                  {"omega_end", s.omega_end}, {"c", s.c}, {"alpha", s.alpha}};
        } else if constexpr (std::is_same_v<T, schedule::RandomInertia>) {
          return {{"type", "random_inertia"}, {"c", s.c}, {"alpha", s.alpha}};
        } else if constexpr (std::is_same_v<T, schedule::SuccessRateInertia>) {
          return {{"type", "success_rate_inertia"}, {"omega_min", s.omega_min},
                  {"omega_max", s.omega_max}, {"c", s.c}, {"alpha", s.alpha}};
        } else {
          return {{"type", "registered"}, {"name", s.name}};
        }
      },
      spec);
}

ScheduleSpec schedule_from_json(const json& j, const ScheduleRegistry& registry) {
  try {
    if (j.is_string()) return registry.resolve(j.get<std::string>());
    if (!j.is_object()) throw InputError("schedule must be a name or an object");
    const std::string type = j.at("type").get<std::string>();
    if (type == "constant") {
      return schedule::Constant{{j.at("omega").get<double>(), j.at("c").get<double>(),
                                 get_or(j, "alpha", 1.0)}};
    }
    if (type == "mapso") {
      MapsoConfig c;
      c.v_max = get_or(j, "v_max", c.v_max);
      c.v_min = get_or(j, "v_min", c.v_min);
      c.rho_max = get_or(j, "rho_max", c.rho_max);
      c.rho_min = get_or(j, "rho_min", c.rho_min);
      c.f_max = get_or(j, "f_max", c.f_max);
      c.f_min = get_or(j, "f_min", c.f_min);
      c.t1_frac = get_or(j, "t1_frac", c.t1_frac);
      c.t2_frac = get_or(j, "t2_frac", c.t2_frac);
      c.validate();
      return schedule::Mapso{c};
    }
    if (type == "linear_inertia") {
      schedule::LinearInertia s;
      s.omega_start = get_or(j, "omega_start", s.omega_start);
      s.omega_end = get_or(j, "omega_end", s.omega_end);
      s.c = get_or(j, "c", s.c);
      s.alpha = get_or(j, "alpha", s.alpha);
      return s;
    }
    if (type == "random_inertia") {
      schedule::RandomInertia s;
      s.c = get_or(j, "c", s.c);
      s.alpha = get_or(j, "alpha", s.alpha);
      return s;
    }
    if (type == "success_rate_inertia") {
      schedule::SuccessRateInertia s;
      s.omega_min = get_or(j, "omega_min", s.omega_min);
      s.omega_max = get_or(j, "omega_max", s.omega_max);
      s.c = get_or(j, "c", s.c);
      s.alpha = get_or(j, "alpha", s.alpha);
      return s;
    }
    if (type == "registered") return registry.resolve(j.at("name").get<std::string>());
    throw InputError("unknown schedule type '" + type + "'");
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed schedule: ") + e.what());
  }
}

json plan_to_json(const ExperimentPlan& plan) {
  json algs = json::array();
  for (const auto& a : plan.algorithms) algs.push_back({{"name", a.name}, {"schedule", schedule_to_json(a.spec)}});
  return {{"schema_version", kPlanSchemaVersion},
          {"algorithms", algs},
          {"functions", plan.functions},
          {"dimension", plan.dimension},
          {"pop_size", plan.pop_size},
          {"runs", plan.runs},
          {"evals_per_dim", plan.evals_per_dim},
          {"base_seed", plan.base_seed}};
}

ExperimentPlan plan_from_json(const json& j, const ScheduleRegistry& registry) {
  ExperimentPlan p;
  try {
    if (!j.is_object()) throw InputError("plan must be a JSON object");
    const int version = j.at("schema_version").get<int>();
    if (version != kPlanSchemaVersion) {
      throw InputError("plan schema_version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kPlanSchemaVersion) + ")");
    }
    for (const auto& a : j.at("algorithms")) {
      NamedSchedule ns;
      if (a.is_string()) {
        ns.name = a.get<std::string>();
        ns.spec = registry.resolve(ns.name);
      } else {
        ns.name = a.at("name").get<std::string>();
        ns.spec = schedule_from_json(a.contains("schedule") ? a.at("schedule") : json(ns.name), registry);
      }
      p.algorithms.push_back(std::move(ns));
    }
    p.functions = j.contains("functions") ? j.at("functions").get<std::vector<std::string>>()
                                          : classic_suite_names();
    p.dimension = get_or(j, "dimension", p.dimension);
    p.pop_size = get_or(j, "pop_size", p.pop_size);
    p.runs = get_or(j, "runs", p.runs);
    p.evals_per_dim = get_or(j, "evals_per_dim", p.evals_per_dim);
    p.base_seed = get_or(j, "base_seed", p.base_seed);
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed plan: ") + e.what());
  }
  p.validate();
  return p;
}

ExperimentPlan load_plan(const fs::path& path, const ScheduleRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open plan file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InputError("plan file " + path.string() + " is not valid JSON: " + e.what());
  }
  return plan_from_json(j, registry);
}

// ---- results ---------------------------------------------------------------

std::vector<double> ResultSet::values(std::size_t i, std::size_t k) const {
  std::vector<double> out;
  out.reserve(cells.at(i).at(k).size());
  for (const auto& r : cells[i][k]) out.push_back(r.best_value);
  return out;
}

std::size_t ResultSet::missing_runs() const {
  std::size_t missing = 0;
  for (const auto& row : cells) {
    for (const auto& cell : row) missing += runs - std::min(runs, cell.size());
  }
  return missing;
}

std::string cell_file_name(const std::string& algorithm, const std::string& function) {
  return algorithm + "__" + function + ".csv";
}

namespace {

constexpr const char* kCsvHeader = "run,seed,best_value";

template <class T>
bool parse_uint(std::string_view s, T& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

// Rows of one cell file. A trailing line without newline is an interrupted
// append and is dropped; the file is rewritten later.
std::vector<RunRecord> read_cell(const fs::path& path) {
  std::vector<RunRecord> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) break;
    const std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    if (header) {
      if (line != kCsvHeader) throw InputError("unexpected header in " + path.string());
      header = false;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    RunRecord r;
    std::optional<double> v;
    if (c1 == std::string_view::npos || c2 == std::string_view::npos ||
        !parse_uint(line.substr(0, c1), r.run) || !parse_uint(line.substr(c1 + 1, c2 - c1 - 1), r.seed) ||
        !(v = parse_double(line.substr(c2 + 1)))) {
      throw InputError("malformed row in " + path.string() + ": " + std::string(line));
    }
    r.best_value = *v;
    out.push_back(r);
  }
  return out;
}

std::string format_row(const RunRecord& r) {
  return std::to_string(r.run) + ',' + std::to_string(r.seed) + ',' + format_double(r.best_value) + '\n';
}

void write_cell(const fs::path& path, const std::vector<RunRecord>& rows) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << kCsvHeader << '\n';
    for (const auto& r : rows) out << format_row(r);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Keeps the first record per run index within [0, runs) whose seed matches.
std::vector<RunRecord> sanitize(std::vector<RunRecord> rows, std::size_t runs, std::uint64_t base,
                                std::size_t i, std::size_t k, const fs::path& path) {
  std::vector<RunRecord> out;
  std::vector<bool> seen(runs, false);
  for (const auto& r : rows) {
    if (r.run >= runs || seen[r.run]) continue;
    if (r.seed != derive_seed(base, i, k, r.run)) {
      throw InputError("seed mismatch for run " + std::to_string(r.run) + " in " + path.string());
    }
    seen[r.run] = true;
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](const RunRecord& a, const RunRecord& b) { return a.run < b.run; });
  return out;
}

json make_manifest(const ExperimentPlan& plan) {
  return {{"toolkit_version", MAPSO_VERSION},
          {"seed_derivation", "mix64(mix64(mix64(base ^ mix64(i)) ^ mix64(k)) ^ mix64(r)), mix64 = splitmix64 finalizer"},
          {"plan", plan_to_json(plan)}};
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw InputError(path.string() + " is not valid JSON: " + e.what());
  }
}

void write_failures(const fs::path& path, const std::vector<RunFailure>& failures) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << "algorithm,function,run,seed,error\n";
  for (const auto& f : failures) {
    std::string msg = f.message;
    std::replace(msg.begin(), msg.end(), '"', '\'');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    out << f.algorithm << ',' << f.function << ',' << f.run << ',' << f.seed << ",\"" << msg << "\"\n";
  }
}

struct Job {
  std::size_t i, k, r;
  std::uint64_t seed;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentPlan& plan, const ExperimentOptions& options) {
  plan.validate();
  const bool persist = !options.output_dir.empty();
  const fs::path runs_dir = options.output_dir / "runs";
  const std::size_t na = plan.algorithms.size();
  const std::size_t nf = plan.functions.size();

  if (persist) {
    fs::create_directories(runs_dir);
    const fs::path manifest_path = options.output_dir / "manifest.json";
    const json manifest = make_manifest(plan);
    if (fs::exists(manifest_path)) {
      if (read_json(manifest_path).value("plan", json()) != manifest["plan"]) {
        throw InputError("output directory " + options.output_dir.string() +
                         " holds results of a different plan; use a fresh directory");
      }
    } else {
      std::ofstream(manifest_path) << manifest.dump(2) << '\n';
    }
  }

  ExperimentReport report;
  ResultSet& rs = report.results;
  rs.runs = plan.runs;
  for (const auto& a : plan.algorithms) rs.algorithms.push_back(a.name);
  rs.functions = plan.functions;
  rs.cells.assign(na, std::vector<std::vector<RunRecord>>(nf));

  std::vector<TestFunction> funcs;
  for (const auto& f : plan.functions) funcs.push_back(classic_function(f, plan.dimension));

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t k = 0; k < nf; ++k) {
      std::vector<bool> done(plan.runs, false);
      if (persist) {
        const fs::path path = runs_dir / cell_file_name(rs.algorithms[i], rs.functions[k]);
        rs.cells[i][k] = sanitize(read_cell(path), plan.runs, plan.base_seed, i, k, path);
        for (const auto& r : rs.cells[i][k]) done[r.run] = true;
        report.reused += rs.cells[i][k].size();
        if (!fs::exists(path)) write_cell(path, {});
      }
      for (std::size_t r = 0; r < plan.runs; ++r) {
        if (!done[r]) jobs.push_back({i, k, r, derive_seed(plan.base_seed, i, k, r)});
      }
    }
  }
  if (options.max_new_runs && jobs.size() > *options.max_new_runs) jobs.resize(*options.max_new_runs);

  std::mutex mu;
  std::atomic<std::size_t> next{0};
  const std::size_t budget = plan.budget_evals();
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= jobs.size()) return;
      const Job& job = jobs[idx];
      const auto& fn = funcs[job.k];
      try {
        const RunResult res = run(fn.problem(), plan.algorithms[job.i].spec, plan.pop_size, budget, job.seed);
        const RunRecord rec{job.r, job.seed, res.best_value};
        std::lock_guard lock(mu);
        rs.cells[job.i][job.k].push_back(rec);
        ++report.executed;
        if (persist) {
          std::ofstream out(runs_dir / cell_file_name(rs.algorithms[job.i], fn.name),
                            std::ios::binary | std::ios::app);
          out << format_row(rec) << std::flush;
        }
      } catch (const std::exception& e) {
        std::lock_guard lock(mu);
        report.failures.push_back({rs.algorithms[job.i], fn.name, job.r, job.seed, e.what()});
        if (options.log) {
          *options.log << "run failed: " << rs.algorithms[job.i] << " on " << fn.name << " run " << job.r
                       << ": " << e.what() << '\n';
        }
      }
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(options.parallelism, jobs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t n = 0; n < threads; ++n) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::sort(report.failures.begin(), report.failures.end(), [](const RunFailure& a, const RunFailure& b) {
    return std::tie(a.algorithm, a.function, a.run) < std::tie(b.algorithm, b.function, b.run);
  });
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t k = 0; k < nf; ++k) {
      auto& cell = rs.cells[i][k];
      std::sort(cell.begin(), cell.end(), [](const RunRecord& a, const RunRecord& b) { return a.run < b.run; });
      if (persist) write_cell(runs_dir / cell_file_name(rs.algorithms[i], rs.functions[k]), cell);
    }
  }
  if (persist) {
    const fs::path fpath = options.output_dir / "failures.csv";
    if (!report.failures.empty()) {
      write_failures(fpath, report.failures);
    } else if (fs::exists(fpath)) {
      fs::remove(fpath);
    }
  }
  return report;
}

ResultSet load_results(const fs::path& dir) {
  const json manifest = read_json(dir / "manifest.json");
  if (!manifest.contains("plan")) throw InputError("manifest in " + dir.string() + " has no plan");
  const json& p = manifest["plan"];
  ResultSet rs;
  std::uint64_t base = 0;
  try {
    for (const auto& a : p.at("algorithms")) rs.algorithms.push_back(a.at("name").get<std::string>());
    rs.functions = p.at("functions").get<std::vector<std::string>>();
    rs.runs = p.at("runs").get<std::size_t>();
    base = p.at("base_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw InputError("malformed manifest in " + dir.string() + ": " + e.what());
  }
  rs.cells.assign(rs.algorithms.size(), std::vector<std::vector<RunRecord>>(rs.functions.size()));
  for (std::size_t i = 0; i < rs.algorithms.size(); ++i) {
    for (std::size_t k = 0; k < rs.functions.size(); ++k) {
      const fs::path path = dir / "runs" / cell_file_name(rs.algorithms[i], rs.functions[k]);
      rs.cells[i][k] = sanitize(read_cell(path), rs.runs, base, i, k, path);
    }
  }
  return rs;
}

}  // namespace mapso
