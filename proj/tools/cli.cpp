#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mapso/benchmark.hpp"
#include "mapso/errors.hpp"
#include "mapso/format.hpp"
#include "mapso/moments.hpp"
#include "mapso/pattern.hpp"
#include "mapso/schedules.hpp"
#include "mapso/simulation.hpp"
#include "mapso/stats.hpp"
#include "mapso/swarm.hpp"

namespace mapso::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Globals {
  std::uint64_t seed = 1;
  std::string output;
  std::string format = "csv";
  std::size_t parallelism = 1;
};

// Records every effective setting so the block on stderr reproduces the run.
class Effective {
 public:
  explicit Effective(std::string command) : command_(std::move(command)) {}

  template <class T>
  void add(const std::string& flag, const T& value) {
    std::ostringstream os;
    if constexpr (std::is_floating_point_v<T>) {
      os << format_double(value);
    } else {
      os << value;
    }
    flags_.emplace_back(flag, os.str());
  }
  void add_switch(const std::string& flag, bool on) {
    if (on) flags_.emplace_back(flag, "");
  }

  void print(std::ostream& err) const {
    err << "# mapso " << MAPSO_VERSION << " effective config\n";
    for (const auto& [k, v] : flags_) err << "#   " << k << (v.empty() ? "" : " = " + v) << '\n';
    err << "# reproduce: mapso " << command_;
    for (const auto& [k, v] : flags_) {
      err << ' ' << k;
      if (!v.empty()) err << ' ' << quote(v);
    }
    err << '\n';
  }

 private:
  static std::string quote(const std::string& v) {
    if (v.find_first_of(" \t'\"") == std::string::npos) return v;
    return "'" + v + "'";
  }
  std::string command_;
  std::vector<std::pair<std::string, std::string>> flags_;
};

// Rows of scalars emitted as CSV or as a JSON array of objects.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      json arr = json::array();
      for (const auto& r : rows) {
        json obj = json::object();
        for (std::size_t c = 0; c < columns.size(); ++c) obj[columns[c]] = r[c];
        arr.push_back(obj);
      }
      os << arr.dump(2) << '\n';
      return;
    }
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c];
    os << '\n';
    for (const auto& r : rows) {
      for (std::size_t c = 0; c < r.size(); ++c) {
        if (c) os << ',';
        const json& v = r[c];
        if (v.is_number_float()) {
          os << format_double(v.get<double>());
        } else if (v.is_string()) {
          os << v.get<std::string>();
        } else {
          os << v.dump();
        }
      }
      os << '\n';
    }
  }
};

// Two-column field,value report (JSON: one object).
struct Report {
  std::vector<std::pair<std::string, json>> fields;

  void add(const std::string& k, json v) { fields.emplace_back(k, std::move(v)); }

  void write(std::ostream& os, const std::string& format) const {
    if (format == "json") {
      json obj = json::object();
      for (const auto& [k, v] : fields) obj[k] = v;
      os << obj.dump(2) << '\n';
      return;
    }
    Table t{{"field", "value"}, {}};
    for (const auto& [k, v] : fields) t.rows.push_back({k, v});
    t.write(os, "csv");
  }
};

// Non-finite doubles are not representable in JSON numbers.
json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

template <class Fn>
void with_output(const Globals& g, std::ostream& out, Fn&& fn) {
  if (g.output.empty()) {
    fn(out);
    return;
  }
  std::ofstream f(g.output, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot open output file " + g.output);
  fn(f);
}

template <class Fn>
void write_file(const fs::path& path, Fn&& fn) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot open output file " + path.string());
  fn(f);
}

struct IpsoFlags {
  double omega = 0.0;
  double c = 0.0;
  double alpha = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--omega", omega, "inertia weight")->required();
    app->add_option("--c", c, "personal-best acceleration bound")->required();
    app->add_option("--alpha", alpha, "global/personal acceleration ratio")->capture_default_str();
  }
  void record(Effective& e) const {
    e.add("--omega", omega);
    e.add("--c", c);
    e.add("--alpha", alpha);
  }
  IpsoParams params() const { return {omega, c, alpha}; }
};

struct AttractorFlags {
  std::string kind = "iid";
  double p_lo = -9.0, p_hi = 11.0, g_lo = -5.0, g_hi = 15.0;
  double p0 = 1.0, g0 = 5.0;

  void attach(CLI::App* app) {
    app->add_option("--attractors", kind, "iid | walk | fixed")
        ->check(CLI::IsMember({"iid", "walk", "fixed"}))
        ->capture_default_str();
    app->add_option("--p-lo", p_lo, "iid: lower end of p")->capture_default_str();
    app->add_option("--p-hi", p_hi, "iid: upper end of p")->capture_default_str();
    app->add_option("--g-lo", g_lo, "iid: lower end of g")->capture_default_str();
    app->add_option("--g-hi", g_hi, "iid: upper end of g")->capture_default_str();
    app->add_option("--p0", p0, "walk/fixed: initial or fixed p")->capture_default_str();
    app->add_option("--g0", g0, "walk/fixed: initial or fixed g")->capture_default_str();
  }
  void record(Effective& e) const {
    e.add("--attractors", kind);
    if (kind == "iid") {
      e.add("--p-lo", p_lo);
      e.add("--p-hi", p_hi);
      e.add("--g-lo", g_lo);
      e.add("--g-hi", g_hi);
    } else {
      e.add("--p0", p0);
      e.add("--g0", g0);
    }
  }
  AttractorProcess process() const {
    AttractorProcess p;
    if (kind == "iid") {
      p = IidUniformAttractors{{p_lo, p_hi}, {g_lo, g_hi}};
    } else if (kind == "walk") {
      RandomWalkAttractors w;
      w.p0 = p0;
      w.g0 = g0;
      p = w;
    } else {
      p = FixedAttractors{p0, g0};
    }
    validate(p);
    return p;
  }
};

// ---- subcommands -----------------------------------------------------------

struct SolveCmd {
  double rho1 = 0.0, vc = 1.0, focus = 1.0;
  int alpha_sign = 1;

  void attach(CLI::App* app) {
    app->add_option("--rho1", rho1, "target lag-1 autocorrelation in (-1,1)")->required();
    app->add_option("--vc", vc, "target coefficient part of the search range (> 0)")->required();
    app->add_option("--focus", focus, "target focus (> 0)")->required();
    app->add_option("--alpha-sign", alpha_sign, "+1 or -1")->capture_default_str();
  }

  int run(const Globals& g, std::ostream& out, std::ostream& err) const {
    Effective e("solve");
    e.add("--rho1", rho1);
    e.add("--vc", vc);
    e.add("--focus", focus);
    e.add("--alpha-sign", alpha_sign);
    e.add("--format", g.format);
    e.print(err);

    const IpsoParams p = solve_coefficients({rho1, vc, focus}, alpha_sign);
    const CoefficientMoments m = ipso_to_moments(p);
    const double r = mapso::rho1(m);
    const double v = mapso::vc(p);
    const double f = mapso::focus(m);
    const IpsoStability s = ipso_stability(p);
    Report rep;
    rep.add("omega", num(p.omega));
    rep.add("c", num(p.c));
    rep.add("alpha", num(p.alpha));
    rep.add("rho1_check", num(r));
    rep.add("vc_check", num(v));
    rep.add("focus_check", num(f));
    rep.add("rho1_residual", num(r - rho1));
    rep.add("vc_residual", num(v - vc));
    rep.add("focus_residual", num(f - focus));
    rep.add("omega_in_range", s.omega_in_range);
    rep.add("attraction", num(s.attraction));
    rep.add("attraction_bound", num(s.attraction_bound));
    rep.add("attraction_in_range", s.attraction_in_range);
    rep.add("k2", num(s.k2));
    rep.add("k2_negative", s.k2_negative);
    rep.add("convergent", s.convergent());
    with_output(g, out, [&](std::ostream& os) { rep.write(os, g.format); });
    return kExitOk;
  }
};

struct AutocorrCmd {
  IpsoFlags ipso;
  AttractorFlags attractors;
  std::size_t max_lag = 20;
  bool simulate = false;
  std::size_t iters = 101000;
  std::size_t burn_in = 1000;

  void attach(CLI::App* app) {
    ipso.attach(app);
    attractors.attach(app);
    app->add_option("--max-lag", max_lag, "largest lag")->capture_default_str();
    app->add_flag("--simulate", simulate, "add an empirical column from one simulated trace");
    app->add_option("--iters", iters, "trace length including burn-in")->capture_default_str();
    app->add_option("--burn-in", burn_in, "steps discarded before estimating")->capture_default_str();
  }

  int run(const Globals& g, std::ostream& out, std::ostream& err) const {
    Effective e("autocorr");
    ipso.record(e);
    e.add("--max-lag", max_lag);
    e.add_switch("--simulate", simulate);
    if (simulate) {
      attractors.record(e);
      e.add("--iters", iters);
      e.add("--burn-in", burn_in);
      e.add("--seed", g.seed);
    }
    e.add("--format", g.format);
    e.print(err);

    const AutocorrelationSeq analytic = autocorrelation(ipso_to_moments(ipso.params()), max_lag);
    std::optional<AutocorrelationSeq> empirical;
    if (simulate) {
      SimConfig cfg;
      cfg.iterations = iters;
      cfg.burn_in = burn_in;
      cfg.seed = g.seed;
      const SimTrace trace = mapso::simulate(ipso.params(), attractors.process(), cfg);
      if (trace.diverged) throw StabilityError("simulated trace diverged");
      empirical = empirical_autocorrelation(trace, burn_in, max_lag);
    }
    Table t;
    t.columns = {"lag", "rho_analytic"};
    if (empirical) t.columns.push_back("rho_empirical");
    for (std::size_t i = 0; i <= max_lag; ++i) {
      std::vector<json> row{i, num(analytic[i])};
      if (empirical) row.push_back(num((*empirical)[i]));
      t.rows.push_back(std::move(row));
    }
    with_output(g, out, [&](std::ostream& os) { t.write(os, g.format); });
    return kExitOk;
  }
};

struct MomentsCmd {
  IpsoFlags ipso;
  AttractorFlags attractors;
  std::size_t steps = 0;
  double x0 = 0.0, x1 = 0.0;

  void attach(CLI::App* app) {
    ipso.attach(app);
    attractors.attach(app);
    app->add_option("--steps", steps, "emit the moment trajectory for this many steps instead of the summary")
        ->capture_default_str();
    app->add_option("--x0", x0, "trajectory: position at t=0")->capture_default_str();
    app->add_option("--x1", x1, "trajectory: position at t=1")->capture_default_str();
  }

  int run(const Globals& g, std::ostream& out, std::ostream& err) const {
    if (attractors.kind == "walk") throw InputError("moments: the random-walk attractor process has no stationary moments");
    Effective e("moments");
    ipso.record(e);
    attractors.record(e);
    e.add("--steps", steps);
    if (steps > 0) {
      e.add("--x0", x0);
      e.add("--x1", x1);
    }
    e.add("--format", g.format);
    e.print(err);

    const CoefficientMoments cm = ipso_to_moments(ipso.params());
    const AttractorMoments am = attractor_moments(attractors.process());
    const MomentSystem sys = build_moment_system(cm, am);

    if (steps > 0) {
      const MomentTrajectory traj = iterate_moments(sys, MomentState::from_positions(x1, x0), steps);
      Table t{{"t", "mean", "variance", "lag1_covariance"}, {}};
      for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const auto& s = traj.states[i];
        t.rows.push_back({i + 2, num(s.mean()), num(s.variance()), num(s.lag1_covariance())});
      }
      with_output(g, out, [&](std::ostream& os) { t.write(os, g.format); });
      if (traj.diverged) err << "# warning: moment trajectory diverged after " << traj.states.size() << " steps\n";
      return kExitOk;
    }

    Report rep;
    rep.add("order1_convergent", is_order1_convergent(cm));
    rep.add("order2_convergent", is_order2_convergent(cm));
    rep.add("k2", num(order2_k2(cm)));
    rep.add("spectral_radius", num(spectral_radius(sys)));
    rep.add("expected_position", num(expectation_fixed_point(cm, am)));
    if (is_order2_convergent(cm)) {
      const double vx = variance_fixed_point(cm, am);
      const double r1 = rho1(cm);
      rep.add("position_variance", num(vx));
      rep.add("rho1", num(r1));
      rep.add("movement_distance", num(expected_movement_distance(vx, r1)));
      rep.add("gamma", num(gamma_factor(am, ipso.alpha)));
      rep.add("vc", num(vc(ipso.params())));
      const FixedPointIteration it = iterate_to_fixed_point(sys, MomentState::from_positions(0.0, 0.0));
      rep.add("iterated_mean", num(it.state.mean()));
      rep.add("iterated_variance", num(it.state.variance()));
      rep.add("iteration_steps", it.steps);
    }
    rep.add("focus", num(focus(cm)));
    with_output(g, out, [&](std::ostream& os) { rep.write(os, g.format); });
    return kExitOk;
  }
};

struct SimulateCmd {
  IpsoFlags ipso;
  AttractorFlags attractors;
  std::size_t iters = 101000;
  std::size_t burn_in = 1000;
  bool summary = false;

  void attach(CLI::App* app) {
    ipso.attach(app);
    attractors.attach(app);
    app->add_option("--iters", iters, "trace length including burn-in")->capture_default_str();
    app->add_option("--burn-in", burn_in, "steps discarded by --summary")->capture_default_str();
    app->add_flag("--summary", summary, "print empirical statistics instead of the trace");
  }

  int run(const Globals& g, std::ostream& out, std::ostream& err) const {
    Effective e("simulate");
    ipso.record(e);
    attractors.record(e);
    e.add("--iters", iters);
    e.add("--burn-in", burn_in);
    e.add_switch("--summary", summary);
    e.add("--seed", g.seed);
    e.add("--format", g.format);
    e.print(err);

    SimConfig cfg;
    cfg.iterations = iters;
    cfg.burn_in = burn_in;
    cfg.seed = g.seed;
    cfg.log_attractors = !summary;
    const AttractorProcess proc = attractors.process();
    const SimTrace trace = simulate(ipso.params(), proc, cfg);

    if (!summary) {
      with_output(g, out, [&](std::ostream& os) {
        if (g.format == "json") {
          Table t{{"t", "x", "p", "g"}, {}};
          for (std::size_t i = 0; i < trace.positions.size(); ++i) {
            t.rows.push_back({i, num(trace.positions[i]), num(trace.p[i]), num(trace.g[i])});
          }
          t.write(os, "json");
        } else {
          write_trace_csv(os, trace);
        }
      });
      if (trace.diverged) err << "# warning: trace diverged\n";
      return kExitOk;
    }
    if (trace.diverged) throw StabilityError("simulated trace diverged");
    const SampleMoments sm = empirical_moments(trace, burn_in);
    Report rep;
    rep.add("samples", trace.positions.size() - burn_in);
    rep.add("mean", num(sm.mean));
    rep.add("variance", num(sm.variance));
    rep.add("rho1", num(empirical_autocorrelation(trace, burn_in, 1)[1]));
    rep.add("movement_distance", num(empirical_movement_distance(trace, burn_in)));
    if (!std::holds_alternative<RandomWalkAttractors>(proc)) {
      const AttractorMoments am = attractor_moments(proc);
      if (sm.mean != am.mu_g) rep.add("focus", num(empirical_focus(trace, burn_in, am.mu_p, am.mu_g)));
    }
    with_output(g, out, [&](std::ostream& os) { rep.write(os, g.format); });
    return kExitOk;
  }
};

struct ScheduleFlags {
  std::string name = "mapso";
  std::string json_text;

  void attach(CLI::App* app, const std::string& default_name) {
    name = default_name;
    app->add_option("--schedule", name, "registered schedule name")->capture_default_str();
    app->add_option("--schedule-json", json_text, "schedule as a JSON object (overrides --schedule)");
  }
  void record(Effective& e) const {
    if (json_text.empty()) {
      e.add("--schedule", name);
    } else {
      e.add("--schedule-json", json_text);
    }
  }
  ScheduleSpec resolve(const ScheduleRegistry& reg) const {
    if (json_text.empty()) return reg.resolve(name);
    json j;
    try {
      j = json::parse(json_text);
    } catch (const json::exception& ex) {
      throw InputError(std::string("--schedule-json is not valid JSON: ") + ex.what());
    }
    return schedule_from_json(j, reg);
  }
};

struct OptimizeCmd {
  std::string function = "sphere";
  std::size_t dim = 10;
  std::size_t pop = 20;
  std::size_t evals_per_dim = 5000;
  ScheduleFlags schedule;

  void attach(CLI::App* app) {
    app->add_option("--function", function, "classic suite member")->capture_default_str();
    app->add_option("--dim", dim, "problem dimension")->capture_default_str();
    app->add_option("--pop", pop, "population size")->capture_default_str();
    app->add_option("--evals-per-dim", evals_per_dim, "budget = evals-per-dim * dim")->capture_default_str();
    schedule.attach(app, "mapso");
  }

  int run(const Globals& g, std::ostream& out, std::ostream& err, const ScheduleRegistry& reg) const {
    Effective e("optimize");
    e.add("--function", function);
    e.add("--dim", dim);
    e.add("--pop", pop);
    e.add("--evals-per-dim", evals_per_dim);
    schedule.record(e);
    e.add("--seed", g.seed);
    e.add("--format", g.format);
    e.print(err);

    const TestFunction fn = classic_function(function, dim);
    const RunResult r = mapso::run(fn.problem(), schedule.resolve(reg), pop, evals_per_dim * dim, g.seed);
    with_output(g, out, [&](std::ostream& os) {
      if (g.format == "json") {
        json hist = json::array();
        for (const auto& h : r.history) hist.push_back({{"evals", h.evals}, {"best_value", num(h.best_value)}});
        json pos = json::array();
        for (double v : r.best_position) pos.push_back(num(v));
        json obj = {{"best_value", num(r.best_value)}, {"best_position", pos}, {"seed", r.seed},
                    {"steps", r.steps}, {"evals", r.evals}, {"nonfinite_evals", r.nonfinite_evals},
                    {"history", hist}};
        os << obj.dump(2) << '\n';
      } else {
        write_history_csv(os, r);
      }
    });
    err << "# best_value = " << format_double(r.best_value) << " after " << r.evals << " evaluations\n";
    if (r.nonfinite_evals > 0) err << "# warning: " << r.nonfinite_evals << " non-finite objective values\n";
    return kExitOk;
  }
};

struct BenchCmd {
  std::string plan_path;
  std::optional<std::size_t> max_runs;

  void attach(CLI::App* app) {
    app->add_option("--plan", plan_path, "plan JSON (default: built-in desk-scale plan)");
    app->add_option("--max-runs", max_runs, "stop after this many new runs; rerun to resume");
  }

  int run(const Globals& g, std::ostream& out, std::ostream& err, const ScheduleRegistry& reg) const {
    if (g.output.empty()) throw InputError("bench: --output <directory> is required");
    const ExperimentPlan plan = plan_path.empty() ? default_plan() : load_plan(plan_path, reg);
    Effective e("bench");
    if (!plan_path.empty()) e.add("--plan", plan_path);
    if (max_runs) e.add("--max-runs", *max_runs);
    e.add("--output", g.output);
    e.add("--parallelism", g.parallelism);
    e.print(err);
    err << "# plan: " << plan_to_json(plan).dump() << '\n';

    ExperimentOptions opt;
    opt.output_dir = g.output;
    opt.parallelism = g.parallelism;
    opt.max_new_runs = max_runs;
    opt.log = &err;
    const ExperimentReport rep = run_experiment(plan, opt);
    const std::size_t missing = rep.results.missing_runs();
    out << "executed " << rep.executed << " runs, reused " << rep.reused << ", failed " << rep.failures.size()
        << ", pending " << missing << '\n';
    if (!rep.failures.empty()) {
      err << "error: " << rep.failures.size() << " runs failed; see " << (fs::path(g.output) / "failures.csv").string()
          << '\n';
      return kExitNumerical;
    }
    if (missing > 0) err << "# " << missing << " runs pending; rerun the same command to resume\n";
    return kExitOk;
  }
};

struct CompareCmd {
  std::string results;
  double p_threshold = 0.05;

  void attach(CLI::App* app) {
    app->add_option("--results", results, "directory written by bench")->required();
    app->add_option("--p-threshold", p_threshold, "significance level")->capture_default_str();
  }

  int run(const Globals& g, std::ostream& out, std::ostream& err) const {
    Effective e("compare");
    e.add("--results", results);
    e.add("--p-threshold", p_threshold);
    if (!g.output.empty()) e.add("--output", g.output);
    e.add("--format", g.format);
    e.print(err);

    const ResultSet rs = load_results(results);
    if (!rs.complete()) {
      throw InputError("results in " + results + " are partial (" + std::to_string(rs.missing_runs()) +
                       " runs missing); resume with: mapso bench --plan <plan> --output " + results);
    }
    const TournamentMatrix t = tournament(rs, p_threshold);
    const BeatDigraph dg = beat_digraph(t);
    const fs::path dir = g.output.empty() ? fs::path(results) : fs::path(g.output);
    fs::create_directories(dir);
    write_file(dir / "tournament.csv", [&](std::ostream& os) { write_tournament_csv(os, t); });
    write_file(dir / "beats_edges.csv", [&](std::ostream& os) { write_edges_csv(os, dg, t); });
    write_file(dir / "beats.dot", [&](std::ostream& os) { write_dot(os, dg); });
    write_file(dir / "ranking.csv", [&](std::ostream& os) { write_ranking_csv(os, dg); });

    if (g.format == "json") {
      json ranking = json::array();
      for (std::size_t r = 0; r < dg.ranking.size(); ++r) {
        const std::size_t i = dg.ranking[r];
        ranking.push_back({{"rank", r + 1}, {"algorithm", dg.names[i]}, {"beats", dg.beat_count[i]}});
      }
      out << json({{"beat_count", "out-degree"}, {"ranking", ranking}, {"edges", dg.edges.size()}}).dump(2) << '\n';
    } else {
      out << "rank  beats  algorithm\n";
      for (std::size_t r = 0; r < dg.ranking.size(); ++r) {
        const std::size_t i = dg.ranking[r];
        out << std::setw(4) << r + 1 << "  " << std::setw(5) << dg.beat_count[i] << "  " << dg.names[i] << '\n';
      }
      out << "(beats = out-degree: number of algorithms significantly outperformed on more functions than not)\n";
    }
    err << "# wrote tournament.csv, beats_edges.csv, beats.dot, ranking.csv to " << dir.string() << '\n';
    return kExitOk;
  }
};

struct ScheduleDumpCmd {
  ScheduleFlags schedule;
  std::size_t tmax = 10000;
  std::size_t stride = 1;
  double success_rate = 0.0;

  void attach(CLI::App* app) {
    schedule.attach(app, "mapso");
    app->add_option("--tmax", tmax, "last iteration")->capture_default_str();
    app->add_option("--stride", stride, "emit every n-th iteration (t_max is always emitted)")
        ->capture_default_str();
    app->add_option("--success-rate", success_rate, "feedback fed to success-rate schedules")
        ->capture_default_str();
  }

  int run(const Globals& g, std::ostream& out, std::ostream& err, const ScheduleRegistry& reg) const {
    if (stride == 0) throw InputError("--stride must be positive");
    const ScheduleSpec spec = schedule.resolve(reg);
    Effective e("schedule-dump");
    schedule.record(e);
    e.add("--tmax", tmax);
    e.add("--stride", stride);
    e.add("--success-rate", success_rate);
    e.add("--seed", g.seed);
    e.add("--format", g.format);
    e.print(err);

    Rng rng(g.seed);
    Table t{{"t", "V_c", "rho1", "F", "omega", "c", "alpha"}, {}};
    const auto* mapso_spec = std::get_if<schedule::Mapso>(&spec);
    for (std::size_t step = 0; step <= tmax; ++step) {
      // the generator runs every iteration so random schedules match an optimiser run
      const IpsoParams p = coefficients_at(spec, {success_rate, step, tmax}, rng);
      if (step % stride != 0 && step != tmax) continue;
      double v, r, f;
      if (mapso_spec) {
        v = mapso_vc(step, tmax, mapso_spec->config);
        r = mapso_rho1(step, tmax, mapso_spec->config);
        f = mapso_focus(step, tmax, mapso_spec->config);
      } else {
        const CoefficientMoments m = ipso_to_moments(p);
        v = vc(p);
        r = rho1(m);
        f = focus(m);
      }
      t.rows.push_back({step, num(v), num(r), num(f), num(p.omega), num(p.c), num(p.alpha)});
    }
    with_output(g, out, [&](std::ostream& os) { t.write(os, g.format); });
    return kExitOk;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Movement-pattern toolkit for inertia-weight particle swarms", "mapso"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", MAPSO_VERSION);

  Globals g;
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--output", g.output, "output file (bench/compare: directory)");
  app.add_option("--format", g.format, "csv | json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--parallelism", g.parallelism, "concurrent benchmark runs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SolveCmd solve;
  AutocorrCmd autocorr;
  MomentsCmd moments;
  SimulateCmd simulate;
  OptimizeCmd optimize;
  BenchCmd bench;
  CompareCmd compare;
  ScheduleDumpCmd dump;
  auto* s_solve = app.add_subcommand("solve", "coefficients for a target movement pattern");
  auto* s_auto = app.add_subcommand("autocorr", "analytic (and simulated) autocorrelation by lag");
  auto* s_mom = app.add_subcommand("moments", "equilibrium moments and stability of a coefficient set");
  auto* s_sim = app.add_subcommand("simulate", "one-particle trace under stochastic attractors");
  auto* s_opt = app.add_subcommand("optimize", "one swarm run on a classic test function");
  auto* s_bench = app.add_subcommand("bench", "run or resume an experiment plan");
  auto* s_cmp = app.add_subcommand("compare", "tournament and beat digraph from bench results");
  auto* s_dump = app.add_subcommand("schedule-dump", "per-iteration coefficients of a schedule");
  solve.attach(s_solve);
  autocorr.attach(s_auto);
  moments.attach(s_mom);
  simulate.attach(s_sim);
  optimize.attach(s_opt);
  bench.attach(s_bench);
  compare.attach(s_cmp);
  dump.attach(s_dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    const ScheduleRegistry reg = ScheduleRegistry::with_builtins();
    if (s_solve->parsed()) return solve.run(g, out, err);
    if (s_auto->parsed()) return autocorr.run(g, out, err);
    if (s_mom->parsed()) return moments.run(g, out, err);
    if (s_sim->parsed()) return simulate.run(g, out, err);
    if (s_opt->parsed()) return optimize.run(g, out, err, reg);
    if (s_bench->parsed()) return bench.run(g, out, err, reg);
    if (s_cmp->parsed()) return compare.run(g, out, err);
    if (s_dump->parsed()) return dump.run(g, out, err, reg);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }
  return kExitOther;
}

}  // namespace mapso::cli
