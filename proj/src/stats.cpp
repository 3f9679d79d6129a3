#include "mapso/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>

#include "mapso/errors.hpp"

namespace mapso {

namespace {

void check_sizes(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw InputError("rank-sum test needs at least 2 values per sample");
  for (double v : a) {
    if (std::isnan(v)) throw InputError("rank-sum test got NaN");
  }
  for (double v : b) {
    if (std::isnan(v)) throw InputError("rank-sum test got NaN");
  }
}

struct Ranked {
  std::vector<std::int64_t> doubled;  // 2 * midrank, pooled order: a then b
  double tie_sum = 0.0;               // sum of t^3 - t over tie groups
};

Ranked rank_pooled(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size() + b.size();
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return pooled[x] < pooled[y]; });

  Ranked r;
  r.doubled.resize(n);
  for (std::size_t lo = 0; lo < n;) {
    std::size_t hi = lo + 1;
    while (hi < n && pooled[order[hi]] == pooled[order[lo]]) ++hi;
    // ranks lo+1 .. hi share midrank (lo+1+hi)/2
    const auto twice = static_cast<std::int64_t>(lo + 1 + hi);
    for (std::size_t m = lo; m < hi; ++m) r.doubled[order[m]] = twice;
    const double t = static_cast<double>(hi - lo);
    r.tie_sum += t * t * t - t;
    lo = hi;
  }
  return r;
}

bool all_identical(std::span<const double> a, std::span<const double> b) {
  const double v = a.front();
  return std::all_of(a.begin(), a.end(), [v](double x) { return x == v; }) &&
         std::all_of(b.begin(), b.end(), [v](double x) { return x == v; });
}

}  // namespace

double wilcoxon_rank_sum_exact(std::span<const double> a, std::span<const double> b) {
  check_sizes(a, b);
  if (all_identical(a, b)) return 1.0;
  const Ranked r = rank_pooled(a, b);
  const std::size_t n1 = a.size();
  const std::size_t n = r.doubled.size();

  std::int64_t observed = 0;
  for (std::size_t m = 0; m < n1; ++m) observed += r.doubled[m];
  // doubled rank sum has mean n1 (n + 1)
  const auto centre = static_cast<std::int64_t>(n1 * (n + 1));
  const std::int64_t dev = std::llabs(observed - centre);

  // ways[c][s]: subsets of size c with doubled rank sum s.
  const std::int64_t max_sum = 2 * static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n1);
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(max_sum) + 1, 0.0));
  ways[0][0] = 1.0;
  for (std::size_t item = 0; item < n; ++item) {
    const std::int64_t w = r.doubled[item];
    for (std::size_t c = std::min(n1, item + 1); c >= 1; --c) {
      auto& dst = ways[c];
      const auto& src = ways[c - 1];
      for (std::int64_t s = max_sum; s >= w; --s) {
        if (src[s - w] != 0.0) dst[s] += src[s - w];
      }
    }
  }
  double hit = 0.0;
  double total = 0.0;
  for (std::int64_t s = 0; s <= max_sum; ++s) {
    const double count = ways[n1][s];
    if (count == 0.0) continue;
    total += count;
    if (std::llabs(s - centre) >= dev) hit += count;
  }
  return std::min(1.0, hit / total);
}

double wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b) {
  check_sizes(a, b);
  if (all_identical(a, b)) return 1.0;
  const Ranked r = rank_pooled(a, b);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;
  double w = 0.0;
  for (std::size_t m = 0; m < a.size(); ++m) w += 0.5 * static_cast<double>(r.doubled[m]);
  const double u = w - n1 * (n1 + 1.0) / 2.0;
  const double mean = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((n + 1.0) - r.tie_sum / (n * (n - 1.0)));
  if (!(var > 0.0)) return 1.0;
  const double z = std::max(0.0, std::abs(u - mean) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b) {
  if (std::min(a.size(), b.size()) < kExactSampleLimit) return wilcoxon_rank_sum_exact(a, b);
  return wilcoxon_rank_sum_normal(a, b);
}

double median(std::span<const double> x) {
  if (x.empty()) throw InputError("median of an empty sample");
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

int dominance(std::span<const double> a, std::span<const double> b, double p_threshold) {
  if (!(p_threshold > 0.0 && p_threshold <= 1.0)) throw InputError("p threshold must lie in (0,1]");
  if (!(wilcoxon_rank_sum(a, b) < p_threshold)) return 0;
  const double ma = median(a);
  const double mb = median(b);
  if (ma < mb) return 1;
  if (mb < ma) return -1;
  return 0;
}

TournamentMatrix tournament(const ResultSet& results, double p_threshold) {
  if (!results.complete()) {
    throw InputError("result set is missing " + std::to_string(results.missing_runs()) +
                     " runs; resume the benchmark before comparing");
  }
  const std::size_t na = results.algorithms.size();
  TournamentMatrix m;
  m.names = results.algorithms;
  m.t.assign(na, std::vector<int>(na, 0));
  for (std::size_t k = 0; k < results.functions.size(); ++k) {
    std::vector<std::vector<double>> samples;
    for (std::size_t i = 0; i < na; ++i) samples.push_back(results.values(i, k));
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < na; ++j) {
        if (i != j) m.t[i][j] += dominance(samples[i], samples[j], p_threshold);
      }
    }
  }
  return m;
}

std::size_t BeatDigraph::two_cycles() const {
  std::size_t count = 0;
  for (const auto& [i, j] : edges) {
    if (std::find(edges.begin(), edges.end(), std::make_pair(j, i)) != edges.end()) ++count;
  }
  return count / 2;
}

BeatDigraph beat_digraph(const TournamentMatrix& t) {
  BeatDigraph g;
  g.names = t.names;
  const std::size_t n = t.size();
  g.beat_count.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && t.t[i][j] > 0) {
        g.edges.emplace_back(i, j);
        ++g.beat_count[i];
      }
    }
  }
  g.ranking.resize(n);
  std::iota(g.ranking.begin(), g.ranking.end(), 0);
  std::stable_sort(g.ranking.begin(), g.ranking.end(), [&](std::size_t x, std::size_t y) {
    if (g.beat_count[x] != g.beat_count[y]) return g.beat_count[x] > g.beat_count[y];
    return g.names[x] < g.names[y];
  });
  return g;
}

void write_tournament_csv(std::ostream& os, const TournamentMatrix& t) {
  os << "algorithm";
  for (const auto& n : t.names) os << ',' << n;
  os << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << t.names[i];
    for (std::size_t j = 0; j < t.size(); ++j) os << ',' << t.t[i][j];
    os << '\n';
  }
}

void write_edges_csv(std::ostream& os, const BeatDigraph& g, const TournamentMatrix& t) {
  os << "winner,loser,margin\n";
  for (const auto& [i, j] : g.edges) os << g.names[i] << ',' << g.names[j] << ',' << t.t[i][j] << '\n';
}

void write_dot(std::ostream& os, const BeatDigraph& g) {
  os << "// edge a -> b: a is significantly better than b on more functions than the reverse\n"
     << "// node label count = out-degree = number of algorithms beaten\n"
     << "digraph beats {\n";
  for (std::size_t i = 0; i < g.names.size(); ++i) {
    os << "  \"" << g.names[i] << "\" [label=\"" << g.names[i] << " (" << g.beat_count[i] << ")\"];\n";
  }
  for (const auto& [i, j] : g.edges) os << "  \"" << g.names[i] << "\" -> \"" << g.names[j] << "\";\n";
  os << "}\n";
}

void write_ranking_csv(std::ostream& os, const BeatDigraph& g) {
  os << "rank,algorithm,beats\n";
  for (std::size_t r = 0; r < g.ranking.size(); ++r) {
    const std::size_t i = g.ranking[r];
    os << r + 1 << ',' << g.names[i] << ',' << g.beat_count[i] << '\n';
  }
}

}  // namespace mapso
