#pragma once

// Pairwise rank-sum dominance, tournament matrix and beat digraph.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mapso/benchmark.hpp"

namespace mapso {

/// Samples of this size or larger on both sides use the normal approximation.
inline constexpr std::size_t kExactSampleLimit = 20;

/// Two-sided rank-sum p-value: exact permutation distribution when either side
/// has fewer than kExactSampleLimit values, otherwise the normal approximation.
/// Returns 1 when all pooled values are identical. Requires both sizes >= 2.
double wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

/// Exact two-sided p: P(|W - E W| >= |w - E W|) over all C(n1+n2, n1) equally
/// likely rank assignments, midranks kept for ties.
double wilcoxon_rank_sum_exact(std::span<const double> a, std::span<const double> b);

/// Normal approximation with tie-corrected variance and a 0.5 continuity correction.
double wilcoxon_rank_sum_normal(std::span<const double> a, std::span<const double> b);

double median(std::span<const double> x);

/// +1 when a is significantly better (p < threshold and smaller median), -1
/// when b is, 0 otherwise.
int dominance(std::span<const double> a, std::span<const double> b, double p_threshold = 0.05);

struct TournamentMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<int>> t;  // t[i][j] = sum over functions of dominance(i, j)

  std::size_t size() const { return names.size(); }
};

/// Requires a complete ResultSet.
TournamentMatrix tournament(const ResultSet& results, double p_threshold = 0.05);

struct BeatDigraph {
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (i, j): i beats j
  std::vector<std::size_t> beat_count;                      // out-degree
  std::vector<std::size_t> ranking;                         // by beat_count descending, then name

  std::size_t two_cycles() const;
};

BeatDigraph beat_digraph(const TournamentMatrix& t);

void write_tournament_csv(std::ostream& os, const TournamentMatrix& t);
/// Columns winner,loser,margin.
void write_edges_csv(std::ostream& os, const BeatDigraph& g, const TournamentMatrix& t);
/// Graphviz digraph; node labels carry the beat count.
void write_dot(std::ostream& os, const BeatDigraph& g);
/// Columns rank,algorithm,beats.
void write_ranking_csv(std::ostream& os, const BeatDigraph& g);

}  // namespace mapso
