#pragma once

#include <string>
#include <vector>

#include "corecluster/cooccurrence.hpp"

namespace corecluster {

/// Threshold graph over the items of one original cluster: vertices are
/// item ids (sorted, duplicate-free) and an edge joins two items iff their
/// estimated co-occurrence probability reaches the threshold. No self-loops;
/// adjacency is symmetric and indexed by vertex position.
struct CoocGraph {
  std::vector<int> vertices;
  std::vector<std::vector<bool>> adjacency;

  int size() const { return static_cast<int>(vertices.size()); }
};

/// A clique in a CoocGraph, stored as sorted item ids. The search routines
/// only return cliques that are maximal in their source graph.
struct Clique {
  std::vector<int> members;
};

/// Graph on `members` with an edge (i, j) iff p[i][j] >= 1 - alpha — the
/// comparison is inclusive ("at least"). Throws UsageError for an empty or
/// duplicated member list, DataError for ids outside the estimate.
CoocGraph build_threshold_graph(const CoocEstimate& est,
                                const std::vector<int>& members, double alpha);

/// Exact maximum clique via Bron–Kerbosch with pivoting and an
/// incumbent-size bound. Among equal-cardinality maximum cliques the one
/// whose sorted member list is lexicographically smallest is returned, so
/// results are deterministic across runs and platforms. Every result is
/// verified post hoc (pairwise adjacency and maximality) before being
/// returned. The exponential worst case is accepted — the problem is
/// NP-hard — but a configurable vertex ceiling guards runaway instances:
/// exceeding it throws ComputeError rather than degrading silently.
Clique largest_maximal_clique(const CoocGraph& g, int vertex_ceiling = 5000);

/// Exhaustive-subset oracle with the same tie rule; restricted to graphs of
/// at most 22 vertices (throws UsageError beyond that).
Clique brute_force_max_clique(const CoocGraph& g);

/// Edge list "u,v" (item ids, u < v), one row per edge, for external
/// inspection.
void write_edge_list_csv(const CoocGraph& g, const std::string& path);

}  // namespace corecluster
