#include "corecluster/clique.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "corecluster/errors.hpp"

namespace corecluster {

namespace {

/// Fixed-width bitset over graph vertices; one word per 64 vertices.
class VertexSet {
 public:
  explicit VertexSet(int words) : words_(words, 0) {}

  void add(int v) { words_[v >> 6] |= std::uint64_t{1} << (v & 63); }
  void remove(int v) { words_[v >> 6] &= ~(std::uint64_t{1} << (v & 63)); }
  bool contains(int v) const {
    return (words_[v >> 6] >> (v & 63)) & 1;
  }
  bool empty() const {
    for (auto w : words_) {
      if (w) return false;
    }
    return true;
  }
  int count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }
  VertexSet intersect(const VertexSet& o) const {
    VertexSet out(static_cast<int>(words_.size()));
    for (std::size_t i = 0; i < words_.size(); ++i) {
      out.words_[i] = words_[i] & o.words_[i];
    }
    return out;
  }
  int intersect_count(const VertexSet& o) const {
    int c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      c += std::popcount(words_[i] & o.words_[i]);
    }
    return c;
  }
  /// Visits members in ascending order.
  template <typename Fn>
  void for_each(Fn fn) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      std::uint64_t w = words_[i];
      while (w) {
        const int bit = std::countr_zero(w);
        fn(static_cast<int>(i * 64 + bit));
        w &= w - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
};

void check_graph(const CoocGraph& g) {
  const int n = g.size();
  if (n == 0) throw UsageError("graph has no vertices");
  if (static_cast<int>(g.adjacency.size()) != n) {
    throw DataError("adjacency has " + std::to_string(g.adjacency.size()) +
                    " rows for " + std::to_string(n) + " vertices");
  }
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(g.adjacency[i].size()) != n) {
      throw DataError("adjacency row " + std::to_string(i) +
                      " has wrong length");
    }
    if (g.adjacency[i][i]) {
      throw DataError("adjacency has a self-loop at vertex " +
                      std::to_string(i));
    }
    for (int j = 0; j < i; ++j) {
      if (g.adjacency[i][j] != g.adjacency[j][i]) {
        throw DataError("adjacency is not symmetric at (" + std::to_string(i) +
                        ", " + std::to_string(j) + ")");
      }
    }
  }
}

struct Search {
  const std::vector<VertexSet>* adj = nullptr;
  int words = 0;
  std::vector<int> stack;  // current R, in insertion order
  std::vector<int> best;   // best clique so far, sorted ascending

  /// Replaces `best` if `stack` is larger, or equal-sized and
  /// lexicographically smaller once sorted.
  void offer() {
    std::vector<int> cand = stack;
    std::sort(cand.begin(), cand.end());
    if (cand.size() > best.size() ||
        (cand.size() == best.size() && cand < best)) {
      best = std::move(cand);
    }
  }

  void expand(VertexSet p, VertexSet x) {
    if (p.empty() && x.empty()) {
      offer();
      return;
    }
    // An equal-sized clique can still win on the tie rule, so only prune
    // when the bound is strictly below the incumbent.
    if (stack.size() + static_cast<std::size_t>(p.count()) < best.size()) {
      return;
    }
    // Pivot on the vertex of P ∪ X covering most of P; ties go to the
    // smallest vertex so the traversal is deterministic.
    int pivot = -1;
    int pivot_cover = -1;
    auto consider = [&](int u) {
      const int cover = p.intersect_count((*adj)[u]);
      if (cover > pivot_cover) {
        pivot = u;
        pivot_cover = cover;
      }
    };
    p.for_each(consider);
    x.for_each(consider);

    std::vector<int> ext;
    p.for_each([&](int v) {
      if (!(*adj)[pivot].contains(v)) ext.push_back(v);
    });
    for (int v : ext) {
      stack.push_back(v);
      expand(p.intersect((*adj)[v]), x.intersect((*adj)[v]));
      stack.pop_back();
      p.remove(v);
      x.add(v);
    }
  }
};

bool is_clique(const CoocGraph& g, const std::vector<int>& members) {
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      if (!g.adjacency[members[i]][members[j]]) return false;
    }
  }
  return true;
}

bool is_maximal(const CoocGraph& g, const std::vector<int>& members) {
  const int n = g.size();
  for (int v = 0; v < n; ++v) {
    if (std::binary_search(members.begin(), members.end(), v)) continue;
    bool extends = true;
    for (int u : members) {
      if (!g.adjacency[v][u]) {
        extends = false;
        break;
      }
    }
    if (extends) return false;
  }
  return true;
}

}  // namespace

CoocGraph build_threshold_graph(const CoocEstimate& est,
                                const std::vector<int>& members,
                                double alpha) {
  if (members.empty()) throw UsageError("threshold graph needs members");
  if (alpha < 0.0 || alpha > 1.0) throw UsageError("alpha must lie in [0, 1]");
  const int total = static_cast<int>(est.p.rows());
  std::set<int> seen;
  for (int id : members) {
    if (id < 0 || id >= total) {
      throw DataError("member id " + std::to_string(id) + " out of range");
    }
    if (!seen.insert(id).second) {
      throw UsageError("duplicate member id " + std::to_string(id));
    }
  }
  CoocGraph g;
  g.vertices.assign(seen.begin(), seen.end());
  const int n = g.size();
  const double threshold = 1.0 - alpha;
  g.adjacency.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool edge = est.p(g.vertices[i], g.vertices[j]) >= threshold;
      g.adjacency[i][j] = edge;
      g.adjacency[j][i] = edge;
    }
  }
  return g;
}

Clique largest_maximal_clique(const CoocGraph& g, int vertex_ceiling) {
  check_graph(g);
  const int n = g.size();
  if (vertex_ceiling < 1) throw UsageError("vertex ceiling must be positive");
  if (n > vertex_ceiling) {
    throw ComputeError("clique search over " + std::to_string(n) +
                       " vertices exceeds the ceiling of " +
                       std::to_string(vertex_ceiling));
  }
  const int words = (n + 63) / 64;
  std::vector<VertexSet> adj(n, VertexSet(words));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.adjacency[i][j]) adj[i].add(j);
    }
  }
  Search search;
  search.adj = &adj;
  search.words = words;
  VertexSet p(words);
  VertexSet x(words);
  for (int v = 0; v < n; ++v) p.add(v);
  search.expand(std::move(p), std::move(x));

  if (!is_clique(g, search.best) || !is_maximal(g, search.best)) {
    throw std::logic_error("clique search produced a non-maximal result");
  }
  Clique out;
  out.members.reserve(search.best.size());
  for (int v : search.best) out.members.push_back(g.vertices[v]);
  return out;
}

Clique brute_force_max_clique(const CoocGraph& g) {
  check_graph(g);
  const int n = g.size();
  if (n > 22) {
    throw UsageError("brute-force clique search is limited to 22 vertices");
  }
  std::vector<std::uint32_t> adj_mask(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.adjacency[i][j]) adj_mask[i] |= std::uint32_t{1} << j;
    }
  }
  auto members_of = [](std::uint32_t mask) {
    std::vector<int> out;
    for (int v = 0; mask; ++v, mask >>= 1) {
      if (mask & 1) out.push_back(v);
    }
    return out;
  };
  std::vector<int> best;
  const std::uint32_t limit = std::uint32_t{1} << n;
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) < best.size()) continue;
    bool clique = true;
    for (std::uint32_t rest = mask; rest && clique; rest &= rest - 1) {
      const int v = std::countr_zero(rest);
      const std::uint32_t others = mask & ~(std::uint32_t{1} << v);
      if ((adj_mask[v] & others) != others) clique = false;
    }
    if (!clique) continue;
    std::vector<int> cand = members_of(mask);
    if (cand.size() > best.size() ||
        (cand.size() == best.size() && cand < best)) {
      best = std::move(cand);
    }
  }
  Clique out;
  out.members.reserve(best.size());
  for (int v : best) out.members.push_back(g.vertices[v]);
  return out;
}

void write_edge_list_csv(const CoocGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "u,v\n";
  const int n = g.size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (g.adjacency[i][j]) {
        out << g.vertices[i] << ',' << g.vertices[j] << '\n';
      }
    }
  }
  if (!out) throw DataError("failed while writing '" + path + "'");
}

}  // namespace corecluster
