#include "corecluster/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

#include "corecluster/errors.hpp"

namespace corecluster {

namespace {

std::string format_fraction(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

/// ceil(trim_fraction * n), snapping values that are integers up to
/// floating-point noise (0.05 * 200 must trim exactly 10 items, not 11).
int trim_count_for(double trim_fraction, int n) {
  double v = trim_fraction * static_cast<double>(n);
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, std::abs(r))) v = r;
  return static_cast<int>(std::ceil(v));
}

/// Relabel clusters so that sorting them by smallest member id gives
/// 0, 1, ..., k-1, and permute centroid rows to match. Keeps output
/// independent of internal cluster numbering.
void canonicalize(std::vector<int>& cluster_of, int k,
                  Eigen::MatrixXd* centroids) {
  std::vector<int> first_member(k, std::numeric_limits<int>::max());
  for (std::size_t i = 0; i < cluster_of.size(); ++i) {
    const int c = cluster_of[i];
    if (c >= 0 && static_cast<int>(i) < first_member[c]) {
      first_member[c] = static_cast<int>(i);
    }
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return first_member[a] < first_member[b];
  });
  std::vector<int> relabel(k);
  for (int rank = 0; rank < k; ++rank) relabel[order[rank]] = rank;
  for (auto& c : cluster_of) {
    if (c >= 0) c = relabel[c];
  }
  if (centroids) {
    Eigen::MatrixXd permuted(centroids->rows(), centroids->cols());
    for (int c = 0; c < k; ++c) permuted.row(relabel[c]) = centroids->row(c);
    *centroids = std::move(permuted);
  }
}

Eigen::MatrixXd kmeanspp_init_impl(const Eigen::MatrixXd& x, int k,
                                   RngStream& rng) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());
  if (k < 1) throw UsageError("k must be at least 1");
  if (k > n) throw UsageError("k exceeds the number of items");

  Eigen::MatrixXd centroids(k, d);
  std::vector<char> chosen(n, 0);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  const int first = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  centroids.row(0) = x.row(first);
  chosen[first] = 1;

  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double dist = (x.row(i) - centroids.row(c - 1)).squaredNorm();
      if (dist < d2[i]) d2[i] = dist;
      total += d2[i];
    }
    int pick = -1;
    if (total > 0.0) {
      // D^2-weighted choice among all rows.
      const double u = rng.uniform01() * total;
      double cum = 0.0;
      int last_positive = -1;
      for (int i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        cum += d2[i];
        if (u < cum) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = last_positive;  // u landed on total due to rounding
    } else {
      // Remaining mass is zero (duplicated rows): fall back to a uniform
      // draw over rows not yet chosen so the seeding stays total.
      std::vector<int> unchosen;
      unchosen.reserve(n);
      for (int i = 0; i < n; ++i) {
        if (!chosen[i]) unchosen.push_back(i);
      }
      pick = unchosen[rng.uniform_index(unchosen.size())];
    }
    centroids.row(c) = x.row(pick);
    chosen[pick] = 1;
  }
  return centroids;
}

void check_method(const ClusterConfig& cfg, Method expected,
                  const char* fn_name) {
  if (cfg.method != expected) {
    throw UsageError(std::string(fn_name) + " called with method '" +
                     to_string(cfg.method) + "'");
  }
}

}  // namespace

Method method_from_string(const std::string& s) {
  if (s == "kmeanspp") return Method::kmeanspp;
  if (s == "hierarchical") return Method::hierarchical;
  if (s == "trimmed_kmeans") return Method::trimmed_kmeans;
  if (s == "nearest_centroid") return Method::nearest_centroid;
  throw UsageError("unknown method '" + s + "'");
}

Linkage linkage_from_string(const std::string& s) {
  if (s == "complete") return Linkage::complete;
  if (s == "single") return Linkage::single;
  if (s == "average") return Linkage::average;
  throw UsageError("unknown linkage '" + s + "'");
}

std::string to_string(Method m) {
  switch (m) {
    case Method::kmeanspp: return "kmeanspp";
    case Method::hierarchical: return "hierarchical";
    case Method::trimmed_kmeans: return "trimmed_kmeans";
    case Method::nearest_centroid: return "nearest_centroid";
  }
  throw std::logic_error("unreachable");
}

std::string to_string(Linkage l) {
  switch (l) {
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
    case Linkage::average: return "average";
  }
  throw std::logic_error("unreachable");
}

void ClusterConfig::validate(int n) const {
  if (k < 1) throw UsageError("k must be at least 1");
  if (k > n) throw UsageError("k exceeds the number of items");
  if (restarts < 1) throw UsageError("restarts must be at least 1");
  if (max_iter < 1) throw UsageError("max_iter must be at least 1");
  if (trim_fraction < 0.0 || trim_fraction >= 0.5) {
    throw UsageError("trim_fraction must lie in [0, 0.5)");
  }
  if (method == Method::trimmed_kmeans &&
      trim_count_for(trim_fraction, n) + k > n) {
    throw UsageError("infeasible trim fraction: trimming leaves fewer items than clusters");
  }
}

Eigen::MatrixXd kmeanspp_init(const Dataset& data, int k, RngStream& rng) {
  return kmeanspp_init_impl(data.features, k, rng);
}

namespace detail {

LloydRun lloyd_iterate(const Eigen::MatrixXd& x, int k, int trim_count,
                       int max_iter, Eigen::MatrixXd centroids) {
  const int n = static_cast<int>(x.rows());
  const int d = static_cast<int>(x.cols());

  std::vector<int> assign(n, -1), prev_assign;
  std::vector<char> trimmed(n, 0), prev_trimmed;
  std::vector<double> dist2(n, 0.0);
  std::vector<int> counts(k, 0);
  std::vector<int> order(n);
  double prev_phase_obj = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iter; ++iter) {
    // (a) Assign every item to its nearest centroid (ties to lowest index).
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (x.row(i) - centroids.row(0)).squaredNorm();
      for (int c = 1; c < k; ++c) {
        const double dc = (x.row(i) - centroids.row(c)).squaredNorm();
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      assign[i] = best;
      dist2[i] = best_d;
    }

    // (b) Trim the trim_count items with the largest distance to their
    // centroid (ties at the cutoff keep the smaller id untrimmed).
    std::fill(trimmed.begin(), trimmed.end(), 0);
    if (trim_count > 0) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (dist2[a] != dist2[b]) return dist2[a] < dist2[b];
        return a < b;
      });
      for (int t = n - trim_count; t < n; ++t) trimmed[order[t]] = 1;
    }

    // (c) Repair empty clusters: re-seed each at the untrimmed point
    // farthest from its assigned centroid (among clusters that can spare
    // a point), keeping the cluster count fixed.
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      if (!trimmed[i]) ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      int candidate = -1;
      double cand_d = -1.0;
      for (int i = 0; i < n; ++i) {
        if (trimmed[i] || counts[assign[i]] < 2) continue;
        if (dist2[i] > cand_d) {
          cand_d = dist2[i];
          candidate = i;
        }
      }
      if (candidate < 0) {
        throw ClusteringFailure("cannot repair empty cluster");
      }
      --counts[assign[candidate]];
      assign[candidate] = c;
      counts[c] = 1;
      dist2[candidate] = 0.0;  // it becomes the new centroid
    }

    // The concentration objective after assignment/trim/repair must never
    // increase from one iteration to the next.
    double phase_obj = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!trimmed[i]) phase_obj += dist2[i];
    }
    if (phase_obj > prev_phase_obj * (1.0 + 1e-9) + 1e-12) {
      throw std::logic_error("objective increased across Lloyd iterations");
    }
    prev_phase_obj = phase_obj;

    // Fixpoint: the assignment (and trimmed set) repeated exactly.
    if (iter > 0 && assign == prev_assign && trimmed == prev_trimmed) break;
    prev_assign = assign;
    prev_trimmed = trimmed;

    // (d) Recompute centroids over untrimmed members.
    centroids.setZero();
    for (int i = 0; i < n; ++i) {
      if (trimmed[i]) continue;
      centroids.row(assign[i]) += x.row(i);
    }
    for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(counts[c]);
  }

  LloydRun run;
  run.cluster_of.resize(n);
  double objective = 0.0;
  for (int i = 0; i < n; ++i) {
    if (trimmed[i]) {
      run.cluster_of[i] = Assignment::kTrimmed;
      run.trimmed.push_back(i);
    } else {
      run.cluster_of[i] = assign[i];
      objective += (x.row(i) - centroids.row(assign[i])).squaredNorm();
    }
  }
  (void)d;
  run.centroids = std::move(centroids);
  run.objective = objective;
  return run;
}

LloydRun lloyd_run(const Eigen::MatrixXd& x, int k, int trim_count,
                   int max_iter, RngStream rng) {
  return lloyd_iterate(x, k, trim_count, max_iter,
                       kmeanspp_init_impl(x, k, rng));
}

}  // namespace detail

namespace {

/// Shared restart engine of kmeans_fit and trimmed_kmeans_fit. With
/// trim_count = 0 the two are the same procedure consuming the same
/// randomness, which is exactly the documented reduction.
FittedClustering restarted_lloyd(const Dataset& data, const ClusterConfig& cfg,
                                 int trim_count, RngStream& rng,
                                 const std::string& tag) {
  cfg.validate(data.n());
  detail::LloydRun best;
  bool have_best = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    detail::LloydRun run = detail::lloyd_run(data.features, cfg.k, trim_count,
                                             cfg.max_iter, rng.substream(r));
    if (!have_best || run.objective < best.objective) {
      best = std::move(run);
      have_best = true;
    }
  }

  FittedClustering fitted;
  fitted.assignment.cluster_of = std::move(best.cluster_of);
  fitted.assignment.trimmed = std::move(best.trimmed);
  fitted.assignment.k = cfg.k;
  canonicalize(fitted.assignment.cluster_of, cfg.k, &best.centroids);
  fitted.centroids = std::move(best.centroids);
  fitted.objective = best.objective;
  fitted.method_tag = tag;
  return fitted;
}

}  // namespace

FittedClustering kmeans_fit(const Dataset& data, const ClusterConfig& cfg,
                            RngStream& rng) {
  check_method(cfg, Method::kmeanspp, "kmeans_fit");
  std::ostringstream tag;
  tag << "kmeanspp(k=" << cfg.k << ",restarts=" << cfg.restarts << ")";
  return restarted_lloyd(data, cfg, /*trim_count=*/0, rng, tag.str());
}

FittedClustering trimmed_kmeans_fit(const Dataset& data,
                                    const ClusterConfig& cfg, RngStream& rng) {
  check_method(cfg, Method::trimmed_kmeans, "trimmed_kmeans_fit");
  const int trim_count = trim_count_for(cfg.trim_fraction, data.n());
  std::ostringstream tag;
  tag << "trimmed_kmeans(k=" << cfg.k
      << ",trim=" << format_fraction(cfg.trim_fraction)
      << ",restarts=" << cfg.restarts << ")";
  return restarted_lloyd(data, cfg, trim_count, rng, tag.str());
}

FittedClustering hierarchical_fit(const Dataset& data,
                                  const ClusterConfig& cfg) {
  check_method(cfg, Method::hierarchical, "hierarchical_fit");
  cfg.validate(data.n());
  const int n = data.n();
  const int k = cfg.k;
  const Eigen::MatrixXd& x = data.features;

  struct Merge {
    int anchor_a;   // an item id inside each merged cluster
    int anchor_b;
    double height;  // linkage distance at which the merge happened
  };
  std::vector<Merge> merges;
  merges.reserve(n - 1);

  if (n > 1 && k < n) {
    // Pairwise Euclidean distances; slots are updated in place as clusters
    // merge (nearest-neighbour-chain agglomeration).
    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i) {
      dist(i, i) = 0.0;
      for (int j = i + 1; j < n; ++j) {
        const double dij = std::sqrt((x.row(i) - x.row(j)).squaredNorm());
        dist(i, j) = dij;
        dist(j, i) = dij;
      }
    }

    std::vector<char> active(n, 1);
    std::vector<int> size(n, 1);
    std::vector<int> anchor(n);  // smallest item id inside the slot's cluster
    std::iota(anchor.begin(), anchor.end(), 0);
    std::vector<int> chain;
    chain.reserve(n);

    while (static_cast<int>(merges.size()) < n - 1) {
      if (chain.empty()) {
        for (int i = 0; i < n; ++i) {
          if (active[i]) {
            chain.push_back(i);
            break;
          }
        }
      }
      const int top = chain.back();
      // Nearest active neighbour of the chain head (ties to lowest slot).
      int nearest = -1;
      double nearest_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < n; ++j) {
        if (!active[j] || j == top) continue;
        const double dj = dist(top, j);
        if (dj < nearest_d || (dj == nearest_d && (nearest < 0 || j < nearest))) {
          nearest_d = dj;
          nearest = j;
        }
      }
      if (chain.size() >= 2 && chain[chain.size() - 2] == nearest) {
        // Reciprocal nearest neighbours: merge them.
        chain.pop_back();
        chain.pop_back();
        const int keep = std::min(top, nearest);
        const int drop = std::max(top, nearest);
        merges.push_back({anchor[top], anchor[nearest], nearest_d});
        // Lance–Williams update of distances to the merged cluster.
        for (int j = 0; j < n; ++j) {
          if (!active[j] || j == keep || j == drop) continue;
          double dn = 0.0;
          switch (cfg.linkage) {
            case Linkage::complete:
              dn = std::max(dist(keep, j), dist(drop, j));
              break;
            case Linkage::single:
              dn = std::min(dist(keep, j), dist(drop, j));
              break;
            case Linkage::average:
              dn = (size[keep] * dist(keep, j) + size[drop] * dist(drop, j)) /
                   static_cast<double>(size[keep] + size[drop]);
              break;
          }
          dist(keep, j) = dn;
          dist(j, keep) = dn;
        }
        size[keep] += size[drop];
        anchor[keep] = std::min(anchor[top], anchor[nearest]);
        active[drop] = 0;
      } else {
        chain.push_back(nearest);
      }
    }
  }

  // Cut the dendrogram at k clusters: apply the first n - k merges in
  // order of (height, creation order) to a union-find over the items.
  std::vector<int> merge_order(merges.size());
  std::iota(merge_order.begin(), merge_order.end(), 0);
  std::stable_sort(merge_order.begin(), merge_order.end(), [&](int a, int b) {
    return merges[a].height < merges[b].height;
  });

  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  };
  for (int t = 0; t < n - k; ++t) {
    const Merge& m = merges[merge_order[t]];
    const int ra = find(m.anchor_a);
    const int rb = find(m.anchor_b);
    parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  std::vector<int> cluster_of(n);
  std::map<int, int> root_to_cluster;  // ordered: roots ascend with item ids
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    auto [it, inserted] =
        root_to_cluster.emplace(root, static_cast<int>(root_to_cluster.size()));
    cluster_of[i] = it->second;
  }
  if (static_cast<int>(root_to_cluster.size()) != k) {
    throw std::logic_error("dendrogram cut produced a wrong cluster count");
  }

  FittedClustering fitted;
  fitted.assignment.cluster_of = std::move(cluster_of);
  fitted.assignment.k = k;
  std::ostringstream tag;
  tag << "hierarchical(k=" << k << ",linkage=" << to_string(cfg.linkage) << ")";
  fitted.method_tag = tag.str();
  return fitted;
}

FittedClustering nearest_centroid_fit(const Dataset& data,
                                      const ClusterConfig& cfg) {
  check_method(cfg, Method::nearest_centroid, "nearest_centroid_fit");
  if (!data.has_labels()) {
    throw DataError("nearest_centroid requires ground-truth labels");
  }
  const int n = data.n();
  const int d = data.d();

  // Class index = rank of the label in sorted order.
  std::map<std::string, int> class_of;
  for (const auto& label : data.labels) class_of.emplace(label, 0);
  int next = 0;
  for (auto& [label, index] : class_of) index = next++;
  const int k = next;

  Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(k, d);
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    const int c = class_of.at(data.labels[i]);
    centroids.row(c) += data.features.row(i);
    ++counts[c];
  }
  for (int c = 0; c < k; ++c) centroids.row(c) /= static_cast<double>(counts[c]);

  FittedClustering fitted;
  fitted.assignment.cluster_of.resize(n);
  fitted.assignment.k = k;
  double objective = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (data.features.row(i) - centroids.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double dc = (data.features.row(i) - centroids.row(c)).squaredNorm();
      if (dc < best_d) {
        best_d = dc;
        best = c;
      }
    }
    fitted.assignment.cluster_of[i] = best;
    objective += best_d;
  }
  fitted.centroids = std::move(centroids);
  fitted.objective = objective;
  std::ostringstream tag;
  tag << "nearest_centroid(classes=" << k << ")";
  fitted.method_tag = tag.str();
  return fitted;
}

int assign_point(const FittedClustering& fitted, const Eigen::VectorXd& x) {
  if (!fitted.centroids) {
    throw AssignmentUndefinedError(
        "assignment undefined for unseen items: '" + fitted.method_tag +
        "' has no centroids");
  }
  const Eigen::MatrixXd& centroids = *fitted.centroids;
  int best = 0;
  double best_d = (x.transpose() - centroids.row(0)).squaredNorm();
  for (int c = 1; c < centroids.rows(); ++c) {
    const double dc = (x.transpose() - centroids.row(c)).squaredNorm();
    if (dc < best_d) {
      best_d = dc;
      best = c;
    }
  }
  return best;
}

FittedClustering fit(const Dataset& data, const ClusterConfig& cfg,
                     RngStream& rng) {
  switch (cfg.method) {
    case Method::kmeanspp: return kmeans_fit(data, cfg, rng);
    case Method::hierarchical: return hierarchical_fit(data, cfg);
    case Method::trimmed_kmeans: return trimmed_kmeans_fit(data, cfg, rng);
    case Method::nearest_centroid: return nearest_centroid_fit(data, cfg);
  }
  throw std::logic_error("unreachable");
}

ClusterFn make_cluster_fn(const ClusterConfig& cfg) {
  return [cfg](const Dataset& sample, RngStream& rng) {
    return fit(sample, cfg, rng).assignment;
  };
}

}  // namespace corecluster
