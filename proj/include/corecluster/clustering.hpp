#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "corecluster/dataset.hpp"
#include "corecluster/rng.hpp"

namespace corecluster {

enum class Method { kmeanspp, hierarchical, trimmed_kmeans, nearest_centroid };
enum class Linkage { complete, single, average };

Method method_from_string(const std::string& s);
Linkage linkage_from_string(const std::string& s);
std::string to_string(Method m);
std::string to_string(Linkage l);

/// A disjoint partition of the non-trimmed items: every non-trimmed item
/// carries exactly one cluster index, and indices are contiguous from 0.
/// Robust methods may exclude items; those appear in `trimmed` and carry
/// the sentinel kTrimmed in `cluster_of`.
struct Assignment {
  static constexpr int kTrimmed = -1;

  std::vector<int> cluster_of;  // per item; kTrimmed for trimmed items
  std::vector<int> trimmed;     // sorted item ids excluded from all clusters
  int k = 0;                    // number of clusters
};

/// A clustering fitted to one dataset. Centroid methods can extend the
/// clustering function to unseen points (see assign_point); others cannot,
/// making the fitted function partial.
struct FittedClustering {
  Assignment assignment;
  std::optional<Eigen::MatrixXd> centroids;  // k x d, centroid methods only
  std::optional<double> objective;  // within-cluster sum of squares, where defined
  std::string method_tag;           // algorithm + configuration identifier
};

/// Method selection and hyperparameters, surfaced as CLI flags.
struct ClusterConfig {
  Method method = Method::kmeanspp;
  int k = 3;
  int restarts = 10;                    // stochastic methods
  Linkage linkage = Linkage::complete;  // hierarchical
  double trim_fraction = 0.0;           // trimmed k-means, in [0, 0.5)
  int max_iter = 100;                   // Lloyd / concentration cap

  /// Throws UsageError when the parameters are invalid for n items.
  void validate(int n) const;
};

/// k-means++ seeding: the first centroid is a uniformly random item; each
/// subsequent one is an item chosen with probability proportional to its
/// squared Euclidean distance to the nearest centroid chosen so far. When
/// the remaining mass is zero (duplicated rows — routine in bootstrap
/// resamples), the remaining centroids are drawn uniformly from unchosen
/// rows, keeping the seeding total. Throws UsageError when k > n.
Eigen::MatrixXd kmeanspp_init(const Dataset& data, int k, RngStream& rng);

/// k-means++ seeding followed by Lloyd iterations to an assignment fixpoint
/// (or cfg.max_iter), repeated cfg.restarts times; returns the run with the
/// smallest within-cluster sum of squares. Restart r draws from
/// rng.substream(r). Empty clusters are repaired by re-seeding the empty
/// centroid at the point farthest from its assigned centroid.
FittedClustering kmeans_fit(const Dataset& data, const ClusterConfig& cfg,
                            RngStream& rng);

/// Agglomerative clustering on Euclidean distances under cfg.linkage,
/// cut to exactly cfg.k clusters. Deterministic; consumes no randomness.
FittedClustering hierarchical_fit(const Dataset& data, const ClusterConfig& cfg);

/// Trimmed k-means: concentration steps alternating (a) nearest-centroid
/// assignment, (b) trimming the ceil(trim_fraction * n) items with the
/// largest distance to their centroid, (c) recomputing centroids on the
/// untrimmed items; restarts as in kmeans_fit. With trim_fraction = 0 the
/// procedure, including its randomness, is exactly kmeans_fit.
FittedClustering trimmed_kmeans_fit(const Dataset& data,
                                    const ClusterConfig& cfg, RngStream& rng);

/// Classifier-as-clustering-function: one centroid per label class (the
/// class mean, classes ordered by sorted label), items assigned to the
/// nearest centroid. Deterministic. Throws DataError without labels.
FittedClustering nearest_centroid_fit(const Dataset& data,
                                      const ClusterConfig& cfg);

/// Index of the nearest centroid (ties to the lowest index). Throws
/// AssignmentUndefinedError for fits without centroids, whose clustering
/// function is defined only on the training items.
int assign_point(const FittedClustering& fitted, const Eigen::VectorXd& x);

/// Dispatch on cfg.method. Deterministic methods ignore `rng`.
FittedClustering fit(const Dataset& data, const ClusterConfig& cfg,
                     RngStream& rng);

/// A pluggable clustering function: clusters one (re)sampled dataset and
/// returns the assignment. Implementations throw ClusteringFailure when no
/// solution is found on this sample; estimators respond with the retry
/// policy (fresh resamples) rather than aborting.
using ClusterFn = std::function<Assignment(const Dataset&, RngStream&)>;

/// The configured method as a ClusterFn.
ClusterFn make_cluster_fn(const ClusterConfig& cfg);

namespace detail {

/// One seeded Lloyd/concentration run (the restart granularity of
/// kmeans_fit and trimmed_kmeans_fit). Exposed so tests can pin the
/// restart-selection contract; not part of the stable API.
struct LloydRun {
  std::vector<int> cluster_of;  // Assignment::kTrimmed for trimmed items
  std::vector<int> trimmed;
  Eigen::MatrixXd centroids;
  double objective = 0.0;
};

LloydRun lloyd_run(const Eigen::MatrixXd& x, int k, int trim_count,
                   int max_iter, RngStream rng);

/// Lloyd/concentration from explicit initial centroids (no seeding step).
LloydRun lloyd_iterate(const Eigen::MatrixXd& x, int k, int trim_count,
                       int max_iter, Eigen::MatrixXd centroids);

}  // namespace detail

}  // namespace corecluster
