#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "corecluster/clustering.hpp"
#include "corecluster/dataset.hpp"
#include "corecluster/rng.hpp"

namespace corecluster {

/// Raw co-occurrence counters. a_counts[i][j] counts iterations in which
/// items i and j landed in the same cluster; b_counts[i][j] counts
/// iterations in which both were present (bootstrap) or completed
/// (direct, per pair). Counters are exact integers — the estimators'
/// priors are applied only when probabilities are formed — so merging
/// per-worker counters is exact and order-independent.
struct CoocCounters {
  using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

  CountMatrix a_counts;  // same-cluster co-occurrences, symmetric
  CountMatrix b_counts;  // joint presence / completed samples, symmetric
  std::int64_t m_effective = 0;  // completed iterations

  static CoocCounters zero(int n);
  int n() const { return static_cast<int>(a_counts.rows()); }
};

enum class EstimatorKind { bootstrap, direct };

std::string to_string(EstimatorKind k);
EstimatorKind estimator_from_string(const std::string& s);

/// Symmetric matrix of pairwise co-occurrence probabilities; the diagonal
/// is 1 by definition (an item always co-occurs with itself).
struct CoocEstimate {
  Eigen::MatrixXd p;
  std::string method_tag;  // "bootstrap" | "direct"
};

/// Generator of `count` fresh items from the known distribution F. The
/// returned dataset carries the generator's own labels (mixture component
/// indices), which only matters for label-consuming clustering functions.
using GeneratorFn = std::function<Dataset(int count, RngStream& rng)>;

GeneratorFn make_mixture_generator(const GaussianMixtureSpec& spec);

struct BootstrapOptions {
  int threads = 1;
  int max_retries = 5;  // fresh resamples after a failed attempt
};

/// Bootstrap estimation: m iterations, each drawing a resample Z of n items
/// with replacement, clustering it, reducing the index vector to the first
/// occurrence of each original item, and counting joint presence (B) and
/// same-cluster co-occurrence (A) over all pairs of distinct items present.
/// Probabilities carry a slight prior toward a flat distribution:
/// p[i][j] = (A[i][j] + 1/n) / (B[i][j] + 1) off-diagonal, 1 on the diagonal.
///
/// Iteration i draws everything it needs (indices, clustering randomness,
/// retries) from rng.substream(i), so results are bit-identical for every
/// worker count. A clustering failure triggers up to max_retries fresh
/// resamples inside the same iteration; an iteration that still fails is
/// skipped and does not count toward m_effective. Throws ComputeError when
/// every iteration was skipped.
std::pair<CoocEstimate, CoocCounters> cooc_bootstrap(
    const Dataset& data, const ClusterFn& fit, int m, const RngStream& rng,
    const BootstrapOptions& opts = {});

struct DirectOptions {
  int threads = 1;
  int max_retries = 5;
  /// Restrict estimation to these pairs (the within-cluster mode used by
  /// core clustering, which needs only pairs inside one original cluster).
  /// Null means all unordered pairs — the full-matrix mode.
  const std::vector<std::pair<int, int>>* pairs = nullptr;
};

/// Direct estimation from a known generator: for every requested pair
/// (i, j), m datasets {D[i], D[j]} ∪ (n-2 fresh draws from F) are formed
/// and clustered, and p[i][j] is the fraction in which D[i] and D[j] share
/// a cluster. Counters store per-pair tallies, so under retry exhaustion
/// the denominator is that pair's completed samples (b_counts) rather than
/// the requested m; with no failures p[i][j] = a_counts[i][j] / m exactly.
/// Pair (i, j) draws from rng.substream(i * n + j); entries outside the
/// requested set are 0 in the estimate. Throws ComputeError when a
/// requested pair completes no samples at all.
std::pair<CoocEstimate, CoocCounters> cooc_direct(
    const Dataset& data, const GeneratorFn& generator, const ClusterFn& fit,
    int m, const RngStream& rng, const DirectOptions& opts = {});

/// Element-wise sums (m_effective adds); associative and commutative, so
/// per-worker counters merge to the same result in any order.
/// Throws DataError on dimension mismatch.
CoocCounters merge_counters(const CoocCounters& x, const CoocCounters& y);

/// Probabilities from raw counters: the bootstrap prior ratio or the direct
/// per-pair fraction (cells with no completed samples become 0); diagonal 1.
CoocEstimate estimate_from_counters(const CoocCounters& c, EstimatorKind kind);

/// Samples needed to estimate a proportion p to one-standard-deviation
/// accuracy sigma under the binomial error model: ceil(p(1-p)/sigma^2).
/// required_samples(0.9, 0.01) = 900. Throws UsageError for sigma <= 0 or
/// p outside [0, 1].
std::int64_t required_samples(double p, double sigma);

/// Probability that a fixed pair of items both appear in one bootstrap
/// resample: ps(n)^2 with ps = 1 - (1 - 1/n)^n. Tends to (1 - 1/e)^2,
/// about 0.4 — each resample covers ~40% of the pairs.
double pair_coverage(std::int64_t n);

/// One-standard-deviation accuracy of a bootstrap co-occurrence estimate:
/// sqrt(p(1-p) / (m * pair_coverage(n))). About 0.015 at p = 0.9, m = 1000.
double bootstrap_sigma(double p, std::int64_t m, std::int64_t n);

/// Full n x n probability matrix, one CSV row per item, shortest
/// round-trip precision.
void write_cooc_matrix_csv(const CoocEstimate& est, const std::string& path);

/// Sparse edge list "i,j,p" over unordered pairs with p >= threshold.
void write_cooc_edges_csv(const CoocEstimate& est, double threshold,
                          const std::string& path);

}  // namespace corecluster
