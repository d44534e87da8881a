#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "corecluster/clustering.hpp"
#include "corecluster/cooccurrence.hpp"
#include "corecluster/dataset.hpp"

namespace corecluster {

enum class DirectScope { within, full };

std::string to_string(DirectScope s);
DirectScope direct_scope_from_string(const std::string& s);

/// Configuration of one core-clustering run.
struct CoreConfig {
  double alpha = 0.1;       // confidence threshold: pairs must co-occur with p >= 1 - alpha
  int iterations = 1000;    // m, samples per estimate
  EstimatorKind estimator = EstimatorKind::bootstrap;
  ClusterConfig cluster;    // the pluggable clustering function
  std::uint64_t seed = 0;   // master seed; fixes the whole run
  int threads = 1;          // worker pool; never changes results
  int clique_ceiling = 5000;
  /// Direct estimator only: estimate just the pairs inside each original
  /// cluster (all the core search needs), or the full matrix.
  DirectScope direct_scope = DirectScope::within;

  void validate() const;
};

/// Per-item outcome of a core-clustering run.
enum class ItemStatus { core, weak, trimmed };

std::string to_string(ItemStatus s);
ItemStatus item_status_from_string(const std::string& s);

/// Output of core_clustering. Cores are pairwise disjoint, each a subset of
/// its original cluster; the weak set W is exactly the non-trimmed items
/// belonging to no core; the number of cores equals the number of original
/// clusters. These invariants are re-verified at the end of every run.
struct CoreClusteringResult {
  FittedClustering reference;           // the clustering cores refine
  std::vector<std::vector<int>> cores;  // per original cluster, sorted ids
  std::vector<int> weak;                // sorted ids
  std::vector<int> trimmed;             // sorted ids (robust methods)
  CoocEstimate cooc;
  CoreConfig config;
  int n = 0;
  std::int64_t m_effective = 0;         // completed estimator iterations
};

/// The full pipeline: (1) fit the reference clustering on the complete
/// dataset, (2) estimate pairwise co-occurrence probabilities with the
/// configured estimator, (3) per original cluster, build the threshold
/// graph at 1 - alpha and extract its largest maximal clique, (4) assemble
/// cores, weak points, and trimmed points.
///
/// The direct estimator requires `generator` (the known distribution F);
/// selecting it without one is a configuration error, never a silent
/// fallback to bootstrap. Items trimmed by the reference clustering take
/// part in neither cores nor W; they are reported separately.
CoreClusteringResult core_clustering(const Dataset& data, const CoreConfig& cfg,
                                     const GeneratorFn* generator = nullptr);

/// The instability measure: |W| / (n - |trimmed|).
double weak_fraction(const CoreClusteringResult& result);

/// Per-item status derived from the result's core, weak, and trimmed sets.
std::vector<ItemStatus> item_statuses(const CoreClusteringResult& result);

/// JSON export: config echo, dataset identity (path, n, d, checksum),
/// m_effective, core sizes, weak fraction, and per-item records
/// (id, original cluster, status).
void write_result_json(const CoreClusteringResult& result, const Dataset& data,
                       const std::string& dataset_path,
                       const std::string& out_path);

/// Flat per-item CSV for plotting: id, feature columns, label (if any),
/// original_cluster, status.
void write_items_csv(const CoreClusteringResult& result, const Dataset& data,
                     const std::string& out_path);

/// A result file read back for evaluation: per-item original cluster and
/// status plus enough identity to detect dataset mismatches.
struct ResultSummary {
  std::vector<int> original;        // Assignment::kTrimmed for trimmed items
  std::vector<ItemStatus> status;   // per item
  double alpha = 0.0;
  std::string method_tag;
  std::string dataset_path;
  int n = 0;
  int d = 0;
  std::uint64_t feature_checksum = 0;
  std::int64_t m_effective = 0;
  double weak_fraction = 0.0;
};

ResultSummary read_result_json(const std::string& path);

/// The summary write_result_json would serialize (useful for tests and for
/// evaluating in-process results without touching disk).
ResultSummary summarize(const CoreClusteringResult& result, const Dataset& data,
                        const std::string& dataset_path);

}  // namespace corecluster
