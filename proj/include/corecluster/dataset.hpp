#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corecluster/rng.hpp"

namespace corecluster {

/// A dataset of n items with d numeric features, optional categorical
/// ground-truth labels, and stable item ids. Item identity is the 0-based
/// row index after missing-value rows have been dropped; every downstream
/// set (cores, weak points, trimmed points) references these ids.
///
/// Immutable by convention after construction; safe to share across threads.
struct Dataset {
  Eigen::MatrixXd features;                // n x d, finite values only
  std::vector<std::string> labels;         // empty, or one label per item
  std::vector<int> ids;                    // 0..n-1
  std::vector<std::string> feature_names;  // size d
  std::string label_name;                  // empty when labels are absent

  int n() const { return static_cast<int>(features.rows()); }
  int d() const { return static_cast<int>(features.cols()); }
  bool has_labels() const { return !labels.empty(); }
};

/// One isotropic Gaussian component of a mixture.
struct GaussianComponent {
  Eigen::VectorXd mean;
  double variance = 1.0;
  double weight = 1.0;
};

/// A known generating distribution F: a finite mixture of isotropic
/// Gaussians. Weights are normalized to sum to 1 at construction.
struct GaussianMixtureSpec {
  std::vector<GaussianComponent> components;

  /// Normalizes weights and validates; throws UsageError on violations
  /// (no components, non-positive variance or weight, mixed dimensions).
  static GaussianMixtureSpec make(std::vector<GaussianComponent> comps);

  /// k equally weighted isotropic components in 2-D placed on a regular
  /// polygon whose nearest-neighbour vertex distance is `side` (k = 1 sits
  /// at the origin). k = 3 gives an equilateral triangle with side `side`;
  /// the default (side 3, unit variance) produces visibly overlapping
  /// clusters, the regime core clustering is designed to expose.
  static GaussianMixtureSpec regular_polygon(int k, double side = 3.0,
                                             double variance = 1.0);

  int dim() const;

  /// Draw `count` items. Each item independently picks a component by
  /// weight, then adds sqrt(variance) * N(0, I) noise to that component's
  /// mean. When `component_out` is non-null it receives the generating
  /// component index of each row.
  Eigen::MatrixXd sample(int count, RngStream& rng,
                         std::vector<int>* component_out = nullptr) const;

  void validate() const;
};

/// n bootstrap indices (duplicates allowed; each uniform over [0, n)).
using IndexVector = std::vector<int>;

/// Load a comma-separated file with a header row. All non-label columns
/// must parse as numbers or as a missing-value token (empty field or "NA");
/// rows containing any missing value are dropped whole. Throws DataError on
/// unreadable files, a named label column that is absent, non-numeric or
/// non-finite feature values, or zero rows after dropping.
Dataset load_csv(const std::string& path,
                 const std::optional<std::string>& label_column = std::nullopt);

/// Write `data` in the same format load_csv reads. Feature values are
/// printed shortest-round-trip, so load_csv(write_csv(x)) reproduces x
/// exactly.
void write_csv(const Dataset& data, const std::string& path);

/// Sample n items i.i.d. from the mixture. Labels are set to the generating
/// component index (as decimal strings); identical seeds give bit-identical
/// datasets.
Dataset generate_gaussian_mixture(const GaussianMixtureSpec& spec, int n,
                                  std::uint64_t seed);

/// n indices drawn i.i.d. uniform over [0, n) — one bootstrap resample.
IndexVector bootstrap_indices(int n, RngStream& rng);

/// The resample Z with Z[t] = data[indices[t]]. Labels follow their rows;
/// ids are the positions 0..n-1 of the new dataset.
Dataset resample(const Dataset& data, const IndexVector& indices);

/// FNV-1a hash over the raw feature bytes in row-major order. Result files
/// store it so evaluation can detect that two artifacts came from different
/// datasets.
std::uint64_t feature_checksum(const Dataset& data);

namespace detail {

/// Shortest round-trip decimal formatting (std::to_chars), shared by the
/// CSV writers so exported numbers reparse bit-identically.
std::string format_double(double v);

}  // namespace detail

}  // namespace corecluster
