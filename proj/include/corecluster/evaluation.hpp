#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "corecluster/core.hpp"

namespace corecluster {

/// External validation against ground-truth labels:
/// (1/N) * sum over clusters of the majority-class count, taken over the
/// evaluated items. `include` selects the item ids to evaluate (null means
/// all). Throws UsageError on length mismatch, an empty evaluation set, or
/// an included item without a cluster index.
double purity(const std::vector<int>& assignment,
              const std::vector<std::string>& labels,
              const std::vector<int>* include = nullptr);

/// 2x2 cross-tabulation of core/weak status between two results on the same
/// dataset. Items trimmed by either result are excluded, so
/// a + b + c + d = number of items categorized by both.
struct AgreementMatrix {
  std::int64_t a = 0;  // core in both
  std::int64_t b = 0;  // core in r1, weak in r2
  std::int64_t c = 0;  // weak in r1, core in r2
  std::int64_t d = 0;  // weak in both

  std::int64_t total() const { return a + b + c + d; }
  double off_diagonal_fraction() const;
};

AgreementMatrix agreement(const CoreClusteringResult& r1,
                          const CoreClusteringResult& r2);

/// File-based variant; verifies the two results describe the same dataset
/// (n and feature checksum) and throws DataError otherwise.
AgreementMatrix agreement(const ResultSummary& r1, const ResultSummary& r2);

/// Purity of the original clustering (P_o, non-trimmed items), purity of
/// the core clustering (P_c, core members only, keeping their original
/// cluster indices — cores refine the clustering, they never re-cluster),
/// and the weak fraction w.
struct PurityReport {
  double purity_original = 0.0;  // P_o
  double purity_core = 0.0;      // P_c
  double weak_fraction = 0.0;    // w
  /// Per original cluster: ground-truth label -> item count (non-trimmed).
  std::vector<std::map<std::string, std::int64_t>> contingency;
};

PurityReport report(const CoreClusteringResult& result,
                    const std::vector<std::string>& labels);

PurityReport report(const ResultSummary& result,
                    const std::vector<std::string>& labels);

}  // namespace corecluster
