#include "corecluster/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include "corecluster/errors.hpp"

namespace corecluster {

namespace {

AgreementMatrix tabulate(const std::vector<ItemStatus>& s1,
                         const std::vector<ItemStatus>& s2) {
  AgreementMatrix m;
  for (std::size_t i = 0; i < s1.size(); ++i) {
    if (s1[i] == ItemStatus::trimmed || s2[i] == ItemStatus::trimmed) continue;
    const bool core1 = s1[i] == ItemStatus::core;
    const bool core2 = s2[i] == ItemStatus::core;
    if (core1 && core2) {
      ++m.a;
    } else if (core1) {
      ++m.b;
    } else if (core2) {
      ++m.c;
    } else {
      ++m.d;
    }
  }
  return m;
}

/// Shared body of the two report overloads, working from per-item data.
PurityReport build_report(const std::vector<int>& original,
                          const std::vector<ItemStatus>& status,
                          const std::vector<std::string>& labels,
                          double weak) {
  if (labels.size() != original.size()) {
    throw UsageError("labels length differs from the result's item count");
  }
  std::vector<int> non_trimmed;
  std::vector<int> core_ids;
  int k = 0;
  for (std::size_t i = 0; i < status.size(); ++i) {
    if (status[i] == ItemStatus::trimmed) continue;
    non_trimmed.push_back(static_cast<int>(i));
    k = std::max(k, original[i] + 1);
    if (status[i] == ItemStatus::core) core_ids.push_back(static_cast<int>(i));
  }
  PurityReport rep;
  rep.purity_original = purity(original, labels, &non_trimmed);
  rep.purity_core = purity(original, labels, &core_ids);
  rep.weak_fraction = weak;
  rep.contingency.assign(k, {});
  for (int id : non_trimmed) {
    rep.contingency[original[id]][labels[id]] += 1;
  }
  return rep;
}

}  // namespace

double purity(const std::vector<int>& assignment,
              const std::vector<std::string>& labels,
              const std::vector<int>* include) {
  if (assignment.size() != labels.size()) {
    throw UsageError("assignment and labels have different lengths");
  }
  const int n = static_cast<int>(assignment.size());
  std::vector<int> ids;
  if (include) {
    ids = *include;
  } else {
    ids.resize(n);
    std::iota(ids.begin(), ids.end(), 0);
  }
  if (ids.empty()) throw UsageError("purity over an empty item set");

  std::vector<char> seen(n, 0);
  std::map<int, std::map<std::string, std::int64_t>> table;
  for (int id : ids) {
    if (id < 0 || id >= n) {
      throw UsageError("included item id " + std::to_string(id) +
                       " out of range");
    }
    if (seen[id]) {
      throw UsageError("duplicate item id " + std::to_string(id) +
                       " in the include set");
    }
    seen[id] = 1;
    const int c = assignment[id];
    if (c < 0) {
      throw UsageError("included item " + std::to_string(id) +
                       " has no cluster index");
    }
    table[c][labels[id]] += 1;
  }
  std::int64_t majority = 0;
  for (const auto& [cluster, counts] : table) {
    std::int64_t best = 0;
    for (const auto& [label, count] : counts) best = std::max(best, count);
    majority += best;
  }
  return static_cast<double>(majority) / static_cast<double>(ids.size());
}

double AgreementMatrix::off_diagonal_fraction() const {
  const std::int64_t t = total();
  if (t == 0) return 0.0;
  return static_cast<double>(b + c) / static_cast<double>(t);
}

AgreementMatrix agreement(const CoreClusteringResult& r1,
                          const CoreClusteringResult& r2) {
  if (r1.n != r2.n) {
    throw DataError("results describe different item counts");
  }
  return tabulate(item_statuses(r1), item_statuses(r2));
}

AgreementMatrix agreement(const ResultSummary& r1, const ResultSummary& r2) {
  if (r1.n != r2.n || r1.feature_checksum != r2.feature_checksum) {
    throw DataError("results describe different datasets");
  }
  return tabulate(r1.status, r2.status);
}

PurityReport report(const CoreClusteringResult& result,
                    const std::vector<std::string>& labels) {
  return build_report(result.reference.assignment.cluster_of,
                      item_statuses(result), labels, weak_fraction(result));
}

PurityReport report(const ResultSummary& result,
                    const std::vector<std::string>& labels) {
  return build_report(result.original, result.status, labels,
                      result.weak_fraction);
}

}  // namespace corecluster
