#include "corecluster/core.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "corecluster/clique.hpp"
#include "corecluster/errors.hpp"
#include "corecluster/parallel.hpp"
#include "corecluster/version.hpp"

namespace corecluster {

namespace {

using ordered_json = nlohmann::ordered_json;

// Domain keys separating the independent random streams of one run: the
// reference fit must not perturb the estimator's stream, or changing one
// would silently reseed the other.
constexpr std::uint64_t kReferenceDomain = 1;
constexpr std::uint64_t kEstimatorDomain = 2;

// Retry budget for the reference fit, matching the estimators' policy of
// five fresh attempts after the first failure.
constexpr int kMaxReferenceRetries = 5;

std::string checksum_hex(std::uint64_t checksum) {
  std::ostringstream s;
  s << "0x" << std::hex << std::setw(16) << std::setfill('0') << checksum;
  return s.str();
}

/// Re-verifies the defining properties of the result on every run:
/// cores are disjoint subsets of their original clusters, pairwise at or
/// above the co-occurrence threshold, maximal within their cluster, and W
/// is exactly the non-trimmed complement of the cores.
void verify_definitions(const CoreClusteringResult& r) {
  const Assignment& assign = r.reference.assignment;
  const int n = r.n;
  const double threshold = 1.0 - r.config.alpha;

  if (static_cast<int>(r.cores.size()) != assign.k) {
    throw std::logic_error("core count differs from original cluster count");
  }
  if (r.trimmed != assign.trimmed) {
    throw std::logic_error("trimmed set differs from the reference clustering");
  }
  std::vector<char> in_core(n, 0);
  for (int c = 0; c < assign.k; ++c) {
    const auto& core = r.cores[c];
    for (int id : core) {
      if (id < 0 || id >= n || assign.cluster_of[id] != c) {
        throw std::logic_error("core member outside its original cluster");
      }
      if (in_core[id]) throw std::logic_error("cores are not disjoint");
      in_core[id] = 1;
    }
    for (std::size_t a = 0; a < core.size(); ++a) {
      for (std::size_t b = a + 1; b < core.size(); ++b) {
        if (r.cooc.p(core[a], core[b]) < threshold) {
          throw std::logic_error("core pair below the co-occurrence threshold");
        }
      }
    }
  }
  // Maximality: no same-cluster outsider is adjacent to the whole core.
  // This also forces non-empty cores for non-empty clusters — an empty
  // core is extended by any member of its cluster.
  for (int v = 0; v < n; ++v) {
    const int c = assign.cluster_of[v];
    if (c == Assignment::kTrimmed || in_core[v]) continue;
    bool extends = true;
    for (int u : r.cores[c]) {
      if (r.cooc.p(v, u) < threshold) {
        extends = false;
        break;
      }
    }
    if (extends) {
      throw std::logic_error("a core is not maximal within its cluster");
    }
  }
  std::vector<char> trimmed_flag(n, 0);
  for (int id : r.trimmed) {
    if (id < 0 || id >= n) throw std::logic_error("trimmed id out of range");
    trimmed_flag[id] = 1;
  }
  std::vector<int> expect_weak;
  for (int id = 0; id < n; ++id) {
    if (!trimmed_flag[id] && !in_core[id]) expect_weak.push_back(id);
  }
  if (expect_weak != r.weak) {
    throw std::logic_error("weak set is not the complement of the cores");
  }
}

}  // namespace

std::string to_string(DirectScope s) {
  return s == DirectScope::within ? "within" : "full";
}

DirectScope direct_scope_from_string(const std::string& s) {
  if (s == "within") return DirectScope::within;
  if (s == "full") return DirectScope::full;
  throw UsageError("unknown direct scope '" + s + "'");
}

std::string to_string(ItemStatus s) {
  switch (s) {
    case ItemStatus::core:
      return "core";
    case ItemStatus::weak:
      return "weak";
    case ItemStatus::trimmed:
      return "trimmed";
  }
  throw std::logic_error("unreachable item status");
}

ItemStatus item_status_from_string(const std::string& s) {
  if (s == "core") return ItemStatus::core;
  if (s == "weak") return ItemStatus::weak;
  if (s == "trimmed") return ItemStatus::trimmed;
  throw DataError("unknown item status '" + s + "'");
}

void CoreConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw UsageError("alpha must lie in [0, 1]");
  }
  if (iterations < 1) throw UsageError("iterations must be at least 1");
  if (threads < 1) throw UsageError("threads must be at least 1");
  if (clique_ceiling < 1) throw UsageError("clique ceiling must be positive");
}

CoreClusteringResult core_clustering(const Dataset& data, const CoreConfig& cfg,
                                     const GeneratorFn* generator) {
  cfg.validate();
  const int n = data.n();
  cfg.cluster.validate(n);
  if (cfg.estimator == EstimatorKind::direct &&
      (generator == nullptr || !*generator)) {
    throw UsageError(
        "the direct estimator requires the data-generating distribution; "
        "use bootstrap when it is unknown");
  }

  const RngStream master(cfg.seed);

  // (1) The reference clustering: one fit on the full dataset. A failure
  // gets up to five retries with fresh randomness from the same stream.
  FittedClustering reference;
  {
    RngStream ref_rng = master.substream(kReferenceDomain);
    int failures = 0;
    for (;;) {
      try {
        reference = fit(data, cfg.cluster, ref_rng);
        break;
      } catch (const ClusteringFailure&) {
        if (++failures > kMaxReferenceRetries) throw;
      }
    }
  }

  // (2) Pairwise co-occurrence probabilities.
  const ClusterFn cluster_fn = make_cluster_fn(cfg.cluster);
  const RngStream est_rng = master.substream(kEstimatorDomain);
  CoocEstimate est;
  CoocCounters counters;
  if (cfg.estimator == EstimatorKind::bootstrap) {
    BootstrapOptions opts;
    opts.threads = cfg.threads;
    auto [e, c] = cooc_bootstrap(data, cluster_fn, cfg.iterations, est_rng, opts);
    est = std::move(e);
    counters = std::move(c);
  } else {
    DirectOptions opts;
    opts.threads = cfg.threads;
    std::vector<std::pair<int, int>> within;
    if (cfg.direct_scope == DirectScope::within) {
      // The clique search only ever reads pairs inside one original
      // cluster, so those are the only ones worth the estimation cost.
      const auto& cl = reference.assignment.cluster_of;
      for (int i = 0; i < n; ++i) {
        if (cl[i] == Assignment::kTrimmed) continue;
        for (int j = i + 1; j < n; ++j) {
          if (cl[j] == cl[i]) within.emplace_back(i, j);
        }
      }
      opts.pairs = &within;
    }
    auto [e, c] =
        cooc_direct(data, *generator, cluster_fn, cfg.iterations, est_rng, opts);
    est = std::move(e);
    counters = std::move(c);
  }

  // (3) Per original cluster, the largest maximal clique of the threshold
  // graph over its members. Searches are independent, so they parallelize
  // over clusters.
  const int k = reference.assignment.k;
  std::vector<std::vector<int>> members(k);
  for (int i = 0; i < n; ++i) {
    const int c = reference.assignment.cluster_of[i];
    if (c != Assignment::kTrimmed) members[c].push_back(i);
  }
  std::vector<std::vector<int>> cores(k);
  const int workers = std::max(1, std::min(cfg.threads, k));
  detail::run_workers(workers, [&](int w) {
    for (int c = w; c < k; c += workers) {
      if (members[c].empty()) continue;  // empty cluster -> empty core
      const CoocGraph g = build_threshold_graph(est, members[c], cfg.alpha);
      cores[c] = largest_maximal_clique(g, cfg.clique_ceiling).members;
    }
  });

  // (4) Assemble cores, weak points W, and trimmed points.
  CoreClusteringResult result;
  result.reference = std::move(reference);
  result.cores = std::move(cores);
  result.trimmed = result.reference.assignment.trimmed;
  result.cooc = std::move(est);
  result.config = cfg;
  result.n = n;
  result.m_effective = counters.m_effective;
  std::vector<char> in_core(n, 0);
  for (const auto& core : result.cores) {
    for (int id : core) in_core[id] = 1;
  }
  for (int i = 0; i < n; ++i) {
    if (result.reference.assignment.cluster_of[i] != Assignment::kTrimmed &&
        !in_core[i]) {
      result.weak.push_back(i);
    }
  }

  verify_definitions(result);
  return result;
}

double weak_fraction(const CoreClusteringResult& result) {
  const double denom =
      result.n - static_cast<double>(result.trimmed.size());
  if (denom <= 0.0) return 0.0;
  return static_cast<double>(result.weak.size()) / denom;
}

std::vector<ItemStatus> item_statuses(const CoreClusteringResult& result) {
  std::vector<ItemStatus> status(result.n, ItemStatus::weak);
  for (const auto& core : result.cores) {
    for (int id : core) status[id] = ItemStatus::core;
  }
  for (int id : result.trimmed) status[id] = ItemStatus::trimmed;
  return status;
}

void write_result_json(const CoreClusteringResult& result, const Dataset& data,
                       const std::string& dataset_path,
                       const std::string& out_path) {
  if (data.n() != result.n) {
    throw DataError("result and dataset describe different item counts");
  }
  const std::vector<ItemStatus> status = item_statuses(result);

  ordered_json j;
  j["tool"] = "corecluster";
  j["version"] = kVersion;
  // The worker count is deliberately not echoed: results are independent
  // of it, and the exported file must be too.
  ordered_json jc;
  jc["alpha"] = result.config.alpha;
  jc["iterations"] = result.config.iterations;
  jc["estimator"] = to_string(result.config.estimator);
  jc["direct_scope"] = to_string(result.config.direct_scope);
  jc["method"] = to_string(result.config.cluster.method);
  jc["k"] = result.config.cluster.k;
  jc["restarts"] = result.config.cluster.restarts;
  jc["linkage"] = to_string(result.config.cluster.linkage);
  jc["trim_fraction"] = result.config.cluster.trim_fraction;
  jc["max_iter"] = result.config.cluster.max_iter;
  jc["seed"] = result.config.seed;
  jc["clique_ceiling"] = result.config.clique_ceiling;
  jc["method_tag"] = result.reference.method_tag;
  j["config"] = std::move(jc);
  ordered_json jd;
  jd["path"] = dataset_path;
  jd["n"] = result.n;
  jd["d"] = data.d();
  jd["feature_checksum"] = checksum_hex(feature_checksum(data));
  j["dataset"] = std::move(jd);
  j["m_effective"] = result.m_effective;
  j["k"] = result.reference.assignment.k;
  ordered_json sizes = ordered_json::array();
  std::int64_t core_total = 0;
  for (const auto& core : result.cores) {
    sizes.push_back(core.size());
    core_total += static_cast<std::int64_t>(core.size());
  }
  j["core_sizes"] = std::move(sizes);
  j["weak_fraction"] = weak_fraction(result);
  ordered_json counts;
  counts["core"] = core_total;
  counts["weak"] = result.weak.size();
  counts["trimmed"] = result.trimmed.size();
  j["counts"] = std::move(counts);
  ordered_json items = ordered_json::array();
  for (int id = 0; id < result.n; ++id) {
    ordered_json item;
    item["id"] = id;
    item["original_cluster"] = result.reference.assignment.cluster_of[id];
    item["status"] = to_string(status[id]);
    items.push_back(std::move(item));
  }
  j["items"] = std::move(items);

  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write '" + out_path + "'");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed while writing '" + out_path + "'");
}

void write_items_csv(const CoreClusteringResult& result, const Dataset& data,
                     const std::string& out_path) {
  if (data.n() != result.n) {
    throw DataError("result and dataset describe different item counts");
  }
  const std::vector<ItemStatus> status = item_statuses(result);
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write '" + out_path + "'");
  out << "id";
  for (int jcol = 0; jcol < data.d(); ++jcol) {
    const bool named = jcol < static_cast<int>(data.feature_names.size()) &&
                       !data.feature_names[jcol].empty();
    out << ',' << (named ? data.feature_names[jcol]
                         : "x" + std::to_string(jcol));
  }
  if (data.has_labels()) {
    out << ',' << (data.label_name.empty() ? "label" : data.label_name);
  }
  out << ",original_cluster,status\n";
  for (int i = 0; i < result.n; ++i) {
    out << i;
    for (int jcol = 0; jcol < data.d(); ++jcol) {
      out << ',' << detail::format_double(data.features(i, jcol));
    }
    if (data.has_labels()) out << ',' << data.labels[i];
    out << ',' << result.reference.assignment.cluster_of[i] << ','
        << to_string(status[i]) << '\n';
  }
  if (!out) throw DataError("failed while writing '" + out_path + "'");
}

ResultSummary read_result_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw DataError("cannot parse '" + path + "': " + e.what());
  }
  try {
    ResultSummary s;
    s.alpha = j.at("config").at("alpha").get<double>();
    s.method_tag = j.at("config").at("method_tag").get<std::string>();
    s.dataset_path = j.at("dataset").at("path").get<std::string>();
    s.n = j.at("dataset").at("n").get<int>();
    s.d = j.at("dataset").at("d").get<int>();
    s.feature_checksum = std::stoull(
        j.at("dataset").at("feature_checksum").get<std::string>(), nullptr, 16);
    s.m_effective = j.at("m_effective").get<std::int64_t>();
    s.weak_fraction = j.at("weak_fraction").get<double>();
    const auto& items = j.at("items");
    const int n_items = static_cast<int>(items.size());
    if (n_items != s.n) {
      throw DataError("result file '" + path + "' lists " +
                      std::to_string(n_items) + " items for n = " +
                      std::to_string(s.n));
    }
    s.original.assign(n_items, 0);
    s.status.assign(n_items, ItemStatus::weak);
    std::vector<char> seen(n_items, 0);
    for (const auto& item : items) {
      const int id = item.at("id").get<int>();
      if (id < 0 || id >= n_items || seen[id]) {
        throw DataError("result file '" + path + "' has a bad item id");
      }
      seen[id] = 1;
      s.original[id] = item.at("original_cluster").get<int>();
      s.status[id] = item_status_from_string(item.at("status").get<std::string>());
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed result file '" + path + "': " + e.what());
  } catch (const std::invalid_argument&) {
    throw DataError("malformed checksum in result file '" + path + "'");
  } catch (const std::out_of_range&) {
    throw DataError("malformed checksum in result file '" + path + "'");
  }
}

ResultSummary summarize(const CoreClusteringResult& result, const Dataset& data,
                        const std::string& dataset_path) {
  if (data.n() != result.n) {
    throw DataError("result and dataset describe different item counts");
  }
  ResultSummary s;
  s.original = result.reference.assignment.cluster_of;
  s.status = item_statuses(result);
  s.alpha = result.config.alpha;
  s.method_tag = result.reference.method_tag;
  s.dataset_path = dataset_path;
  s.n = result.n;
  s.d = data.d();
  s.feature_checksum = feature_checksum(data);
  s.m_effective = result.m_effective;
  s.weak_fraction = weak_fraction(result);
  return s;
}

}  // namespace corecluster
