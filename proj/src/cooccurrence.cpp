#include "corecluster/cooccurrence.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "corecluster/errors.hpp"
#include "corecluster/parallel.hpp"

namespace corecluster {

namespace {

using detail::format_double;
using detail::run_workers;

void check_fit_output(const Assignment& assign, int n) {
  if (static_cast<int>(assign.cluster_of.size()) != n) {
    throw DataError("clustering function returned " +
                    std::to_string(assign.cluster_of.size()) +
                    " indices for " + std::to_string(n) + " items");
  }
}

}  // namespace

CoocCounters CoocCounters::zero(int n) {
  CoocCounters c;
  c.a_counts = CountMatrix::Zero(n, n);
  c.b_counts = CountMatrix::Zero(n, n);
  c.m_effective = 0;
  return c;
}

std::string to_string(EstimatorKind k) {
  return k == EstimatorKind::bootstrap ? "bootstrap" : "direct";
}

EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "bootstrap") return EstimatorKind::bootstrap;
  if (s == "direct") return EstimatorKind::direct;
  throw UsageError("unknown estimator '" + s + "'");
}

GeneratorFn make_mixture_generator(const GaussianMixtureSpec& spec) {
  spec.validate();
  return [spec](int count, RngStream& rng) {
    Dataset out;
    std::vector<int> comps;
    out.features = spec.sample(count, rng, &comps);
    out.labels.reserve(count);
    for (int c : comps) out.labels.push_back(std::to_string(c));
    out.ids.resize(count);
    for (int i = 0; i < count; ++i) out.ids[i] = i;
    for (int j = 0; j < out.d(); ++j) {
      out.feature_names.push_back("x" + std::to_string(j));
    }
    out.label_name = "label";
    return out;
  };
}

std::pair<CoocEstimate, CoocCounters> cooc_bootstrap(
    const Dataset& data, const ClusterFn& fit, int m, const RngStream& rng,
    const BootstrapOptions& opts) {
  const int n = data.n();
  if (n < 2) throw UsageError("bootstrap estimation needs at least 2 items");
  if (m < 1) throw UsageError("m must be at least 1");
  if (opts.threads < 1) throw UsageError("threads must be at least 1");

  const int threads = std::min(opts.threads, m);
  std::vector<CoocCounters> partial(threads);

  run_workers(threads, [&](int w) {
    CoocCounters local = CoocCounters::zero(n);
    // Scratch for the unique reduction: first position of each item id.
    std::vector<int> first_pos(n, -1);
    std::vector<int> present;  // ids in first-occurrence order
    present.reserve(n);

    for (int i = w; i < m; i += threads) {
      // Everything iteration i needs — the resample, the clustering
      // randomness, and any retries — comes from this one substream, so
      // the outcome is independent of which worker runs it.
      RngStream it_rng = rng.substream(static_cast<std::uint64_t>(i));
      Assignment assign;
      IndexVector indices;
      bool ok = false;
      for (int attempt = 0; attempt <= opts.max_retries && !ok; ++attempt) {
        indices = bootstrap_indices(n, it_rng);
        const Dataset z = resample(data, indices);
        try {
          assign = fit(z, it_rng);
          ok = true;
        } catch (const ClusteringFailure&) {
          // Fresh resample on the next attempt.
        }
      }
      if (!ok) continue;  // iteration skipped; m_effective unchanged
      check_fit_output(assign, n);

      // Reduce the index vector to the first occurrence of each item.
      present.clear();
      for (int t = 0; t < n; ++t) {
        const int id = indices[t];
        if (first_pos[id] < 0) {
          first_pos[id] = t;
          present.push_back(id);
        }
      }
      // Count joint presence and same-cluster co-occurrence for every
      // unordered pair of distinct items in the resample.
      for (std::size_t u = 0; u + 1 < present.size(); ++u) {
        const int id_u = present[u];
        const int cu = assign.cluster_of[first_pos[id_u]];
        for (std::size_t v = u + 1; v < present.size(); ++v) {
          const int id_v = present[v];
          local.b_counts(id_u, id_v) += 1;
          local.b_counts(id_v, id_u) += 1;
          if (cu != Assignment::kTrimmed &&
              cu == assign.cluster_of[first_pos[id_v]]) {
            local.a_counts(id_u, id_v) += 1;
            local.a_counts(id_v, id_u) += 1;
          }
        }
      }
      local.m_effective += 1;
      for (int id : present) first_pos[id] = -1;
    }
    partial[w] = std::move(local);
  });

  CoocCounters merged = std::move(partial[0]);
  for (int w = 1; w < threads; ++w) merged = merge_counters(merged, partial[w]);
  if (merged.m_effective == 0) {
    throw ComputeError("no bootstrap iteration completed: clustering failed "
                       "on every resample");
  }
  return {estimate_from_counters(merged, EstimatorKind::bootstrap),
          std::move(merged)};
}

std::pair<CoocEstimate, CoocCounters> cooc_direct(
    const Dataset& data, const GeneratorFn& generator, const ClusterFn& fit,
    int m, const RngStream& rng, const DirectOptions& opts) {
  const int n = data.n();
  const int d = data.d();
  if (n < 2) throw UsageError("direct estimation needs at least 2 items");
  if (m < 1) throw UsageError("m must be at least 1");
  if (opts.threads < 1) throw UsageError("threads must be at least 1");
  if (!generator) throw UsageError("direct estimation requires a generator");

  // Normalize the requested pairs to i < j; default is every unordered pair.
  std::vector<std::pair<int, int>> pairs;
  if (opts.pairs) {
    pairs.reserve(opts.pairs->size());
    for (auto [i, j] : *opts.pairs) {
      if (i < 0 || j < 0 || i >= n || j >= n) {
        throw DataError("pair index out of range");
      }
      if (i == j) throw UsageError("pairs must join distinct items");
      pairs.emplace_back(std::min(i, j), std::max(i, j));
    }
    // Duplicates (including mirrored requests) would make two workers
    // recompute and write the same cells; one copy suffices.
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  } else {
    pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }
  }

  CoocCounters counters = CoocCounters::zero(n);
  counters.m_effective = m;  // per-pair completions live in b_counts

  const int threads =
      std::max(1, std::min<int>(opts.threads, static_cast<int>(pairs.size())));

  run_workers(threads, [&](int w) {
    for (std::size_t q = w; q < pairs.size(); q += threads) {
      const auto [i, j] = pairs[q];
      // The stream key is the pair's identity, not its position in the
      // request, so within-cluster and full runs agree where they overlap.
      const RngStream pair_rng = rng.substream(
          static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) + j);
      std::int64_t a_count = 0;
      std::int64_t b_count = 0;

      for (int t = 0; t < m; ++t) {
        RngStream t_rng = pair_rng.substream(static_cast<std::uint64_t>(t));
        Assignment assign;
        bool ok = false;
        for (int attempt = 0; attempt <= opts.max_retries && !ok; ++attempt) {
          // R = { D[i], D[j] } followed by n-2 fresh draws from F.
          const Dataset fresh = generator(n - 2, t_rng);
          if (fresh.d() != d) {
            throw DataError("generator produced dimension " +
                            std::to_string(fresh.d()) + ", dataset has " +
                            std::to_string(d));
          }
          Dataset z;
          z.features.resize(n, d);
          z.features.row(0) = data.features.row(i);
          z.features.row(1) = data.features.row(j);
          z.features.bottomRows(n - 2) = fresh.features;
          if (data.has_labels() && fresh.has_labels()) {
            z.labels.reserve(n);
            z.labels.push_back(data.labels[i]);
            z.labels.push_back(data.labels[j]);
            z.labels.insert(z.labels.end(), fresh.labels.begin(),
                            fresh.labels.end());
          }
          z.ids.resize(n);
          for (int t2 = 0; t2 < n; ++t2) z.ids[t2] = t2;
          z.feature_names = data.feature_names;
          z.label_name = data.label_name;
          try {
            assign = fit(z, t_rng);
            ok = true;
          } catch (const ClusteringFailure&) {
            // Fresh sample from F on the next attempt.
          }
        }
        if (!ok) continue;  // this sample is skipped for this pair
        check_fit_output(assign, n);
        b_count += 1;
        const int ci = assign.cluster_of[0];
        const int cj = assign.cluster_of[1];
        if (ci != Assignment::kTrimmed && ci == cj) a_count += 1;
      }

      // Each pair's cells are written by exactly one worker.
      counters.a_counts(i, j) = a_count;
      counters.a_counts(j, i) = a_count;
      counters.b_counts(i, j) = b_count;
      counters.b_counts(j, i) = b_count;
    }
  });

  for (auto [i, j] : pairs) {
    if (counters.b_counts(i, j) == 0) {
      throw ComputeError("pair (" + std::to_string(i) + ", " +
                         std::to_string(j) +
                         ") completed no samples: clustering failed on every "
                         "attempt");
    }
  }
  return {estimate_from_counters(counters, EstimatorKind::direct),
          std::move(counters)};
}

CoocCounters merge_counters(const CoocCounters& x, const CoocCounters& y) {
  if (x.n() != y.n()) {
    throw DataError("cannot merge counters over " + std::to_string(x.n()) +
                    " and " + std::to_string(y.n()) + " items");
  }
  CoocCounters out;
  out.a_counts = x.a_counts + y.a_counts;
  out.b_counts = x.b_counts + y.b_counts;
  out.m_effective = x.m_effective + y.m_effective;
  return out;
}

CoocEstimate estimate_from_counters(const CoocCounters& c, EstimatorKind kind) {
  const int n = c.n();
  CoocEstimate est;
  est.method_tag = to_string(kind);
  est.p.resize(n, n);
  const double prior_a = 1.0 / static_cast<double>(n);
  for (int i = 0; i < n; ++i) {
    est.p(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      double p = 0.0;
      if (kind == EstimatorKind::bootstrap) {
        p = (static_cast<double>(c.a_counts(i, j)) + prior_a) /
            (static_cast<double>(c.b_counts(i, j)) + 1.0);
      } else if (c.b_counts(i, j) > 0) {
        p = static_cast<double>(c.a_counts(i, j)) /
            static_cast<double>(c.b_counts(i, j));
      }
      est.p(i, j) = p;
      est.p(j, i) = p;
    }
  }
  return est;
}

std::int64_t required_samples(double p, double sigma) {
  if (sigma <= 0.0) throw UsageError("sigma must be positive");
  if (p < 0.0 || p > 1.0) throw UsageError("p must lie in [0, 1]");
  double v = p * (1.0 - p) / (sigma * sigma);
  if (v == 0.0) return 0;
  // Snap ratios that are integers up to floating-point noise before the
  // ceiling; 0.9 * 0.1 / 0.01^2 must give exactly 900, not 901.
  const double r = std::round(v);
  if (std::abs(v - r) <= 1e-9 * std::max(1.0, r)) v = r;
  return static_cast<std::int64_t>(std::ceil(v));
}

double pair_coverage(std::int64_t n) {
  if (n < 1) throw UsageError("n must be at least 1");
  const double inv = 1.0 / static_cast<double>(n);
  const double ps = 1.0 - std::pow(1.0 - inv, static_cast<double>(n));
  return ps * ps;
}

double bootstrap_sigma(double p, std::int64_t m, std::int64_t n) {
  if (m < 1) throw UsageError("m must be at least 1");
  if (p < 0.0 || p > 1.0) throw UsageError("p must lie in [0, 1]");
  return std::sqrt(p * (1.0 - p) /
                   (static_cast<double>(m) * pair_coverage(n)));
}

void write_cooc_matrix_csv(const CoocEstimate& est, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  const int n = static_cast<int>(est.p.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j) out << ',';
      out << format_double(est.p(i, j));
    }
    out << '\n';
  }
  if (!out) throw DataError("failed while writing '" + path + "'");
}

void write_cooc_edges_csv(const CoocEstimate& est, double threshold,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << "i,j,p\n";
  const int n = static_cast<int>(est.p.rows());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (est.p(i, j) >= threshold) {
        out << i << ',' << j << ',' << format_double(est.p(i, j)) << '\n';
      }
    }
  }
  if (!out) throw DataError("failed while writing '" + path + "'");
}

}  // namespace corecluster
