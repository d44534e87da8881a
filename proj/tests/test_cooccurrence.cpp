#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "doctest.h"

#include "corecluster/cooccurrence.hpp"
#include "corecluster/errors.hpp"
#include "oracles.hpp"

using corecluster::Assignment;
using corecluster::BootstrapOptions;
using corecluster::ClusterFn;
using corecluster::ClusteringFailure;
using corecluster::ComputeError;
using corecluster::CoocCounters;
using corecluster::CoocEstimate;
using corecluster::DataError;
using corecluster::Dataset;
using corecluster::DirectOptions;
using corecluster::EstimatorKind;
using corecluster::GaussianMixtureSpec;
using corecluster::GeneratorFn;
using corecluster::RngStream;
using corecluster::UsageError;

namespace {

/// Clusters a dataset by thresholding the first feature at the dataset
/// mean. The split depends on the sample composition, so co-occurrence
/// probabilities are strictly between 0 and 1 — a nontrivial target for
/// the enumeration oracle. Labels are relabelled to first-occurrence
/// order to keep cluster indices contiguous from 0.
oracles::DeterministicFit mean_split_rule() {
  return [](const Dataset& z) {
    const double mean = z.features.col(0).mean();
    Assignment out;
    out.cluster_of.resize(z.n());
    std::vector<int> relabel(2, -1);
    int next = 0;
    for (int i = 0; i < z.n(); ++i) {
      const int side = z.features(i, 0) <= mean ? 0 : 1;
      if (relabel[side] < 0) relabel[side] = next++;
      out.cluster_of[i] = relabel[side];
    }
    out.k = next;
    return out;
  };
}

ClusterFn ignore_rng(const oracles::DeterministicFit& fit) {
  return [fit](const Dataset& z, RngStream&) { return fit(z); };
}

/// Assigns every item to one cluster.
ClusterFn one_cluster_fn() {
  return [](const Dataset& z, RngStream&) {
    Assignment out;
    out.cluster_of.assign(z.n(), 0);
    out.k = 1;
    return out;
  };
}

/// Fails the first `failures` calls with ClusteringFailure, then behaves
/// as one_cluster_fn. Call order is deterministic with one thread.
ClusterFn failing_fn(int failures, const std::shared_ptr<int>& calls) {
  return [failures, calls](const Dataset& z, RngStream&) {
    if ((*calls)++ < failures) throw ClusteringFailure("no solution here");
    Assignment out;
    out.cluster_of.assign(z.n(), 0);
    out.k = 1;
    return out;
  };
}

/// 4-sigma band for the bootstrap ratio estimate of one pair, from the
/// enumerated per-iteration expectations: conditional on joint presence
/// (probability mean_b), co-occurrence is Bernoulli(limit_p) independently
/// across iterations, so the ratio concentrates at limit_p with standard
/// deviation about sqrt(limit_p (1 - limit_p) / (m mean_b)); the prior
/// adds at most ~2/(m mean_b).
double ratio_tolerance(double limit_p, double mean_b, int m) {
  const double s_lo =
      m * mean_b - 4.0 * std::sqrt(m * mean_b * (1.0 - mean_b)) - 1.0;
  REQUIRE(s_lo > 1.0);
  return 4.0 * std::sqrt(limit_p * (1.0 - limit_p) / s_lo) + 2.5 / s_lo;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("cooc_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("cooccurrence") {

TEST_CASE("required_samples matches the binomial error model") {
  CHECK(corecluster::required_samples(0.9, 0.01) == 900);
  CHECK(corecluster::required_samples(0.5, 0.05) == 100);
  CHECK(corecluster::required_samples(0.5, 0.01) == 2500);
  // Degenerate proportions need no samples at all.
  CHECK(corecluster::required_samples(0.0, 0.01) == 0);
  CHECK(corecluster::required_samples(1.0, 0.01) == 0);
  // A non-integer ratio rounds up: 0.8 * 0.2 / 0.03^2 = 177.78.
  CHECK(corecluster::required_samples(0.8, 0.03) == 178);
  CHECK_THROWS_AS(corecluster::required_samples(0.9, 0.0), UsageError);
  CHECK_THROWS_AS(corecluster::required_samples(0.9, -1.0), UsageError);
  CHECK_THROWS_AS(corecluster::required_samples(-0.1, 0.01), UsageError);
  CHECK_THROWS_AS(corecluster::required_samples(1.1, 0.01), UsageError);
}

TEST_CASE("pair_coverage interpolates from 1 to the 40 percent limit") {
  CHECK(corecluster::pair_coverage(1) == doctest::Approx(1.0));
  // n = 2: each item appears with probability 1 - (1/2)^2 = 3/4.
  CHECK(corecluster::pair_coverage(2) == doctest::Approx(0.5625));
  const double limit = std::pow(1.0 - std::exp(-1.0), 2);
  CHECK(corecluster::pair_coverage(1000000) == doctest::Approx(limit).epsilon(1e-4));
  // Decreasing in n.
  double prev = 2.0;
  for (std::int64_t n : {1, 2, 3, 5, 10, 100, 10000}) {
    const double c = corecluster::pair_coverage(n);
    CHECK(c < prev);
    prev = c;
  }
  CHECK_THROWS_AS(corecluster::pair_coverage(0), UsageError);
}

TEST_CASE("bootstrap_sigma combines coverage with the binomial model") {
  const double direct = std::sqrt(0.9 * 0.1 / (1000.0 * corecluster::pair_coverage(150)));
  CHECK(corecluster::bootstrap_sigma(0.9, 1000, 150) == doctest::Approx(direct));
  // The motivating figure: ~0.015 accuracy from 1000 iterations.
  CHECK(corecluster::bootstrap_sigma(0.9, 1000, 1000000) ==
        doctest::Approx(0.015).epsilon(0.01));
  CHECK_THROWS_AS(corecluster::bootstrap_sigma(0.9, 0, 100), UsageError);
  CHECK_THROWS_AS(corecluster::bootstrap_sigma(1.5, 100, 100), UsageError);
}

TEST_CASE("bootstrap counters under an always-one-cluster function") {
  const Dataset data = oracles::make_dataset({{0}, {1}, {2}, {3}, {4}});
  RngStream rng(7);
  const auto [est, counters] =
      corecluster::cooc_bootstrap(data, one_cluster_fn(), 400, rng);
  CHECK(counters.m_effective == 400);
  // Everyone always shares a cluster, so a == b cell for cell …
  CHECK(counters.a_counts == counters.b_counts);
  for (int i = 0; i < 5; ++i) {
    CHECK(est.p(i, i) == 1.0);
    for (int j = 0; j < 5; ++j) {
      if (i == j) continue;
      const auto b = counters.b_counts(i, j);
      // … and the prior keeps estimates strictly inside (b/(b+1), 1).
      CHECK(est.p(i, j) == doctest::Approx((b + 0.2) / (b + 1.0)));
      CHECK(est.p(i, j) < 1.0);
      CHECK(est.p(i, j) > 0.9);
    }
  }
  CHECK(est.method_tag == "bootstrap");
}

TEST_CASE("bootstrap estimates converge to enumerated expectations") {
  // Exhaustive enumeration of all n^n index vectors gives the exact
  // per-iteration counter expectations for a deterministic clustering
  // rule; the Monte Carlo estimate must land within a 4-sigma band.
  const oracles::DeterministicFit rule = mean_split_rule();
  const int m = 20000;

  for (const auto& rows : {std::vector<std::vector<double>>{{0}, {1}, {2}, {10}},
                           std::vector<std::vector<double>>{
                               {0}, {1}, {2}, {3}, {4}, {20}}}) {
    const Dataset data = oracles::make_dataset(rows);
    const int n = data.n();
    const auto enumeration = oracles::enumerate_bootstrap(data, rule);
    RngStream rng(1234 + n);
    const auto [est, counters] =
        corecluster::cooc_bootstrap(data, ignore_rng(rule), m, rng);
    REQUIRE(counters.m_effective == m);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double limit = enumeration.limit_p(i, j);
        const double mean_b = enumeration.mean_b(i, j);
        const double tol = ratio_tolerance(limit, mean_b, m);
        CAPTURE(i);
        CAPTURE(j);
        CHECK(std::abs(est.p(i, j) - limit) <= tol);
        // Joint presence counts follow the enumerated mean too.
        const double b_hat =
            static_cast<double>(counters.b_counts(i, j)) / m;
        CHECK(std::abs(b_hat - mean_b) <=
              4.0 * std::sqrt(mean_b * (1.0 - mean_b) / m));
      }
    }
  }
}

TEST_CASE("failed iterations retry on fresh resamples, then are skipped") {
  const Dataset data = oracles::make_dataset({{0}, {1}, {2}});
  const int m = 10;

  SUBCASE("five failures are absorbed by retries of the first iteration") {
    auto calls = std::make_shared<int>(0);
    RngStream rng(5);
    const auto [est, counters] =
        corecluster::cooc_bootstrap(data, failing_fn(5, calls), m, rng);
    CHECK(counters.m_effective == m);
    CHECK(*calls == m + 5);  // 5 failed attempts + m successes
  }

  SUBCASE("a sixth failure exhausts the retries and skips the iteration") {
    auto calls = std::make_shared<int>(0);
    RngStream rng(5);
    const auto [est, counters] =
        corecluster::cooc_bootstrap(data, failing_fn(6, calls), m, rng);
    CHECK(counters.m_effective == m - 1);
  }

  SUBCASE("an estimator with no completed iteration reports failure") {
    auto calls = std::make_shared<int>(0);
    RngStream rng(5);
    CHECK_THROWS_AS(
        corecluster::cooc_bootstrap(data, failing_fn(6 * m, calls), 3, rng),
        ComputeError);
  }
}

TEST_CASE("worker counts do not change bootstrap results") {
  GaussianMixtureSpec spec = GaussianMixtureSpec::regular_polygon(3);
  const Dataset data = corecluster::generate_gaussian_mixture(spec, 25, 77);
  corecluster::ClusterConfig cfg;
  cfg.k = 3;
  cfg.restarts = 2;
  const ClusterFn fit = corecluster::make_cluster_fn(cfg);

  RngStream rng(42);
  BootstrapOptions serial;
  serial.threads = 1;
  const auto [est1, c1] = corecluster::cooc_bootstrap(data, fit, 64, rng, serial);
  BootstrapOptions parallel;
  parallel.threads = 4;
  const auto [est4, c4] = corecluster::cooc_bootstrap(data, fit, 64, rng, parallel);

  CHECK(c1.a_counts == c4.a_counts);
  CHECK(c1.b_counts == c4.b_counts);
  CHECK(c1.m_effective == c4.m_effective);
  CHECK(est1.p == est4.p);
}

TEST_CASE("counter merging is exact, commutative, and shape-checked") {
  CoocCounters x = CoocCounters::zero(3);
  x.a_counts(0, 1) = x.a_counts(1, 0) = 2;
  x.b_counts(0, 1) = x.b_counts(1, 0) = 5;
  x.m_effective = 7;
  CoocCounters y = CoocCounters::zero(3);
  y.a_counts(0, 1) = y.a_counts(1, 0) = 1;
  y.b_counts(0, 1) = y.b_counts(1, 0) = 3;
  y.b_counts(1, 2) = y.b_counts(2, 1) = 4;
  y.m_effective = 4;

  const CoocCounters xy = corecluster::merge_counters(x, y);
  const CoocCounters yx = corecluster::merge_counters(y, x);
  CHECK(xy.a_counts(0, 1) == 3);
  CHECK(xy.b_counts(0, 1) == 8);
  CHECK(xy.b_counts(2, 1) == 4);
  CHECK(xy.m_effective == 11);
  CHECK(xy.a_counts == yx.a_counts);
  CHECK(xy.b_counts == yx.b_counts);
  CHECK(xy.m_effective == yx.m_effective);

  const CoocCounters zero = CoocCounters::zero(3);
  const CoocCounters xz = corecluster::merge_counters(x, zero);
  CHECK(xz.a_counts == x.a_counts);
  CHECK(xz.b_counts == x.b_counts);
  CHECK(xz.m_effective == x.m_effective);

  CHECK_THROWS_AS(corecluster::merge_counters(x, CoocCounters::zero(4)),
                  DataError);
}

TEST_CASE("estimates from raw counters apply the right denominator") {
  CoocCounters c = CoocCounters::zero(2);
  c.a_counts(0, 1) = c.a_counts(1, 0) = 3;
  c.b_counts(0, 1) = c.b_counts(1, 0) = 4;
  c.m_effective = 5;

  const CoocEstimate boot =
      corecluster::estimate_from_counters(c, EstimatorKind::bootstrap);
  CHECK(boot.p(0, 1) == doctest::Approx((3.0 + 0.5) / 5.0));
  CHECK(boot.p(0, 0) == 1.0);
  CHECK(boot.method_tag == "bootstrap");

  const CoocEstimate direct =
      corecluster::estimate_from_counters(c, EstimatorKind::direct);
  CHECK(direct.p(0, 1) == doctest::Approx(0.75));
  CHECK(direct.p(1, 1) == 1.0);
  CHECK(direct.method_tag == "direct");

  // Direct cells with no completed samples stay 0 rather than dividing
  // by zero.
  CoocCounters empty = CoocCounters::zero(2);
  empty.m_effective = 5;
  const CoocEstimate none =
      corecluster::estimate_from_counters(empty, EstimatorKind::direct);
  CHECK(none.p(0, 1) == 0.0);
  CHECK(none.p(0, 0) == 1.0);
}

TEST_CASE("direct estimation counts per-pair co-occurrences exactly") {
  GaussianMixtureSpec spec = GaussianMixtureSpec::regular_polygon(2, 10.0);
  const GeneratorFn gen = corecluster::make_mixture_generator(spec);
  const Dataset data = oracles::make_dataset({{0, 0}, {1, 1}, {2, 2}});
  const int m = 25;

  SUBCASE("an always-one-cluster function gives probability one") {
    RngStream rng(9);
    const auto [est, counters] =
        corecluster::cooc_direct(data, gen, one_cluster_fn(), m, rng);
    CHECK(counters.m_effective == m);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) {
          CHECK(est.p(i, j) == 1.0);
        } else {
          CHECK(est.p(i, j) == 1.0);
          CHECK(counters.a_counts(i, j) == m);
          CHECK(counters.b_counts(i, j) == m);
        }
      }
    }
    CHECK(est.method_tag == "direct");
  }

  SUBCASE("a function isolating the first row gives probability zero") {
    // The pair of interest occupies rows 0 and 1 of each synthetic
    // sample; a rule separating row 0 from everything else can never see
    // them together.
    const ClusterFn isolate_first = [](const Dataset& z, RngStream&) {
      Assignment out;
      out.cluster_of.assign(z.n(), 1);
      out.cluster_of[0] = 0;
      out.k = 2;
      return out;
    };
    RngStream rng(9);
    const auto [est, counters] =
        corecluster::cooc_direct(data, gen, isolate_first, m, rng);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        CHECK(est.p(i, j) == 0.0);
        CHECK(counters.a_counts(i, j) == 0);
        CHECK(counters.b_counts(i, j) == m);
      }
    }
  }
}

TEST_CASE("direct estimation separates items by the generator's geometry") {
  // Two tight components at x = -5 and x = +5; items 0 and 1 sit in the
  // left one, item 2 in the right. A split-at-zero rule therefore always
  // joins (0, 1) and never joins (0, 2) or (1, 2).
  const GaussianMixtureSpec spec = GaussianMixtureSpec::make(
      {{Eigen::VectorXd::Constant(1, -5.0), 0.01, 0.5},
       {Eigen::VectorXd::Constant(1, 5.0), 0.01, 0.5}});
  const GeneratorFn gen = corecluster::make_mixture_generator(spec);
  const Dataset data = oracles::make_dataset({{-5.0}, {-4.9}, {5.0}});

  const ClusterFn rule = [](const Dataset& z, RngStream&) {
    Assignment out;
    out.cluster_of.resize(z.n());
    std::vector<int> relabel(2, -1);
    int next = 0;
    for (int i = 0; i < z.n(); ++i) {
      const int side = z.features(i, 0) < 0.0 ? 0 : 1;
      if (relabel[side] < 0) relabel[side] = next++;
      out.cluster_of[i] = relabel[side];
    }
    out.k = next;
    return out;
  };

  RngStream rng(17);
  const auto [est, counters] = corecluster::cooc_direct(data, gen, rule, 40, rng);
  CHECK(est.p(0, 1) == 1.0);
  CHECK(est.p(0, 2) == 0.0);
  CHECK(est.p(1, 2) == 0.0);
}

TEST_CASE("restricting direct estimation to listed pairs") {
  GaussianMixtureSpec spec = GaussianMixtureSpec::regular_polygon(2, 10.0);
  const GeneratorFn gen = corecluster::make_mixture_generator(spec);
  const Dataset data =
      oracles::make_dataset({{0, 0}, {1, 0}, {2, 0}, {3, 0}});
  const int m = 15;

  std::vector<std::pair<int, int>> pairs = {{0, 1}, {2, 3}};
  DirectOptions opts;
  opts.pairs = &pairs;
  RngStream rng(31);
  const auto [est, counters] =
      corecluster::cooc_direct(data, gen, one_cluster_fn(), m, rng, opts);

  CHECK(counters.b_counts(0, 1) == m);
  CHECK(counters.b_counts(2, 3) == m);
  CHECK(est.p(0, 1) == 1.0);
  // Unrequested pairs are never sampled and report 0.
  CHECK(counters.b_counts(0, 2) == 0);
  CHECK(counters.b_counts(1, 3) == 0);
  CHECK(est.p(0, 2) == 0.0);

  SUBCASE("pair order and duplicates do not matter") {
    std::vector<std::pair<int, int>> mirrored = {{1, 0}, {3, 2}, {0, 1}};
    DirectOptions opts2;
    opts2.pairs = &mirrored;
    RngStream rng2(31);
    const auto [est2, c2] =
        corecluster::cooc_direct(data, gen, one_cluster_fn(), m, rng2, opts2);
    CHECK(c2.a_counts == counters.a_counts);
    CHECK(c2.b_counts == counters.b_counts);
    CHECK(est2.p == est.p);
  }

  SUBCASE("requested pairs agree with a full-matrix run cell by cell") {
    RngStream rng3(31);
    const auto [full_est, full_c] =
        corecluster::cooc_direct(data, gen, one_cluster_fn(), m, rng3);
    CHECK(full_c.a_counts(0, 1) == counters.a_counts(0, 1));
    CHECK(full_c.b_counts(2, 3) == counters.b_counts(2, 3));
  }
}

TEST_CASE("direct estimation validates its inputs") {
  GaussianMixtureSpec spec = GaussianMixtureSpec::regular_polygon(2);
  const GeneratorFn gen = corecluster::make_mixture_generator(spec);
  const Dataset data = oracles::make_dataset({{0, 0}, {1, 0}, {2, 0}});
  RngStream rng(3);

  SUBCASE("a null generator is a usage error") {
    CHECK_THROWS_AS(
        corecluster::cooc_direct(data, nullptr, one_cluster_fn(), 5, rng),
        UsageError);
  }
  SUBCASE("self-pairs are rejected") {
    std::vector<std::pair<int, int>> pairs = {{1, 1}};
    DirectOptions opts;
    opts.pairs = &pairs;
    CHECK_THROWS_AS(
        corecluster::cooc_direct(data, gen, one_cluster_fn(), 5, rng, opts),
        UsageError);
  }
  SUBCASE("out-of-range pairs are rejected") {
    std::vector<std::pair<int, int>> pairs = {{0, 3}};
    DirectOptions opts;
    opts.pairs = &pairs;
    CHECK_THROWS_AS(
        corecluster::cooc_direct(data, gen, one_cluster_fn(), 5, rng, opts),
        DataError);
  }
  SUBCASE("a generator with the wrong dimension is rejected") {
    // spec above generates d = 2; build 1-d data so they clash.
    const Dataset narrow = oracles::make_dataset({{0}, {1}, {2}});
    CHECK_THROWS_AS(
        corecluster::cooc_direct(narrow, gen, one_cluster_fn(), 5, rng),
        DataError);
  }
  SUBCASE("a clustering function that never succeeds is reported") {
    auto calls = std::make_shared<int>(0);
    CHECK_THROWS_AS(
        corecluster::cooc_direct(data, gen, failing_fn(1 << 28, calls), 3, rng),
        ComputeError);
  }
}

TEST_CASE("worker counts do not change direct results") {
  GaussianMixtureSpec spec = GaussianMixtureSpec::regular_polygon(3, 5.0);
  const GeneratorFn gen = corecluster::make_mixture_generator(spec);
  const Dataset data = corecluster::generate_gaussian_mixture(spec, 8, 19);
  corecluster::ClusterConfig cfg;
  cfg.k = 3;
  cfg.restarts = 2;
  const ClusterFn fit = corecluster::make_cluster_fn(cfg);

  RngStream rng(55);
  DirectOptions serial;
  serial.threads = 1;
  const auto [est1, c1] = corecluster::cooc_direct(data, gen, fit, 20, rng, serial);
  DirectOptions parallel;
  parallel.threads = 5;
  const auto [est5, c5] = corecluster::cooc_direct(data, gen, fit, 20, rng, parallel);
  CHECK(c1.a_counts == c5.a_counts);
  CHECK(c1.b_counts == c5.b_counts);
  CHECK(est1.p == est5.p);
}

TEST_CASE("the mixture generator reports component labels") {
  GaussianMixtureSpec spec = GaussianMixtureSpec::regular_polygon(3, 50.0);
  const GeneratorFn gen = corecluster::make_mixture_generator(spec);
  RngStream rng(23);
  const Dataset fresh = gen(30, rng);
  CHECK(fresh.n() == 30);
  CHECK(fresh.d() == 2);
  REQUIRE(fresh.has_labels());
  CHECK(fresh.label_name == "label");
  for (const std::string& label : fresh.labels) {
    CHECK((label == "0" || label == "1" || label == "2"));
  }
  // Consecutive calls continue the stream rather than repeating it.
  const Dataset next = gen(30, rng);
  CHECK(fresh.features != next.features);
}

TEST_CASE("estimator names round-trip and reject unknowns") {
  CHECK(corecluster::to_string(EstimatorKind::bootstrap) == "bootstrap");
  CHECK(corecluster::to_string(EstimatorKind::direct) == "direct");
  CHECK(corecluster::estimator_from_string("bootstrap") == EstimatorKind::bootstrap);
  CHECK(corecluster::estimator_from_string("direct") == EstimatorKind::direct);
  CHECK_THROWS_AS(corecluster::estimator_from_string("jackknife"), UsageError);
}

TEST_CASE("probability matrices and edge lists serialize exactly") {
  CoocEstimate est;
  est.p.resize(3, 3);
  est.p << 1.0, 0.875, 0.25,
           0.875, 1.0, 0.5,
           0.25, 0.5, 1.0;
  est.method_tag = "bootstrap";
  TempDir dir;

  const std::string matrix_path = dir.file("matrix.csv");
  corecluster::write_cooc_matrix_csv(est, matrix_path);
  CHECK(slurp(matrix_path) == "1,0.875,0.25\n0.875,1,0.5\n0.25,0.5,1\n");

  const std::string edges_path = dir.file("edges.csv");
  corecluster::write_cooc_edges_csv(est, 0.5, edges_path);
  CHECK(slurp(edges_path) == "i,j,p\n0,1,0.875\n1,2,0.5\n");

  // A threshold above every off-diagonal entry leaves only the header.
  corecluster::write_cooc_edges_csv(est, 0.9, edges_path);
  CHECK(slurp(edges_path) == "i,j,p\n");
}

TEST_CASE("bootstrap estimation validates its inputs") {
  const Dataset data = oracles::make_dataset({{0}, {1}});
  RngStream rng(2);
  CHECK_THROWS_AS(
      corecluster::cooc_bootstrap(oracles::make_dataset({{0}}),
                                  one_cluster_fn(), 5, rng),
      UsageError);
  CHECK_THROWS_AS(corecluster::cooc_bootstrap(data, one_cluster_fn(), 0, rng),
                  UsageError);
  BootstrapOptions opts;
  opts.threads = 0;
  CHECK_THROWS_AS(
      corecluster::cooc_bootstrap(data, one_cluster_fn(), 5, rng, opts),
      UsageError);
  // A clustering function returning the wrong length is a data error.
  const ClusterFn wrong_len = [](const Dataset&, RngStream&) {
    Assignment out;
    out.cluster_of = {0};
    out.k = 1;
    return out;
  };
  CHECK_THROWS_AS(corecluster::cooc_bootstrap(data, wrong_len, 5, rng),
                  DataError);
}

}  // TEST_SUITE
