#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "corecluster/core.hpp"
#include "corecluster/errors.hpp"
#include "corecluster/evaluation.hpp"
#include "corecluster/version.hpp"

namespace {

namespace fs = std::filesystem;
using corecluster::DataError;
using corecluster::UsageError;
using ordered_json = nlohmann::ordered_json;

/// Everything needed to reproduce a run byte-for-byte: the command, the
/// effective flag values, the master seed, and the software version.
/// Wall-clock seconds and m_effective are informational.
void write_manifest(const std::string& command, ordered_json flags,
                    ordered_json seed, ordered_json m_effective,
                    double wall_clock_seconds, const fs::path& path,
                    bool print) {
  ordered_json j;
  j["command"] = command;
  j["flags"] = std::move(flags);
  j["seed"] = std::move(seed);
  j["version"] = corecluster::kVersion;
  j["m_effective"] = std::move(m_effective);
  j["wall_clock_seconds"] = wall_clock_seconds;
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw DataError("failed while writing '" + path.string() + "'");
  if (print) std::cout << j.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

struct GenerateArgs {
  int n = 150;
  int components = 3;
  double side = 3.0;
  double variance = 1.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  if (a.n < 1) throw UsageError("--n must be at least 1");
  const auto spec = corecluster::GaussianMixtureSpec::regular_polygon(
      a.components, a.side, a.variance);
  const corecluster::Dataset data =
      corecluster::generate_gaussian_mixture(spec, a.n, a.seed);
  corecluster::write_csv(data, a.out);

  ordered_json flags;
  flags["n"] = a.n;
  flags["components"] = a.components;
  flags["side"] = a.side;
  flags["variance"] = a.variance;
  flags["seed"] = a.seed;
  flags["out"] = a.out;
  write_manifest("generate", std::move(flags), a.seed, nullptr,
                 seconds_since(start), a.out + ".manifest.json",
                 /*print=*/true);
  return 0;
}

struct CoreArgs {
  std::string input;
  std::string label_col;
  bool label_col_given = false;
  std::string method = "kmeanspp";
  int k = 3;
  double alpha = 0.1;
  int iterations = 1000;
  std::string estimator = "bootstrap";
  int restarts = 10;
  std::string linkage = "complete";
  double trim = 0.05;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 1;
  int clique_ceiling = 5000;
  std::string direct_scope = "within";
  int gen_components = 3;
  double gen_side = 3.0;
  double gen_variance = 1.0;
  bool write_cooc_matrix = false;
  double edges_threshold = -1.0;  // < 0 means "use 1 - alpha"
};

int cmd_core(const CoreArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const std::optional<std::string> label_col =
      a.label_col_given ? std::optional<std::string>(a.label_col)
                        : std::nullopt;
  const corecluster::Dataset data = corecluster::load_csv(a.input, label_col);

  corecluster::CoreConfig cfg;
  cfg.alpha = a.alpha;
  cfg.iterations = a.iterations;
  cfg.estimator = corecluster::estimator_from_string(a.estimator);
  cfg.cluster.method = corecluster::method_from_string(a.method);
  cfg.cluster.k = a.k;
  cfg.cluster.restarts = a.restarts;
  cfg.cluster.linkage = corecluster::linkage_from_string(a.linkage);
  cfg.cluster.trim_fraction = a.trim;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  cfg.clique_ceiling = a.clique_ceiling;
  cfg.direct_scope = corecluster::direct_scope_from_string(a.direct_scope);

  corecluster::GeneratorFn generator;
  const corecluster::GeneratorFn* generator_ptr = nullptr;
  if (cfg.estimator == corecluster::EstimatorKind::direct) {
    // The direct estimator needs the generating distribution; the CLI
    // models it as the same Gaussian-mixture family `generate` samples.
    generator = corecluster::make_mixture_generator(
        corecluster::GaussianMixtureSpec::regular_polygon(
            a.gen_components, a.gen_side, a.gen_variance));
    generator_ptr = &generator;
  }

  const corecluster::CoreClusteringResult result =
      corecluster::core_clustering(data, cfg, generator_ptr);

  const fs::path out_dir(a.out_dir);
  fs::create_directories(out_dir);
  corecluster::write_result_json(result, data, a.input,
                                 (out_dir / "result.json").string());
  corecluster::write_items_csv(result, data, (out_dir / "items.csv").string());
  const double threshold =
      a.edges_threshold < 0.0 ? 1.0 - a.alpha : a.edges_threshold;
  corecluster::write_cooc_edges_csv(result.cooc, threshold,
                                    (out_dir / "cooc_edges.csv").string());
  if (a.write_cooc_matrix) {
    corecluster::write_cooc_matrix_csv(result.cooc,
                                       (out_dir / "cooc_matrix.csv").string());
  }

  ordered_json flags;
  flags["input"] = a.input;
  flags["label_col"] =
      a.label_col_given ? ordered_json(a.label_col) : ordered_json(nullptr);
  flags["method"] = a.method;
  flags["k"] = a.k;
  flags["alpha"] = a.alpha;
  flags["iterations"] = a.iterations;
  flags["estimator"] = a.estimator;
  flags["restarts"] = a.restarts;
  flags["linkage"] = a.linkage;
  flags["trim"] = a.trim;
  flags["seed"] = a.seed;
  flags["out_dir"] = a.out_dir;
  flags["threads"] = a.threads;
  flags["clique_ceiling"] = a.clique_ceiling;
  flags["direct_scope"] = a.direct_scope;
  flags["gen_components"] = a.gen_components;
  flags["gen_side"] = a.gen_side;
  flags["gen_variance"] = a.gen_variance;
  flags["write_cooc_matrix"] = a.write_cooc_matrix;
  flags["edges_threshold"] = threshold;
  write_manifest("core", std::move(flags), a.seed, result.m_effective,
                 seconds_since(start), out_dir / "manifest.json",
                 /*print=*/true);
  return 0;
}

struct EvalArgs {
  std::string result;
  std::string result2;
  bool result2_given = false;
  std::string labels;
  bool labels_given = false;
  std::string label_col = "label";
  std::string out;
  bool out_given = false;
};

int cmd_eval(const EvalArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const corecluster::ResultSummary r1 = corecluster::read_result_json(a.result);

  std::string header;
  std::string row;
  if (a.result2_given) {
    const corecluster::ResultSummary r2 =
        corecluster::read_result_json(a.result2);
    const corecluster::AgreementMatrix m = corecluster::agreement(r1, r2);
    header = "a,b,c,d,off_diagonal_fraction";
    row = std::to_string(m.a) + ',' + std::to_string(m.b) + ',' +
          std::to_string(m.c) + ',' + std::to_string(m.d) + ',' +
          corecluster::detail::format_double(m.off_diagonal_fraction());
  } else {
    const std::string labels_path =
        a.labels_given ? a.labels : r1.dataset_path;
    const corecluster::Dataset data =
        corecluster::load_csv(labels_path, a.label_col);
    if (!data.has_labels()) {
      throw DataError("dataset '" + labels_path + "' carries no labels");
    }
    if (data.n() != r1.n ||
        corecluster::feature_checksum(data) != r1.feature_checksum) {
      throw DataError("dataset '" + labels_path +
                      "' does not match the dataset the result was "
                      "computed from");
    }
    const corecluster::PurityReport rep = corecluster::report(r1, data.labels);
    header = "dataset,algorithm,P_o,P_c,w";
    row = r1.dataset_path + ',' + r1.method_tag + ',' +
          corecluster::detail::format_double(rep.purity_original) + ',' +
          corecluster::detail::format_double(rep.purity_core) + ',' +
          corecluster::detail::format_double(rep.weak_fraction);
  }

  std::cout << header << '\n' << row << '\n';
  if (a.out_given) {
    std::ofstream out(a.out);
    if (!out) throw DataError("cannot write '" + a.out + "'");
    out << header << '\n' << row << '\n';
    if (!out) throw DataError("failed while writing '" + a.out + "'");

    ordered_json flags;
    flags["result"] = a.result;
    flags["result2"] =
        a.result2_given ? ordered_json(a.result2) : ordered_json(nullptr);
    flags["labels"] =
        a.labels_given ? ordered_json(a.labels) : ordered_json(nullptr);
    flags["label_col"] = a.label_col;
    flags["out"] = a.out;
    write_manifest("eval", std::move(flags), nullptr, nullptr,
                   seconds_since(start), a.out + ".manifest.json",
                   /*print=*/false);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Core clustering: stable cluster cores from resampled "
               "clusterings"};
  app.set_version_flag("--version", corecluster::kVersion);
  app.require_subcommand(1);

  GenerateArgs gen;
  CLI::App* gen_cmd = app.add_subcommand(
      "generate", "Sample a Gaussian-mixture dataset to CSV");
  gen_cmd->add_option("--n", gen.n, "Number of items")->capture_default_str();
  gen_cmd->add_option("--components", gen.components,
                      "Mixture components, placed on a regular polygon")
      ->capture_default_str();
  gen_cmd->add_option("--side", gen.side,
                      "Nearest-neighbour distance between component means")
      ->capture_default_str();
  gen_cmd->add_option("--variance", gen.variance,
                      "Isotropic variance of each component")
      ->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Random seed")
      ->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output CSV path")->required();

  CoreArgs core;
  CLI::App* core_cmd =
      app.add_subcommand("core", "Run core clustering on a CSV dataset");
  core_cmd->add_option("--input", core.input, "Input CSV path")->required();
  CLI::Option* label_col_opt = core_cmd->add_option(
      "--label-col", core.label_col,
      "Header name of the ground-truth label column, if any");
  core_cmd
      ->add_option("--method", core.method,
                   "kmeanspp | hierarchical | trimmed_kmeans | "
                   "nearest_centroid")
      ->capture_default_str();
  core_cmd->add_option("--k", core.k, "Number of clusters")
      ->capture_default_str();
  core_cmd
      ->add_option("--alpha", core.alpha,
                   "Confidence threshold: core pairs co-occur with "
                   "probability >= 1 - alpha")
      ->capture_default_str();
  core_cmd
      ->add_option("--iterations", core.iterations,
                   "Samples per co-occurrence estimate")
      ->capture_default_str();
  core_cmd->add_option("--estimator", core.estimator, "bootstrap | direct")
      ->capture_default_str();
  core_cmd
      ->add_option("--restarts", core.restarts,
                   "Restarts for stochastic methods")
      ->capture_default_str();
  core_cmd
      ->add_option("--linkage", core.linkage,
                   "complete | single | average (hierarchical)")
      ->capture_default_str();
  core_cmd
      ->add_option("--trim", core.trim,
                   "Trim fraction (trimmed_kmeans only)")
      ->capture_default_str();
  core_cmd->add_option("--seed", core.seed, "Master seed for the whole run")
      ->capture_default_str();
  core_cmd
      ->add_option("--out-dir", core.out_dir,
                   "Directory for result.json, items.csv, cooc_edges.csv, "
                   "manifest.json")
      ->envname("CORECLUSTER_OUT_DIR")
      ->capture_default_str();
  core_cmd
      ->add_option("--threads", core.threads,
                   "Worker pool size; never changes results")
      ->envname("CORECLUSTER_THREADS")
      ->capture_default_str();
  core_cmd
      ->add_option("--clique-ceiling", core.clique_ceiling,
                   "Refuse exact clique search above this cluster size")
      ->capture_default_str();
  core_cmd
      ->add_option("--direct-scope", core.direct_scope,
                   "within | full: pairs the direct estimator computes")
      ->capture_default_str();
  core_cmd
      ->add_option("--gen-components", core.gen_components,
                   "Direct estimator: mixture components of the generating "
                   "distribution")
      ->capture_default_str();
  core_cmd
      ->add_option("--gen-side", core.gen_side,
                   "Direct estimator: distance between component means")
      ->capture_default_str();
  core_cmd
      ->add_option("--gen-variance", core.gen_variance,
                   "Direct estimator: component variance")
      ->capture_default_str();
  core_cmd->add_flag("--write-cooc-matrix", core.write_cooc_matrix,
                     "Also export the full co-occurrence matrix CSV");
  core_cmd
      ->add_option("--edges-threshold", core.edges_threshold,
                   "Probability cutoff for cooc_edges.csv (default 1 - alpha)")
      ->check(CLI::Range(0.0, 1.0));

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "Evaluate one result (purity) or compare two (agreement)");
  eval_cmd->add_option("--result", eval.result, "Result JSON path")
      ->required();
  CLI::Option* result2_opt = eval_cmd->add_option(
      "--result2", eval.result2, "Second result JSON for agreement");
  CLI::Option* labels_opt = eval_cmd->add_option(
      "--labels", eval.labels,
      "Labelled dataset CSV (default: the result's recorded dataset path)");
  eval_cmd
      ->add_option("--label-col", eval.label_col,
                   "Header name of the label column")
      ->capture_default_str();
  CLI::Option* out_opt =
      eval_cmd->add_option("--out", eval.out, "Also write the report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  core.label_col_given = label_col_opt->count() > 0;
  eval.result2_given = result2_opt->count() > 0;
  eval.labels_given = labels_opt->count() > 0;
  eval.out_given = out_opt->count() > 0;

  try {
    if (gen_cmd->parsed()) return cmd_generate(gen);
    if (core_cmd->parsed()) return cmd_core(core);
    if (eval_cmd->parsed()) return cmd_eval(eval);
    std::cerr << "error: no command selected\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const corecluster::ComputeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 4;
  }
}
