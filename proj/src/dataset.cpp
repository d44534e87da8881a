#include "corecluster/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

#include "corecluster/errors.hpp"

namespace corecluster {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

bool is_missing(const std::string& field) {
  return field.empty() || field == "NA";
}

double parse_double(const std::string& field, int line_no,
                    const std::string& column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("line " + std::to_string(line_no) + ", column '" + column +
                    "': cannot parse '" + field + "' as a number");
  }
  if (!std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ", column '" + column +
                    "': non-finite feature value '" + field + "'");
  }
  return value;
}

}  // namespace

namespace detail {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace detail

Dataset load_csv(const std::string& path,
                 const std::optional<std::string>& label_column) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw DataError("'" + path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);

  int label_idx = -1;
  if (label_column) {
    auto it = std::find(header.begin(), header.end(), *label_column);
    if (it == header.end()) {
      throw DataError("label column '" + *label_column + "' not found in '" +
                      path + "'");
    }
    label_idx = static_cast<int>(it - header.begin());
  }

  const int total_cols = static_cast<int>(header.size());
  const int d = total_cols - (label_idx >= 0 ? 1 : 0);
  if (d < 1) throw DataError("'" + path + "' has no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;  // ignore blank lines
    const std::vector<std::string> fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) != total_cols) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(total_cols) + " fields, found " +
                      std::to_string(fields.size()));
    }
    // Rows containing any missing value are dropped whole (items are
    // removed, not individual values).
    bool missing = false;
    for (int c = 0; c < total_cols; ++c) {
      if (c != label_idx && is_missing(fields[c])) {
        missing = true;
        break;
      }
    }
    if (missing) continue;

    std::vector<double> row;
    row.reserve(d);
    for (int c = 0; c < total_cols; ++c) {
      if (c == label_idx) continue;
      row.push_back(parse_double(fields[c], line_no, header[c]));
    }
    rows.push_back(std::move(row));
    if (label_idx >= 0) labels.push_back(fields[label_idx]);
  }

  if (rows.empty()) {
    throw DataError("'" + path + "': zero rows after dropping missing values");
  }

  Dataset data;
  const int n = static_cast<int>(rows.size());
  data.features.resize(n, d);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) data.features(i, j) = rows[i][j];
  }
  data.labels = std::move(labels);
  data.ids.resize(n);
  for (int i = 0; i < n; ++i) data.ids[i] = i;
  for (int c = 0; c < total_cols; ++c) {
    if (c != label_idx) data.feature_names.push_back(header[c]);
  }
  if (label_idx >= 0) data.label_name = header[label_idx];
  return data;
}

void write_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");

  for (int j = 0; j < data.d(); ++j) {
    if (j) out << ',';
    out << (j < static_cast<int>(data.feature_names.size())
                ? data.feature_names[j]
                : "x" + std::to_string(j));
  }
  if (data.has_labels()) {
    out << ',' << (data.label_name.empty() ? "label" : data.label_name);
  }
  out << '\n';

  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.d(); ++j) {
      if (j) out << ',';
      out << detail::format_double(data.features(i, j));
    }
    if (data.has_labels()) out << ',' << data.labels[i];
    out << '\n';
  }
  if (!out) throw DataError("failed while writing '" + path + "'");
}

GaussianMixtureSpec GaussianMixtureSpec::make(
    std::vector<GaussianComponent> comps) {
  GaussianMixtureSpec spec;
  spec.components = std::move(comps);
  if (spec.components.empty()) {
    throw UsageError("mixture needs at least one component");
  }
  double total = 0.0;
  for (const auto& c : spec.components) {
    if (c.weight <= 0.0) throw UsageError("component weights must be positive");
    total += c.weight;
  }
  for (auto& c : spec.components) c.weight /= total;
  spec.validate();
  return spec;
}

void GaussianMixtureSpec::validate() const {
  if (components.empty()) {
    throw UsageError("mixture needs at least one component");
  }
  const auto dims = components.front().mean.size();
  double total = 0.0;
  for (const auto& c : components) {
    if (c.variance <= 0.0) throw UsageError("component variances must be positive");
    if (c.weight <= 0.0) throw UsageError("component weights must be positive");
    if (c.mean.size() != dims) throw UsageError("component means must share one dimension");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw UsageError("component weights must sum to 1");
  }
}

GaussianMixtureSpec GaussianMixtureSpec::regular_polygon(int k, double side,
                                                         double variance) {
  if (k < 1) throw UsageError("mixture needs at least one component");
  if (side < 0.0) throw UsageError("side must be non-negative");
  std::vector<GaussianComponent> comps;
  comps.reserve(k);
  constexpr double kPi = 3.141592653589793238462643;
  // Circumradius such that neighbouring vertices sit `side` apart.
  const double radius = k >= 2 ? side / (2.0 * std::sin(kPi / k)) : 0.0;
  for (int j = 0; j < k; ++j) {
    GaussianComponent c;
    c.mean.resize(2);
    const double angle = 2.0 * kPi * j / k;
    c.mean << radius * std::cos(angle), radius * std::sin(angle);
    c.variance = variance;
    c.weight = 1.0;
    comps.push_back(std::move(c));
  }
  return make(std::move(comps));
}

int GaussianMixtureSpec::dim() const {
  validate();
  return static_cast<int>(components.front().mean.size());
}

Eigen::MatrixXd GaussianMixtureSpec::sample(
    int count, RngStream& rng, std::vector<int>* component_out) const {
  validate();
  const int d = static_cast<int>(components.front().mean.size());
  Eigen::MatrixXd out(count, d);
  if (component_out) component_out->resize(count);
  for (int i = 0; i < count; ++i) {
    // Pick the component by weight, then add isotropic Gaussian noise.
    const double u = rng.uniform01();
    double cum = 0.0;
    int comp = static_cast<int>(components.size()) - 1;
    for (std::size_t c = 0; c < components.size(); ++c) {
      cum += components[c].weight;
      if (u < cum) {
        comp = static_cast<int>(c);
        break;
      }
    }
    const auto& chosen = components[comp];
    const double sd = std::sqrt(chosen.variance);
    for (int j = 0; j < d; ++j) {
      out(i, j) = chosen.mean(j) + sd * rng.normal();
    }
    if (component_out) (*component_out)[i] = comp;
  }
  return out;
}

Dataset generate_gaussian_mixture(const GaussianMixtureSpec& spec, int n,
                                  std::uint64_t seed) {
  if (n < 1) throw UsageError("n must be at least 1");
  RngStream rng(seed);
  Dataset data;
  std::vector<int> comps;
  data.features = spec.sample(n, rng, &comps);
  data.labels.reserve(n);
  for (int c : comps) data.labels.push_back(std::to_string(c));
  data.ids.resize(n);
  for (int i = 0; i < n; ++i) data.ids[i] = i;
  for (int j = 0; j < data.d(); ++j) {
    data.feature_names.push_back("x" + std::to_string(j));
  }
  data.label_name = "label";
  return data;
}

IndexVector bootstrap_indices(int n, RngStream& rng) {
  if (n < 1) throw UsageError("n must be at least 1");
  IndexVector indices(n);
  for (int i = 0; i < n; ++i) {
    indices[i] = static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(n)));
  }
  return indices;
}

Dataset resample(const Dataset& data, const IndexVector& indices) {
  Dataset out;
  const int n = static_cast<int>(indices.size());
  out.features.resize(n, data.d());
  if (data.has_labels()) out.labels.reserve(n);
  for (int t = 0; t < n; ++t) {
    const int src = indices[t];
    out.features.row(t) = data.features.row(src);
    if (data.has_labels()) out.labels.push_back(data.labels[src]);
  }
  out.ids.resize(n);
  for (int t = 0; t < n; ++t) out.ids[t] = t;
  out.feature_names = data.feature_names;
  out.label_name = data.label_name;
  return out;
}

std::uint64_t feature_checksum(const Dataset& data) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;  // FNV-1a 64-bit offset basis
  constexpr std::uint64_t kPrime = 0x100000001b3ULL;
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.d(); ++j) {
      const double v = data.features(i, j);
      unsigned char bytes[sizeof(double)];
      std::memcpy(bytes, &v, sizeof(double));
      for (unsigned char b : bytes) {
        hash ^= b;
        hash *= kPrime;
      }
    }
  }
  return hash;
}

}  // namespace corecluster
