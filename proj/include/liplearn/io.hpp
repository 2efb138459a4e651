#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "liplearn/graph.hpp"
#include "liplearn/point_cloud.hpp"

namespace liplearn {

namespace detail {

/// Shortest decimal that round-trips a double (17 significant digits).
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

}  // namespace detail

/// Cloud CSV: header `x0,x1,label_value`, label_value empty on unlabeled
/// rows, coordinates with full precision.
inline void write_cloud_csv(const std::string& path, const PointCloud& cloud,
                            const LabelSet* labels = nullptr) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "x0,x1,label_value\n";
  std::vector<std::optional<double>> value(cloud.size());
  if (labels) {
    for (int k = 0; k < labels->size(); ++k) value[labels->indices[k]] = labels->values[k];
  }
  for (int i = 0; i < cloud.size(); ++i) {
    out << detail::format_double(cloud.points[i][0]) << ','
        << detail::format_double(cloud.points[i][1]) << ',';
    if (value[i]) out << detail::format_double(*value[i]);
    out << '\n';
  }
}

inline std::pair<PointCloud, LabelSet> read_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty cloud file: " + path);
  PointCloud cloud;
  LabelSet labels;
  int idx = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() < 2) throw std::runtime_error("malformed cloud row: " + line);
    cloud.points.push_back({std::stod(fields[0]), std::stod(fields[1])});
    if (fields.size() >= 3 && !fields[2].empty()) {
      labels.indices.push_back(idx);
      labels.values.push_back(std::stod(fields[2]));
      cloud.label_indices.push_back(idx);
    }
    ++idx;
  }
  return {cloud, labels};
}

/// Graph CSV: one `i,j,w` row per undirected edge with i < j, plus a JSON
/// sidecar `<path>.json` holding {n, h, kernel, seed}.
inline void write_graph_csv(const std::string& path, const GeometricGraph& g,
                            std::uint64_t seed = 0) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "i,j,w\n";
  for (int i = 0; i < g.n; ++i) {
    const auto nbrs = g.row_neighbors(i);
    const auto wts = g.row_weights(i);
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
      if (nbrs[k] > i)
        out << i << ',' << nbrs[k] << ',' << detail::format_double(wts[k]) << '\n';
    }
  }
  nlohmann::json sidecar{{"n", g.n}, {"h", g.h}, {"kernel", g.kernel.name()}, {"seed", seed}};
  std::ofstream side(path + ".json");
  side << sidecar.dump(2) << '\n';
}

inline GeometricGraph read_graph_csv(const std::string& path) {
  std::ifstream side_in(path + ".json");
  if (!side_in) throw std::runtime_error("cannot open sidecar " + path + ".json");
  nlohmann::json sidecar;
  side_in >> sidecar;

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  const int n = sidecar.at("n").get<int>();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 3) throw std::runtime_error("malformed graph row: " + line);
    const int i = std::stoi(fields[0]);
    const int j = std::stoi(fields[1]);
    const double w = std::stod(fields[2]);
    adj[i].emplace_back(j, w);
    adj[j].emplace_back(i, w);
  }
  GeometricGraph g;
  g.n = n;
  g.h = sidecar.at("h").get<double>();
  g.kernel = KernelProfile::parse(sidecar.at("kernel").get<std::string>());
  g.offsets.assign(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    g.offsets[i + 1] = g.offsets[i] + static_cast<int>(adj[i].size());
  }
  for (int i = 0; i < n; ++i) {
    for (const auto& [j, w] : adj[i]) {
      g.neighbors.push_back(j);
      g.weights.push_back(w);
    }
  }
  return g;
}

/// Vertex-indexed function CSV: `vertex,value` rows (labels and solutions).
inline void write_function_csv(const std::string& path, const std::string& value_header,
                               const std::vector<int>& indices, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "vertex," << value_header << '\n';
  for (std::size_t k = 0; k < indices.size(); ++k)
    out << indices[k] << ',' << detail::format_double(values[k]) << '\n';
}

inline void write_function_csv(const std::string& path, const std::string& value_header,
                               const std::vector<double>& values) {
  std::vector<int> indices(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) indices[k] = static_cast<int>(k);
  write_function_csv(path, value_header, indices, values);
}

inline LabelSet read_labels_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  LabelSet labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2) throw std::runtime_error("malformed label row: " + line);
    labels.indices.push_back(std::stoi(fields[0]));
    labels.values.push_back(std::stod(fields[1]));
  }
  return labels;
}

inline std::vector<double> read_function_csv(const std::string& path, int n) {
  const LabelSet rows = read_labels_csv(path);
  std::vector<double> values(n, 0.0);
  for (int k = 0; k < rows.size(); ++k) {
    if (rows.indices[k] < 0 || rows.indices[k] >= n)
      throw std::runtime_error("function row out of range in " + path);
    values[rows.indices[k]] = rows.values[k];
  }
  return values;
}

}  // namespace liplearn
