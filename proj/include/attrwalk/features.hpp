#pragma once

#include <cmath>
#include <cstdio>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "attrwalk/graph.hpp"
#include "attrwalk/matrix.hpp"

namespace attrwalk {

enum class AttributeSource { given, structural, concatenated };

// Per-node attribute vectors; one row per node in dense id order.
struct AttributeMatrix {
  Matrix values;
  std::vector<std::string> column_names;
  AttributeSource source = AttributeSource::given;

  std::size_t rows() const noexcept { return values.rows(); }
  std::size_t cols() const noexcept { return values.cols(); }
};

namespace detail {

// Per-node triangle participation. Each triangle u<v<w is found once at its
// (u,v) edge via sorted-adjacency intersection and credited to all three nodes.
inline std::vector<std::int64_t> triangle_counts(const Graph& g) {
  std::vector<std::int64_t> tri(static_cast<std::size_t>(g.num_nodes()), 0);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    auto nu = g.neighbors(u);
    for (NodeId v : nu) {
      if (v <= u) continue;
      auto nv = g.neighbors(v);
      auto iu = std::upper_bound(nu.begin(), nu.end(), v);
      auto iv = std::upper_bound(nv.begin(), nv.end(), v);
      while (iu != nu.end() && iv != nv.end()) {
        if (*iu < *iv) {
          ++iu;
        } else if (*iv < *iu) {
          ++iv;
        } else {
          ++tri[static_cast<std::size_t>(u)];
          ++tri[static_cast<std::size_t>(v)];
          ++tri[static_cast<std::size_t>(*iu)];
          ++iu;
          ++iv;
        }
      }
    }
  }
  return tri;
}

// k-core numbers by the standard peeling order (bucket queue on degree).
inline std::vector<std::int64_t> core_numbers(const Graph& g) {
  const auto n = static_cast<std::size_t>(g.num_nodes());
  std::vector<std::int64_t> core(n, 0);
  if (n == 0) return core;

  std::vector<NodeId> deg(n);
  NodeId max_deg = 0;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    deg[static_cast<std::size_t>(v)] = g.degree(v);
    max_deg = std::max(max_deg, deg[static_cast<std::size_t>(v)]);
  }

  std::vector<std::size_t> bin(static_cast<std::size_t>(max_deg) + 2, 0);
  for (std::size_t v = 0; v < n; ++v) bin[static_cast<std::size_t>(deg[v]) + 1]++;
  for (std::size_t d = 1; d < bin.size(); ++d) bin[d] += bin[d - 1];

  std::vector<NodeId> order(n);
  std::vector<std::size_t> pos(n);
  {
    std::vector<std::size_t> next(bin.begin(), bin.end() - 1);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      pos[static_cast<std::size_t>(v)] = next[static_cast<std::size_t>(deg[static_cast<std::size_t>(v)])]++;
      order[pos[static_cast<std::size_t>(v)]] = v;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    NodeId v = order[i];
    core[static_cast<std::size_t>(v)] = deg[static_cast<std::size_t>(v)];
    for (NodeId u : g.neighbors(v)) {
      auto du = static_cast<std::size_t>(deg[static_cast<std::size_t>(u)]);
      if (deg[static_cast<std::size_t>(u)] > deg[static_cast<std::size_t>(v)]) {
        // move u to the front of its degree bucket, then shrink the bucket
        std::size_t pu = pos[static_cast<std::size_t>(u)];
        std::size_t pw = bin[du];
        NodeId w = order[pw];
        if (u != w) {
          std::swap(order[pu], order[pw]);
          pos[static_cast<std::size_t>(u)] = pw;
          pos[static_cast<std::size_t>(w)] = pu;
        }
        ++bin[du];
        --deg[static_cast<std::size_t>(u)];
      }
    }
  }
  return core;
}

}  // namespace detail

inline const std::vector<std::string>& structural_feature_names() {
  static const std::vector<std::string> names = {"degree", "triangle_count", "wedge_count",
                                                 "avg_neighbor_degree", "core_number"};
  return names;
}

// Builds X from graph structure, one column per requested feature, in the
// requested order. avg_neighbor_degree is real-valued; all others are counts.
inline AttributeMatrix compute_structural_features(const Graph& g,
                                                   const std::vector<std::string>& feature_set) {
  const auto& known = structural_feature_names();
  for (const auto& name : feature_set)
    if (std::find(known.begin(), known.end(), name) == known.end())
      fail(ErrorKind::config, "unknown structural feature '" + name + "'");

  const auto n = static_cast<std::size_t>(g.num_nodes());
  AttributeMatrix x;
  x.source = AttributeSource::structural;
  x.column_names = feature_set;
  x.values = Matrix(n, feature_set.size());

  std::vector<std::int64_t> tri;
  std::vector<std::int64_t> core;
  for (std::size_t c = 0; c < feature_set.size(); ++c) {
    const auto& name = feature_set[c];
    if (name == "triangle_count" && tri.empty()) tri = detail::triangle_counts(g);
    if (name == "core_number" && core.empty()) core = detail::core_numbers(g);
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const auto d = static_cast<double>(g.degree(v));
      double value = 0.0;
      if (name == "degree") {
        value = d;
      } else if (name == "triangle_count") {
        value = static_cast<double>(tri[static_cast<std::size_t>(v)]);
      } else if (name == "wedge_count") {
        value = d * (d - 1) / 2.0;
      } else if (name == "avg_neighbor_degree") {
        double sum = 0.0;
        for (NodeId u : g.neighbors(v)) sum += static_cast<double>(g.degree(u));
        value = g.degree(v) > 0 ? sum / d : 0.0;
      } else if (name == "core_number") {
        value = static_cast<double>(core[static_cast<std::size_t>(v)]);
      }
      x.values(static_cast<std::size_t>(v), c) = value;
    }
  }
  return x;
}

namespace detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  if (line.find(',') != std::string::npos) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
  }
  return split_tokens(line);
}

inline bool parse_double(const std::string& tok, double& out) {
  try {
    std::size_t used = 0;
    out = std::stod(tok, &used);
    while (used < tok.size() && std::isspace(static_cast<unsigned char>(tok[used]))) ++used;
    return used == tok.size();
  } catch (...) {
    return false;
  }
}

}  // namespace detail

// Reads per-node attributes: node token followed by K numeric fields, comma or
// whitespace separated, optional header line. Every graph node must appear.
inline AttributeMatrix load_attributes(const std::string& path, const Graph& g) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open attribute file '" + path + "'");

  auto ids = g.label_index();
  std::vector<std::string> column_names;
  std::vector<std::vector<double>> rows;
  std::vector<bool> seen(static_cast<std::size_t>(g.num_nodes()), false);
  Matrix values;

  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  std::size_t num_cols = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = detail::split_fields(line);
    if (fields.empty()) continue;
    for (auto& f : fields) {
      while (!f.empty() && std::isspace(static_cast<unsigned char>(f.front()))) f.erase(f.begin());
      while (!f.empty() && std::isspace(static_cast<unsigned char>(f.back()))) f.pop_back();
    }

    if (first_content) {
      bool header = false;
      double tmp = 0.0;
      for (std::size_t i = 1; i < fields.size(); ++i)
        if (!detail::parse_double(fields[i], tmp)) header = true;
      if (header) {
        column_names.assign(fields.begin() + 1, fields.end());
        first_content = false;
        continue;
      }
      first_content = false;
    }

    if (fields.size() < 2)
      fail(ErrorKind::parse, "line " + std::to_string(lineno) + ": expected node and attributes");
    if (num_cols == 0) {
      num_cols = fields.size() - 1;
      values = Matrix(static_cast<std::size_t>(g.num_nodes()), num_cols);
    } else if (fields.size() - 1 != num_cols) {
      fail(ErrorKind::parse, "line " + std::to_string(lineno) + ": ragged row (expected " +
                                 std::to_string(num_cols) + " attributes)");
    }

    auto it = ids.find(fields[0]);
    if (it == ids.end())
      fail(ErrorKind::parse, "line " + std::to_string(lineno) + ": node '" + fields[0] +
                                 "' not present in graph");
    auto row = static_cast<std::size_t>(it->second);
    if (seen[row])
      fail(ErrorKind::parse, "line " + std::to_string(lineno) + ": duplicate node '" + fields[0] + "'");
    seen[row] = true;

    for (std::size_t i = 1; i < fields.size(); ++i) {
      double v = 0.0;
      if (!detail::parse_double(fields[i], v))
        fail(ErrorKind::parse,
             "line " + std::to_string(lineno) + ": non-numeric field '" + fields[i] + "'");
      if (!std::isfinite(v))
        fail(ErrorKind::parse, "line " + std::to_string(lineno) + ": non-finite value");
      values(row, i - 1) = v;
    }
  }

  for (NodeId v = 0; v < g.num_nodes(); ++v)
    if (!seen[static_cast<std::size_t>(v)])
      fail(ErrorKind::parse, "attribute file is missing node '" + g.label(v) + "'");

  AttributeMatrix x;
  x.values = std::move(values);
  x.source = AttributeSource::given;
  if (column_names.empty())
    for (std::size_t c = 0; c < num_cols; ++c) column_names.push_back("f" + std::to_string(c + 1));
  if (column_names.size() != num_cols)
    fail(ErrorKind::parse, "header names " + std::to_string(column_names.size()) +
                               " columns but rows have " + std::to_string(num_cols));
  x.column_names = std::move(column_names);
  return x;
}

inline void save_attributes(const AttributeMatrix& x, const Graph& g, const std::string& path) {
  if (x.rows() != static_cast<std::size_t>(g.num_nodes()))
    fail(ErrorKind::shape, "attribute rows do not match graph nodes");
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write attribute file '" + path + "'");
  out << "id";
  for (const auto& name : x.column_names) out << ',' << name;
  out << '\n';
  char buf[64];
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    out << g.label(v);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", x.values(static_cast<std::size_t>(v), c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

// Column-wise concatenation; row counts must match.
inline AttributeMatrix concat_attributes(const AttributeMatrix& a, const AttributeMatrix& b) {
  if (a.rows() != b.rows())
    fail(ErrorKind::shape, "row count mismatch: " + std::to_string(a.rows()) + " vs " +
                               std::to_string(b.rows()));
  AttributeMatrix out;
  out.source = AttributeSource::concatenated;
  out.column_names = a.column_names;
  out.column_names.insert(out.column_names.end(), b.column_names.begin(), b.column_names.end());
  out.values = Matrix(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out.values(i, j) = a.values(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out.values(i, a.cols() + j) = b.values(i, j);
  }
  return out;
}

}  // namespace attrwalk
