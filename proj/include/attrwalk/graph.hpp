#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "attrwalk/error.hpp"

namespace attrwalk {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

// Immutable simple graph in compressed sparse row form. Neighbor lists are
// sorted ascending with no duplicates and no self-loops; undirected edges are
// stored in both endpoint lists but counted once by num_edges().
class Graph {
 public:
  Graph() = default;

  // Deduplicates edges, drops self-loops, sorts neighbor lists. `labels` maps
  // dense ids back to original node tokens; empty means ids are their own labels.
  static Graph from_edges(NodeId num_nodes, const std::vector<Edge>& edges, bool directed,
                          std::vector<std::string> labels = {}) {
    Graph g;
    g.directed_ = directed;
    g.labels_ = std::move(labels);
    if (!g.labels_.empty() && static_cast<NodeId>(g.labels_.size()) != num_nodes)
      fail(ErrorKind::input, "label table size does not match node count");
    // canonical form: drop a label table that just spells out the dense ids
    if (!g.labels_.empty()) {
      bool identity_labels = true;
      for (NodeId v = 0; v < num_nodes && identity_labels; ++v)
        identity_labels = g.labels_[static_cast<std::size_t>(v)] == std::to_string(v);
      if (identity_labels) g.labels_.clear();
    }

    std::vector<Edge> arcs;
    arcs.reserve(directed ? edges.size() : 2 * edges.size());
    for (const auto& [u, v] : edges) {
      if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes)
        fail(ErrorKind::input, "edge endpoint out of range");
      if (u == v) continue;
      arcs.emplace_back(u, v);
      if (!directed) arcs.emplace_back(v, u);
    }
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

    g.offsets_.assign(static_cast<std::size_t>(num_nodes) + 1, 0);
    for (const auto& [u, v] : arcs) g.offsets_[static_cast<std::size_t>(u) + 1]++;
    for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
    g.adj_.reserve(arcs.size());
    for (const auto& [u, v] : arcs) g.adj_.push_back(v);
    return g;
  }

  NodeId num_nodes() const noexcept { return static_cast<NodeId>(offsets_.empty() ? 0 : offsets_.size() - 1); }

  // Undirected edges are counted once.
  std::int64_t num_edges() const noexcept {
    auto arcs = static_cast<std::int64_t>(adj_.size());
    return directed_ ? arcs : arcs / 2;
  }

  bool directed() const noexcept { return directed_; }

  std::span<const NodeId> neighbors(NodeId v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }

  NodeId degree(NodeId v) const { return static_cast<NodeId>(offsets_[v + 1] - offsets_[v]); }

  bool has_edge(NodeId u, NodeId v) const {
    auto nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  // Original node token for a dense id.
  std::string label(NodeId v) const { return labels_.empty() ? std::to_string(v) : labels_[v]; }
  const std::vector<std::string>& node_labels() const noexcept { return labels_; }

  std::unordered_map<std::string, NodeId> label_index() const {
    std::unordered_map<std::string, NodeId> index;
    index.reserve(static_cast<std::size_t>(num_nodes()));
    for (NodeId v = 0; v < num_nodes(); ++v) index.emplace(label(v), v);
    return index;
  }

  // Each undirected edge appears once with u < v.
  std::vector<Edge> edge_list() const {
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(num_edges()));
    for (NodeId u = 0; u < num_nodes(); ++u)
      for (NodeId v : neighbors(u))
        if (directed_ || u < v) edges.emplace_back(u, v);
    return edges;
  }

  bool operator==(const Graph& other) const = default;

 private:
  std::vector<std::int64_t> offsets_;
  std::vector<NodeId> adj_;
  bool directed_ = false;
  std::vector<std::string> labels_;
};

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace detail

// Reads a whitespace-separated edge list. Node tokens get dense ids in
// first-seen order; an optional third column (weight) is parsed and ignored;
// lines starting with '#' or '%' are comments.
inline Graph load_edge_list(const std::string& path, bool directed) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open edge list '" + path + "'");

  std::unordered_map<std::string, NodeId> ids;
  std::vector<std::string> labels;
  std::vector<Edge> edges;
  auto intern = [&](const std::string& tok) {
    auto [it, inserted] = ids.emplace(tok, static_cast<NodeId>(labels.size()));
    if (inserted) labels.push_back(tok);
    return it->second;
  };

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line[0] == '%') continue;
    auto tokens = detail::split_tokens(line);
    if (tokens.empty()) continue;
    if (tokens.size() < 2 || tokens.size() > 3)
      fail(ErrorKind::parse,
           "line " + std::to_string(lineno) + ": expected 2-3 tokens, got " + std::to_string(tokens.size()));
    if (tokens[0] == tokens[1]) continue;  // self-loop
    const NodeId u = intern(tokens[0]);
    const NodeId v = intern(tokens[1]);
    edges.emplace_back(u, v);
  }
  if (edges.empty()) fail(ErrorKind::input, "edge list '" + path + "' has no usable edges");
  const auto num_nodes = static_cast<NodeId>(labels.size());
  return Graph::from_edges(num_nodes, edges, directed, std::move(labels));
}

inline void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write edge list '" + path + "'");
  for (const auto& [u, v] : g.edge_list()) out << g.label(u) << ' ' << g.label(v) << '\n';
  if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

}  // namespace attrwalk
