#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "attrwalk/graph.hpp"
#include "attrwalk/rng.hpp"

namespace attrwalk {

// Held-out edges for link prediction. test_positives are edges of the
// original graph absent from train_graph; test_negatives are non-edges of the
// original graph, equal in count to the positives.
struct EdgeSplit {
  Graph train_graph;
  std::vector<Edge> test_positives;
  std::vector<Edge> test_negatives;
  std::uint64_t split_seed = 0;
  double test_fraction = 0.0;
};

namespace detail {

inline std::uint64_t pair_key(NodeId u, NodeId v) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
         static_cast<std::uint32_t>(v);
}

// Uniform non-edges of `g`, disjoint from `taken`. Keys of chosen pairs are
// added to `taken` so successive calls stay disjoint.
inline std::vector<Edge> sample_non_edges(const Graph& g, std::int64_t count, Rng& rng,
                                          std::unordered_set<std::uint64_t>& taken) {
  const auto n = static_cast<std::uint64_t>(g.num_nodes());
  const std::int64_t non_edges = static_cast<std::int64_t>(n * (n - 1) / 2) - g.num_edges();
  if (non_edges < count)
    fail(ErrorKind::split, "graph has only " + std::to_string(non_edges) +
                               " non-edges, need " + std::to_string(count));
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(count));
  std::int64_t attempts = 0;
  const std::int64_t max_attempts = 1000 * (count + 1000);
  while (static_cast<std::int64_t>(out.size()) < count) {
    if (++attempts > max_attempts)
      fail(ErrorKind::split, "non-edge sampling did not converge (graph too dense)");
    auto u = static_cast<NodeId>(rng.next_below(n));
    auto v = static_cast<NodeId>(rng.next_below(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (g.has_edge(u, v)) continue;
    if (!taken.insert(pair_key(u, v)).second) continue;
    out.emplace_back(u, v);
  }
  return out;
}

}  // namespace detail

// Removes round(M * test_fraction) edges uniformly at random, skipping any
// edge whose removal would drop an endpoint to degree 0, and samples an equal
// number of negatives from the non-edges. Deterministic for a fixed seed.
inline EdgeSplit split_edges(const Graph& g, double test_fraction, std::uint64_t seed) {
  if (g.directed()) fail(ErrorKind::config, "edge split requires an undirected graph");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    fail(ErrorKind::config, "test_fraction must be in (0,1)");
  const std::int64_t m = g.num_edges();
  if (m < 10) fail(ErrorKind::split, "graph has fewer than 10 edges");

  const auto target = static_cast<std::int64_t>(std::llround(static_cast<double>(m) * test_fraction));
  auto edges = g.edge_list();
  Rng pos_rng(derive_seed(seed, "split.pos"));
  pos_rng.shuffle(edges);

  std::vector<NodeId> deg(static_cast<std::size_t>(g.num_nodes()));
  for (NodeId v = 0; v < g.num_nodes(); ++v) deg[static_cast<std::size_t>(v)] = g.degree(v);

  EdgeSplit split;
  split.split_seed = seed;
  split.test_fraction = test_fraction;
  std::vector<Edge> kept;
  kept.reserve(edges.size());
  for (const auto& [u, v] : edges) {
    if (static_cast<std::int64_t>(split.test_positives.size()) < target && deg[u] > 1 && deg[v] > 1) {
      split.test_positives.emplace_back(u, v);
      --deg[u];
      --deg[v];
    } else {
      kept.emplace_back(u, v);
    }
  }
  if (static_cast<std::int64_t>(split.test_positives.size()) < target) {
    const double achievable =
        static_cast<double>(split.test_positives.size()) / static_cast<double>(m);
    std::ostringstream msg;
    msg << "cannot remove " << target << " of " << m
        << " edges without isolating a node; achievable fraction ~= " << achievable;
    fail(ErrorKind::split, msg.str());
  }

  split.train_graph = Graph::from_edges(g.num_nodes(), kept, false, g.node_labels());

  std::unordered_set<std::uint64_t> taken;
  Rng neg_rng(derive_seed(seed, "split.neg"));
  split.test_negatives = detail::sample_non_edges(g, target, neg_rng, taken);
  return split;
}

namespace detail {

inline void write_pairs(const Graph& g, const std::vector<Edge>& pairs, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write '" + path + "'");
  for (const auto& [u, v] : pairs) out << g.label(u) << ' ' << g.label(v) << '\n';
}

inline std::vector<Edge> read_pairs(const std::unordered_map<std::string, NodeId>& ids,
                                    const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open '" + path + "'");
  std::vector<Edge> pairs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tokens = split_tokens(line);
    if (tokens.size() != 2)
      fail(ErrorKind::parse, path + " line " + std::to_string(lineno) + ": expected 2 tokens");
    auto a = ids.find(tokens[0]);
    auto b = ids.find(tokens[1]);
    if (a == ids.end() || b == ids.end())
      fail(ErrorKind::parse, path + " line " + std::to_string(lineno) + ": unknown node");
    pairs.emplace_back(a->second, b->second);
  }
  return pairs;
}

}  // namespace detail

// Persists a split as train edge list + positive/negative pair files + a
// label table and a metadata file recording seed and fraction.
inline void save_split(const EdgeSplit& split, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const Graph& g = split.train_graph;
  save_edge_list(g, dir + "/train.edges");
  detail::write_pairs(g, split.test_positives, dir + "/test_pos.txt");
  detail::write_pairs(g, split.test_negatives, dir + "/test_neg.txt");

  std::ofstream labels(dir + "/labels.tsv");
  if (!labels) fail(ErrorKind::io, "cannot write label table");
  for (NodeId v = 0; v < g.num_nodes(); ++v) labels << v << '\t' << g.label(v) << '\n';

  std::ofstream meta(dir + "/split.meta");
  if (!meta) fail(ErrorKind::io, "cannot write split metadata");
  meta << "seed=" << split.split_seed << '\n'
       << "test_fraction=" << split.test_fraction << '\n'
       << "num_nodes=" << g.num_nodes() << '\n'
       << "num_test_pos=" << split.test_positives.size() << '\n';
}

inline EdgeSplit load_split(const std::string& dir) {
  std::ifstream labels_in(dir + "/labels.tsv");
  if (!labels_in) fail(ErrorKind::io, "cannot open '" + dir + "/labels.tsv'");
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(labels_in, line)) {
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) fail(ErrorKind::parse, "labels.tsv: missing tab separator");
    labels.push_back(line.substr(tab + 1));
  }

  std::unordered_map<std::string, NodeId> ids;
  for (NodeId v = 0; v < static_cast<NodeId>(labels.size()); ++v) ids.emplace(labels[v], v);

  std::vector<Edge> train_edges = detail::read_pairs(ids, dir + "/train.edges");
  EdgeSplit split;
  split.train_graph =
      Graph::from_edges(static_cast<NodeId>(labels.size()), train_edges, false, labels);
  split.test_positives = detail::read_pairs(ids, dir + "/test_pos.txt");
  split.test_negatives = detail::read_pairs(ids, dir + "/test_neg.txt");

  std::ifstream meta(dir + "/split.meta");
  if (!meta) fail(ErrorKind::io, "cannot open '" + dir + "/split.meta'");
  while (std::getline(meta, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto key = line.substr(0, eq);
    auto value = line.substr(eq + 1);
    if (key == "seed") split.split_seed = std::stoull(value);
    if (key == "test_fraction") split.test_fraction = std::stod(value);
  }
  return split;
}

}  // namespace attrwalk
