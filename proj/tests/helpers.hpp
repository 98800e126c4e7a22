#pragma once

// Shared test utilities: deterministic graph generators, brute-force oracles
// kept independent of the library code paths they check, and filesystem
// scratch space.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "attrwalk/attrwalk.hpp"

namespace testutil {

namespace aw = attrwalk;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("attrwalk_test_" + tag + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string str(const std::string& name = "") const {
    return name.empty() ? path_.string() : (path_ / name).string();
  }

 private:
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::filesystem::path path_;
};

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- deterministic graph generators -----------------------------------------

inline aw::Graph erdos_renyi(aw::NodeId n, double edge_prob, std::uint64_t seed) {
  aw::Rng rng(aw::derive_seed(seed, "test.er"));
  std::vector<aw::Edge> edges;
  for (aw::NodeId u = 0; u < n; ++u)
    for (aw::NodeId v = u + 1; v < n; ++v)
      if (rng.next_real() < edge_prob) edges.emplace_back(u, v);
  return aw::Graph::from_edges(n, edges, false);
}

// Two equal blocks with dense intra-block and sparse inter-block edges.
inline aw::Graph planted_partition(aw::NodeId block_size, double p_in, double p_out,
                                   std::uint64_t seed) {
  const aw::NodeId n = 2 * block_size;
  aw::Rng rng(aw::derive_seed(seed, "test.pp"));
  std::vector<aw::Edge> edges;
  for (aw::NodeId u = 0; u < n; ++u) {
    for (aw::NodeId v = u + 1; v < n; ++v) {
      const bool same_block = (u < block_size) == (v < block_size);
      if (rng.next_real() < (same_block ? p_in : p_out)) edges.emplace_back(u, v);
    }
  }
  return aw::Graph::from_edges(n, edges, false);
}

// Random connected-ish graph with a spanning-tree backbone, handy when the
// split's degree constraint needs slack.
inline aw::Graph random_graph_with_backbone(aw::NodeId n, double extra_prob, std::uint64_t seed) {
  aw::Rng rng(aw::derive_seed(seed, "test.backbone"));
  std::vector<aw::Edge> edges;
  for (aw::NodeId v = 1; v < n; ++v)
    edges.emplace_back(static_cast<aw::NodeId>(rng.next_below(static_cast<std::uint64_t>(v))), v);
  for (aw::NodeId u = 0; u < n; ++u)
    for (aw::NodeId v = u + 1; v < n; ++v)
      if (rng.next_real() < extra_prob) edges.emplace_back(u, v);
  return aw::Graph::from_edges(n, edges, false);
}

// --- brute-force oracles -----------------------------------------------------

// Per-node triangle counts by full triple enumeration.
inline std::vector<std::int64_t> brute_force_triangles(const aw::Graph& g) {
  const aw::NodeId n = g.num_nodes();
  std::vector<std::int64_t> tri(static_cast<std::size_t>(n), 0);
  for (aw::NodeId a = 0; a < n; ++a)
    for (aw::NodeId b = a + 1; b < n; ++b)
      for (aw::NodeId c = b + 1; c < n; ++c)
        if (g.has_edge(a, b) && g.has_edge(b, c) && g.has_edge(a, c)) {
          ++tri[static_cast<std::size_t>(a)];
          ++tri[static_cast<std::size_t>(b)];
          ++tri[static_cast<std::size_t>(c)];
        }
  return tri;
}

// Core numbers by repeated peeling at increasing k.
inline std::vector<std::int64_t> brute_force_cores(const aw::Graph& g) {
  const auto n = static_cast<std::size_t>(g.num_nodes());
  std::vector<std::int64_t> core(n, 0);
  for (aw::NodeId k = 1; k <= g.num_nodes(); ++k) {
    std::vector<bool> alive(n, true);
    bool changed = true;
    while (changed) {
      changed = false;
      for (aw::NodeId v = 0; v < g.num_nodes(); ++v) {
        if (!alive[static_cast<std::size_t>(v)]) continue;
        aw::NodeId deg = 0;
        for (aw::NodeId u : g.neighbors(v))
          if (alive[static_cast<std::size_t>(u)]) ++deg;
        if (deg < k) {
          alive[static_cast<std::size_t>(v)] = false;
          changed = true;
        }
      }
    }
    for (std::size_t v = 0; v < n; ++v)
      if (alive[v]) core[v] = k;
  }
  return core;
}

// Pairwise AUC definition, counted directly.
inline double brute_force_auc(const std::vector<double>& pos, const std::vector<double>& neg) {
  std::int64_t wins2 = 0;
  for (double p : pos)
    for (double q : neg) {
      if (p > q)
        wins2 += 2;
      else if (p == q)
        wins2 += 1;
    }
  return static_cast<double>(wins2) /
         (2.0 * static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

// Analytic second-order transition law: probability of moving to w given the
// walk sits at cur having arrived from prev, by enumerating bias classes.
inline std::map<aw::NodeId, double> analytic_step_distribution(const aw::Graph& g, aw::NodeId prev,
                                                               aw::NodeId cur, double p, double q) {
  std::map<aw::NodeId, double> dist;
  double total = 0.0;
  for (aw::NodeId w : g.neighbors(cur)) {
    double weight;
    if (w == prev)
      weight = 1.0 / p;
    else if (g.has_edge(prev, w))
      weight = 1.0;
    else
      weight = 1.0 / q;
    dist[w] = weight;
    total += weight;
  }
  for (auto& [w, weight] : dist) weight /= total;
  return dist;
}

// Common-neighbor count in a graph, for baseline scorers.
inline double common_neighbors(const aw::Graph& g, aw::NodeId u, aw::NodeId v) {
  double count = 0.0;
  for (aw::NodeId w : g.neighbors(u))
    if (g.has_edge(v, w)) count += 1.0;
  return count;
}

// --- finite differences ------------------------------------------------------

// Central finite difference of a scalar function along one coordinate.
template <typename F>
double central_difference(F&& f, double& coord, double h = 1e-5) {
  const double saved = coord;
  coord = saved + h;
  const double up = f();
  coord = saved - h;
  const double down = f();
  coord = saved;
  return (up - down) / (2.0 * h);
}

inline double relative_error(double a, double b) {
  const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

}  // namespace testutil
