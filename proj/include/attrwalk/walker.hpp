#pragma once

#include <cstdint>
#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "attrwalk/graph.hpp"
#include "attrwalk/rng.hpp"
#include "attrwalk/typing.hpp"

namespace attrwalk {

enum class TokenSpace { node_ids, type_ids, unspecified };

inline const char* to_string(TokenSpace s) {
  switch (s) {
    case TokenSpace::node_ids: return "node_ids";
    case TokenSpace::type_ids: return "type_ids";
    case TokenSpace::unspecified: return "unspecified";
  }
  return "unknown";
}

struct WalkConfig {
  int walks_per_node = 10;
  int walk_length = 80;  // steps; an emitted sequence has walk_length+1 tokens
  double p = 1.0;        // return parameter
  double q = 1.0;        // in-out parameter
  std::uint64_t seed = 0;
};

struct WalkCorpus {
  std::vector<std::vector<std::int32_t>> walks;
  TokenSpace token_space = TokenSpace::node_ids;
  std::int64_t vocab_size = 0;
};

namespace detail {

inline void check_walk_config(const WalkConfig& cfg) {
  if (cfg.walks_per_node < 1) fail(ErrorKind::config, "walks_per_node must be >= 1");
  if (cfg.walk_length < 1) fail(ErrorKind::config, "walk_length must be >= 1");
  if (!(cfg.p > 0.0) || !(cfg.q > 0.0)) fail(ErrorKind::config, "p and q must be > 0");
}

// One (p,q)-biased walk. First step is uniform over neighbors; afterwards a
// neighbor w of the current node v gets unnormalized weight 1/p if w is the
// previous node, 1 if w is adjacent to the previous node, 1/q otherwise.
// Truncates at dead ends (directed graphs).
inline void random_walk(const Graph& g, NodeId start, const WalkConfig& cfg, Rng& rng,
                        std::vector<NodeId>& out, std::vector<double>& weight_buf) {
  out.clear();
  out.push_back(start);
  auto nb = g.neighbors(start);
  if (nb.empty() || cfg.walk_length < 1) return;

  NodeId prev = start;
  NodeId cur = nb[rng.next_below(nb.size())];
  out.push_back(cur);

  const double wp = 1.0 / cfg.p;
  const double wq = 1.0 / cfg.q;
  for (int step = 1; step < cfg.walk_length; ++step) {
    auto neigh = g.neighbors(cur);
    if (neigh.empty()) return;  // dead end
    auto prev_nb = g.neighbors(prev);
    weight_buf.clear();
    double total = 0.0;
    for (NodeId w : neigh) {
      double weight;
      if (w == prev)
        weight = wp;
      else if (std::binary_search(prev_nb.begin(), prev_nb.end(), w))
        weight = 1.0;
      else
        weight = wq;
      total += weight;
      weight_buf.push_back(total);
    }
    const double r = rng.next_real() * total;
    std::size_t idx = std::upper_bound(weight_buf.begin(), weight_buf.end(), r) - weight_buf.begin();
    if (idx >= neigh.size()) idx = neigh.size() - 1;
    prev = cur;
    cur = neigh[idx];
    out.push_back(cur);
  }
}

// Runs r walks from every node in a seed-shuffled start order. Each walk owns
// an RNG stream keyed by (seed, start node, walk index), and slots in the
// corpus follow (start order, walk index), so output is thread-count invariant.
template <typename Emit>
WalkCorpus generate_corpus(const Graph& g, const WalkConfig& cfg, int threads, Emit emit) {
  check_walk_config(cfg);
  const NodeId n = g.num_nodes();
  if (n == 0) fail(ErrorKind::input, "cannot walk an empty graph");

  std::vector<NodeId> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng order_rng(derive_seed(cfg.seed, "walk.order"));
  order_rng.shuffle(order);

  const auto r = static_cast<std::size_t>(cfg.walks_per_node);
  WalkCorpus corpus;
  corpus.walks.resize(static_cast<std::size_t>(n) * r);

  auto worker = [&](std::size_t begin, std::size_t end) {
    std::vector<NodeId> walk;
    std::vector<double> weights;
    for (std::size_t oi = begin; oi < end; ++oi) {
      const NodeId start = order[oi];
      for (std::size_t k = 0; k < r; ++k) {
        Rng rng(derive_seed(cfg.seed, "walk", static_cast<std::uint64_t>(start), k));
        random_walk(g, start, cfg, rng, walk, weights);
        auto& slot = corpus.walks[oi * r + k];
        slot.resize(walk.size());
        for (std::size_t i = 0; i < walk.size(); ++i) slot[i] = emit(walk[i]);
      }
    }
  };

  const auto total = static_cast<std::size_t>(n);
  if (threads <= 1 || total < 2) {
    worker(0, total);
  } else {
    const auto nt = std::min<std::size_t>(static_cast<std::size_t>(threads), total);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (total + nt - 1) / nt;
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(total, begin + chunk);
      if (begin < end) pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return corpus;
}

}  // namespace detail

// Classic node-identity walks (DeepWalk when p=q=1, node2vec otherwise).
inline WalkCorpus generate_walks(const Graph& g, const WalkConfig& cfg, int threads = 1) {
  WalkCorpus corpus = detail::generate_corpus(g, cfg, threads, [](NodeId v) { return v; });
  corpus.token_space = TokenSpace::node_ids;
  corpus.vocab_size = g.num_nodes();
  return corpus;
}

// Attributed walks: identical traversal to generate_walks under the same seed,
// but every visited node is emitted as its type.
inline WalkCorpus generate_attributed_walks(const Graph& g, const TypeAssignment& assignment,
                                            const WalkConfig& cfg, int threads = 1) {
  if (assignment.types.size() != static_cast<std::size_t>(g.num_nodes()))
    fail(ErrorKind::shape, "type assignment covers " + std::to_string(assignment.types.size()) +
                               " nodes, graph has " + std::to_string(g.num_nodes()));
  WalkCorpus corpus = detail::generate_corpus(
      g, cfg, threads, [&](NodeId v) { return assignment.types[static_cast<std::size_t>(v)]; });
  corpus.token_space = TokenSpace::type_ids;
  corpus.vocab_size = assignment.num_types;
  return corpus;
}

// One walk per line, space-separated integer tokens, after a header recording
// the token space and vocabulary size.
inline void save_corpus(const WalkCorpus& corpus, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write corpus '" + path + "'");
  out << "token_space=" << to_string(corpus.token_space) << " vocab_size=" << corpus.vocab_size
      << '\n';
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) out << (i ? " " : "") << walk[i];
    out << '\n';
  }
  if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

inline WalkCorpus load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open corpus '" + path + "'");
  WalkCorpus corpus;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::format, path + ": empty corpus file");
  {
    std::istringstream header(line);
    std::string space_kv, vocab_kv;
    if (!(header >> space_kv >> vocab_kv) || space_kv.rfind("token_space=", 0) != 0 ||
        vocab_kv.rfind("vocab_size=", 0) != 0)
      fail(ErrorKind::format, path + ": bad corpus header");
    const std::string space = space_kv.substr(12);
    if (space == "node_ids")
      corpus.token_space = TokenSpace::node_ids;
    else if (space == "type_ids")
      corpus.token_space = TokenSpace::type_ids;
    else
      corpus.token_space = TokenSpace::unspecified;
    corpus.vocab_size = std::stoll(vocab_kv.substr(11));
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::int32_t> walk;
    std::int64_t tok = 0;
    while (row >> tok) {
      if (tok < 0 || tok >= corpus.vocab_size)
        fail(ErrorKind::format, path + ": token " + std::to_string(tok) + " outside vocab");
      walk.push_back(static_cast<std::int32_t>(tok));
    }
    corpus.walks.push_back(std::move(walk));
  }
  return corpus;
}

}  // namespace attrwalk
