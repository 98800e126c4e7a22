#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "attrwalk/matrix.hpp"
#include "attrwalk/rng.hpp"
#include "attrwalk/walker.hpp"

namespace attrwalk {

struct SgnsConfig {
  int dim = 128;
  int window = 10;     // radius per position is drawn uniformly from [1, window]
  int negatives = 5;   // per positive pair
  int epochs = 5;
  double initial_lr = 0.025;
  double min_lr = 0.0001;
  double unigram_power = 0.75;
  std::uint64_t seed = 0;
};

struct Vocab {
  std::vector<std::int32_t> tokens;  // sorted ascending; row = position
  std::unordered_map<std::int32_t, int> row_of;
  std::vector<std::int64_t> counts;        // per row
  std::vector<double> sampling_cdf;        // cumulative, proportional to count^power
};

// Token embedding table. In attributed mode rows are types, so the row count
// is the number of types, independent of the graph's node count.
struct EmbeddingMatrix {
  Matrix input_vectors;   // the z vectors
  Matrix output_vectors;  // context side
  std::vector<std::int32_t> tokens;
  std::unordered_map<std::int32_t, int> row_of;
  TokenSpace token_space = TokenSpace::unspecified;

  int dim() const noexcept { return static_cast<int>(input_vectors.cols()); }
  int vocab_size() const noexcept { return static_cast<int>(input_vectors.rows()); }

  int row(std::int32_t token) const {
    auto it = row_of.find(token);
    return it == row_of.end() ? -1 : it->second;
  }
};

struct SgnsTrainInfo {
  std::vector<double> epoch_mean_loss;
  std::int64_t total_pairs = 0;
};

// Distinct corpus tokens mapped to dense rows plus the negative-sampling
// distribution proportional to count^power. No minimum-count filtering: type
// vocabularies are small and every token must stay retrievable.
inline Vocab build_vocab(const WalkCorpus& corpus, double unigram_power = 0.75) {
  std::unordered_map<std::int32_t, std::int64_t> freq;
  for (const auto& walk : corpus.walks)
    for (auto tok : walk) freq[tok]++;
  if (freq.empty()) fail(ErrorKind::input, "corpus has no tokens");

  Vocab vocab;
  vocab.tokens.reserve(freq.size());
  for (const auto& [tok, _] : freq) vocab.tokens.push_back(tok);
  std::sort(vocab.tokens.begin(), vocab.tokens.end());
  vocab.counts.reserve(vocab.tokens.size());
  for (std::size_t i = 0; i < vocab.tokens.size(); ++i) {
    vocab.row_of.emplace(vocab.tokens[i], static_cast<int>(i));
    vocab.counts.push_back(freq[vocab.tokens[i]]);
  }

  vocab.sampling_cdf.reserve(vocab.tokens.size());
  double acc = 0.0;
  for (auto count : vocab.counts) {
    acc += std::pow(static_cast<double>(count), unigram_power);
    vocab.sampling_cdf.push_back(acc);
  }
  for (auto& v : vocab.sampling_cdf) v /= acc;
  vocab.sampling_cdf.back() = 1.0;
  return vocab;
}

namespace detail {

inline double clamped_sigmoid(double x) {
  if (x > 30.0) x = 30.0;
  if (x < -30.0) x = -30.0;
  return 1.0 / (1.0 + std::exp(-x));
}

inline int sample_unigram(const Vocab& vocab, Rng& rng) {
  const double r = rng.next_real();
  auto it = std::upper_bound(vocab.sampling_cdf.begin(), vocab.sampling_cdf.end(), r);
  if (it == vocab.sampling_cdf.end()) --it;
  return static_cast<int>(it - vocab.sampling_cdf.begin());
}

}  // namespace detail

// One SGNS update for a (center, context, negatives) triple given as rows.
// Returns the loss -log s(zc.z'o) - sum_neg log s(-zc.z'n) at the pre-update
// parameters and applies the corresponding gradient step with rate lr.
inline double sgns_step(Matrix& input_vectors, Matrix& output_vectors, int center_row,
                        int context_row, std::span<const int> negative_rows, double lr) {
  auto zc = input_vectors.row(static_cast<std::size_t>(center_row));
  const std::size_t d = zc.size();
  static thread_local std::vector<double> center_grad;
  center_grad.assign(d, 0.0);

  double loss = 0.0;
  {
    auto zo = output_vectors.row(static_cast<std::size_t>(context_row));
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += zc[i] * zo[i];
    const double s = detail::clamped_sigmoid(dot);
    loss -= std::log(s);
    const double g = s - 1.0;  // dL/d(dot) for the positive term
    for (std::size_t i = 0; i < d; ++i) {
      center_grad[i] += g * zo[i];
      zo[i] -= lr * g * zc[i];
    }
  }
  for (int neg_row : negative_rows) {
    auto zn = output_vectors.row(static_cast<std::size_t>(neg_row));
    double dot = 0.0;
    for (std::size_t i = 0; i < d; ++i) dot += zc[i] * zn[i];
    const double s = detail::clamped_sigmoid(dot);
    loss -= std::log(1.0 - s);
    const double g = s;  // dL/d(dot) for a negative term
    for (std::size_t i = 0; i < d; ++i) {
      center_grad[i] += g * zn[i];
      zn[i] -= lr * g * zc[i];
    }
  }
  for (std::size_t i = 0; i < d; ++i) zc[i] -= lr * center_grad[i];
  return loss;
}

namespace detail {

// Window radii must replay identically in the counting pre-pass and the
// training pass, so they come from their own stream per (epoch, walk).
inline std::int64_t count_pairs(const WalkCorpus& corpus, const SgnsConfig& cfg) {
  std::int64_t total = 0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t w = 0; w < corpus.walks.size(); ++w) {
      Rng win(derive_seed(cfg.seed, "sgns.win", static_cast<std::uint64_t>(epoch), w));
      const auto len = static_cast<std::int64_t>(corpus.walks[w].size());
      for (std::int64_t t = 0; t < len; ++t) {
        const auto radius = static_cast<std::int64_t>(1 + win.next_below(static_cast<std::uint64_t>(cfg.window)));
        const std::int64_t lo = std::max<std::int64_t>(0, t - radius);
        const std::int64_t hi = std::min<std::int64_t>(len - 1, t + radius);
        total += hi - lo;  // window minus the center itself
      }
    }
  }
  return total;
}

}  // namespace detail

// Skip-Gram with negative sampling over a walk corpus. Deterministic with
// threads=1; the optional multi-threaded mode shards walks hogwild-style over
// shared matrices and is not run-to-run reproducible.
inline EmbeddingMatrix train_sgns(const WalkCorpus& corpus, const SgnsConfig& cfg, int threads = 1,
                                  SgnsTrainInfo* info = nullptr) {
  if (cfg.dim < 1) fail(ErrorKind::config, "dim must be >= 1");
  if (cfg.window < 1) fail(ErrorKind::config, "window must be >= 1");
  if (cfg.negatives < 1) fail(ErrorKind::config, "negatives must be >= 1");
  if (cfg.epochs < 1) fail(ErrorKind::config, "epochs must be >= 1");
  if (!(cfg.min_lr > 0.0) || cfg.min_lr > cfg.initial_lr)
    fail(ErrorKind::config, "need 0 < min_lr <= initial_lr");

  const Vocab vocab = build_vocab(corpus, cfg.unigram_power);
  const auto v = vocab.tokens.size();
  const auto d = static_cast<std::size_t>(cfg.dim);

  EmbeddingMatrix emb;
  emb.tokens = vocab.tokens;
  emb.row_of = vocab.row_of;
  emb.token_space = corpus.token_space;
  emb.input_vectors = Matrix(v, d);
  emb.output_vectors = Matrix(v, d);
  {
    Rng init(derive_seed(cfg.seed, "sgns.init"));
    const double scale = 1.0 / static_cast<double>(cfg.dim);
    for (auto& value : emb.input_vectors.data()) value = (init.next_real() - 0.5) * scale;
  }

  const std::int64_t total_pairs = detail::count_pairs(corpus, cfg);
  if (info) info->total_pairs = total_pairs;
  const double lr_span = cfg.initial_lr - cfg.min_lr;

  std::atomic<std::int64_t> pair_counter{0};
  std::vector<double> epoch_loss(static_cast<std::size_t>(cfg.epochs), 0.0);
  std::vector<std::int64_t> epoch_pairs(static_cast<std::size_t>(cfg.epochs), 0);

  auto process_walk = [&](int epoch, std::size_t w, double& loss_acc, std::int64_t& pairs_acc) {
    const auto& walk = corpus.walks[w];
    const auto len = static_cast<std::int64_t>(walk.size());
    if (len == 0) return;
    Rng win(derive_seed(cfg.seed, "sgns.win", static_cast<std::uint64_t>(epoch), w));
    Rng neg(derive_seed(cfg.seed, "sgns.neg", static_cast<std::uint64_t>(epoch), w));
    std::vector<int> negatives(static_cast<std::size_t>(cfg.negatives));
    for (std::int64_t t = 0; t < len; ++t) {
      const auto radius = static_cast<std::int64_t>(1 + win.next_below(static_cast<std::uint64_t>(cfg.window)));
      const std::int64_t lo = std::max<std::int64_t>(0, t - radius);
      const std::int64_t hi = std::min<std::int64_t>(len - 1, t + radius);
      const int center = vocab.row_of.at(walk[static_cast<std::size_t>(t)]);
      for (std::int64_t j = lo; j <= hi; ++j) {
        if (j == t) continue;
        const int context = vocab.row_of.at(walk[static_cast<std::size_t>(j)]);
        negatives.clear();
        if (v > 1) {
          for (int s = 0; s < cfg.negatives; ++s) {
            int cand;
            do {
              cand = detail::sample_unigram(vocab, neg);
            } while (cand == context);
            negatives.push_back(cand);
          }
        }
        const std::int64_t i = pair_counter.fetch_add(1, std::memory_order_relaxed);
        const double progress = static_cast<double>(i) / static_cast<double>(total_pairs);
        const double lr = std::max(cfg.min_lr, cfg.initial_lr - lr_span * progress);
        loss_acc += sgns_step(emb.input_vectors, emb.output_vectors, center, context,
                              {negatives.data(), negatives.size()}, lr);
        ++pairs_acc;
      }
    }
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto e = static_cast<std::size_t>(epoch);
    if (threads <= 1) {
      for (std::size_t w = 0; w < corpus.walks.size(); ++w)
        process_walk(epoch, w, epoch_loss[e], epoch_pairs[e]);
    } else {
      const auto nt = static_cast<std::size_t>(threads);
      std::vector<double> losses(nt, 0.0);
      std::vector<std::int64_t> counts(nt, 0);
      std::vector<std::thread> pool;
      pool.reserve(nt);
      for (std::size_t t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
          for (std::size_t w = t; w < corpus.walks.size(); w += nt)
            process_walk(epoch, w, losses[t], counts[t]);
        });
      }
      for (auto& th : pool) th.join();
      for (std::size_t t = 0; t < nt; ++t) {
        epoch_loss[e] += losses[t];
        epoch_pairs[e] += counts[t];
      }
    }
  }

  if (info) {
    info->epoch_mean_loss.clear();
    for (std::size_t e = 0; e < epoch_loss.size(); ++e)
      info->epoch_mean_loss.push_back(epoch_pairs[e] > 0 ? epoch_loss[e] / static_cast<double>(epoch_pairs[e])
                                                         : 0.0);
  }
  return emb;
}

// word2vec-style text layout: "V d" header, then one line per token holding
// the token id and its d input-vector coordinates.
inline void save_embeddings(const EmbeddingMatrix& emb, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write embeddings '" + path + "'");
  out << emb.vocab_size() << ' ' << emb.dim() << '\n';
  char buf[64];
  for (int r = 0; r < emb.vocab_size(); ++r) {
    out << emb.tokens[static_cast<std::size_t>(r)];
    for (std::size_t c = 0; c < static_cast<std::size_t>(emb.dim()); ++c) {
      std::snprintf(buf, sizeof(buf), "%.9g", emb.input_vectors(static_cast<std::size_t>(r), c));
      out << ' ' << buf;
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::io, "short write to '" + path + "'");
}

inline EmbeddingMatrix load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open embeddings '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::format, path + ": empty embedding file");
  std::int64_t v = 0, d = 0;
  {
    std::istringstream header(line);
    if (!(header >> v >> d) || v < 1 || d < 1)
      fail(ErrorKind::format, path + ": bad embedding header");
  }
  EmbeddingMatrix emb;
  emb.input_vectors = Matrix(static_cast<std::size_t>(v), static_cast<std::size_t>(d));
  emb.output_vectors = Matrix(static_cast<std::size_t>(v), static_cast<std::size_t>(d));
  emb.tokens.reserve(static_cast<std::size_t>(v));
  for (std::int64_t r = 0; r < v; ++r) {
    if (!std::getline(in, line))
      fail(ErrorKind::format, path + ": header promises " + std::to_string(v) + " rows");
    std::istringstream row(line);
    std::int64_t token = 0;
    if (!(row >> token)) fail(ErrorKind::format, path + ": bad token on row " + std::to_string(r));
    for (std::int64_t c = 0; c < d; ++c)
      if (!(row >> emb.input_vectors(static_cast<std::size_t>(r), static_cast<std::size_t>(c))))
        fail(ErrorKind::format, path + ": row " + std::to_string(r) + " has fewer than " +
                                    std::to_string(d) + " values");
    double extra;
    if (row >> extra) fail(ErrorKind::format, path + ": row " + std::to_string(r) + " has extra values");
    emb.tokens.push_back(static_cast<std::int32_t>(token));
    emb.row_of.emplace(static_cast<std::int32_t>(token), static_cast<int>(r));
  }
  while (std::getline(in, line))
    if (!line.empty()) fail(ErrorKind::format, path + ": more rows than the header declares");
  return emb;
}

}  // namespace attrwalk
