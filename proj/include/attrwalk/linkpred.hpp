#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "attrwalk/edge_split.hpp"
#include "attrwalk/features.hpp"
#include "attrwalk/sgns.hpp"
#include "attrwalk/typing.hpp"
#include "attrwalk/walker.hpp"

namespace attrwalk {

enum class EdgeFeatureOp { mean, hadamard, l1, l2 };

inline const char* to_string(EdgeFeatureOp op) {
  switch (op) {
    case EdgeFeatureOp::mean: return "mean";
    case EdgeFeatureOp::hadamard: return "hadamard";
    case EdgeFeatureOp::l1: return "l1";
    case EdgeFeatureOp::l2: return "l2";
  }
  return "unknown";
}

inline EdgeFeatureOp edge_op_from_string(const std::string& name) {
  if (name == "mean") return EdgeFeatureOp::mean;
  if (name == "hadamard") return EdgeFeatureOp::hadamard;
  if (name == "l1") return EdgeFeatureOp::l1;
  if (name == "l2") return EdgeFeatureOp::l2;
  fail(ErrorKind::config, "unknown edge operator '" + name + "'");
}

// Symmetric combination of two endpoint vectors into one edge feature vector
// of the same dimension.
inline std::vector<double> edge_features(std::span<const double> zi, std::span<const double> zj,
                                         EdgeFeatureOp op) {
  if (zi.size() != zj.size())
    fail(ErrorKind::shape, "edge operator needs equal dimensions, got " +
                               std::to_string(zi.size()) + " and " + std::to_string(zj.size()));
  std::vector<double> out(zi.size());
  for (std::size_t c = 0; c < zi.size(); ++c) {
    switch (op) {
      case EdgeFeatureOp::mean: out[c] = (zi[c] + zj[c]) / 2.0; break;
      case EdgeFeatureOp::hadamard: out[c] = zi[c] * zj[c]; break;
      case EdgeFeatureOp::l1: out[c] = std::abs(zi[c] - zj[c]); break;
      case EdgeFeatureOp::l2: out[c] = (zi[c] - zj[c]) * (zi[c] - zj[c]); break;
    }
  }
  return out;
}

struct LabeledPairs {
  Matrix features;         // one row per pair
  std::vector<int> labels; // 1 positive, 0 negative
  std::vector<Edge> pairs;
};

struct PairFeatureSets {
  LabeledPairs train;  // train edges + equal count of sampled non-edges
  LabeledPairs test;   // the split's held-out positives and negatives
};

namespace detail {

inline void append_pair(LabeledPairs& set, std::size_t row, const EmbeddingMatrix& emb,
                        std::int32_t token_i, std::int32_t token_j, EdgeFeatureOp op) {
  const int ri = emb.row(token_i);
  const int rj = emb.row(token_j);
  const auto feats = edge_features(emb.input_vectors.row(static_cast<std::size_t>(ri)),
                                   emb.input_vectors.row(static_cast<std::size_t>(rj)), op);
  for (std::size_t c = 0; c < feats.size(); ++c) set.features(row, c) = feats[c];
}

}  // namespace detail

// Builds labeled edge-feature sets for classifier training and evaluation.
// token_of_node maps a node to its embedding token (the node id itself in
// baseline mode, its type in attributed mode). Train-side negatives are
// non-edges of the original graph disjoint from both test lists.
inline PairFeatureSets node_pair_features(const EdgeSplit& split, const EmbeddingMatrix& emb,
                                          const std::vector<std::int32_t>& token_of_node,
                                          EdgeFeatureOp op, std::uint64_t seed) {
  const Graph& train = split.train_graph;
  if (token_of_node.size() != static_cast<std::size_t>(train.num_nodes()))
    fail(ErrorKind::shape, "token map does not cover all nodes");

  {
    std::vector<std::int32_t> missing;
    for (auto token : token_of_node)
      if (emb.row(token) < 0) missing.push_back(token);
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    if (!missing.empty()) {
      std::ostringstream msg;
      msg << "tokens absent from embedding vocabulary:";
      for (auto token : missing) msg << ' ' << token;
      fail(ErrorKind::coverage, msg.str());
    }
  }

  // Reconstruct the original graph's edge set to sample honest negatives.
  std::vector<Edge> all_edges = train.edge_list();
  all_edges.insert(all_edges.end(), split.test_positives.begin(), split.test_positives.end());
  Graph original = Graph::from_edges(train.num_nodes(), all_edges, false, train.node_labels());

  std::unordered_set<std::uint64_t> taken;
  for (const auto& [u, v] : split.test_negatives)
    taken.insert(detail::pair_key(std::min(u, v), std::max(u, v)));

  const auto train_edges = train.edge_list();
  Rng rng(derive_seed(seed, "linkpred.trainneg"));
  const auto train_negs =
      detail::sample_non_edges(original, static_cast<std::int64_t>(train_edges.size()), rng, taken);

  const auto dim = static_cast<std::size_t>(emb.dim());
  PairFeatureSets sets;
  sets.train.features = Matrix(train_edges.size() + train_negs.size(), dim);
  sets.test.features = Matrix(split.test_positives.size() + split.test_negatives.size(), dim);

  std::size_t row = 0;
  auto add = [&](LabeledPairs& out, const Edge& e, int label) {
    detail::append_pair(out, row, emb, token_of_node[static_cast<std::size_t>(e.first)],
                        token_of_node[static_cast<std::size_t>(e.second)], op);
    out.labels.push_back(label);
    out.pairs.push_back(e);
    ++row;
  };

  for (const auto& e : train_edges) add(sets.train, e, 1);
  for (const auto& e : train_negs) add(sets.train, e, 0);
  row = 0;
  for (const auto& e : split.test_positives) add(sets.test, e, 1);
  for (const auto& e : split.test_negatives) add(sets.test, e, 0);
  return sets;
}

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;

  double decision(std::span<const double> x) const {
    double s = bias;
    for (std::size_t c = 0; c < x.size(); ++c) s += weights[c] * x[c];
    return s;
  }
};

// Objective: mean cross-entropy + l2_penalty * ||w||^2 / 2 (bias unpenalized).
inline double logistic_loss(const LogisticModel& model, const Matrix& x,
                            const std::vector<int>& y, double l2_penalty) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double s = model.decision(x.row(i));
    // log(1 + exp(-margin)) with the sign folded in, stable for large |s|
    const double margin = y[i] == 1 ? s : -s;
    loss += margin > 0 ? std::log1p(std::exp(-margin)) : -margin + std::log1p(std::exp(margin));
  }
  loss /= static_cast<double>(x.rows());
  double w2 = 0.0;
  for (double w : model.weights) w2 += w * w;
  return loss + l2_penalty * w2 / 2.0;
}

inline void logistic_gradient(const LogisticModel& model, const Matrix& x,
                              const std::vector<int>& y, double l2_penalty,
                              std::vector<double>& grad_w, double& grad_b) {
  grad_w.assign(model.weights.size(), 0.0);
  grad_b = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double s = model.decision(x.row(i));
    const double p = 1.0 / (1.0 + std::exp(-s));
    const double g = p - static_cast<double>(y[i]);
    auto row = x.row(i);
    for (std::size_t c = 0; c < row.size(); ++c) grad_w[c] += g * row[c];
    grad_b += g;
  }
  const auto n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < grad_w.size(); ++c)
    grad_w[c] = grad_w[c] / n + l2_penalty * model.weights[c];
  grad_b /= n;
}

// Logistic regression by seeded SGD over shuffled examples.
inline LogisticModel train_logistic(const LabeledPairs& data, int epochs, double lr,
                                    double l2_penalty, std::uint64_t seed) {
  const std::size_t n = data.features.rows();
  if (n < 2) fail(ErrorKind::training, "need at least 2 examples");
  const bool has_pos = std::find(data.labels.begin(), data.labels.end(), 1) != data.labels.end();
  const bool has_neg = std::find(data.labels.begin(), data.labels.end(), 0) != data.labels.end();
  if (!has_pos || !has_neg) fail(ErrorKind::training, "training data has a single class");

  LogisticModel model;
  model.weights.assign(data.features.cols(), 0.0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "logreg"));
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t i : order) {
      auto row = data.features.row(i);
      const double s = model.decision(row);
      const double p = 1.0 / (1.0 + std::exp(-s));
      const double g = p - static_cast<double>(data.labels[i]);
      for (std::size_t c = 0; c < row.size(); ++c)
        model.weights[c] -= lr * (g * row[c] + l2_penalty * model.weights[c]);
      model.bias -= lr * g;
    }
  }
  return model;
}

// AUC = [#(pos>neg) + 0.5 #(pos=neg)] / (|pos| |neg|), by sorting and rank
// counting; integer win/tie counts make it exactly the pairwise definition.
inline double compute_auc(std::span<const double> scores_pos, std::span<const double> scores_neg) {
  if (scores_pos.empty() || scores_neg.empty())
    fail(ErrorKind::input, "AUC needs nonempty score lists");
  std::vector<double> neg(scores_neg.begin(), scores_neg.end());
  std::sort(neg.begin(), neg.end());
  std::int64_t wins2 = 0;  // 2*wins + ties
  for (double s : scores_pos) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), s) - neg.begin();
    const auto hi = std::upper_bound(neg.begin(), neg.end(), s) - neg.begin();
    wins2 += 2 * lo + (hi - lo);
  }
  return static_cast<double>(wins2) /
         (2.0 * static_cast<double>(scores_pos.size()) * static_cast<double>(neg.size()));
}

enum class PipelineMode { baseline_node2vec, attributed };

inline const char* to_string(PipelineMode m) {
  return m == PipelineMode::baseline_node2vec ? "baseline_node2vec" : "attributed";
}

struct PipelineConfig {
  std::string graph_path;
  PipelineMode mode = PipelineMode::attributed;
  double test_fraction = 0.5;
  std::uint64_t seed = 1;
  int threads = 1;
  bool deterministic = true;

  // attributed mode
  std::vector<std::string> feature_set = {"degree", "triangle_count", "wedge_count"};
  std::string attributes_path;  // optional given attributes, concatenated after structural ones
  TypeMapKind phi_kind = TypeMapKind::log_binning;
  int bins = 8;
  double alpha = 2.0;
  TypeId kmeans_types = 32;
  int kmeans_max_iters = 100;
  double kmeans_tol = 1e-6;

  WalkConfig walk;
  SgnsConfig sgns;
  EdgeFeatureOp op = EdgeFeatureOp::mean;
  int logreg_epochs = 100;
  double logreg_lr = 0.1;
  double logreg_l2 = 1e-4;
  int repeats = 1;
};

// Everything a single evaluation run produces; the report is what Table-style
// comparisons consume, the artifacts are what the CLI persists.
struct EvalReport {
  double auc = 0.0;
  EdgeFeatureOp op = EdgeFeatureOp::mean;
  std::int64_t num_test_pos = 0;
  std::int64_t num_test_neg = 0;
  std::uint64_t seed = 0;
  PipelineMode mode = PipelineMode::attributed;
  std::string config_digest;
  std::vector<double> per_fold;
};

struct PipelineResult {
  EvalReport report;
  EdgeSplit split;
  AttributeMatrix features;
  TypeMap phi;
  TypeAssignment assignment;
  EmbeddingMatrix embeddings;
};

inline std::string config_digest(const PipelineConfig& cfg) {
  std::ostringstream s;
  s << "graph=" << cfg.graph_path << ";mode=" << to_string(cfg.mode)
    << ";fraction=" << cfg.test_fraction << ";seed=" << cfg.seed
    << ";features=" << detail::join_names(cfg.feature_set) << ";attrs=" << cfg.attributes_path
    << ";phi=" << to_string(cfg.phi_kind) << ";bins=" << cfg.bins << ";alpha=" << cfg.alpha
    << ";types=" << cfg.kmeans_types << ";kmiters=" << cfg.kmeans_max_iters
    << ";kmtol=" << cfg.kmeans_tol << ";r=" << cfg.walk.walks_per_node
    << ";L=" << cfg.walk.walk_length << ";p=" << cfg.walk.p << ";q=" << cfg.walk.q
    << ";d=" << cfg.sgns.dim << ";window=" << cfg.sgns.window << ";neg=" << cfg.sgns.negatives
    << ";epochs=" << cfg.sgns.epochs << ";lr=" << cfg.sgns.initial_lr
    << ";minlr=" << cfg.sgns.min_lr << ";power=" << cfg.sgns.unigram_power
    << ";op=" << to_string(cfg.op) << ";lrepochs=" << cfg.logreg_epochs
    << ";lrlr=" << cfg.logreg_lr << ";l2=" << cfg.logreg_l2 << ";repeats=" << cfg.repeats;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(s.str())));
  return buf;
}

namespace detail {

template <typename F>
auto run_stage(const char* stage, F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("stage ") + stage + ": " + e.what());
  }
}

}  // namespace detail

// Full evaluation: split, (features + phi + typing in attributed mode), walks
// over the train graph, SGNS, classifier, held-out AUC. phi is fit on the
// train graph only; test pairs never feed features, typing, or walks.
inline PipelineResult run_pipeline_once(const Graph& g, const PipelineConfig& cfg,
                                        std::uint64_t seed) {
  PipelineResult result;
  const int train_threads = cfg.deterministic ? 1 : cfg.threads;

  result.split =
      detail::run_stage("split", [&] { return split_edges(g, cfg.test_fraction, seed); });
  const Graph& train = result.split.train_graph;

  std::vector<std::int32_t> token_of_node(static_cast<std::size_t>(train.num_nodes()));
  WalkCorpus corpus;
  WalkConfig walk_cfg = cfg.walk;
  walk_cfg.seed = seed;

  if (cfg.mode == PipelineMode::attributed) {
    if (cfg.phi_kind != TypeMapKind::identity) {
      result.features = detail::run_stage("features", [&] {
        AttributeMatrix x = compute_structural_features(train, cfg.feature_set);
        if (!cfg.attributes_path.empty())
          x = concat_attributes(x, load_attributes(cfg.attributes_path, train));
        return x;
      });
    }
    detail::run_stage("fit-phi", [&] {
      switch (cfg.phi_kind) {
        case TypeMapKind::log_binning:
          result.phi = fit_log_binning(result.features, cfg.bins, cfg.alpha);
          break;
        case TypeMapKind::kmeans:
          result.phi = fit_kmeans(result.features, cfg.kmeans_types, seed, cfg.kmeans_max_iters,
                                  cfg.kmeans_tol);
          break;
        case TypeMapKind::identity:
          result.phi = fit_identity(static_cast<std::size_t>(train.num_nodes()));
          break;
      }
      return 0;
    });
    detail::run_stage("assign", [&] {
      if (cfg.phi_kind == TypeMapKind::identity) {
        result.assignment.num_types = result.phi.num_types;
        result.assignment.types.resize(static_cast<std::size_t>(train.num_nodes()));
        std::iota(result.assignment.types.begin(), result.assignment.types.end(), 0);
      } else {
        result.assignment = assign_types(result.phi, result.features);
      }
      return 0;
    });
    corpus = detail::run_stage("walks", [&] {
      return generate_attributed_walks(train, result.assignment, walk_cfg, cfg.threads);
    });
    for (std::size_t i = 0; i < token_of_node.size(); ++i)
      token_of_node[i] = result.assignment.types[i];
  } else {
    corpus =
        detail::run_stage("walks", [&] { return generate_walks(train, walk_cfg, cfg.threads); });
    for (std::size_t i = 0; i < token_of_node.size(); ++i)
      token_of_node[i] = static_cast<std::int32_t>(i);
  }

  SgnsConfig sgns_cfg = cfg.sgns;
  sgns_cfg.seed = seed;
  result.embeddings = detail::run_stage(
      "embed", [&] { return train_sgns(corpus, sgns_cfg, train_threads); });

  const PairFeatureSets sets = detail::run_stage("pair-features", [&] {
    return node_pair_features(result.split, result.embeddings, token_of_node, cfg.op, seed);
  });
  const LogisticModel model = detail::run_stage("classifier", [&] {
    return train_logistic(sets.train, cfg.logreg_epochs, cfg.logreg_lr, cfg.logreg_l2, seed);
  });

  std::vector<double> pos_scores, neg_scores;
  for (std::size_t i = 0; i < sets.test.features.rows(); ++i) {
    const double s = model.decision(sets.test.features.row(i));
    (sets.test.labels[i] == 1 ? pos_scores : neg_scores).push_back(s);
  }
  result.report.auc = detail::run_stage("auc", [&] { return compute_auc(pos_scores, neg_scores); });
  result.report.op = cfg.op;
  result.report.num_test_pos = static_cast<std::int64_t>(pos_scores.size());
  result.report.num_test_neg = static_cast<std::int64_t>(neg_scores.size());
  result.report.seed = seed;
  result.report.mode = cfg.mode;
  result.report.config_digest = config_digest(cfg);
  return result;
}

inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  const Graph g =
      detail::run_stage("load", [&] { return load_edge_list(cfg.graph_path, false); });
  if (cfg.repeats <= 1) return run_pipeline_once(g, cfg, cfg.seed);

  PipelineResult result;
  double sum = 0.0;
  for (int i = 0; i < cfg.repeats; ++i) {
    const std::uint64_t seed = i == 0 ? cfg.seed : derive_seed(cfg.seed, "repeat", static_cast<std::uint64_t>(i));
    PipelineResult run = run_pipeline_once(g, cfg, seed);
    sum += run.report.auc;
    result.report.per_fold.push_back(run.report.auc);
    if (i == 0) {
      auto folds = std::move(result.report.per_fold);
      result = std::move(run);
      result.report.per_fold = std::move(folds);
    }
  }
  result.report.auc = sum / static_cast<double>(cfg.repeats);
  result.report.seed = cfg.seed;
  return result;
}

inline void save_report(const EvalReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write report '" + path + "'");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", report.auc);
  out << "auc=" << buf << '\n';
  out << "operator=" << to_string(report.op) << '\n';
  out << "num_test_pos=" << report.num_test_pos << '\n';
  out << "num_test_neg=" << report.num_test_neg << '\n';
  out << "mode=" << to_string(report.mode) << '\n';
  out << "seed=" << report.seed << '\n';
  out << "config_digest=" << report.config_digest << '\n';
  if (!report.per_fold.empty()) {
    out << "per_fold=";
    for (std::size_t i = 0; i < report.per_fold.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", report.per_fold[i]);
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
}

inline void append_report_csv(const EvalReport& report, const std::string& graph,
                              const std::string& path) {
  const bool exists = std::ifstream(path).good();
  std::ofstream out(path, std::ios::app);
  if (!out) fail(ErrorKind::io, "cannot write csv '" + path + "'");
  if (!exists) out << "graph,mode,operator,auc,seed,config_digest\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", report.auc);
  out << graph << ',' << to_string(report.mode) << ',' << to_string(report.op) << ',' << buf << ','
      << report.seed << ',' << report.config_digest << '\n';
}

}  // namespace attrwalk
