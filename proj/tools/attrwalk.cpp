// Command-line frontend: one subcommand per pipeline stage plus the full
// evaluation pipeline and the inductive transfer path.

#include <cstdio>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "attrwalk/attrwalk.hpp"

namespace aw = attrwalk;
namespace fs = std::filesystem;

namespace {

int exit_code_for(aw::ErrorKind kind) {
  switch (kind) {
    case aw::ErrorKind::io: return 3;
    case aw::ErrorKind::parse: return 4;
    case aw::ErrorKind::input: return 5;
    case aw::ErrorKind::config: return 6;
    case aw::ErrorKind::data: return 7;
    case aw::ErrorKind::shape: return 8;
    case aw::ErrorKind::schema: return 9;
    case aw::ErrorKind::format: return 10;
    case aw::ErrorKind::split: return 11;
    case aw::ErrorKind::coverage: return 12;
    case aw::ErrorKind::training: return 13;
  }
  return 1;
}

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 ok, 1 internal, 2 usage, 3 io, 4 parse, 5 input, 6 config,\n"
    "7 data, 8 shape, 9 schema, 10 format, 11 split, 12 coverage, 13 training.\n"
    "Errors are reported as a single stderr line: 'error kind=<kind> code=<code>: <message>'.";

struct AttributeFlags {
  std::string features = "degree,triangle_count,wedge_count";
  std::string attrs_path;
  bool attrs_only = false;
};

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void add_attribute_flags(CLI::App* cmd, AttributeFlags& flags) {
  cmd->add_option("--features", flags.features,
                  "Comma-separated structural features (degree, triangle_count, wedge_count, "
                  "avg_neighbor_degree, core_number)")
      ->capture_default_str();
  cmd->add_option("--attrs", flags.attrs_path, "Per-node attribute file to use as given attributes");
  cmd->add_flag("--attrs-only", flags.attrs_only,
                "Use only the given attribute file, no structural features");
}

aw::AttributeMatrix build_attributes(const aw::Graph& g, const AttributeFlags& flags) {
  if (flags.attrs_only) {
    if (flags.attrs_path.empty())
      aw::fail(aw::ErrorKind::config, "--attrs-only requires --attrs");
    return aw::load_attributes(flags.attrs_path, g);
  }
  aw::AttributeMatrix x = aw::compute_structural_features(g, split_csv(flags.features));
  if (!flags.attrs_path.empty())
    x = aw::concat_attributes(x, aw::load_attributes(flags.attrs_path, g));
  return x;
}

// Rebuild the attribute matrix a fitted phi expects, column by column:
// structural names are recomputed from the graph, anything else must come
// from a given attribute file.
aw::AttributeMatrix attributes_for_typemap(const aw::TypeMap& phi, const aw::Graph& g,
                                           const std::string& attrs_path) {
  const auto& structural = aw::structural_feature_names();
  std::vector<std::string> structural_cols;
  std::vector<std::string> given_cols;
  for (const auto& name : phi.column_names) {
    if (std::find(structural.begin(), structural.end(), name) != structural.end())
      structural_cols.push_back(name);
    else
      given_cols.push_back(name);
  }
  if (!given_cols.empty() && attrs_path.empty())
    aw::fail(aw::ErrorKind::schema,
             "type map expects non-structural columns; provide them with --attrs");

  aw::AttributeMatrix structural_x;
  if (!structural_cols.empty()) structural_x = aw::compute_structural_features(g, structural_cols);
  aw::AttributeMatrix given_x;
  if (!attrs_path.empty()) given_x = aw::load_attributes(attrs_path, g);

  aw::AttributeMatrix x;
  x.column_names = phi.column_names;
  x.source = aw::AttributeSource::concatenated;
  x.values = aw::Matrix(static_cast<std::size_t>(g.num_nodes()), phi.column_names.size());
  for (std::size_t c = 0; c < phi.column_names.size(); ++c) {
    const auto& name = phi.column_names[c];
    const aw::AttributeMatrix* source = nullptr;
    std::size_t src_col = 0;
    auto it = std::find(structural_x.column_names.begin(), structural_x.column_names.end(), name);
    if (it != structural_x.column_names.end()) {
      source = &structural_x;
      src_col = static_cast<std::size_t>(it - structural_x.column_names.begin());
    } else {
      auto jt = std::find(given_x.column_names.begin(), given_x.column_names.end(), name);
      if (jt == given_x.column_names.end())
        aw::fail(aw::ErrorKind::schema, "column '" + name + "' is not available for this graph");
      source = &given_x;
      src_col = static_cast<std::size_t>(jt - given_x.column_names.begin());
    }
    for (std::size_t i = 0; i < x.rows(); ++i) x.values(i, c) = source->values(i, src_col);
  }
  return x;
}

aw::TypeMapKind parse_phi_kind(const std::string& name) {
  if (name == "log" || name == "log_binning") return aw::TypeMapKind::log_binning;
  if (name == "kmeans") return aw::TypeMapKind::kmeans;
  if (name == "identity") return aw::TypeMapKind::identity;
  aw::fail(aw::ErrorKind::config, "unknown phi kind '" + name + "' (log, kmeans, identity)");
}

aw::PipelineMode parse_mode(const std::string& name) {
  if (name == "baseline" || name == "baseline_node2vec") return aw::PipelineMode::baseline_node2vec;
  if (name == "attributed") return aw::PipelineMode::attributed;
  aw::fail(aw::ErrorKind::config, "unknown mode '" + name + "' (baseline_node2vec, attributed)");
}

void log_config(const std::string& subcommand, const std::string& body) {
  std::cerr << "config " << subcommand << ": " << body << '\n';
}

struct PipelineFlags {
  std::string graph;
  std::string mode = "attributed";
  double fraction = 0.5;
  std::uint64_t seed = 1;
  int threads = 1;
  bool deterministic = true;
  AttributeFlags attrs;
  std::string phi_kind = "log";
  int bins = 8;
  double alpha = 2.0;
  int types = 32;
  int kmeans_max_iters = 100;
  double kmeans_tol = 1e-6;
  int walks_per_node = 10;
  int walk_length = 80;
  double p = 1.0;
  double q = 1.0;
  int dim = 128;
  int window = 10;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  double min_lr = 0.0001;
  double power = 0.75;
  std::string op = "mean";
  int logreg_epochs = 100;
  double logreg_lr = 0.1;
  double logreg_l2 = 1e-4;
  int repeats = 1;
  std::string report_path;
  std::string csv_path;
  std::string outdir;
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f, bool require_outdir) {
  cmd->add_option("--graph", f.graph, "Undirected edge list")->required();
  cmd->add_option("--mode", f.mode, "baseline_node2vec or attributed")->capture_default_str();
  cmd->add_option("--fraction", f.fraction, "Held-out edge fraction")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Master seed; all streams derive from it")->capture_default_str();
  cmd->add_option("--threads", f.threads, "Worker threads for walk generation")->capture_default_str();
  cmd->add_flag("--deterministic,!--no-deterministic", f.deterministic,
                "Pin embedding training to one thread (reproducible)")
      ->capture_default_str();
  add_attribute_flags(cmd, f.attrs);
  cmd->add_option("--phi", f.phi_kind, "Type map kind: log, kmeans, identity")->capture_default_str();
  cmd->add_option("--bins", f.bins, "Bins per column for log binning")->capture_default_str();
  cmd->add_option("--alpha", f.alpha, "Log-binning base")->capture_default_str();
  cmd->add_option("--types", f.types, "Cluster count for kmeans phi")->capture_default_str();
  cmd->add_option("--kmeans-max-iters", f.kmeans_max_iters, "Lloyd iteration cap")->capture_default_str();
  cmd->add_option("--kmeans-tol", f.kmeans_tol, "Centroid-shift stopping tolerance")->capture_default_str();
  cmd->add_option("--walks-per-node", f.walks_per_node, "Walks started per node")->capture_default_str();
  cmd->add_option("--length", f.walk_length, "Steps per walk")->capture_default_str();
  cmd->add_option("--p", f.p, "Return parameter")->capture_default_str();
  cmd->add_option("--q", f.q, "In-out parameter")->capture_default_str();
  cmd->add_option("--dim", f.dim, "Embedding dimension")->capture_default_str();
  cmd->add_option("--window", f.window, "Maximum context window radius")->capture_default_str();
  cmd->add_option("--negatives", f.negatives, "Negative samples per pair")->capture_default_str();
  cmd->add_option("--epochs", f.epochs, "Training epochs over the corpus")->capture_default_str();
  cmd->add_option("--lr", f.lr, "Initial learning rate")->capture_default_str();
  cmd->add_option("--min-lr", f.min_lr, "Final learning rate")->capture_default_str();
  cmd->add_option("--power", f.power, "Unigram distribution exponent")->capture_default_str();
  cmd->add_option("--op", f.op, "Edge operator: mean, hadamard, l1, l2")->capture_default_str();
  cmd->add_option("--logreg-epochs", f.logreg_epochs, "Classifier SGD epochs")->capture_default_str();
  cmd->add_option("--logreg-lr", f.logreg_lr, "Classifier learning rate")->capture_default_str();
  cmd->add_option("--logreg-l2", f.logreg_l2, "Classifier L2 penalty")->capture_default_str();
  cmd->add_option("--repeats", f.repeats, "Splits to average over")->capture_default_str();
  cmd->add_option("--report", f.report_path, "Write the evaluation report here");
  cmd->add_option("--csv", f.csv_path, "Append a result row to this CSV");
  auto* outdir = cmd->add_option("--outdir", f.outdir, "Directory for run artifacts");
  if (require_outdir) outdir->required();
}

aw::PipelineConfig to_pipeline_config(const PipelineFlags& f) {
  aw::PipelineConfig cfg;
  cfg.graph_path = f.graph;
  cfg.mode = parse_mode(f.mode);
  cfg.test_fraction = f.fraction;
  cfg.seed = f.seed;
  cfg.threads = f.threads;
  cfg.deterministic = f.deterministic;
  cfg.feature_set = f.attrs.attrs_only ? std::vector<std::string>{} : split_csv(f.attrs.features);
  cfg.attributes_path = f.attrs.attrs_path;
  cfg.phi_kind = parse_phi_kind(f.phi_kind);
  cfg.bins = f.bins;
  cfg.alpha = f.alpha;
  cfg.kmeans_types = f.types;
  cfg.kmeans_max_iters = f.kmeans_max_iters;
  cfg.kmeans_tol = f.kmeans_tol;
  cfg.walk.walks_per_node = f.walks_per_node;
  cfg.walk.walk_length = f.walk_length;
  cfg.walk.p = f.p;
  cfg.walk.q = f.q;
  cfg.sgns.dim = f.dim;
  cfg.sgns.window = f.window;
  cfg.sgns.negatives = f.negatives;
  cfg.sgns.epochs = f.epochs;
  cfg.sgns.initial_lr = f.lr;
  cfg.sgns.min_lr = f.min_lr;
  cfg.sgns.unigram_power = f.power;
  cfg.op = aw::edge_op_from_string(f.op);
  cfg.logreg_epochs = f.logreg_epochs;
  cfg.logreg_lr = f.logreg_lr;
  cfg.logreg_l2 = f.logreg_l2;
  cfg.repeats = f.repeats;
  return cfg;
}

std::string describe(const aw::PipelineConfig& cfg) {
  std::ostringstream s;
  s << "graph=" << cfg.graph_path << " mode=" << aw::to_string(cfg.mode)
    << " fraction=" << cfg.test_fraction << " seed=" << cfg.seed << " threads=" << cfg.threads
    << " deterministic=" << (cfg.deterministic ? 1 : 0)
    << " features=" << aw::detail::join_names(cfg.feature_set)
    << " attrs=" << cfg.attributes_path << " phi=" << aw::to_string(cfg.phi_kind)
    << " bins=" << cfg.bins << " alpha=" << cfg.alpha << " types=" << cfg.kmeans_types
    << " r=" << cfg.walk.walks_per_node << " L=" << cfg.walk.walk_length << " p=" << cfg.walk.p
    << " q=" << cfg.walk.q << " dim=" << cfg.sgns.dim << " window=" << cfg.sgns.window
    << " negatives=" << cfg.sgns.negatives << " epochs=" << cfg.sgns.epochs
    << " lr=" << cfg.sgns.initial_lr << " min_lr=" << cfg.sgns.min_lr
    << " power=" << cfg.sgns.unigram_power << " op=" << aw::to_string(cfg.op)
    << " logreg_epochs=" << cfg.logreg_epochs << " logreg_lr=" << cfg.logreg_lr
    << " logreg_l2=" << cfg.logreg_l2 << " repeats=" << cfg.repeats
    << " digest=" << aw::config_digest(cfg);
  return s.str();
}

int run_evaluation(const PipelineFlags& flags, bool persist_artifacts) {
  aw::PipelineConfig cfg = to_pipeline_config(flags);
  log_config(persist_artifacts ? "run" : "linkpred", describe(cfg));
  aw::PipelineResult result = aw::run_pipeline(cfg);

  if (persist_artifacts) {
    fs::create_directories(flags.outdir);
    aw::save_split(result.split, flags.outdir + "/split");
    aw::save_embeddings(result.embeddings, flags.outdir + "/embeddings.txt");
    if (cfg.mode == aw::PipelineMode::attributed) {
      aw::save_typemap(result.phi, flags.outdir + "/phi.txt");
      aw::save_assignment(result.assignment, flags.outdir + "/assignment.txt");
      if (result.features.rows() > 0)
        aw::save_attributes(result.features, result.split.train_graph,
                            flags.outdir + "/features.csv");
    }
    aw::save_report(result.report, flags.outdir + "/report.txt");
    aw::append_report_csv(result.report, cfg.graph_path, flags.outdir + "/results.csv");
    std::ofstream conf(flags.outdir + "/config.txt");
    conf << describe(cfg) << '\n';
  }
  if (!flags.report_path.empty()) aw::save_report(result.report, flags.report_path);
  if (!flags.csv_path.empty()) aw::append_report_csv(result.report, cfg.graph_path, flags.csv_path);

  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", result.report.auc);
  std::cout << "auc " << buf << " mode " << aw::to_string(result.report.mode) << " op "
            << aw::to_string(result.report.op) << " test_pos " << result.report.num_test_pos
            << " test_neg " << result.report.num_test_neg << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attributed random-walk embeddings and link-prediction evaluation"};
  app.require_subcommand(1);
  app.footer(kExitCodeHelp);

  // features
  struct {
    std::string graph, out;
    bool directed = false;
    AttributeFlags attrs;
  } feat;
  auto* cmd_features = app.add_subcommand("features", "Compute per-node attribute matrix");
  cmd_features->add_option("--graph", feat.graph, "Edge list")->required();
  cmd_features->add_flag("--directed", feat.directed, "Treat the edge list as directed");
  add_attribute_flags(cmd_features, feat.attrs);
  cmd_features->add_option("--out", feat.out, "Output attribute file")->required();

  // fit-phi
  struct {
    std::string graph, out;
    bool directed = false;
    AttributeFlags attrs;
    std::string kind = "log";
    int bins = 8;
    double alpha = 2.0;
    int types = 32;
    int max_iters = 100;
    double tol = 1e-6;
    std::uint64_t seed = 1;
  } fitphi;
  auto* cmd_fitphi = app.add_subcommand("fit-phi", "Fit a type map on a graph's attributes");
  cmd_fitphi->add_option("--graph", fitphi.graph, "Edge list")->required();
  cmd_fitphi->add_flag("--directed", fitphi.directed, "Treat the edge list as directed");
  add_attribute_flags(cmd_fitphi, fitphi.attrs);
  cmd_fitphi->add_option("--kind", fitphi.kind, "log, kmeans or identity")->capture_default_str();
  cmd_fitphi->add_option("--bins", fitphi.bins, "Bins per column (log binning)")->capture_default_str();
  cmd_fitphi->add_option("--alpha", fitphi.alpha, "Log-binning base")->capture_default_str();
  cmd_fitphi->add_option("--types", fitphi.types, "Cluster count (kmeans)")->capture_default_str();
  cmd_fitphi->add_option("--max-iters", fitphi.max_iters, "Lloyd iteration cap")->capture_default_str();
  cmd_fitphi->add_option("--tol", fitphi.tol, "Centroid-shift tolerance")->capture_default_str();
  cmd_fitphi->add_option("--seed", fitphi.seed, "Seed for kmeans")->capture_default_str();
  cmd_fitphi->add_option("--out", fitphi.out, "Output type map file")->required();

  // assign
  struct {
    std::string phi, graph, out;
    bool directed = false;
    std::string attrs_path;
  } assign;
  auto* cmd_assign = app.add_subcommand("assign", "Apply a fitted type map to a graph");
  cmd_assign->add_option("--phi", assign.phi, "Type map file")->required();
  cmd_assign->add_option("--graph", assign.graph, "Edge list")->required();
  cmd_assign->add_flag("--directed", assign.directed, "Treat the edge list as directed");
  cmd_assign->add_option("--attrs", assign.attrs_path, "Given attributes, if the type map needs them");
  cmd_assign->add_option("--out", assign.out, "Output assignment file")->required();

  // walks
  struct {
    std::string graph, assignment, out;
    bool directed = false;
    int walks_per_node = 10;
    int length = 80;
    double p = 1.0, q = 1.0;
    std::uint64_t seed = 1;
    int threads = 1;
  } walks;
  auto* cmd_walks = app.add_subcommand("walks", "Generate a walk corpus");
  cmd_walks->add_option("--graph", walks.graph, "Edge list")->required();
  cmd_walks->add_flag("--directed", walks.directed, "Treat the edge list as directed");
  cmd_walks->add_option("--assignment", walks.assignment,
                        "Type assignment file; emits type tokens when given");
  cmd_walks->add_option("--walks-per-node", walks.walks_per_node, "Walks per node")->capture_default_str();
  cmd_walks->add_option("--length", walks.length, "Steps per walk")->capture_default_str();
  cmd_walks->add_option("--p", walks.p, "Return parameter")->capture_default_str();
  cmd_walks->add_option("--q", walks.q, "In-out parameter")->capture_default_str();
  cmd_walks->add_option("--seed", walks.seed, "Seed")->capture_default_str();
  cmd_walks->add_option("--threads", walks.threads, "Worker threads")->capture_default_str();
  cmd_walks->add_option("--out", walks.out, "Output corpus file")->required();

  // embed
  struct {
    std::string corpus, out;
    int dim = 128, window = 10, negatives = 5, epochs = 5, threads = 1;
    double lr = 0.025, min_lr = 0.0001, power = 0.75;
    std::uint64_t seed = 1;
    bool deterministic = true;
  } embed;
  auto* cmd_embed = app.add_subcommand("embed", "Train SGNS embeddings on a corpus");
  cmd_embed->add_option("--corpus", embed.corpus, "Walk corpus file")->required();
  cmd_embed->add_option("--dim", embed.dim, "Embedding dimension")->capture_default_str();
  cmd_embed->add_option("--window", embed.window, "Maximum context radius")->capture_default_str();
  cmd_embed->add_option("--negatives", embed.negatives, "Negatives per pair")->capture_default_str();
  cmd_embed->add_option("--epochs", embed.epochs, "Epochs")->capture_default_str();
  cmd_embed->add_option("--lr", embed.lr, "Initial learning rate")->capture_default_str();
  cmd_embed->add_option("--min-lr", embed.min_lr, "Final learning rate")->capture_default_str();
  cmd_embed->add_option("--power", embed.power, "Unigram exponent")->capture_default_str();
  cmd_embed->add_option("--seed", embed.seed, "Seed")->capture_default_str();
  cmd_embed->add_option("--threads", embed.threads, "Training threads (non-deterministic)")
      ->capture_default_str();
  cmd_embed->add_flag("--deterministic,!--no-deterministic", embed.deterministic,
                      "Force single-threaded, reproducible training")
      ->capture_default_str();
  cmd_embed->add_option("--out", embed.out, "Output embedding file")->required();

  // linkpred / run
  PipelineFlags lp;
  auto* cmd_linkpred =
      app.add_subcommand("linkpred", "Split a graph and evaluate link-prediction AUC");
  add_pipeline_flags(cmd_linkpred, lp, false);
  PipelineFlags rn;
  auto* cmd_run = app.add_subcommand("run", "Full pipeline; persists every artifact to --outdir");
  add_pipeline_flags(cmd_run, rn, true);

  // transfer
  struct {
    std::string phi, emb, graph, attrs_path, out;
    bool directed = false;
    bool strict = false;
  } transfer;
  auto* cmd_transfer = app.add_subcommand(
      "transfer", "Embed the nodes of a new graph through a fitted type map and trained type vectors");
  cmd_transfer->add_option("--phi", transfer.phi, "Type map file")->required();
  cmd_transfer->add_option("--emb", transfer.emb, "Type embedding file")->required();
  cmd_transfer->add_option("--graph", transfer.graph, "Edge list of the new graph")->required();
  cmd_transfer->add_flag("--directed", transfer.directed, "Treat the edge list as directed");
  cmd_transfer->add_option("--attrs", transfer.attrs_path, "Given attributes for the new graph");
  cmd_transfer->add_flag("--strict", transfer.strict,
                         "Fail instead of substituting the mean vector for unseen types");
  cmd_transfer->add_option("--out", transfer.out, "Output per-node embedding file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cmd_features->parsed()) {
      const aw::Graph g = aw::load_edge_list(feat.graph, feat.directed);
      log_config("features", "graph=" + feat.graph + " features=" + feat.attrs.features +
                                 " attrs=" + feat.attrs.attrs_path + " out=" + feat.out);
      aw::save_attributes(build_attributes(g, feat.attrs), g, feat.out);
    } else if (cmd_fitphi->parsed()) {
      const aw::Graph g = aw::load_edge_list(fitphi.graph, fitphi.directed);
      std::ostringstream body;
      body << "graph=" << fitphi.graph << " kind=" << fitphi.kind << " bins=" << fitphi.bins
           << " alpha=" << fitphi.alpha << " types=" << fitphi.types << " seed=" << fitphi.seed
           << " out=" << fitphi.out;
      log_config("fit-phi", body.str());
      aw::TypeMap phi;
      const aw::TypeMapKind kind = parse_phi_kind(fitphi.kind);
      if (kind == aw::TypeMapKind::identity) {
        phi = aw::fit_identity(static_cast<std::size_t>(g.num_nodes()));
      } else {
        const aw::AttributeMatrix x = build_attributes(g, fitphi.attrs);
        if (kind == aw::TypeMapKind::log_binning) {
          phi = aw::fit_log_binning(x, fitphi.bins, fitphi.alpha);
        } else {
          aw::KmeansFitInfo fit_info;
          phi = aw::fit_kmeans(x, static_cast<aw::TypeId>(fitphi.types), fitphi.seed,
                               fitphi.max_iters, fitphi.tol, &fit_info);
          for (const auto& w : fit_info.warnings) std::cerr << "warning: " << w << '\n';
        }
      }
      aw::save_typemap(phi, fitphi.out);
      std::cout << "types " << phi.num_types << '\n';
    } else if (cmd_assign->parsed()) {
      const aw::Graph g = aw::load_edge_list(assign.graph, assign.directed);
      log_config("assign", "phi=" + assign.phi + " graph=" + assign.graph + " out=" + assign.out);
      const aw::TypeMap phi = aw::load_typemap(assign.phi);
      aw::TypeAssignment a;
      if (phi.kind == aw::TypeMapKind::identity) {
        aw::AttributeMatrix dummy;
        dummy.values = aw::Matrix(static_cast<std::size_t>(g.num_nodes()), 0);
        a = aw::assign_types(phi, dummy);
      } else {
        a = aw::assign_types(phi, attributes_for_typemap(phi, g, assign.attrs_path));
      }
      aw::save_assignment(a, assign.out);
    } else if (cmd_walks->parsed()) {
      const aw::Graph g = aw::load_edge_list(walks.graph, walks.directed);
      aw::WalkConfig cfg;
      cfg.walks_per_node = walks.walks_per_node;
      cfg.walk_length = walks.length;
      cfg.p = walks.p;
      cfg.q = walks.q;
      cfg.seed = walks.seed;
      std::ostringstream body;
      body << "graph=" << walks.graph << " assignment=" << walks.assignment
           << " r=" << cfg.walks_per_node << " L=" << cfg.walk_length << " p=" << cfg.p
           << " q=" << cfg.q << " seed=" << cfg.seed << " threads=" << walks.threads
           << " out=" << walks.out;
      log_config("walks", body.str());
      aw::WalkCorpus corpus;
      if (walks.assignment.empty()) {
        corpus = aw::generate_walks(g, cfg, walks.threads);
      } else {
        corpus = aw::generate_attributed_walks(g, aw::load_assignment(walks.assignment), cfg,
                                               walks.threads);
      }
      aw::save_corpus(corpus, walks.out);
    } else if (cmd_embed->parsed()) {
      aw::SgnsConfig cfg;
      cfg.dim = embed.dim;
      cfg.window = embed.window;
      cfg.negatives = embed.negatives;
      cfg.epochs = embed.epochs;
      cfg.initial_lr = embed.lr;
      cfg.min_lr = embed.min_lr;
      cfg.unigram_power = embed.power;
      cfg.seed = embed.seed;
      const int threads = embed.deterministic ? 1 : embed.threads;
      std::ostringstream body;
      body << "corpus=" << embed.corpus << " dim=" << cfg.dim << " window=" << cfg.window
           << " negatives=" << cfg.negatives << " epochs=" << cfg.epochs << " lr=" << cfg.initial_lr
           << " min_lr=" << cfg.min_lr << " power=" << cfg.unigram_power << " seed=" << cfg.seed
           << " threads=" << threads << " out=" << embed.out;
      log_config("embed", body.str());
      aw::save_embeddings(aw::train_sgns(aw::load_corpus(embed.corpus), cfg, threads), embed.out);
    } else if (cmd_linkpred->parsed()) {
      return run_evaluation(lp, !lp.outdir.empty());
    } else if (cmd_run->parsed()) {
      return run_evaluation(rn, true);
    } else if (cmd_transfer->parsed()) {
      const aw::Graph g = aw::load_edge_list(transfer.graph, transfer.directed);
      log_config("transfer", "phi=" + transfer.phi + " emb=" + transfer.emb +
                                 " graph=" + transfer.graph + " out=" + transfer.out);
      const aw::TypeMap phi = aw::load_typemap(transfer.phi);
      const aw::EmbeddingMatrix type_emb = aw::load_embeddings(transfer.emb);

      aw::TypeAssignment a;
      if (phi.kind == aw::TypeMapKind::identity) {
        aw::AttributeMatrix dummy;
        dummy.values = aw::Matrix(static_cast<std::size_t>(g.num_nodes()), 0);
        a = aw::assign_types(phi, dummy);
      } else {
        a = aw::assign_types(phi, attributes_for_typemap(phi, g, transfer.attrs_path));
      }

      const auto d = static_cast<std::size_t>(type_emb.dim());
      std::vector<double> mean_vector(d, 0.0);
      for (int r = 0; r < type_emb.vocab_size(); ++r)
        for (std::size_t c = 0; c < d; ++c)
          mean_vector[c] += type_emb.input_vectors(static_cast<std::size_t>(r), c);
      for (auto& v : mean_vector) v /= static_cast<double>(type_emb.vocab_size());

      std::set<aw::TypeId> unseen;
      for (aw::TypeId t : a.types)
        if (type_emb.row(t) < 0) unseen.insert(t);
      if (!unseen.empty()) {
        std::ostringstream list;
        for (aw::TypeId t : unseen) list << ' ' << t;
        if (transfer.strict)
          aw::fail(aw::ErrorKind::coverage, "types absent from embedding vocabulary:" + list.str());
        std::cerr << "warning: types absent from embedding vocabulary (using mean vector):"
                  << list.str() << '\n';
      }

      aw::EmbeddingMatrix node_emb;
      node_emb.token_space = aw::TokenSpace::node_ids;
      node_emb.input_vectors = aw::Matrix(static_cast<std::size_t>(g.num_nodes()), d);
      node_emb.output_vectors = aw::Matrix(static_cast<std::size_t>(g.num_nodes()), d);
      for (aw::NodeId v = 0; v < g.num_nodes(); ++v) {
        node_emb.tokens.push_back(v);
        node_emb.row_of.emplace(v, static_cast<int>(v));
        const int row = type_emb.row(a.types[static_cast<std::size_t>(v)]);
        for (std::size_t c = 0; c < d; ++c)
          node_emb.input_vectors(static_cast<std::size_t>(v), c) =
              row >= 0 ? type_emb.input_vectors(static_cast<std::size_t>(row), c) : mean_vector[c];
      }
      aw::save_embeddings(node_emb, transfer.out);
      std::cout << "nodes " << g.num_nodes() << " dim " << d << " unseen_types " << unseen.size()
                << '\n';
    }
  } catch (const aw::Error& e) {
    const int code = exit_code_for(e.kind());
    std::cerr << "error kind=" << aw::to_string(e.kind()) << " code=" << code << ": " << e.what()
              << '\n';
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error kind=internal code=1: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
