// jpec: command-line front end for dataset generation, splitting, training,
// retrieval and evaluation. Every run writes manifest.json into its --out
// directory.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "jpec/error.hpp"
#include "jpec/evalkit.hpp"
#include "jpec/io.hpp"
#include "jpec/manifest.hpp"
#include "jpec/model.hpp"
#include "jpec/parallel.hpp"
#include "jpec/sampling.hpp"
#include "jpec/synth.hpp"

namespace fs = std::filesystem;
using namespace jpec;

namespace {

struct GraphArgs {
  std::string nodes;
  std::string supply;
  std::string competitors;
  bool header = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--nodes", nodes, "Node TSV: id, attributes...")->required()->check(CLI::ExistingFile);
    cmd->add_option("--supply", supply, "Supply TSV: src_id, dst_id")->required()->check(CLI::ExistingFile);
    cmd->add_option("--competitors", competitors, "Competitor TSV: id_a, id_b")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_flag("--header", header, "Skip the first non-comment line of each TSV");
  }

  io::LoadedGraph load(RunManifest& manifest) const {
    manifest.add_input(nodes);
    manifest.add_input(supply);
    manifest.add_input(competitors);
    auto loaded = io::load_graph(nodes, supply, competitors, {header});
    if (loaded.fallback_features) {
      manifest.flags.push_back("fallback_degree_bucket_features");
      manifest.warnings.push_back("node file has no attributes; using one-hot degree-bucket features");
    }
    return loaded;
  }
};

struct ConfigArgs {
  std::string config_file;
  std::vector<std::string> overrides;
  std::optional<std::size_t> epochs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> norm_mode;
  std::optional<double> learning_rate;
  std::optional<double> margin;
  std::optional<double> beta;
  std::optional<double> lambda;
  std::optional<std::string> dims;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_file, "key=value config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", overrides, "Override a config entry (key=value), repeatable");
    cmd->add_option("--epochs", epochs, "Training epochs");
    cmd->add_option("--seed", seed, "Seed for initialization and negative sampling");
    cmd->add_option("--norm-mode", norm_mode, "row (directed GCN) or symmetric (GCN)");
    cmd->add_option("--learning-rate", learning_rate, "Gradient-descent step size");
    cmd->add_option("--margin", margin, "Hinge margin m");
    cmd->add_option("--beta", beta, "Weight of the reconstruction loss");
    cmd->add_option("--lambda", lambda, "Weight of the squared-weight regularizer");
    cmd->add_option("--dims", dims, "Encoder widths, e.g. 16,256,64");
  }

  JpecConfig resolve(std::size_t attribute_dim, RunManifest& manifest) const {
    JpecConfig cfg = default_config(attribute_dim);
    if (!config_file.empty()) {
      manifest.add_input(config_file);
      cfg = io::load_config(config_file, cfg);
    }
    for (const auto& entry : overrides) {
      const auto eq = entry.find('=');
      if (eq == std::string::npos) throw Error("--set expects key=value, got '" + entry + "'");
      io::apply_config_entry(cfg, entry.substr(0, eq), entry.substr(eq + 1));
    }
    if (epochs) cfg.epochs = *epochs;
    if (seed) cfg.seed = *seed;
    if (norm_mode) cfg.norm_mode = parse_norm_mode(*norm_mode);
    if (learning_rate) cfg.learning_rate = *learning_rate;
    if (margin) cfg.margin = *margin;
    if (beta) cfg.beta = *beta;
    if (lambda) cfg.lambda = *lambda;
    if (dims) io::apply_config_entry(cfg, "encoder_dims", *dims);
    validate_config(cfg);
    if (cfg.attribute_dim() != attribute_dim) {
      throw Error("encoder_dims starts at " + std::to_string(cfg.attribute_dim()) + " but the graph has " +
                  std::to_string(attribute_dim) + " attribute columns");
    }
    return cfg;
  }
};

nlohmann::json config_json(const JpecConfig& cfg) {
  nlohmann::json j;
  std::istringstream lines(io::format_config(cfg));
  for (std::string line; std::getline(lines, line);) {
    const auto eq = line.find('=');
    j[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return j;
}

std::vector<std::size_t> parse_ks(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ',');) {
    try {
      ks.push_back(static_cast<std::size_t>(std::stoul(part)));
    } catch (const std::exception&) {
      throw Error("--ks expects comma-separated integers, got '" + text + "'");
    }
    if (ks.back() == 0) throw Error("--ks values must be >= 1");
  }
  if (ks.empty()) throw Error("--ks is empty");
  return ks;
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

// Runs `body` with staging and manifest bookkeeping shared by all commands.
int run_command(const std::string& name, const std::string& out_dir, int argc, char** argv,
                const std::function<void(RunManifest&, StagedOutputs&, const fs::path&)>& body) {
  const auto start = std::chrono::steady_clock::now();
  RunManifest manifest;
  manifest.command = name;
  manifest.argv.assign(argv, argv + argc);
  const fs::path out(out_dir);
  int status = 0;
  std::string error;
  try {
    fs::create_directories(out);
    StagedOutputs staged;
    body(manifest, staged, out);
    staged.commit(manifest);
  } catch (const std::exception& e) {
    error = e.what();
    status = 1;
    std::cerr << "jpec " << name << ": error: " << error << '\n';
  }
  manifest.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json j = manifest.to_json();
  j["status"] = status == 0 ? "ok" : "error";
  if (status != 0) j["error"] = error;
  j["started_at"] = timestamp();
  j["threads"] = worker_count();
  std::error_code ec;
  if (fs::is_directory(out, ec)) {
    try {
      io::write_file(out / "manifest.json", j.dump(2) + "\n");
    } catch (const std::exception& e) {
      std::cerr << "jpec " << name << ": cannot write manifest: " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"JPEC competitor-retrieval engine"};
  app.require_subcommand(1);
  std::string out_dir;

  // generate -----------------------------------------------------------------
  SynthSpec synth_spec;
  auto* gen = app.add_subcommand("generate", "Write a planted-industry synthetic dataset");
  gen->add_option("--n", synth_spec.n, "Node count")->capture_default_str();
  gen->add_option("--industries", synth_spec.industries, "Industry count")->capture_default_str();
  gen->add_option("--attr-dim", synth_spec.attr_dim, "Attribute dimension")->capture_default_str();
  gen->add_option("--attr-noise", synth_spec.attr_noise, "Gaussian attribute noise scale")->capture_default_str();
  gen->add_option("--intra-prob", synth_spec.intra_competitor_prob, "Within-industry competitor probability")
      ->capture_default_str();
  gen->add_option("--supply-prob", synth_spec.supply_edge_prob, "Peak directed supply-edge probability")
      ->capture_default_str();
  gen->add_option("--seed", synth_spec.seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->required();

  // split --------------------------------------------------------------------
  GraphArgs split_graph;
  std::string split_kind = "regular";
  double split_fraction = 0.2;
  std::size_t min_competitors = 5;
  std::uint64_t split_seed = 0;
  auto* split = app.add_subcommand("split", "Hold out competitor edges (regular) or nodes (zero_shot)");
  split_graph.attach(split);
  split->add_option("--kind", split_kind, "regular or zero_shot")->capture_default_str();
  split->add_option("--fraction", split_fraction, "Edge (regular) or node (zero_shot) fraction")
      ->capture_default_str();
  split->add_option("--min-competitors", min_competitors, "Minimum held-out competitors per query")
      ->capture_default_str();
  split->add_option("--seed", split_seed, "Split seed")->capture_default_str();
  split->add_option("--out", out_dir, "Output directory")->required();

  // train --------------------------------------------------------------------
  GraphArgs train_graph;
  ConfigArgs train_cfg;
  bool negatives_all_nodes = false;
  auto* train_cmd = app.add_subcommand("train", "Train a JPEC model");
  train_graph.attach(train_cmd);
  train_cfg.attach(train_cmd);
  train_cmd->add_flag("--negatives-all-nodes", negatives_all_nodes,
                      "Sample negatives over all nodes instead of nodes with competitors");
  train_cmd->add_option("--out", out_dir, "Output directory")->required();

  // rank ---------------------------------------------------------------------
  std::string rank_embeddings;
  std::vector<std::string> rank_queries;
  std::size_t rank_top_k = 10;
  std::string rank_score = "neg_sq_euclidean";
  std::string rank_filter;
  auto* rank = app.add_subcommand("rank", "Write the top-K competitor list for query ids");
  rank->add_option("--embeddings", rank_embeddings, "Embedding file from train")
      ->required()
      ->check(CLI::ExistingFile);
  rank->add_option("--query", rank_queries, "Query node id, repeatable")->required();
  rank->add_option("--top-k", rank_top_k, "List length")->capture_default_str();
  rank->add_option("--score", rank_score, "neg_sq_euclidean or cosine")->capture_default_str();
  rank->add_option("--exclude-competitors", rank_filter, "Competitor TSV whose known pairs are excluded")
      ->check(CLI::ExistingFile);
  rank->add_option("--out", out_dir, "Output directory")->required();

  // evaluate -----------------------------------------------------------------
  std::string eval_embeddings, eval_queries, eval_train_comp, eval_ks = "1,5,10,50", eval_score = "neg_sq_euclidean";
  bool eval_unfiltered = false;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Score a split's queries with Hits@K, MRR and MAP");
  evaluate_cmd->add_option("--embeddings", eval_embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--queries", eval_queries, "queries.tsv from split")->required()->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--train-competitors", eval_train_comp, "train_competitors.tsv from split")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate_cmd->add_option("--ks", eval_ks, "Comma-separated K values")->capture_default_str();
  evaluate_cmd->add_option("--score", eval_score, "neg_sq_euclidean or cosine")->capture_default_str();
  evaluate_cmd->add_flag("--unfiltered", eval_unfiltered, "Keep training competitors in the candidate pool");
  evaluate_cmd->add_option("--out", out_dir, "Output directory")->required();

  // gradcheck ----------------------------------------------------------------
  std::size_t gc_nodes = 6;
  std::uint64_t gc_seed = 1;
  double gc_eps = 1e-5;
  double gc_tol = 1e-4;
  std::string gc_config;
  auto* gradcheck = app.add_subcommand("gradcheck", "Compare analytic gradients with central differences");
  gradcheck->add_option("--nodes", gc_nodes, "Synthetic node count")->capture_default_str();
  gradcheck->add_option("--seed", gc_seed, "Seed")->capture_default_str();
  gradcheck->add_option("--eps", gc_eps, "Finite-difference step")->capture_default_str();
  gradcheck->add_option("--tolerance", gc_tol, "Maximum relative error")->capture_default_str();
  gradcheck->add_option("--config", gc_config, "key=value config file")->check(CLI::ExistingFile);
  gradcheck->add_option("--out", out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    return run_command("generate", out_dir, argc, argv, [&](RunManifest& m, StagedOutputs& staged, const fs::path& out) {
      const SynthGraph s = generate(synth_spec);
      m.seeds["generate"] = synth_spec.seed;
      m.config = {{"n", synth_spec.n},
                  {"industries", synth_spec.industries},
                  {"attr_dim", synth_spec.attr_dim},
                  {"attr_noise", synth_spec.attr_noise},
                  {"intra_competitor_prob", synth_spec.intra_competitor_prob},
                  {"supply_edge_prob", synth_spec.supply_edge_prob}};
      io::save_graph(s.graph, staged.stage(out / "nodes.tsv"), staged.stage(out / "supply.tsv"),
                     staged.stage(out / "competitors.tsv"));
      std::string industries;
      for (std::size_t v = 0; v < s.graph.n; ++v) {
        industries += s.graph.label(v) + '\t' + std::to_string(s.industry[v]) + '\n';
      }
      io::write_file(staged.stage(out / "industries.tsv"), industries);
      io::save_embeddings(oracle_embeddings(s.industry, synth_spec.industries), s.graph.node_labels, synth_spec.seed,
                          staged.stage(out / "oracle_embeddings.bin"));
      std::cout << "generated " << s.graph.n << " nodes, " << s.graph.supply_edges.size() << " supply edges, "
                << s.graph.competitor_edges.size() << " competitor edges\n";
    });
  }

  if (split->parsed()) {
    return run_command("split", out_dir, argc, argv, [&](RunManifest& m, StagedOutputs& staged, const fs::path& out) {
      const auto loaded = split_graph.load(m);
      const SplitKind kind = parse_split_kind(split_kind);
      m.seeds["split"] = split_seed;
      m.config = {{"kind", to_string(kind)}, {"fraction", split_fraction}, {"min_competitors", min_competitors}};
      const SplitResult result = kind == SplitKind::regular
                                     ? make_regular_split(loaded.graph, split_fraction, min_competitors, split_seed)
                                     : make_zero_shot_split(loaded.graph, split_fraction, min_competitors, split_seed);
      if (auto problem = check_split(loaded.graph, result)) throw Error("split invariant violated: " + *problem);
      const CompanyGraph& g = result.train_graph;
      io::save_pairs(g.competitor_edges, g, staged.stage(out / "train_competitors.tsv"));
      io::save_pairs(result.removed_edges, g, staged.stage(out / "removed_competitors.tsv"));
      io::save_queries(result.queries, g, staged.stage(out / "queries.tsv"));
      std::cout << to_string(kind) << " split: " << result.removed_edges.size() << " edges held out, "
                << result.queries.size() << " queries\n";
    });
  }

  if (train_cmd->parsed()) {
    return run_command("train", out_dir, argc, argv, [&](RunManifest& m, StagedOutputs& staged, const fs::path& out) {
      const auto loaded = train_graph.load(m);
      const CompanyGraph& g = loaded.graph;
      const JpecConfig cfg = train_cfg.resolve(g.attributes.cols(), m);
      m.config = config_json(cfg);
      m.config["negatives_all_nodes"] = negatives_all_nodes;
      m.seeds["train"] = cfg.seed;
      m.seeds["negatives"] = cfg.seed;
      const auto negatives = sample_negatives(g, {cfg.negative_ratio, cfg.seed, !negatives_all_nodes});
      const TrainResult result = train(g, negatives, cfg);
      io::save_model(result.model, staged.stage(out / "model.bin"));
      io::save_train_report(result.report, staged.stage(out / "train_report.tsv"));
      io::save_embeddings(embed(result.model, g), g.node_labels, cfg.seed, staged.stage(out / "embeddings.bin"));
      std::vector<double> seconds;
      for (const auto& e : result.report.epochs) seconds.push_back(e.seconds);
      m.config["epoch_wall_clock_seconds"] = seconds;
      if (result.report.final_loss) {
        std::cout << "trained " << cfg.epochs << " epochs: total loss " << result.report.epochs.front().loss.total
                  << " -> " << result.report.final_loss->total << '\n';
      } else {
        std::cout << "epochs=0: wrote the initialized model\n";
      }
    });
  }

  if (rank->parsed()) {
    return run_command("rank", out_dir, argc, argv, [&](RunManifest& m, StagedOutputs& staged, const fs::path& out) {
      m.add_input(rank_embeddings);
      const io::EmbeddingFile emb = io::load_embeddings(rank_embeddings);
      m.warnings.insert(m.warnings.end(), emb.warnings.begin(), emb.warnings.end());
      std::map<std::string, std::size_t> ids;
      for (std::size_t v = 0; v < emb.ids.size(); ++v) ids.emplace(emb.ids[v], v);
      std::vector<std::vector<std::size_t>> known(emb.ids.size());
      if (!rank_filter.empty()) {
        m.add_input(rank_filter);
        for (const auto& e : io::load_competitors(rank_filter, ids)) {
          known[e.first].push_back(e.second);
          known[e.second].push_back(e.first);
        }
      }
      const ScoreMode score = parse_score_mode(rank_score);
      m.config = {{"top_k", rank_top_k}, {"score", to_string(score)}, {"queries", rank_queries}};
      std::vector<RankedList> lists;
      for (const auto& q : rank_queries) {
        const auto it = ids.find(q);
        if (it == ids.end()) throw Error("unknown query id '" + q + "'");
        lists.push_back(rank_candidates(emb.embeddings, it->second, {}, score, known[it->second]));
      }
      io::save_ranked(lists, emb.ids, rank_top_k, staged.stage(out / "ranked.tsv"));
      std::cout << "ranked " << lists.size() << " queries\n";
    });
  }

  if (evaluate_cmd->parsed()) {
    return run_command("evaluate", out_dir, argc, argv, [&](RunManifest& m, StagedOutputs& staged, const fs::path& out) {
      m.add_input(eval_embeddings);
      m.add_input(eval_queries);
      m.add_input(eval_train_comp);
      const io::EmbeddingFile emb = io::load_embeddings(eval_embeddings);
      m.warnings.insert(m.warnings.end(), emb.warnings.begin(), emb.warnings.end());
      CompanyGraph ids_only;
      ids_only.n = emb.ids.size();
      ids_only.node_labels = emb.ids;
      const auto ids = io::id_index(ids_only);
      const QuerySet queries = io::load_queries(eval_queries, ids);
      const auto train_comp = io::load_competitors(eval_train_comp, ids);
      const auto ks = parse_ks(eval_ks);
      const ScoreMode score = parse_score_mode(eval_score);
      m.config = {{"ks", ks}, {"score", to_string(score)}, {"filtered", !eval_unfiltered}};
      const MetricReport report = evaluate(emb.embeddings, train_comp, queries, ks, score, !eval_unfiltered);
      io::save_metric_report(report, staged.stage(out / "metrics.tsv"));
      io::save_per_query(report, ids_only, staged.stage(out / "per_query.tsv"));
      const std::string summary = io::metric_summary(report);
      io::write_file(staged.stage(out / "summary.txt"), summary);
      std::cout << summary;
    });
  }

  if (gradcheck->parsed()) {
    int verdict = 0;
    const int status =
        run_command("gradcheck", out_dir, argc, argv, [&](RunManifest& m, StagedOutputs& staged, const fs::path& out) {
          SynthSpec spec;
          spec.n = gc_nodes;
          spec.industries = 2;
          spec.attr_dim = 4;
          spec.attr_noise = 0.5;
          spec.intra_competitor_prob = 1.0;
          spec.supply_edge_prob = 0.6;
          spec.seed = gc_seed;
          const SynthGraph s = generate(spec);
          JpecConfig cfg = default_config(spec.attr_dim);
          cfg.encoder_dims = {spec.attr_dim, 5, 3};
          cfg.encoder_activations = {Activation::tanh, Activation::identity};
          cfg.decoder_activations = {Activation::tanh, Activation::identity};
          cfg.lambda = 0.01;
          cfg.seed = gc_seed;
          if (!gc_config.empty()) {
            m.add_input(gc_config);
            cfg = io::load_config(gc_config, cfg);
          }
          validate_config(cfg);
          m.config = config_json(cfg);
          m.config["eps"] = gc_eps;
          m.config["tolerance"] = gc_tol;
          m.seeds["gradcheck"] = gc_seed;
          const auto negatives = sample_negatives(s.graph, {1.0, gc_seed, false});
          const Problem problem = make_problem(s.graph, negatives, cfg.norm_mode);
          const JpecModel model = JpecModel::initialize(cfg);
          const GradCheckResult result = gradient_check(model, problem, gc_eps);
          const bool pass = result.max_relative_error < gc_tol;
          std::ostringstream line;
          line << "max relative error: " << result.max_relative_error << " over " << result.parameters
               << " parameters (tolerance " << gc_tol << "): " << (pass ? "PASS" : "FAIL") << '\n';
          io::write_file(staged.stage(out / "gradcheck.txt"), line.str());
          std::cout << line.str();
          verdict = pass ? 0 : 1;
        });
    return status != 0 ? status : verdict;
  }
  return 0;
}
