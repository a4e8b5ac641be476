#include "exrw/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "exrw/checkpoint.hpp"
#include "exrw/coherence.hpp"

namespace exrw::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RewriterKind parse_rewriter_kind(std::string_view name) {
  if (name == "identity") return RewriterKind::identity;
  if (name == "remote") return RewriterKind::remote;
  throw std::invalid_argument("unknown rewriter kind: " + std::string(name));
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("malformed config file " + path.string() + ": " + e.what());
  }
}

const fs::path& require_path(const std::optional<fs::path>& path, const char* flag) {
  if (!path) throw UsageError(std::string("missing required ") + flag);
  if (!fs::exists(*path)) throw UsageError(std::string(flag) + " path does not exist: " + path->string());
  return *path;
}

std::optional<fs::path> optional_path(const std::optional<fs::path>& path, const char* flag) {
  if (path && !fs::exists(*path)) throw UsageError(std::string(flag) + " path does not exist: " + path->string());
  return path;
}

fs::path prepare_out(const CliConfig& cfg) {
  fs::create_directories(cfg.out);
  return cfg.out;
}

std::unique_ptr<Rewriter> make_rewriter(const RewriterConfig& cfg) {
  if (cfg.kind == RewriterKind::identity) return std::make_unique<IdentityRewriter>();
  if (!cfg.endpoint) throw UsageError("remote rewriter requires --endpoint or EXRW_ENDPOINT");
  RemoteRewriterConfig remote;
  remote.endpoint = *cfg.endpoint;
  remote.retry.timeout = std::chrono::milliseconds(cfg.timeout_ms);
  remote.max_in_flight = cfg.max_in_flight;
  return std::make_unique<RemoteRewriter>(remote);
}

PolicyModels models_from(const Checkpoint& ckpt) {
  for (const char* name : {"coverage_fwd", "coverage_bwd", "coherence"}) {
    if (!ckpt.models.count(name)) throw CheckpointError(std::string("checkpoint lacks model ") + name);
  }
  return {{ckpt.models.at("coverage_fwd"), ckpt.models.at("coverage_bwd")}, {ckpt.models.at("coherence")}};
}

Checkpoint checkpoint_from(const PolicyModels& models, int dim, const ControlConfig& config) {
  Checkpoint ckpt;
  ckpt.dim = dim;
  ckpt.models = {{"coverage_fwd", models.coverage.forward},
                 {"coverage_bwd", models.coverage.backward},
                 {"coherence", models.coherence.params}};
  ckpt.config = config;
  return ckpt;
}

PolicyModels load_or_init_models(const CliConfig& cfg, int dim) {
  if (cfg.checkpoint) return models_from(load_checkpoint(*cfg.checkpoint, dim));
  Rng rng(cfg.control.seed);
  return PolicyModels::random(dim, rng);
}

// -- subcommands --------------------------------------------------------------

int cmd_train_coherence(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto train_records = load_cluster_dataset(require_path(cfg.train, "--train"));
  const auto dev_path = optional_path(cfg.dev, "--dev");
  const auto test_path = optional_path(cfg.test, "--test");
  const auto outdir = prepare_out(cfg);
  const auto provider = make_provider(cfg.embedding);

  auto train_set = build_triplets(train_records, *provider, cfg.control.seed);
  std::size_t skipped = train_set.skipped_clusters;
  std::vector<Triplet> train = std::move(train_set.triplets);
  std::vector<Triplet> dev;
  std::vector<Triplet> test;
  if (dev_path && test_path) {
    auto d = build_triplets(load_cluster_dataset(*dev_path), *provider, mix_seed(cfg.control.seed, 1));
    auto t = build_triplets(load_cluster_dataset(*test_path), *provider, mix_seed(cfg.control.seed, 2));
    skipped += d.skipped_clusters + t.skipped_clusters;
    dev = std::move(d.triplets);
    test = std::move(t.triplets);
  } else {
    Rng rng(mix_seed(cfg.control.seed, 3));
    rng.shuffle(train);
    const std::size_t n = train.size();
    const std::size_t n_dev = std::max<std::size_t>(n / 10, n >= 3 ? 1 : 0);
    const std::size_t n_test = n_dev;
    test.assign(train.end() - static_cast<std::ptrdiff_t>(n_test), train.end());
    train.resize(n - n_test);
    dev.assign(train.end() - static_cast<std::ptrdiff_t>(n_dev), train.end());
    train.resize(train.size() - n_dev);
  }
  if (skipped > 0) err << "warning: skipped " << skipped << " cluster(s) without a reference summary\n";

  Rng rng(cfg.control.seed);
  auto models = PolicyModels::random(provider->dim(), rng);
  auto result = train_coherence(models.coherence, train, dev, test, cfg.control);
  models.coherence = result.model;

  std::vector<VectorPair> positive;
  std::vector<VectorPair> incoherent;
  std::vector<VectorPair> redundant;
  for (const auto& t : train) {
    if (t.negative_kind == NegativeKind::self_pair) {
      positive.emplace_back(t.anchor, t.positive);
      redundant.emplace_back(t.anchor, t.negative);
    } else {
      incoherent.emplace_back(t.anchor, t.negative);
    }
  }
  json calibration = nullptr;
  if (!positive.empty() && !incoherent.empty()) {
    const auto cal = calibrate_thresholds(positive, incoherent, redundant);
    calibration = {{"t1", cal.thresholds.t1}, {"t2", cal.thresholds.t2}, {"ok", cal.ok},
                   {"incoherent_mean", cal.incoherent_mean}, {"positive_mean", cal.positive_mean},
                   {"redundant_mean", cal.redundant_mean}};
    if (!cal.ok) err << "warning: threshold calibration failed (t1 >= t2)\n";
  }

  write_triplets_jsonl(outdir / "triplets.jsonl", train);
  const auto& r = result.report;
  json report{{"train_triplets", train.size()},
              {"dev_triplets", dev.size()},
              {"test_triplets", test.size()},
              {"threshold", r.threshold},
              {"precision", r.test.precision},
              {"recall", r.test.recall},
              {"f1", r.test.f1},
              {"final_loss", r.epoch_loss.empty() ? 0.0 : r.epoch_loss.back()},
              {"calibration", calibration}};
  std::ofstream(outdir / "coherence_report.json") << report.dump(2) << '\n';
  save_checkpoint(outdir / "coherence.ckpt.json", checkpoint_from(models, provider->dim(), cfg.control));
  out << "coherence: P=" << r.test.precision << " R=" << r.test.recall << " F=" << r.test.f1
      << " threshold=" << r.threshold << '\n';
  return kOk;
}

int cmd_pretrain(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  const auto& train_path = require_path(cfg.train, "--train");
  require_path(cfg.checkpoint, "--checkpoint");
  const auto outdir = prepare_out(cfg);
  const auto provider = make_provider(cfg.embedding);
  auto models = load_or_init_models(cfg, provider->dim());
  const auto contexts = prepare_clusters(load_cluster_dataset(train_path), *provider);

  auto report = pretrain_policy(contexts, models, cfg.control);
  report.checkpoint_path = (outdir / "pretrain.ckpt.json").string();
  save_checkpoint(report.checkpoint_path, checkpoint_from(models, provider->dim(), cfg.control));
  std::ofstream log(outdir / "pretrain_log.jsonl");
  write_train_log(log, report);
  out << "pretrain: " << report.epochs << " epoch(s), final mean loss "
      << (report.mean_loss.empty() ? 0.0 : report.mean_loss.back()) << '\n';
  return kOk;
}

int cmd_train_rl(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  const auto& train_path = require_path(cfg.train, "--train");
  require_path(cfg.checkpoint, "--checkpoint");
  const auto outdir = prepare_out(cfg);
  const auto provider = make_provider(cfg.embedding);
  const auto rewriter = make_rewriter(cfg.rewriter);
  auto models = load_or_init_models(cfg, provider->dim());
  const auto contexts = prepare_clusters(load_cluster_dataset(train_path), *provider);

  auto report = train_rl(contexts, models, cfg.control, make_rewrite_reward(*rewriter, *provider));
  report.checkpoint_path = (outdir / "rl.ckpt.json").string();
  save_checkpoint(report.checkpoint_path, checkpoint_from(models, provider->dim(), cfg.control));
  std::ofstream log(outdir / "rl_log.jsonl");
  write_train_log(log, report);
  out << "train-rl: " << report.epochs << " epoch(s), final mean reward "
      << (report.mean_reward.empty() ? 0.0 : report.mean_reward.back()) << '\n';
  return kOk;
}

std::vector<SummaryOutput> summarize_all(const CliConfig& cfg, const std::vector<ClusterContext>& contexts,
                                         const PolicyModels& models, const Rewriter& rewriter) {
  std::vector<SummaryOutput> outputs;
  outputs.reserve(contexts.size());
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    const auto tables = PairTables::compute(models, contexts[i].vectors);
    outputs.push_back(summarize_cluster(tables, contexts[i], cfg.control, cfg.mode, mix_seed(cfg.control.seed, i),
                                        rewriter));
  }
  return outputs;
}

int cmd_summarize(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  const auto& test_path = require_path(cfg.test, "--test");
  optional_path(cfg.checkpoint, "--checkpoint");
  const auto outdir = prepare_out(cfg);
  const auto provider = make_provider(cfg.embedding);
  const auto rewriter = make_rewriter(cfg.rewriter);
  const auto models = load_or_init_models(cfg, provider->dim());
  const auto contexts = prepare_clusters(load_cluster_dataset(test_path), *provider);

  const auto outputs = summarize_all(cfg, contexts, models, *rewriter);
  std::ofstream dump(outdir / "trajectories.jsonl");
  std::ofstream summaries(outdir / "summaries.jsonl");
  for (const auto& o : outputs) {
    out << o.trajectory.cluster_id << '\t' << o.text << '\n';
    write_trajectory_jsonl(dump, o.trajectory);
    summaries << json{{"cluster_id", o.trajectory.cluster_id}, {"summary", o.text}}.dump() << '\n';
  }
  return kOk;
}

int cmd_evaluate(const CliConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto& test_path = require_path(cfg.test, "--test");
  optional_path(cfg.checkpoint, "--checkpoint");
  const auto outdir = prepare_out(cfg);
  const auto provider = make_provider(cfg.embedding);
  const auto rewriter = make_rewriter(cfg.rewriter);
  const auto models = load_or_init_models(cfg, provider->dim());
  const auto contexts = prepare_clusters(load_cluster_dataset(test_path), *provider);

  const auto outputs = summarize_all(cfg, contexts, models, *rewriter);
  std::vector<ClusterEvaluation> rows;
  for (std::size_t i = 0; i < contexts.size(); ++i) {
    if (!contexts[i].reference) {
      err << "warning: cluster " << contexts[i].cluster_id << " has no reference summary; skipped\n";
      continue;
    }
    rows.push_back(evaluate_summary(contexts[i].cluster_id, outputs[i].text, *contexts[i].reference, *provider));
  }
  const auto table = evaluation_table(rows);
  std::ofstream(outdir / "eval_report.json") << evaluation_report(rows).dump(2) << '\n';
  std::ofstream(outdir / "eval_table.txt") << table;
  out << table;
  return kOk;
}

int cmd_grid_search(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  const auto& dev_path = require_path(cfg.dev, "--dev");
  optional_path(cfg.checkpoint, "--checkpoint");
  const auto outdir = prepare_out(cfg);
  const auto provider = make_provider(cfg.embedding);
  const auto rewriter = make_rewriter(cfg.rewriter);
  const auto models = load_or_init_models(cfg, provider->dim());
  const auto contexts = prepare_clusters(load_cluster_dataset(dev_path), *provider);

  GridSpec grid = cfg.grid;
  auto fill = [](std::vector<double>& dim, double fallback) {
    if (dim.empty()) dim.push_back(fallback);
  };
  fill(grid.cl1, cfg.control.cl1);
  fill(grid.cl2, cfg.control.cl2);
  fill(grid.k, cfg.control.k);
  fill(grid.c, cfg.control.c);
  fill(grid.lambda, cfg.control.lambda);

  const auto result = grid_search(contexts, grid, models, cfg.control, *rewriter);
  json rows = json::array();
  for (const auto& row : result.table) {
    rows.push_back({{"cl1", row.config.cl1}, {"cl2", row.config.cl2}, {"k", row.config.k}, {"c", row.config.c},
                    {"lambda", row.config.lambda}, {"objective", row.objective}});
  }
  json report{{"table", rows}, {"best", to_json(result.best)}, {"best_objective", result.best_objective}};
  std::ofstream(outdir / "grid.json") << report.dump(2) << '\n';
  out << "best: cl1=" << result.best.cl1 << " cl2=" << result.best.cl2 << " k=" << result.best.k
      << " c=" << result.best.c << " lambda=" << result.best.lambda << " objective=" << result.best_objective << '\n';
  return kOk;
}

int cmd_embed_cache(const CliConfig& cfg, std::ostream& out, std::ostream&) {
  std::vector<fs::path> inputs;
  for (const auto& [path, flag] : {std::pair{&cfg.train, "--train"}, {&cfg.dev, "--dev"}, {&cfg.test, "--test"}}) {
    if (*path) inputs.push_back(require_path(*path, flag));
  }
  if (inputs.empty()) throw UsageError("embed-cache needs at least one of --train, --dev, --test");
  const auto outdir = prepare_out(cfg);
  const auto provider = make_provider(cfg.embedding);

  std::vector<std::string> texts;
  std::vector<std::string> keys;
  std::set<std::string> seen;
  auto add = [&](const std::string& text) {
    auto key = content_hash(text);
    if (seen.insert(key).second) {
      texts.push_back(normalize_text(text));
      keys.push_back(std::move(key));
    }
  };
  for (const auto& path : inputs) {
    for (const auto& record : load_cluster_dataset(path)) {
      for (const auto& s : record.sentences) add(s.text);
      if (record.reference_summary) {
        for (const auto& s : split_sentences(*record.reference_summary)) add(s);
      }
    }
  }
  const auto vectors = provider->embed(texts);
  std::vector<std::pair<std::string, SentenceVector>> entries;
  entries.reserve(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) entries.emplace_back(keys[i], vectors[i]);
  const auto target = outdir / "embcache.jsonl";
  write_embedding_cache(target, provider->dim(), entries);
  out << "embed-cache: wrote " << entries.size() << " vector(s) to " << target.string() << '\n';
  return kOk;
}

std::vector<double> parse_list(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

CliConfig config_from_json(const json& j) {
  CliConfig cfg;
  auto path = [&](const char* key, std::optional<fs::path>& field) {
    if (auto it = j.find(key); it != j.end() && !it->is_null()) field = it->get<std::string>();
  };
  path("train", cfg.train);
  path("dev", cfg.dev);
  path("test", cfg.test);
  path("checkpoint", cfg.checkpoint);
  if (auto it = j.find("out"); it != j.end()) cfg.out = it->get<std::string>();
  if (auto it = j.find("mode"); it != j.end()) cfg.mode = parse_extraction_mode(it->get<std::string>());
  if (auto it = j.find("control"); it != j.end()) cfg.control = control_from_json(*it);
  if (auto it = j.find("embedding"); it != j.end()) {
    const auto& e = *it;
    if (e.contains("kind")) cfg.embedding.kind = parse_provider_kind(e.at("kind").get<std::string>());
    if (e.contains("dim")) cfg.embedding.dim = e.at("dim").get<int>();
    if (e.contains("cache_path")) cfg.embedding.cache_path = e.at("cache_path").get<std::string>();
    if (e.contains("endpoint_url")) cfg.embedding.endpoint_url = e.at("endpoint_url").get<std::string>();
    if (e.contains("timeout_ms")) cfg.embedding.timeout_ms = e.at("timeout_ms").get<int>();
    if (e.contains("max_batch")) cfg.embedding.max_batch = e.at("max_batch").get<int>();
  }
  if (auto it = j.find("rewriter"); it != j.end()) {
    const auto& r = *it;
    if (r.contains("kind")) cfg.rewriter.kind = parse_rewriter_kind(r.at("kind").get<std::string>());
    if (r.contains("endpoint")) cfg.rewriter.endpoint = r.at("endpoint").get<std::string>();
    if (r.contains("timeout_ms")) cfg.rewriter.timeout_ms = r.at("timeout_ms").get<int>();
    if (r.contains("max_in_flight")) cfg.rewriter.max_in_flight = r.at("max_in_flight").get<int>();
  }
  if (auto it = j.find("grid"); it != j.end()) {
    const auto& g = *it;
    if (g.contains("cl1")) cfg.grid.cl1 = parse_list(g.at("cl1"));
    if (g.contains("cl2")) cfg.grid.cl2 = parse_list(g.at("cl2"));
    if (g.contains("k")) cfg.grid.k = parse_list(g.at("k"));
    if (g.contains("c")) cfg.grid.c = parse_list(g.at("c"));
    if (g.contains("lambda")) cfg.grid.lambda = parse_list(g.at("lambda"));
  }
  return cfg;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"exrw: controllable extract-rewrite-reward summarization engine"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::uint64_t seed = 0;
  double cl1 = 0, cl2 = 0, k = 0, c = 0, lambda = 0;
  int dim = 0;
  std::string embedder, rewriter, endpoint, out_dir, mode, train, dev, test, checkpoint, cache;
  std::vector<double> grid_cl1, grid_cl2, grid_k, grid_c, grid_lambda;

  auto* o_config = app.add_option("--config", config_path, "JSON config file");
  auto* o_seed = app.add_option("--seed", seed, "Random seed");
  auto* o_cl1 = app.add_option("--cl1", cl1, "Coverage control weight");
  auto* o_cl2 = app.add_option("--cl2", cl2, "Coherence control weight");
  auto* o_k = app.add_option("--k", k, "Sentence budget offset");
  auto* o_c = app.add_option("--c", c, "Sentence budget variance scale");
  auto* o_lambda = app.add_option("--lambda", lambda, "Regression-term weight");
  auto* o_embedder = app.add_option("--embedder", embedder, "cache | remote | fallback")
                         ->check(CLI::IsMember({"cache", "remote", "fallback"}));
  auto* o_rewriter =
      app.add_option("--rewriter", rewriter, "identity | remote")->check(CLI::IsMember({"identity", "remote"}));
  auto* o_endpoint = app.add_option("--endpoint", endpoint, "Sidecar base URL (default $EXRW_ENDPOINT)");
  auto* o_out = app.add_option("--out", out_dir, "Output directory");
  auto* o_mode = app.add_option("--mode", mode, "greedy | sample")->check(CLI::IsMember({"greedy", "sample"}));
  auto* o_train = app.add_option("--train", train, "Training dataset (JSONL)");
  auto* o_dev = app.add_option("--dev", dev, "Development dataset (JSONL)");
  auto* o_test = app.add_option("--test", test, "Test dataset (JSONL)");
  auto* o_ckpt = app.add_option("--checkpoint", checkpoint, "Model checkpoint to load");
  auto* o_dim = app.add_option("--dim", dim, "Embedding dimension")->check(CLI::PositiveNumber);
  auto* o_cache = app.add_option("--cache", cache, "Embedding cache file for --embedder cache");

  app.add_subcommand("train-coherence", "Pre-train the coherence scorer on reference-summary triplets");
  app.add_subcommand("pretrain", "Fit the coverage scorers with the regression objective");
  app.add_subcommand("train-rl", "Train the extraction policy with REINFORCE");
  app.add_subcommand("summarize", "Print one summary per test cluster");
  app.add_subcommand("evaluate", "Summarize and score test clusters with ROUGE-1/2/L");
  auto* grid_cmd = app.add_subcommand("grid-search", "Search cl1, cl2, k, c, lambda on the dev set");
  app.add_subcommand("embed-cache", "Precompute an embedding cache for the given datasets");
  grid_cmd->add_option("--grid-cl1", grid_cl1)->delimiter(',');
  grid_cmd->add_option("--grid-cl2", grid_cl2)->delimiter(',');
  grid_cmd->add_option("--grid-k", grid_k)->delimiter(',');
  grid_cmd->add_option("--grid-c", grid_c)->delimiter(',');
  grid_cmd->add_option("--grid-lambda", grid_lambda)->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    json file_json = json::object();
    if (*o_config) file_json = read_json_file(config_path);
    CliConfig cfg;
    try {
      cfg = config_from_json(file_json);
    } catch (const std::exception& e) {
      throw UsageError(std::string("invalid config file: ") + e.what());
    }

    if (const char* env = std::getenv("EXRW_ENDPOINT"); env && *env) {
      if (!cfg.rewriter.endpoint) cfg.rewriter.endpoint = env;
      if (!cfg.embedding.endpoint_url) cfg.embedding.endpoint_url = env;
    }

    auto in_file = [&](const char* pointer) { return file_json.contains(json::json_pointer(pointer)); };
    auto override = [&](CLI::Option* opt, const char* pointer, auto&& apply) {
      if (!*opt) return;
      if (in_file(pointer)) err << "warning: " << opt->get_name() << " overrides config file value\n";
      apply();
    };
    override(o_seed, "/control/seed", [&] { cfg.control.seed = seed; });
    override(o_cl1, "/control/cl1", [&] { cfg.control.cl1 = cl1; });
    override(o_cl2, "/control/cl2", [&] { cfg.control.cl2 = cl2; });
    override(o_k, "/control/k", [&] { cfg.control.k = k; });
    override(o_c, "/control/c", [&] { cfg.control.c = c; });
    override(o_lambda, "/control/lambda", [&] { cfg.control.lambda = lambda; });
    override(o_embedder, "/embedding/kind", [&] { cfg.embedding.kind = parse_provider_kind(embedder); });
    override(o_rewriter, "/rewriter/kind", [&] { cfg.rewriter.kind = parse_rewriter_kind(rewriter); });
    override(o_endpoint, "/rewriter/endpoint", [&] {
      cfg.rewriter.endpoint = endpoint;
      cfg.embedding.endpoint_url = endpoint;
    });
    override(o_out, "/out", [&] { cfg.out = out_dir; });
    override(o_mode, "/mode", [&] { cfg.mode = parse_extraction_mode(mode); });
    override(o_train, "/train", [&] { cfg.train = train; });
    override(o_dev, "/dev", [&] { cfg.dev = dev; });
    override(o_test, "/test", [&] { cfg.test = test; });
    override(o_ckpt, "/checkpoint", [&] { cfg.checkpoint = checkpoint; });
    override(o_dim, "/embedding/dim", [&] { cfg.embedding.dim = dim; });
    override(o_cache, "/embedding/cache_path", [&] { cfg.embedding.cache_path = cache; });
    if (!grid_cl1.empty()) cfg.grid.cl1 = grid_cl1;
    if (!grid_cl2.empty()) cfg.grid.cl2 = grid_cl2;
    if (!grid_k.empty()) cfg.grid.k = grid_k;
    if (!grid_c.empty()) cfg.grid.c = grid_c;
    if (!grid_lambda.empty()) cfg.grid.lambda = grid_lambda;

    try {
      cfg.control.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (cfg.embedding.kind == ProviderKind::cache) require_path(cfg.embedding.cache_path, "--cache");

    if (name == "train-coherence") return cmd_train_coherence(cfg, out, err);
    if (name == "pretrain") return cmd_pretrain(cfg, out, err);
    if (name == "train-rl") return cmd_train_rl(cfg, out, err);
    if (name == "summarize") return cmd_summarize(cfg, out, err);
    if (name == "evaluate") return cmd_evaluate(cfg, out, err);
    if (name == "grid-search") return cmd_grid_search(cfg, out, err);
    if (name == "embed-cache") return cmd_embed_cache(cfg, out, err);
    throw UsageError("unknown subcommand " + name);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace exrw::cli
