// Command-line pipeline around the kgwalk library: graph ingestion, walk
// extraction, corpus transforms, skip-gram training, and node-classification
// evaluation. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "kgwalk/community.hpp"
#include "kgwalk/corpus.hpp"
#include "kgwalk/embedding.hpp"
#include "kgwalk/evaluation.hpp"
#include "kgwalk/rdf_graph.hpp"
#include "kgwalk/transforms.hpp"
#include "kgwalk/util.hpp"
#include "kgwalk/walks.hpp"
#include "kgwalk/wl.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace kgwalk;

namespace {

int default_workers() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

struct GraphOptions {
  std::string graph_path;
  std::string citations_path;
  std::string leak_list_path;
  std::string has_word_iri = "hasWord";
  std::string cites_iri = "cites";

  void attach(CLI::App* cmd) {
    auto* g = cmd->add_option("--graph", graph_path, "N-Triples input (optionally gzipped)");
    auto* c = cmd->add_option("--citations", citations_path,
                              "citation-network TSV input (paper, word:weight list, cited list)");
    g->excludes(c);
    cmd->add_option("--leak-list", leak_list_path,
                    "file of predicate IRIs to strip before building the graph");
    cmd->add_option("--has-word-iri", has_word_iri, "predicate used for word triples")
        ->capture_default_str();
    cmd->add_option("--cites-iri", cites_iri, "predicate used for citation triples")
        ->capture_default_str();
  }

  KnowledgeGraph load() const {
    std::vector<Triple> triples;
    if (!citations_path.empty()) {
      std::istringstream in(read_file(citations_path));
      triples = citation_triples(parse_citation_network(in), CitationSchema{has_word_iri, cites_iri});
    } else if (!graph_path.empty()) {
      triples = parse_ntriples_text(read_file(graph_path));
    } else {
      throw CLI::ValidationError("either --graph or --citations is required");
    }
    if (!leak_list_path.empty()) {
      std::istringstream in(read_file(leak_list_path));
      triples = remove_leak_triples(std::move(triples), load_predicate_list(in));
    }
    return build_graph(triples);
  }
};

struct RootOptions {
  std::string split_path;
  std::string roots_path;

  void attach(CLI::App* cmd) {
    cmd->add_option("--split", split_path,
                    "split TSV (entity, class, train|test); its entities become the walk roots");
    cmd->add_option("--roots-file", roots_path, "newline-separated entity labels to use as roots");
  }

  std::vector<VertexId> resolve(const KnowledgeGraph& g) const {
    std::vector<std::string> labels;
    if (!roots_path.empty()) {
      for (std::string& line : split(read_file(roots_path), '\n')) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) labels.push_back(unescape_token(line));
      }
    } else if (!split_path.empty()) {
      LabeledSplit split = load_split_file(split_path);
      std::unordered_set<std::string> seen;
      for (const auto& [entity, cls] : split.train) {
        if (seen.insert(entity).second) labels.push_back(entity);
      }
      for (const auto& [entity, cls] : split.test) {
        if (seen.insert(entity).second) labels.push_back(entity);
      }
    } else {
      return g.entities();
    }
    std::vector<VertexId> roots;
    roots.reserve(labels.size());
    for (const std::string& label : labels) {
      auto id = g.find(VertexKind::Entity, label);
      if (!id) throw Error("root entity not in graph: " + label);
      roots.push_back(*id);
    }
    return roots;
  }
};

struct ExtractOptions {
  std::string strategy = "random";
  int depth = 4;
  std::uint32_t max_walks = 0;  // 0 = exhaustive
  double resolution = 1.0;
  double hop_prob = 0.1;
  double sample_prob = 1.0;
  int louvain_restarts = 10;
  std::string partition_path;
  bool no_partition_cache = false;
  int wl_iterations = 4;
  bool wl_relabel_roots = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--strategy", strategy, "walk strategy: random, community, or wl")
        ->check(CLI::IsMember({"random", "community", "wl"}))
        ->capture_default_str();
    cmd->add_option("--depth", depth, "walk depth in edge traversals (depth d = d+1 tokens)")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    cmd->add_option("--max-walks", max_walks,
                    "sample at most this many walks per root (0 = exhaustive)");
    cmd->add_option("--resolution", resolution, "Louvain resolution")->capture_default_str();
    cmd->add_option("--hop-prob", hop_prob, "community teleport probability")
        ->capture_default_str();
    cmd->add_option("--sample-prob", sample_prob,
                    "per-neighbour keep probability of the community strategy")
        ->capture_default_str();
    cmd->add_option("--louvain-restarts", louvain_restarts, "Louvain restarts (best kept)")
        ->capture_default_str();
    cmd->add_option("--partition", partition_path, "use this partition TSV instead of Louvain");
    cmd->add_flag("--no-partition-cache", no_partition_cache,
                  "always recompute the community partition");
    cmd->add_option("--wl-iterations", wl_iterations, "relabelling iterations for --strategy wl")
        ->capture_default_str();
    cmd->add_flag("--wl-relabel-roots", wl_relabel_roots,
                  "relabel walk roots too in wl corpora");
  }
};

CommunityPartition obtain_partition(const KnowledgeGraph& g, const ExtractOptions& opt,
                                    std::uint64_t seed, const fs::path& cache_dir) {
  if (!opt.partition_path.empty()) {
    std::istringstream in(read_file(opt.partition_path));
    return read_partition(g, in, opt.resolution);
  }
  fs::path cache;
  if (!opt.no_partition_cache && !cache_dir.empty()) {
    char name[128];
    std::snprintf(name, sizeof(name), "louvain_%s_r%g_s%llu.tsv",
                  to_hex16(g.structural_hash()).c_str(), opt.resolution,
                  static_cast<unsigned long long>(seed));
    cache = cache_dir / name;
    if (fs::exists(cache)) {
      std::istringstream in(read_file(cache.string()));
      return read_partition(g, in, opt.resolution);
    }
  }
  CommunityPartition partition = louvain(g, opt.resolution, seed, opt.louvain_restarts);
  if (!cache.empty()) {
    std::ostringstream out;
    write_partition(g, partition, out);
    write_file(cache.string(), out.str());
    std::cerr << "kgwalk: cached community partition at " << cache.string() << "\n";
  }
  return partition;
}

WalkCorpus run_extraction(const KnowledgeGraph& g, const std::vector<VertexId>& roots,
                          const ExtractOptions& opt, std::uint64_t seed, int workers,
                          const fs::path& cache_dir) {
  WalkConfig cfg;
  cfg.depth = opt.depth;
  cfg.seed = seed;
  if (opt.max_walks > 0) cfg.max_walks = opt.max_walks;

  auto extract_random = [&](VertexId root) {
    return cfg.max_walks ? sample_walks(g, root, cfg) : extract_exhaustive(g, root, cfg);
  };

  if (opt.strategy == "random") {
    auto per_root = extract_for_roots(g, roots, workers, extract_random);
    return corpus_from_root_walks(g, per_root, "random", cfg);
  }
  if (opt.strategy == "community") {
    CommunityPartition partition = obtain_partition(g, opt, seed, cache_dir);
    auto per_root = extract_for_roots(g, roots, workers, [&](VertexId root) {
      return community_walks(g, root, cfg, partition, opt.sample_prob, opt.hop_prob);
    });
    WalkCorpus corpus = corpus_from_root_walks(g, per_root, "community", cfg);
    corpus.add_parameter("resolution", format_double(opt.resolution));
    corpus.add_parameter("sample_prob", format_double(opt.sample_prob));
    corpus.add_parameter("hop_prob", format_double(opt.hop_prob));
    return corpus;
  }
  if (opt.strategy == "wl") {
    auto per_root = extract_for_roots(g, roots, workers, extract_random);
    auto store = wl_relabel(g, opt.wl_iterations);
    return wl_walk_corpus(g, per_root, store, cfg, opt.wl_relabel_roots);
  }
  throw Error("unknown strategy: " + opt.strategy);
}

struct TransformOptions {
  std::string name;
  std::vector<double> thresholds{default_halk_thresholds().begin(),
                                 default_halk_thresholds().end()};
  bool per_threshold = false;
  int ngram_n = 2;
  int wildcards = 0;
  CLI::Option* thresholds_opt = nullptr;
  CLI::Option* per_threshold_opt = nullptr;
  CLI::Option* ngram_opt = nullptr;
  CLI::Option* wildcards_opt = nullptr;

  void attach(CLI::App* cmd, bool required) {
    auto* t = cmd->add_option("--transform", name,
                              "corpus transform: anonymous, walklet, halk, or ngram")
                  ->check(CLI::IsMember({"anonymous", "walklet", "halk", "ngram"}));
    if (required) t->required();
    thresholds_opt = cmd->add_option("--thresholds", thresholds,
                                     "halk walk-frequency thresholds")
                         ->delimiter(',');
    per_threshold_opt = cmd->add_flag("--per-threshold", per_threshold,
                                      "write one corpus per halk threshold (suffix .t<i>)");
    ngram_opt = cmd->add_option("-n,--ngram-size", ngram_n, "window size for the ngram transform")
                    ->capture_default_str();
    wildcards_opt =
        cmd->add_option("--wildcards", wildcards, "wildcards injected before ngram relabelling")
            ->capture_default_str();
  }

  // Parameters belonging to a different transform are a usage error.
  void validate() const {
    if (name != "halk") {
      if (thresholds_opt->count() > 0) {
        throw CLI::ValidationError("--thresholds only applies to the halk transform");
      }
      if (per_threshold_opt->count() > 0) {
        throw CLI::ValidationError("--per-threshold only applies to the halk transform");
      }
    }
    if (name != "ngram") {
      if (ngram_opt->count() > 0) {
        throw CLI::ValidationError("--ngram-size only applies to the ngram transform");
      }
      if (wildcards_opt->count() > 0) {
        throw CLI::ValidationError("--wildcards only applies to the ngram transform");
      }
    }
  }

  WalkCorpus apply(const WalkCorpus& corpus) const {
    if (name == "anonymous") return anonymize(corpus);
    if (name == "walklet") return walklets(corpus);
    if (name == "halk") return halk(corpus, thresholds);
    if (name == "ngram") return ngram_relabel(corpus, ngram_n, wildcards);
    throw Error("unknown transform: " + name);
  }
};

struct TrainOptions {
  TrainingConfig config;
  std::int64_t min_count = 1;

  void attach(CLI::App* cmd) {
    cmd->add_option("--dim", config.dimension, "embedding dimension")->capture_default_str();
    cmd->add_option("--window", config.window, "skip-gram window")->capture_default_str();
    cmd->add_option("--negatives", config.negatives, "negative samples per pair")
        ->capture_default_str();
    cmd->add_option("--epochs", config.epochs, "training epochs")->capture_default_str();
    cmd->add_option("--lr", config.initial_lr, "initial learning rate")->capture_default_str();
    cmd->add_option("--min-lr", config.min_lr, "learning-rate floor")->capture_default_str();
    cmd->add_option("--min-count", min_count, "minimum token frequency kept in the vocabulary")
        ->capture_default_str();
  }
};

ordered_json training_config_json(const TrainingConfig& cfg, std::int64_t min_count) {
  ordered_json j;
  j["dimension"] = cfg.dimension;
  j["window"] = cfg.window;
  j["negatives"] = cfg.negatives;
  j["epochs"] = cfg.epochs;
  j["initial_lr"] = cfg.initial_lr;
  j["min_lr"] = cfg.min_lr;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["min_count"] = min_count;
  j["mode"] = cfg.workers == 1 ? "deterministic" : "racy-multiworker";
  return j;
}

void write_embedding_with_meta(const EmbeddingMatrix& matrix, const WalkCorpus& corpus,
                               std::int64_t min_count, const std::string& out_path) {
  std::string body = embeddings_to_string(matrix);
  write_file(out_path, body);
  ordered_json meta;
  meta["kind"] = "kgwalk-embedding-meta";
  meta["config"] = training_config_json(matrix.config(), min_count);
  meta["corpus_header"] = corpus.header_line();
  meta["corpus_config"] = to_hex16(corpus.config_hash());
  meta["embedding_body"] = to_hex16(fnv1a64(body));
  write_file(out_path + ".meta", meta.dump(2) + "\n");
}

// Verifies the recorded body hash when a sidecar exists.
void check_embedding_meta(const std::string& emb_path) {
  std::string meta_path = emb_path + ".meta";
  if (!file_exists(meta_path)) return;
  ordered_json meta = ordered_json::parse(read_file(meta_path));
  if (!meta.contains("embedding_body")) return;
  std::string recorded = meta["embedding_body"];
  std::string actual = to_hex16(fnv1a64(read_file(emb_path)));
  if (recorded != actual) {
    throw Error("embedding file does not match its .meta hash (file was edited?): " + emb_path);
  }
}

struct EvalOptions {
  std::vector<double> grid{default_regularization_grid().begin(),
                           default_regularization_grid().end()};
  int folds = 5;

  void attach(CLI::App* cmd) {
    cmd->add_option("--grid", grid, "regularization grid for the classifier")->delimiter(',');
    cmd->add_option("--folds", folds, "stratified cross-validation folds")->capture_default_str();
  }
};

ordered_json report_json(const WalkCorpus& corpus, const ordered_json& embedding_config,
                         const std::string& corpus_body_hex, const std::string& embedding_body_hex,
                         const EvalOptions& eval, int repetitions, bool vary_seeds,
                         std::uint64_t seed, const EvaluationReport& report) {
  ordered_json j;
  j["kind"] = "kgwalk-report";
  j["classifier"] = "L2 multinomial logistic regression";
  j["classifier_note"] =
      "accuracies come from a linear classifier, not an SVM with RBF kernel";
  j["strategy"] = corpus.strategy;
  j["corpus_header"] = corpus.header_line();
  j["corpus_body"] = corpus_body_hex;
  j["embedding_body"] = embedding_body_hex;
  j["embedding_config"] = embedding_config;
  j["evaluation"] = {{"grid", eval.grid},
                     {"folds", eval.folds},
                     {"repetitions", repetitions},
                     {"vary_seeds", vary_seeds},
                     {"seed", seed}};
  ordered_json runs = ordered_json::array();
  for (std::size_t i = 0; i < report.accuracies.size(); ++i) {
    runs.push_back({{"seed", report.seeds[i]},
                    {"accuracy", report.accuracies[i]},
                    {"chosen_regularization", report.chosen_regularization[i]}});
  }
  j["runs"] = runs;
  j["mean_accuracy"] = report.mean;
  j["stddev"] = report.stddev;
  return j;
}

void print_report_summary(const EvaluationReport& report) {
  std::printf("accuracy: mean=%.4f stddev=%.4f over %zu run(s)\n", report.mean, report.stddev,
              report.accuracies.size());
  for (std::size_t i = 0; i < report.accuracies.size(); ++i) {
    std::printf("  run %zu: accuracy=%.4f C=%g seed=%llu\n", i, report.accuracies[i],
                report.chosen_regularization[i],
                static_cast<unsigned long long>(report.seeds[i]));
  }
}

std::string current_stage = "kgwalk";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-graph walk extraction, embedding, and evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key=value file");
  app.get_config_formatter_base()->comment('#');

  std::uint64_t seed = 1;
  int workers = default_workers();
  bool deterministic = false;
  app.add_option("--seed", seed, "global seed")->capture_default_str();
  app.add_option("--workers", workers, "worker threads (extraction and training)")
      ->capture_default_str();
  app.add_flag("--deterministic", deterministic,
               "single-worker everywhere; outputs depend only on the seed");
  // global options remain usable after the subcommand name
  app.fallthrough();

  // ---- extract ----
  auto* cmd_extract = app.add_subcommand("extract", "extract a walk corpus from a graph");
  GraphOptions extract_graph;
  RootOptions extract_roots;
  ExtractOptions extract_opt;
  std::string extract_out = "corpus.txt";
  extract_graph.attach(cmd_extract);
  extract_roots.attach(cmd_extract);
  extract_opt.attach(cmd_extract);
  cmd_extract->add_option("--out", extract_out, "corpus output path")->capture_default_str();

  // ---- transform ----
  auto* cmd_transform = app.add_subcommand("transform", "apply one corpus transform");
  TransformOptions transform_opt;
  std::string transform_in, transform_out = "corpus.transformed.txt";
  cmd_transform->add_option("--in", transform_in, "input corpus")->required();
  cmd_transform->add_option("--out", transform_out, "output corpus")->capture_default_str();
  transform_opt.attach(cmd_transform, /*required=*/true);

  // ---- train ----
  auto* cmd_train = app.add_subcommand("train", "train skip-gram embeddings from a corpus");
  TrainOptions train_opt;
  std::string train_in, train_out = "embeddings.txt";
  cmd_train->add_option("--in", train_in, "input corpus")->required();
  cmd_train->add_option("--out", train_out, "embedding output path")->capture_default_str();
  train_opt.attach(cmd_train);

  // ---- evaluate ----
  auto* cmd_evaluate = app.add_subcommand("evaluate", "node classification from embeddings");
  EvalOptions eval_opt;
  std::string eval_embeddings, eval_split, eval_report_path;
  int eval_repetitions = 1;
  bool eval_identical_seeds = false;
  cmd_evaluate->add_option("--embeddings", eval_embeddings, "embedding file")->required();
  cmd_evaluate->add_option("--split", eval_split, "split TSV")->required();
  cmd_evaluate->add_option("--report", eval_report_path, "write the JSON report here");
  cmd_evaluate->add_option("--repetitions", eval_repetitions, "classifier repetitions")
      ->capture_default_str();
  cmd_evaluate->add_flag("--identical-seeds", eval_identical_seeds,
                         "repeat with the base seed instead of derived seeds");
  eval_opt.attach(cmd_evaluate);

  // ---- wl-check ----
  auto* cmd_wl = app.add_subcommand("wl-check", "check label/identity agreement after relabelling");
  GraphOptions wl_graph;
  int wl_iterations = 4;
  bool wl_all_kinds = false;
  std::string wl_dump;
  wl_graph.attach(cmd_wl);
  cmd_wl->add_option("--iterations", wl_iterations, "relabelling iterations")
      ->capture_default_str();
  cmd_wl->add_flag("--all-kinds", wl_all_kinds, "check every vertex kind, not just entities");
  cmd_wl->add_option("--dump", wl_dump, "write the label table TSV here");

  // ---- communities ----
  auto* cmd_comm = app.add_subcommand("communities", "Louvain partition of the expanded graph");
  GraphOptions comm_graph;
  double comm_resolution = 1.0;
  int comm_restarts = 10;
  std::string comm_out = "partition.tsv";
  comm_graph.attach(cmd_comm);
  cmd_comm->add_option("--resolution", comm_resolution, "Louvain resolution")
      ->capture_default_str();
  cmd_comm->add_option("--louvain-restarts", comm_restarts, "restarts (best kept)")
      ->capture_default_str();
  cmd_comm->add_option("--out", comm_out, "partition TSV output")->capture_default_str();

  // ---- pipeline ----
  auto* cmd_pipeline =
      app.add_subcommand("pipeline", "extract -> (transform) -> train -> evaluate");
  GraphOptions pipe_graph;
  RootOptions pipe_roots;
  ExtractOptions pipe_extract;
  TransformOptions pipe_transform;
  TrainOptions pipe_train;
  EvalOptions pipe_eval;
  std::string pipe_out_dir = "kgwalk-out";
  int pipe_repetitions = 5;
  bool pipe_identical_seeds = false;
  pipe_graph.attach(cmd_pipeline);
  pipe_roots.attach(cmd_pipeline);
  pipe_extract.attach(cmd_pipeline);
  pipe_transform.attach(cmd_pipeline, /*required=*/false);
  pipe_train.attach(cmd_pipeline);
  pipe_eval.attach(cmd_pipeline);
  cmd_pipeline->add_option("--out-dir", pipe_out_dir, "artifact directory")
      ->envname("KGWALK_OUT_DIR")
      ->capture_default_str();
  cmd_pipeline->add_option("--repetitions", pipe_repetitions,
                           "embedding+classifier repetitions reported with deviation")
      ->capture_default_str();
  cmd_pipeline->add_flag("--identical-seeds", pipe_identical_seeds,
                         "repeat with the base seed instead of derived seeds");

  // ---- rank-table ----
  auto* cmd_rank = app.add_subcommand("rank-table", "average-rank table from a score TSV");
  std::string rank_scores, rank_out;
  cmd_rank->add_option("--scores", rank_scores, "TSV: dataset TAB strategy TAB score")->required();
  cmd_rank->add_option("--out", rank_out, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "kgwalk: usage error: " << e.what() << "\n";
    return 2;
  }

  if (deterministic) workers = 1;

  try {
    if (cmd_extract->parsed()) {
      current_stage = "extract";
      KnowledgeGraph g = extract_graph.load();
      auto roots = extract_roots.resolve(g);
      fs::path out_dir = fs::path(extract_out).parent_path();
      WalkCorpus corpus = run_extraction(g, roots, extract_opt, seed, workers, out_dir);
      save_corpus(corpus, extract_out);
      std::cerr << "kgwalk: wrote " << corpus.walks.size() << " walks for " << roots.size()
                << " roots to " << extract_out << "\n";
    } else if (cmd_transform->parsed()) {
      current_stage = "transform";
      transform_opt.validate();
      WalkCorpus corpus = load_corpus(transform_in);
      if (transform_opt.name == "halk" && transform_opt.per_threshold) {
        auto per = halk_per_threshold(corpus, transform_opt.thresholds);
        for (std::size_t i = 0; i < per.size(); ++i) {
          std::string path = transform_out + ".t" + std::to_string(i);
          save_corpus(per[i], path);
          std::cerr << "kgwalk: wrote " << per[i].walks.size() << " walks to " << path << "\n";
        }
      } else {
        WalkCorpus out = transform_opt.apply(corpus);
        save_corpus(out, transform_out);
        std::cerr << "kgwalk: wrote " << out.walks.size() << " walks to " << transform_out
                  << "\n";
      }
    } else if (cmd_train->parsed()) {
      current_stage = "train";
      WalkCorpus corpus = load_corpus(train_in);
      train_opt.config.seed = seed;
      train_opt.config.workers = workers;
      Vocabulary vocab = build_vocabulary(corpus, train_opt.min_count);
      EmbeddingMatrix matrix = train_skipgram(corpus, vocab, train_opt.config);
      write_embedding_with_meta(matrix, corpus, train_opt.min_count, train_out);
      std::cerr << "kgwalk: trained " << matrix.vocabulary_size() << " vectors of dimension "
                << matrix.dimension() << " -> " << train_out << "\n";
    } else if (cmd_evaluate->parsed()) {
      current_stage = "evaluate";
      check_embedding_meta(eval_embeddings);
      EmbeddingMatrix matrix = load_embeddings_file(eval_embeddings);
      LabeledSplit split = load_split_file(eval_split);
      auto report = repeat_runs(
          [&](std::uint64_t run_seed) {
            LogisticModel model =
                train_classifier(matrix, split, eval_opt.grid, eval_opt.folds, run_seed);
            return std::make_pair(evaluate_accuracy(model, matrix, split),
                                  model.chosen_regularization);
          },
          eval_repetitions, seed, !eval_identical_seeds);
      print_report_summary(report);
      if (!eval_report_path.empty()) {
        ordered_json j =
            report_json(WalkCorpus{}, ordered_json::object(), "", to_hex16(fnv1a64(read_file(eval_embeddings))),
                        eval_opt, eval_repetitions, !eval_identical_seeds, seed, report);
        j.erase("strategy");
        j.erase("corpus_header");
        j.erase("corpus_body");
        j.erase("embedding_config");
        write_file(eval_report_path, j.dump(2) + "\n");
      }
    } else if (cmd_wl->parsed()) {
      current_stage = "wl-check";
      KnowledgeGraph g = wl_graph.load();
      auto store = wl_relabel(g, wl_iterations);
      auto violations = check_wl_bijection(g, store, wl_all_kinds);
      if (!wl_dump.empty()) {
        std::ostringstream out;
        write_wl_labels(g, store, out);
        write_file(wl_dump, out.str());
      }
      std::printf("violations: %zu\n", violations.size());
      for (std::size_t i = 0; i < violations.size() && i < 20; ++i) {
        const auto& v = violations[i];
        std::fprintf(stderr, "  k=%d %s == %s\n", v.iteration,
                     g.vertex(v.first).label.c_str(), g.vertex(v.second).label.c_str());
      }
    } else if (cmd_comm->parsed()) {
      current_stage = "communities";
      KnowledgeGraph g = comm_graph.load();
      auto partition = louvain(g, comm_resolution, seed, comm_restarts);
      std::ostringstream out;
      write_partition(g, partition, out);
      write_file(comm_out, out.str());
      std::printf("communities: %zu over %zu vertices, modularity %.6f\n",
                  partition.community_count(), g.vertex_count(),
                  modularity(g, partition, comm_resolution));
    } else if (cmd_pipeline->parsed()) {
      current_stage = "pipeline";
      if (pipe_roots.split_path.empty()) {
        throw Error("pipeline needs --split for evaluation");
      }
      fs::create_directories(pipe_out_dir);
      KnowledgeGraph g = pipe_graph.load();
      auto roots = pipe_roots.resolve(g);
      LabeledSplit split = load_split_file(pipe_roots.split_path);

      current_stage = "pipeline/extract";
      WalkCorpus corpus =
          run_extraction(g, roots, pipe_extract, seed, workers, pipe_out_dir);
      if (!pipe_transform.name.empty()) {
        current_stage = "pipeline/transform";
        pipe_transform.validate();
        corpus = pipe_transform.apply(corpus);
      }
      std::string corpus_path = (fs::path(pipe_out_dir) / "corpus.txt").string();
      save_corpus(corpus, corpus_path);
      std::string corpus_body_hex;
      {
        std::string text = corpus_to_string(corpus);
        std::size_t eol = text.find('\n');
        corpus_body_hex = to_hex16(fnv1a64(std::string_view(text).substr(eol + 1)));
      }

      current_stage = "pipeline/train";
      Vocabulary vocab = build_vocabulary(corpus, pipe_train.min_count);
      std::string emb_path = (fs::path(pipe_out_dir) / "embeddings.txt").string();
      std::string first_embedding_hex;

      current_stage = "pipeline/evaluate";
      bool first_rep = true;
      auto report = repeat_runs(
          [&](std::uint64_t run_seed) {
            TrainingConfig cfg = pipe_train.config;
            cfg.seed = run_seed;
            cfg.workers = workers;
            EmbeddingMatrix matrix = train_skipgram(corpus, vocab, cfg);
            if (first_rep) {
              write_embedding_with_meta(matrix, corpus, pipe_train.min_count, emb_path);
              first_embedding_hex = to_hex16(fnv1a64(embeddings_to_string(matrix)));
              first_rep = false;
            }
            LogisticModel model = train_classifier(matrix, split, pipe_eval.grid, pipe_eval.folds,
                                                   mix_seed(run_seed, 0xc1a5));
            return std::make_pair(evaluate_accuracy(model, matrix, split),
                                  model.chosen_regularization);
          },
          pipe_repetitions, seed, !pipe_identical_seeds);

      TrainingConfig logged = pipe_train.config;
      logged.seed = seed;
      logged.workers = workers;
      ordered_json j = report_json(corpus, training_config_json(logged, pipe_train.min_count),
                                   corpus_body_hex, first_embedding_hex, pipe_eval,
                                   pipe_repetitions, !pipe_identical_seeds, seed, report);
      std::string report_path = (fs::path(pipe_out_dir) / "report.json").string();
      write_file(report_path, j.dump(2) + "\n");
      print_report_summary(report);
      std::cerr << "kgwalk: report written to " << report_path << "\n";
    } else if (cmd_rank->parsed()) {
      current_stage = "rank-table";
      std::vector<std::string> datasets, strategies;
      std::vector<std::vector<double>> scores;
      std::istringstream in(read_file(rank_scores));
      std::string line;
      std::size_t line_no = 0;
      auto index_of = [](std::vector<std::string>& names, const std::string& name) {
        for (std::size_t i = 0; i < names.size(); ++i) {
          if (names[i] == name) return i;
        }
        names.push_back(name);
        return names.size() - 1;
      };
      while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        auto fields = split(line, '\t');
        if (fields.size() != 3) {
          throw ParseError(line_no, "expected dataset TAB strategy TAB score", line);
        }
        std::size_t d = index_of(datasets, fields[0]);
        std::size_t s = index_of(strategies, fields[1]);
        if (scores.size() < datasets.size()) scores.resize(datasets.size());
        for (auto& row : scores) row.resize(strategies.size(), std::nan(""));
        scores[d][s] = std::stod(fields[2]);
      }
      std::string table = render_rank_table(datasets, strategies, scores);
      if (rank_out.empty()) {
        std::fputs(table.c_str(), stdout);
      } else {
        write_file(rank_out, table);
      }
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "kgwalk: usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "kgwalk " << current_stage << ": error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
