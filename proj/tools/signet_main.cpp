#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "signet/evaluation.hpp"
#include "signet/graph.hpp"
#include "signet/synthetic.hpp"
#include "signet/trainer.hpp"
#include "signet/walks.hpp"

namespace {

struct TrainFlags {
  std::string input;
  int dim = 64;
  int walks_per_node = 10;
  int walk_length = 40;
  int window = 5;
  double p = 1.5;
  double q = 0.5;
  int negatives = 20;
  double subsample = 1e-5;
  int epochs = 5;
  double lr = 0.025;
  std::string sigma = "addition";
  std::uint64_t seed = 1;
  int threads = 1;
  bool symmetrize = true;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_sigma) {
  cmd->add_option("--input", f.input, "edge-list file (TSV)")->required();
  cmd->add_option("--dim", f.dim, "embedding dimension");
  cmd->add_option("--walks-per-node", f.walks_per_node, "walks started per node");
  cmd->add_option("--walk-length", f.walk_length, "nodes per walk");
  cmd->add_option("--window", f.window, "context window size");
  cmd->add_option("--p", f.p, "return parameter");
  cmd->add_option("--q", f.q, "in-out parameter");
  cmd->add_option("--negatives", f.negatives, "negative samples per context");
  cmd->add_option("--subsample", f.subsample, "frequency subsampling threshold");
  cmd->add_option("--epochs", f.epochs, "training epochs");
  cmd->add_option("--lr", f.lr, "initial learning rate");
  if (with_sigma)
    cmd->add_option("--sigma", f.sigma, "topic combiner: mask|addition|hadamard");
  cmd->add_option("--seed", f.seed, "master RNG seed");
  cmd->add_option("--threads", f.threads, "worker threads (1 = deterministic)");
  cmd->add_flag("--symmetrize,!--no-symmetrize", f.symmetrize,
                "treat directed edges as walkable in both directions");
}

signet::WalkConfig walk_config(const TrainFlags& f) {
  signet::WalkConfig cfg;
  cfg.walks_per_node = f.walks_per_node;
  cfg.walk_length = f.walk_length;
  cfg.return_param = f.p;
  cfg.inout_param = f.q;
  cfg.seed = f.seed;
  return cfg;
}

signet::TrainerConfig trainer_config(const TrainFlags& f) {
  signet::TrainerConfig cfg;
  cfg.sigma_mode = signet::combine_mode_from_string(f.sigma);
  cfg.dim = f.dim;
  cfg.negatives_per_context = f.negatives;
  cfg.subsample_threshold = f.subsample;
  cfg.epochs = f.epochs;
  cfg.initial_learning_rate = f.lr;
  cfg.seed = f.seed;
  return cfg;
}

int run_generate(const std::string& out_path, const signet::SyntheticConfig& cfg) {
  auto [graph, truth] = signet::generate_synthetic(cfg);
  signet::write_edge_list_file(graph, out_path);
  std::ofstream truth_out(out_path + ".truth");
  if (!truth_out) throw std::runtime_error("cannot open " + out_path + ".truth");
  signet::write_ground_truth(truth, graph, truth_out);
  std::cout << "wrote " << graph.edges().size() << " edges over "
            << graph.node_count() << " nodes / " << graph.topic_count()
            << " topics to " << out_path << "\n";
  return 0;
}

int run_train(const TrainFlags& f, const std::string& out_stem,
              const std::string& walk_dump) {
  signet::SignedTopicGraph graph =
      signet::aggregate_parallel_edges(signet::load_edge_list_file(f.input));
  signet::WalkCorpus corpus =
      signet::generate_corpus(graph, walk_config(f), f.threads, f.symmetrize);
  if (!walk_dump.empty()) {
    std::ofstream out(walk_dump);
    if (!out) throw std::runtime_error("cannot open " + walk_dump);
    signet::write_walks(corpus, graph, out);
  }
  signet::ContextConfig ctx{f.window};
  std::vector<double> losses;
  signet::EmbeddingStore store = signet::train(
      corpus, graph, ctx, trainer_config(f), f.threads, &losses, f.symmetrize);
  for (std::size_t e = 0; e < losses.size(); ++e)
    std::printf("epoch %zu/%zu mean loss %.6f\n", e + 1, losses.size(),
                losses[e]);
  signet::write_embedding_files(store, graph, out_stem);
  std::cout << "wrote " << out_stem << ".{nodes,contexts,topics}.vec\n";
  return 0;
}

std::vector<signet::CombineMode> parse_sigmas(std::vector<std::string> names) {
  if (names.size() == 1 && names[0] == "all")
    return {signet::CombineMode::kMask, signet::CombineMode::kAddition,
            signet::CombineMode::kHadamard};
  std::vector<signet::CombineMode> out;
  for (const auto& n : names) out.push_back(signet::combine_mode_from_string(n));
  return out;
}

std::vector<signet::EdgeOp> parse_phis(std::vector<std::string> names) {
  if (names.size() == 1 && names[0] == "all")
    return {std::begin(signet::kAllEdgeOps), std::end(signet::kAllEdgeOps)};
  std::vector<signet::EdgeOp> out;
  for (const auto& n : names) out.push_back(signet::edge_op_from_string(n));
  return out;
}

int run_eval(const TrainFlags& f, const std::string& out_csv, int folds,
             std::vector<int> knn_ks, std::vector<std::string> sigmas,
             std::vector<std::string> phis, bool coldstart_only,
             bool topic_at_eval, bool lr_learn_topics, bool run_lr,
             bool run_knn, const std::string& feature_dump) {
  signet::SignedTopicGraph graph =
      signet::aggregate_parallel_edges(signet::load_edge_list_file(f.input));

  std::vector<signet::TrainerConfig> trainer_cfgs;
  for (signet::CombineMode mode : parse_sigmas(sigmas)) {
    signet::TrainerConfig tc = trainer_config(f);
    tc.sigma_mode = mode;
    trainer_cfgs.push_back(tc);
  }

  signet::EvalConfig cfg;
  cfg.n_folds = folds;
  cfg.knn_ks = std::move(knn_ks);
  cfg.run_knn = run_knn;
  cfg.run_lr = run_lr;
  cfg.use_topic_at_eval = topic_at_eval;
  cfg.lr_learn_topics = lr_learn_topics;
  cfg.coldstart_only = coldstart_only;
  cfg.phi_ops = parse_phis(phis);
  cfg.threads = f.threads;
  cfg.seed = f.seed;
  cfg.walk = walk_config(f);
  cfg.context = signet::ContextConfig{f.window};

  signet::EvalReport report = signet::evaluate(graph, trainer_cfgs, cfg);

  std::ofstream csv(out_csv);
  if (!csv) throw std::runtime_error("cannot open " + out_csv);
  report.write_csv(csv);
  report.print_summary(std::cout);

  if (!feature_dump.empty()) {
    // Fold-0 test features for the first (sigma, phi) of the sweep.
    auto fold0 = signet::make_folds(graph, folds, f.seed)[0];
    signet::TrainerConfig tc = trainer_cfgs[0];
    signet::WalkCorpus corpus = signet::generate_corpus(
        graph.with_edges(fold0.train_edges), cfg.walk, f.threads);
    signet::EmbeddingStore store =
        signet::train(corpus, graph, cfg.context, tc, f.threads);
    std::vector<signet::EdgeFeature> feats;
    for (const signet::Edge& e : fold0.test_edges)
      feats.push_back(signet::edge_feature(
          store, e,
          tc.sigma_mode == signet::CombineMode::kMask
              ? std::nullopt
              : std::optional(tc.sigma_mode),
          cfg.phi_ops[0]));
    std::ofstream dump(feature_dump);
    if (!dump) throw std::runtime_error("cannot open " + feature_dump);
    signet::write_feature_dump(graph, feats, dump);
  }
  return 0;
}

// Expands `--config FILE` into `--key=value` tokens for keys the command
// line does not already set, so explicit flags always win over the file.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> tokens(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == "--config") {
      if (i + 1 >= tokens.size())
        throw CLI::ParseError("--config requires a file path",
                              CLI::ExitCodes::RequiredError);
      path = tokens[i + 1];
      tokens.erase(tokens.begin() + i, tokens.begin() + i + 2);
      break;
    }
    if (tokens[i].rfind("--config=", 0) == 0) {
      path = tokens[i].substr(9);
      tokens.erase(tokens.begin() + i);
      break;
    }
  }
  if (path.empty()) return tokens;

  std::ifstream in(path);
  if (!in)
    throw CLI::ParseError("cannot open config file " + path,
                          CLI::ExitCodes::FileError);
  auto user_sets = [&](const std::string& flag) {
    for (const auto& t : tokens)
      if (t == flag || t.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || line[first] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw CLI::ParseError("config line " + std::to_string(line_no) +
                                ": expected key=value",
                            CLI::ExitCodes::InvalidError);
    auto trim = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r\n");
      auto e = s.find_last_not_of(" \t\r\n");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw CLI::ParseError("config line " + std::to_string(line_no) +
                                ": empty key",
                            CLI::ExitCodes::InvalidError);
    if (!user_sets("--" + key)) tokens.push_back("--" + key + "=" + value);
  }
  return tokens;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stance embeddings from signed topic graphs"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic polarized benchmark");
  signet::SyntheticConfig syn;
  std::string gen_out;
  gen->add_option("--nodes", syn.n_nodes, "number of nodes");
  gen->add_option("--topics", syn.n_topics, "number of topics");
  gen->add_option("--topic-groups", syn.n_topic_groups, "number of correlated topic groups");
  gen->add_option("--edges-per-topic", syn.edges_per_topic, "edges per topic");
  gen->add_option("--noise", syn.sign_noise, "sign flip probability");
  gen->add_flag("--intergroup-flip", syn.intergroup_flip,
                "redraw communities independently per topic group");
  gen->add_option("--seed", syn.seed, "master RNG seed");
  gen->add_option("--out", gen_out, "output edge-list path")->required();
  gen->add_option("--config", "key=value config file; explicit flags override it")->type_name("FILE");

  // train
  auto* train_cmd = app.add_subcommand("train", "learn node/context/topic embeddings");
  TrainFlags tf;
  std::string train_out, walk_dump;
  add_train_flags(train_cmd, tf, true);
  train_cmd->add_option("--out", train_out, "output stem for the three .vec files")->required();
  train_cmd->add_option("--dump-walks", walk_dump, "optional walk corpus dump path");
  train_cmd->add_option("--config", "key=value config file; explicit flags override it")->type_name("FILE");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "link-sign prediction sweep");
  TrainFlags ef;
  std::string eval_out, feature_dump;
  int folds = 5;
  std::vector<int> knn_ks{5, 10};
  std::vector<std::string> sigmas{"all"};
  std::vector<std::string> phis{"all"};
  bool coldstart_only = false, lr_learn_topics = false;
  bool topic_at_eval = true, use_lr = true, use_knn = true;
  add_train_flags(eval_cmd, ef, false);
  eval_cmd->add_option("--out", eval_out, "output CSV path")->required();
  eval_cmd->add_option("--folds", folds, "cross-validation folds");
  eval_cmd->add_option("--knn-k", knn_ks, "kNN neighbor counts");
  eval_cmd->add_option("--sigma", sigmas, "variants to evaluate (mask|addition|hadamard|all)");
  eval_cmd->add_option("--phi", phis, "edge operators (hadamard|l1|l2|average|concat|all)");
  eval_cmd->add_flag("--coldstart-only", coldstart_only, "score only cold-start test edges");
  eval_cmd->add_flag("--topic-at-eval,!--no-topic-at-eval", topic_at_eval,
                     "fold each variant's topic vector into the target at feature time");
  eval_cmd->add_flag("--lr-learn-topics", lr_learn_topics,
                     "learn a fresh topic table inside the LR classifier");
  eval_cmd->add_flag("!--no-knn", use_knn, "skip the kNN classifiers");
  eval_cmd->add_flag("!--no-lr-classifier", use_lr, "skip the LR classifier");
  eval_cmd->add_option("--dump-features", feature_dump, "optional edge-feature dump path");
  eval_cmd->add_option("--config", "key=value config file; explicit flags override it")->type_name("FILE");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return run_generate(gen_out, syn);
    if (train_cmd->parsed()) return run_train(tf, train_out, walk_dump);
    if (eval_cmd->parsed())
      return run_eval(ef, eval_out, folds, knn_ks, sigmas, phis,
                      coldstart_only, topic_at_eval, lr_learn_topics, use_lr,
                      use_knn, feature_dump);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
