#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "signet/edge_features.hpp"
#include "signet/trainer.hpp"

namespace signet {

struct FoldSplit {
  int fold_index = 0;
  std::vector<Edge> train_edges;
  std::vector<Edge> test_edges;
};

// Seeded shuffle + equal partition; every edge lands in exactly one test fold.
std::vector<FoldSplit> make_folds(const SignedTopicGraph& g, int n_folds,
                                  std::uint64_t seed);

// Keeps every minority-sign edge and samples the majority sign down to the
// same count, without replacement. Throws on single-sign input.
std::vector<Edge> balance_downsample(const std::vector<Edge>& edges,
                                     std::uint64_t seed);

// Fraction of the k nearest training features (Euclidean distance, ties by
// insertion index) whose label is positive.
double knn_score(const std::vector<EdgeFeature>& train,
                 const EdgeFeature& query, int k);

// Batch variant over feature matrices; one score per query row.
Eigen::VectorXd knn_scores(const RowMatrixXd& train,
                           const std::vector<int>& train_labels,
                           const RowMatrixXd& queries, int k);

// Rank-based (Mann-Whitney) AUC with tie correction. Throws unless both
// classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

// Test edges whose source-topic engagement (as source) or target-topic
// engagement (as target) never occurs in the training edges.
std::vector<Edge> coldstart_subset(std::span<const Edge> train_edges,
                                   std::span<const Edge> test_edges);
std::vector<std::size_t> coldstart_indices(std::span<const Edge> train_edges,
                                           std::span<const Edge> test_edges);

// --- logistic-regression link-sign classifier ---

enum class TopicMode { kNone, kFrozen, kLearned };

struct LogisticConfig {
  double learning_rate = 0.05;
  int epochs = 200;
  std::uint64_t seed = 1;
};

struct LRModel {
  Eigen::VectorXd weights;
  double bias = 0.0;
  // Populated in learned mode; folded into the target embedding via `sigma`
  // before phi, exactly like the frozen store table would be.
  RowMatrixXd topic_table;
  CombineMode sigma = CombineMode::kMask;
  EdgeOp op = EdgeOp::kHadamard;
  TopicMode topic_mode = TopicMode::kNone;
};

// Loss/gradients of one logistic sample with feature
// x = phi(op, u1, sigma(topic_vec, u2)), z = w.x + b, label in {0, 1}.
struct LogisticGrads {
  double loss = 0.0;
  Eigen::VectorXd grad_weights;
  double grad_bias = 0.0;
  Eigen::VectorXd grad_topic;
};
LogisticGrads logistic_gradients(const Eigen::VectorXd& weights, double bias,
                                 const Eigen::VectorXd& u1,
                                 const Eigen::VectorXd& u2,
                                 const Eigen::VectorXd& topic_vec,
                                 CombineMode sigma, EdgeOp op, int label01);

// Plain SGD on the logistic loss. kNone ignores topics, kFrozen folds the
// store's topic table into the target embedding, kLearned optimizes a fresh
// topic table jointly with the classifier.
LRModel train_logistic(const EmbeddingStore& store,
                       std::span<const Edge> edges, CombineMode sigma,
                       EdgeOp op, TopicMode mode, const LogisticConfig& cfg);

// Decision-function values w.x + b (monotone in the predicted probability).
Eigen::VectorXd logistic_scores(const LRModel& model,
                                const EmbeddingStore& store,
                                std::span<const Edge> edges);

// --- the full sweep ---

struct EvalConfig {
  int n_folds = 5;
  std::vector<int> knn_ks = {5, 10};
  bool run_knn = true;
  bool run_lr = true;
  // Fold each trainer's sigma into the target embedding when building edge
  // features. When false, features are phi(W_u[src], W_u[dst]) for every
  // variant (the topic tables are not consulted at evaluation time).
  bool use_topic_at_eval = true;
  bool lr_learn_topics = false;
  bool coldstart_only = false;
  std::vector<EdgeOp> phi_ops{kAllEdgeOps, kAllEdgeOps + 5};
  int threads = 1;
  std::uint64_t seed = 1;
  WalkConfig walk;
  ContextConfig context;
  LogisticConfig logistic;
};

struct EvalRow {
  std::string classifier;  // knn<k> or lr
  std::string sigma;
  std::string phi;
  int fold = 0;
  std::string split;  // full or coldstart
  double auc = 0.0;   // NaN when the split had a single class or was empty
  std::size_t n_scored = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;

  std::vector<double> fold_aucs(const std::string& classifier,
                                const std::string& sigma,
                                const std::string& phi,
                                const std::string& split) const;
  double mean_auc(const std::string& classifier, const std::string& sigma,
                  const std::string& phi, const std::string& split) const;
  // (phi name, mean AUC) maximizing the per-phi mean.
  std::pair<std::string, double> best_over_phi(const std::string& classifier,
                                               const std::string& sigma,
                                               const std::string& split) const;

  void write_csv(std::ostream& out) const;
  void print_summary(std::ostream& out) const;
};

// Per fold: retrain embeddings on the fold's training edges only, build
// features per (sigma-at-eval, phi), score with kNN and LR on the full test
// set and its cold-start subset.
EvalReport evaluate(const SignedTopicGraph& g,
                    const std::vector<TrainerConfig>& trainer_cfgs,
                    const EvalConfig& cfg);

}  // namespace signet
