#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "signet/contexts.hpp"
#include "signet/embedding.hpp"
#include "signet/walks.hpp"

namespace signet {

struct TrainerConfig {
  CombineMode sigma_mode = CombineMode::kAddition;
  int dim = 64;
  int negatives_per_context = 20;
  double subsample_threshold = 1e-5;
  int epochs = 5;
  double initial_learning_rate = 0.025;
  std::uint64_t seed = 1;

  void validate() const;
};

// Loss and exact gradients of one skip-gram pair:
//   loss = -log sigmoid(w_pos . h) - sum_neg log sigmoid(-w_neg . h)
struct PairGradients {
  double loss = 0.0;
  Eigen::VectorXd grad_input;                   // d loss / d h
  Eigen::VectorXd grad_positive;                // d loss / d w_pos
  std::vector<Eigen::VectorXd> grad_negatives;  // d loss / d w_neg[i]
};

PairGradients pair_loss_and_grads(const Eigen::VectorXd& h,
                                  const Eigen::VectorXd& w_pos,
                                  const std::vector<Eigen::VectorXd>& negs);

// Same pair loss with h = sigma(mode, w_topic, w_node); gradients for the
// node and topic vectors follow the chain rule through sigma (mask routes
// nothing to the topic).
struct SigmaPairGradients {
  double loss = 0.0;
  Eigen::VectorXd grad_node;
  Eigen::VectorXd grad_topic;
  Eigen::VectorXd grad_positive;
  std::vector<Eigen::VectorXd> grad_negatives;
};

SigmaPairGradients sigma_pair_gradients(CombineMode mode,
                                        const Eigen::VectorXd& w_topic,
                                        const Eigen::VectorXd& w_node,
                                        const Eigen::VectorXd& w_pos,
                                        const std::vector<Eigen::VectorXd>& negs);

// word2vec discard rule: max(0, 1 - sqrt(threshold / frequency)).
double discard_probability(double frequency, double threshold);
bool should_discard(const WalkCorpus& corpus, TopicId topic, NodeId node,
                    double threshold, std::mt19937_64& rng);

// Noise distribution over one topic's context vocabulary: observed context
// row counts raised to `power`, sampled by cumulative-sum inversion.
class NoiseTable {
 public:
  NoiseTable() = default;
  // dense_counts[row] = occurrence count of that context row (zeros skipped).
  NoiseTable(const std::vector<std::int64_t>& dense_counts, double power);

  bool empty() const { return rows_.empty(); }
  std::size_t vocabulary_size() const { return rows_.size(); }
  Eigen::Index sample(std::mt19937_64& rng) const;
  double probability(Eigen::Index row) const;

 private:
  std::vector<Eigen::Index> rows_;
  std::vector<double> cumulative_;
};

// `count` rows drawn i.i.d. from the noise distribution; draws equal to
// `positive_row` are rejected and redrawn (bounded retries, then error).
std::vector<Eigen::Index> sample_negatives(const NoiseTable& noise,
                                           Eigen::Index positive_row,
                                           int count, std::mt19937_64& rng);

// Per-topic counts of (node, sign) context rows over all windows of the
// corpus; the raw material for the per-topic noise tables.
std::vector<std::vector<std::int64_t>> context_row_counts(
    const WalkCorpus& corpus, const std::vector<TopicSubgraphView>& views,
    std::size_t n_nodes, const ContextConfig& cfg);

// SGD over all (source, topic, context) pairs of the corpus. Single-threaded
// mode (threads == 1) is bit-reproducible for a fixed seed; threads > 1 runs
// lock-free on shared tables and is only statistically equivalent.
EmbeddingStore train(const WalkCorpus& corpus, const SignedTopicGraph& g,
                     const ContextConfig& ctx_cfg, const TrainerConfig& cfg,
                     int threads = 1,
                     std::vector<double>* epoch_mean_loss = nullptr,
                     bool symmetrize = true);

}  // namespace signet
