#include "signet/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "signet/rng.hpp"

namespace signet {

namespace {

constexpr double kNoisePower = 0.75;
constexpr int kNegativeRetries = 64;
constexpr double kMinLearningRateFactor = 1e-4;

std::size_t scheduled_pairs(std::size_t walk_len, int window) {
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < walk_len; ++i) {
    std::size_t left = std::min<std::size_t>(window, i);
    std::size_t right = std::min<std::size_t>(window, walk_len - 1 - i);
    pairs += left + right;
  }
  return walk_len < 2 ? 0 : pairs;
}

}  // namespace

void TrainerConfig::validate() const {
  if (dim < 1) throw std::runtime_error("dim must be >= 1");
  if (negatives_per_context < 1)
    throw std::runtime_error("negatives_per_context must be >= 1");
  if (!(subsample_threshold > 0.0) || subsample_threshold > 1.0)
    throw std::runtime_error("subsample_threshold must be in (0, 1]");
  if (epochs < 1) throw std::runtime_error("epochs must be >= 1");
  if (!(initial_learning_rate > 0.0))
    throw std::runtime_error("initial_learning_rate must be > 0");
}

PairGradients pair_loss_and_grads(const Eigen::VectorXd& h,
                                  const Eigen::VectorXd& w_pos,
                                  const std::vector<Eigen::VectorXd>& negs) {
  PairGradients out;
  out.grad_input = Eigen::VectorXd::Zero(h.size());

  double pos_dot = w_pos.dot(h);
  out.loss = -log_sigmoid(pos_dot);
  double g_pos = stable_sigmoid(pos_dot) - 1.0;
  out.grad_positive = g_pos * h;
  out.grad_input += g_pos * w_pos;

  out.grad_negatives.reserve(negs.size());
  for (const Eigen::VectorXd& w_neg : negs) {
    double neg_dot = w_neg.dot(h);
    out.loss -= log_sigmoid(-neg_dot);
    double g_neg = stable_sigmoid(neg_dot);
    out.grad_negatives.push_back(g_neg * h);
    out.grad_input += g_neg * w_neg;
  }
  return out;
}

SigmaPairGradients sigma_pair_gradients(
    CombineMode mode, const Eigen::VectorXd& w_topic,
    const Eigen::VectorXd& w_node, const Eigen::VectorXd& w_pos,
    const std::vector<Eigen::VectorXd>& negs) {
  Eigen::VectorXd h = combine_sigma(mode, w_topic, w_node);
  PairGradients base = pair_loss_and_grads(h, w_pos, negs);

  SigmaPairGradients out;
  out.loss = base.loss;
  out.grad_positive = std::move(base.grad_positive);
  out.grad_negatives = std::move(base.grad_negatives);
  switch (mode) {
    case CombineMode::kMask:
      out.grad_node = base.grad_input;
      out.grad_topic = Eigen::VectorXd::Zero(w_topic.size());
      break;
    case CombineMode::kAddition:
      out.grad_node = base.grad_input;
      out.grad_topic = base.grad_input;
      break;
    case CombineMode::kHadamard:
      out.grad_node = base.grad_input.cwiseProduct(w_topic);
      out.grad_topic = base.grad_input.cwiseProduct(w_node);
      break;
  }
  return out;
}

double discard_probability(double frequency, double threshold) {
  if (!(frequency > 0.0)) return 0.0;
  return std::max(0.0, 1.0 - std::sqrt(threshold / frequency));
}

bool should_discard(const WalkCorpus& corpus, TopicId topic, NodeId node,
                    double threshold, std::mt19937_64& rng) {
  double p = discard_probability(corpus.frequency(topic, node), threshold);
  return rng::unit(rng) < p;
}

NoiseTable::NoiseTable(const std::vector<std::int64_t>& dense_counts,
                       double power) {
  double acc = 0.0;
  for (std::size_t row = 0; row < dense_counts.size(); ++row) {
    if (dense_counts[row] <= 0) continue;
    acc += std::pow(static_cast<double>(dense_counts[row]), power);
    rows_.push_back(static_cast<Eigen::Index>(row));
    cumulative_.push_back(acc);
  }
}

Eigen::Index NoiseTable::sample(std::mt19937_64& rng) const {
  if (rows_.empty()) throw std::runtime_error("empty noise vocabulary");
  double x = rng::unit(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), x);
  std::size_t idx = std::min<std::size_t>(it - cumulative_.begin(),
                                          rows_.size() - 1);
  return rows_[idx];
}

double NoiseTable::probability(Eigen::Index row) const {
  double prev = 0.0;
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i] == row) return (cumulative_[i] - prev) / cumulative_.back();
    prev = cumulative_[i];
  }
  return 0.0;
}

std::vector<Eigen::Index> sample_negatives(const NoiseTable& noise,
                                           Eigen::Index positive_row,
                                           int count, std::mt19937_64& rng) {
  if (noise.empty()) throw std::runtime_error("empty noise vocabulary");
  std::vector<Eigen::Index> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Eigen::Index row = positive_row;
    int retries = 0;
    while (row == positive_row) {
      if (retries++ > kNegativeRetries)
        throw std::runtime_error(
            "negative sampling stuck on the positive context");
      row = noise.sample(rng);
    }
    out.push_back(row);
  }
  return out;
}

std::vector<std::vector<std::int64_t>> context_row_counts(
    const WalkCorpus& corpus, const std::vector<TopicSubgraphView>& views,
    std::size_t n_nodes, const ContextConfig& cfg) {
  std::vector<std::vector<std::int64_t>> counts(
      views.size(), std::vector<std::int64_t>(2 * n_nodes, 0));
  for (const Walk& walk : corpus.walks) {
    int len = static_cast<int>(walk.nodes.size());
    if (len < 2) continue;
    std::vector<int> prefix = walk_sign_prefix(views[walk.topic], walk);
    auto& topic_counts = counts[walk.topic];
    for (int i = 0; i < len; ++i) {
      int lo = std::max(0, i - cfg.window);
      int hi = std::min(len - 1, i + cfg.window);
      for (int j = lo; j <= hi; ++j) {
        if (j == i) continue;
        ++topic_counts[EmbeddingStore::context_row(walk.nodes[j],
                                                   prefix[i] * prefix[j])];
      }
    }
  }
  return counts;
}

EmbeddingStore train(const WalkCorpus& corpus, const SignedTopicGraph& g,
                     const ContextConfig& ctx_cfg, const TrainerConfig& cfg,
                     int threads, std::vector<double>* epoch_mean_loss,
                     bool symmetrize) {
  cfg.validate();
  ctx_cfg.validate();
  EmbeddingStore store = EmbeddingStore::init(
      g.node_count(), g.topic_count(), cfg.dim, cfg.seed);
  if (epoch_mean_loss) epoch_mean_loss->clear();
  if (corpus.empty()) return store;

  std::vector<TopicSubgraphView> views;
  views.reserve(g.topic_count());
  for (std::size_t t = 0; t < g.topic_count(); ++t)
    views.emplace_back(g, static_cast<TopicId>(t), symmetrize);

  // Per-walk sign prefixes, computed once; the sign between positions i and j
  // is prefix[i] * prefix[j].
  const std::size_t n_walks = corpus.walks.size();
  std::vector<std::vector<std::int8_t>> prefixes(n_walks);
  std::size_t pairs_per_epoch = 0;
  for (std::size_t w = 0; w < n_walks; ++w) {
    const Walk& walk = corpus.walks[w];
    std::vector<int> prefix = walk_sign_prefix(views[walk.topic], walk);
    prefixes[w].assign(prefix.begin(), prefix.end());
    pairs_per_epoch += scheduled_pairs(walk.nodes.size(), ctx_cfg.window);
  }
  const double total_scheduled =
      static_cast<double>(pairs_per_epoch) * cfg.epochs;
  if (total_scheduled == 0) return store;

  std::vector<NoiseTable> noise;
  noise.reserve(g.topic_count());
  for (auto& counts :
       context_row_counts(corpus, views, g.node_count(), ctx_cfg))
    noise.emplace_back(counts, kNoisePower);

  // Subsampling frequencies, one per (topic, node).
  std::vector<std::vector<double>> discard(g.topic_count());
  for (std::size_t t = 0; t < g.topic_count(); ++t) {
    discard[t].resize(g.node_count(), 0.0);
    for (std::size_t n = 0; n < g.node_count(); ++n)
      discard[t][n] = discard_probability(
          corpus.frequency(static_cast<TopicId>(t), static_cast<NodeId>(n)),
          cfg.subsample_threshold);
  }

  std::atomic<std::size_t> scheduled_done{0};
  const double lr0 = cfg.initial_learning_rate;
  const int window = ctx_cfg.window;
  const int n_neg = cfg.negatives_per_context;

  auto run_walks = [&](const std::vector<std::uint32_t>& order,
                       std::size_t lo, std::size_t hi, int epoch,
                       double& loss_sum, std::size_t& trained) {
    Eigen::RowVectorXd h(cfg.dim), grad_h(cfg.dim), delta_t(cfg.dim);
    std::vector<std::uint8_t> keep;
    for (std::size_t oi = lo; oi < hi; ++oi) {
      std::uint32_t w = order[oi];
      const Walk& walk = corpus.walks[w];
      const auto& prefix = prefixes[w];
      int len = static_cast<int>(walk.nodes.size());
      auto rng = rng::stream(cfg.seed, {rng::kTrainerPairs,
                                        static_cast<std::uint64_t>(epoch),
                                        static_cast<std::uint64_t>(w)});

      // One subsampling decision per node occurrence; a pair trains only
      // when both of its occurrences are kept.
      keep.resize(len);
      const auto& topic_discard = discard[walk.topic];
      for (int i = 0; i < len; ++i)
        keep[i] = rng::unit(rng) >= topic_discard[walk.nodes[i]];
      if (len < 2) continue;

      const NoiseTable& topic_noise = noise[walk.topic];
      for (int i = 0; i < len; ++i) {
        int lo_j = std::max(0, i - window);
        int hi_j = std::min(len - 1, i + window);
        for (int j = lo_j; j <= hi_j; ++j) {
          if (j == i) continue;
          std::size_t done =
              scheduled_done.fetch_add(1, std::memory_order_relaxed);
          if (!keep[i] || !keep[j]) continue;
          double lr =
              lr0 * std::max(kMinLearningRateFactor,
                             1.0 - static_cast<double>(done) / total_scheduled);

          NodeId src = walk.nodes[i];
          Eigen::Index pos_row = EmbeddingStore::context_row(
              walk.nodes[j], prefix[i] * prefix[j]);

          auto node_row = store.nodes.row(src);
          auto topic_row = store.topics.row(walk.topic);
          switch (cfg.sigma_mode) {
            case CombineMode::kMask:
              h = node_row;
              break;
            case CombineMode::kAddition:
              h = node_row + topic_row;
              break;
            case CombineMode::kHadamard:
              h = node_row.cwiseProduct(topic_row);
              break;
          }

          grad_h.setZero();
          double pos_dot = store.contexts.row(pos_row).dot(h);
          double loss = -log_sigmoid(pos_dot);
          double g_pos = stable_sigmoid(pos_dot) - 1.0;
          grad_h += g_pos * store.contexts.row(pos_row);
          store.contexts.row(pos_row) -= (lr * g_pos) * h;

          for (int neg = 0; neg < n_neg; ++neg) {
            Eigen::Index neg_row = pos_row;
            int retries = 0;
            while (neg_row == pos_row) {
              if (retries++ > kNegativeRetries)
                throw std::runtime_error(
                    "negative sampling stuck on the positive context");
              neg_row = topic_noise.sample(rng);
            }
            double neg_dot = store.contexts.row(neg_row).dot(h);
            loss -= log_sigmoid(-neg_dot);
            double g_neg = stable_sigmoid(neg_dot);
            grad_h += g_neg * store.contexts.row(neg_row);
            store.contexts.row(neg_row) -= (lr * g_neg) * h;
          }

          switch (cfg.sigma_mode) {
            case CombineMode::kMask:
              node_row -= lr * grad_h;
              break;
            case CombineMode::kAddition:
              node_row -= lr * grad_h;
              topic_row -= lr * grad_h;
              break;
            case CombineMode::kHadamard:
              delta_t = grad_h.cwiseProduct(node_row);
              node_row -= lr * grad_h.cwiseProduct(topic_row);
              topic_row -= lr * delta_t;
              break;
          }

          loss_sum += loss;
          ++trained;
        }
      }
    }
  };

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<std::uint32_t> order(n_walks);
    std::iota(order.begin(), order.end(), 0);
    auto shuffle_rng = rng::stream(
        cfg.seed, {rng::kTrainerShuffle, static_cast<std::uint64_t>(epoch)});
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss = 0.0;
    std::size_t epoch_trained = 0;
    if (threads <= 1) {
      run_walks(order, 0, n_walks, epoch, epoch_loss, epoch_trained);
    } else {
      std::size_t n_workers = std::min<std::size_t>(threads, n_walks);
      std::vector<double> losses(n_workers, 0.0);
      std::vector<std::size_t> counts(n_workers, 0);
      std::vector<std::thread> workers;
      std::size_t chunk = (n_walks + n_workers - 1) / n_workers;
      for (std::size_t t = 0; t < n_workers; ++t) {
        std::size_t lo = t * chunk;
        std::size_t hi = std::min(n_walks, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&, lo, hi, t] {
          run_walks(order, lo, hi, epoch, losses[t], counts[t]);
        });
      }
      for (auto& th : workers) th.join();
      for (double l : losses) epoch_loss += l;
      for (std::size_t c : counts) epoch_trained += c;
    }
    if (epoch_mean_loss)
      epoch_mean_loss->push_back(
          epoch_trained == 0 ? 0.0 : epoch_loss / epoch_trained);
  }
  return store;
}

}  // namespace signet
