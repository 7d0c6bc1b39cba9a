#include "signet/walks.hpp"

#include <ostream>
#include <stdexcept>
#include <thread>

#include "signet/rng.hpp"

namespace signet {

namespace {

// Fills `weights` aligned with view.neighbors(curr).
void fill_transition_weights(const TopicSubgraphView& view,
                             std::optional<NodeId> prev, NodeId curr, double p,
                             double q, std::vector<double>& weights) {
  auto adj = view.neighbors(curr);
  weights.resize(adj.size());
  if (!prev) {
    std::fill(weights.begin(), weights.end(), 1.0);
    return;
  }
  for (std::size_t i = 0; i < adj.size(); ++i) {
    NodeId v = adj[i].first;
    if (v == *prev)
      weights[i] = 1.0 / p;
    else if (view.has_edge(*prev, v))
      weights[i] = 1.0;
    else
      weights[i] = 1.0 / q;
  }
}

NodeId pick_weighted(std::span<const std::pair<NodeId, int>> adj,
                     const std::vector<double>& weights,
                     std::mt19937_64& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double x = rng::unit(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (x < acc) return adj[i].first;
  }
  return adj.back().first;
}

}  // namespace

void WalkConfig::validate() const {
  if (walks_per_node < 1) throw std::runtime_error("walks_per_node must be >= 1");
  if (walk_length < 2) throw std::runtime_error("walk_length must be >= 2");
  if (!(return_param > 0.0)) throw std::runtime_error("p must be > 0");
  if (!(inout_param > 0.0)) throw std::runtime_error("q must be > 0");
}

double WalkCorpus::frequency(TopicId t, NodeId node) const {
  const auto& counts = topic_node_counts.at(t);
  if (node < 0 || static_cast<std::size_t>(node) >= counts.size()) return 0.0;
  std::int64_t total = topic_totals.at(t);
  return total == 0 ? 0.0 : static_cast<double>(counts[node]) / total;
}

std::vector<std::pair<NodeId, double>> transition_weights(
    const TopicSubgraphView& view, std::optional<NodeId> prev, NodeId curr,
    double p, double q) {
  auto adj = view.neighbors(curr);
  if (adj.empty())
    throw std::runtime_error("dead end: node " + std::to_string(curr) +
                             " has no out-neighbors in topic " +
                             std::to_string(view.topic()));
  std::vector<double> weights;
  fill_transition_weights(view, prev, curr, p, q, weights);
  std::vector<std::pair<NodeId, double>> out(adj.size());
  for (std::size_t i = 0; i < adj.size(); ++i)
    out[i] = {adj[i].first, weights[i]};
  return out;
}

std::optional<NodeId> sample_transition(const TopicSubgraphView& view,
                                        std::optional<NodeId> prev,
                                        NodeId curr, double p, double q,
                                        std::mt19937_64& rng) {
  auto adj = view.neighbors(curr);
  if (adj.empty()) return std::nullopt;
  thread_local std::vector<double> weights;
  fill_transition_weights(view, prev, curr, p, q, weights);
  return pick_weighted(adj, weights, rng);
}

Walk sample_walk(const TopicSubgraphView& view, NodeId start,
                 const WalkConfig& cfg, std::mt19937_64& rng) {
  Walk walk;
  walk.topic = view.topic();
  walk.nodes.reserve(cfg.walk_length);
  walk.nodes.push_back(start);
  std::optional<NodeId> prev;
  NodeId curr = start;
  while (walk.nodes.size() < static_cast<std::size_t>(cfg.walk_length)) {
    auto next = sample_transition(view, prev, curr, cfg.return_param,
                                  cfg.inout_param, rng);
    if (!next) break;
    walk.nodes.push_back(*next);
    prev = curr;
    curr = *next;
  }
  return walk;
}

WalkCorpus generate_corpus(const SignedTopicGraph& g, const WalkConfig& cfg,
                           int threads, bool symmetrize) {
  cfg.validate();
  WalkCorpus corpus;
  const std::size_t n_topics = g.topic_count();

  std::vector<TopicSubgraphView> views;
  views.reserve(n_topics);
  std::vector<std::size_t> topic_offset(n_topics + 1, 0);
  for (std::size_t t = 0; t < n_topics; ++t) {
    views.emplace_back(g, static_cast<TopicId>(t), symmetrize);
    topic_offset[t + 1] =
        topic_offset[t] + views.back().nodes().size() * cfg.walks_per_node;
  }
  corpus.walks.resize(topic_offset.back());

  auto run_range = [&](std::size_t task_begin, std::size_t task_end) {
    // Task index enumerates (topic, node) pairs in canonical order.
    std::size_t t = 0;
    std::size_t skipped = 0;
    for (std::size_t task = task_begin; task < task_end; ++task) {
      while (task >= skipped + views[t].nodes().size()) {
        skipped += views[t].nodes().size();
        ++t;
      }
      std::size_t node_pos = task - skipped;
      NodeId start = views[t].nodes()[node_pos];
      for (int w = 0; w < cfg.walks_per_node; ++w) {
        auto rng = rng::stream(
            cfg.seed, {rng::kWalks, static_cast<std::uint64_t>(t),
                       static_cast<std::uint64_t>(start),
                       static_cast<std::uint64_t>(w)});
        corpus.walks[topic_offset[t] + node_pos * cfg.walks_per_node + w] =
            sample_walk(views[t], start, cfg, rng);
      }
    }
  };

  std::size_t n_tasks = 0;
  for (const auto& v : views) n_tasks += v.nodes().size();
  if (threads <= 1 || n_tasks < 2) {
    run_range(0, n_tasks);
  } else {
    std::size_t n_workers = std::min<std::size_t>(threads, n_tasks);
    std::vector<std::thread> workers;
    std::size_t chunk = (n_tasks + n_workers - 1) / n_workers;
    for (std::size_t w = 0; w < n_workers; ++w) {
      std::size_t lo = w * chunk;
      std::size_t hi = std::min(n_tasks, lo + chunk);
      if (lo >= hi) break;
      workers.emplace_back(run_range, lo, hi);
    }
    for (auto& th : workers) th.join();
  }

  corpus.topic_node_counts.assign(
      n_topics, std::vector<std::int64_t>(g.node_count(), 0));
  corpus.topic_totals.assign(n_topics, 0);
  for (const Walk& walk : corpus.walks) {
    for (NodeId n : walk.nodes) ++corpus.topic_node_counts[walk.topic][n];
    corpus.topic_totals[walk.topic] += walk.nodes.size();
  }
  return corpus;
}

void write_walks(const WalkCorpus& corpus, const SignedTopicGraph& g,
                 std::ostream& out) {
  for (const Walk& walk : corpus.walks) {
    out << g.topic_name(walk.topic) << '\t';
    for (std::size_t i = 0; i < walk.nodes.size(); ++i) {
      if (i) out << ' ';
      out << g.node_name(walk.nodes[i]);
    }
    out << '\n';
  }
}

}  // namespace signet
