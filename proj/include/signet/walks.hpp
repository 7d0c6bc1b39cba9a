#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "signet/graph.hpp"

namespace signet {

struct WalkConfig {
  int walks_per_node = 10;    // r
  int walk_length = 40;       // l, counted in nodes
  double return_param = 1.5;  // p
  double inout_param = 0.5;   // q
  std::uint64_t seed = 1;

  void validate() const;
};

struct Walk {
  TopicId topic = 0;
  std::vector<NodeId> nodes;
};

// All walks plus per-topic node occurrence counts (the inputs to frequency
// subsampling and negative-sampling noise distributions).
struct WalkCorpus {
  std::vector<Walk> walks;
  std::vector<std::vector<std::int64_t>> topic_node_counts;  // [topic][node]
  std::vector<std::int64_t> topic_totals;                    // [topic]

  bool empty() const { return walks.empty(); }
  // Fraction of topic t's corpus occurrences belonging to `node`.
  double frequency(TopicId t, NodeId node) const;
};

// Unnormalized second-order transition weights out of `curr`, given the
// previously visited node. Weight 1/p to return to prev, 1 to a neighbor of
// prev, 1/q otherwise. With no prev (first step) all neighbors weigh 1.
// Throws if curr has no out-neighbors.
std::vector<std::pair<NodeId, double>> transition_weights(
    const TopicSubgraphView& view, std::optional<NodeId> prev, NodeId curr,
    double p, double q);

// One step drawn proportionally to transition_weights; nullopt at a dead end.
std::optional<NodeId> sample_transition(const TopicSubgraphView& view,
                                        std::optional<NodeId> prev,
                                        NodeId curr, double p, double q,
                                        std::mt19937_64& rng);

// Walk of at most cfg.walk_length nodes starting at `start`; truncated early
// only when the walker hits a node without out-neighbors.
Walk sample_walk(const TopicSubgraphView& view, NodeId start,
                 const WalkConfig& cfg, std::mt19937_64& rng);

// For every topic subgraph and every node in it, cfg.walks_per_node walks.
// Each walk's RNG stream is derived from (seed, topic, start node, walk
// index), so the multi-threaded result is identical to the single-threaded
// one and walks land in canonical (topic, node, walk index) order.
WalkCorpus generate_corpus(const SignedTopicGraph& g, const WalkConfig& cfg,
                           int threads = 1, bool symmetrize = true);

// Diagnostic dump, one walk per line: `topic<TAB>n0 n1 n2 ...`.
void write_walks(const WalkCorpus& corpus, const SignedTopicGraph& g,
                 std::ostream& out);

}  // namespace signet
