#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "signet/types.hpp"

namespace signet {

// One signed, topic-attributed interaction. Sign is +1 (agreement) or -1
// (disagreement); self-loops are rejected at construction.
struct Edge {
  NodeId source = 0;
  NodeId target = 0;
  int sign = +1;
  TopicId topic = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Directed multigraph whose edges carry a sign and a topic. Node and topic
// ids are dense integers; original string ids live in the interning tables
// and only matter at the I/O boundary. Immutable once built.
class SignedTopicGraph {
 public:
  NodeId intern_node(const std::string& name);
  TopicId intern_topic(const std::string& name);

  // Validates sign and rejects self-loops; endpoints/topic must be interned.
  void add_edge(NodeId source, NodeId target, int sign, TopicId topic);

  std::size_t node_count() const { return node_names_.size(); }
  std::size_t topic_count() const { return topic_names_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  const std::string& node_name(NodeId id) const { return node_names_.at(id); }
  const std::string& topic_name(TopicId id) const {
    return topic_names_.at(id);
  }
  std::optional<NodeId> find_node(const std::string& name) const;
  std::optional<TopicId> find_topic(const std::string& name) const;

  // Same node/topic universe (interning tables preserved), different edges.
  SignedTopicGraph with_edges(std::vector<Edge> edges) const;

 private:
  std::vector<Edge> edges_;
  std::vector<std::string> node_names_;
  std::vector<std::string> topic_names_;
  std::unordered_map<std::string, NodeId> node_ids_;
  std::unordered_map<std::string, TopicId> topic_ids_;
};

// Adjacency over the edges of one topic. When symmetrized (the default for
// walking), each directed edge contributes both directions; opposite-direction
// duplicates for the same unordered pair are merged with the sign-sum rule so
// the sign lookup stays single-valued.
class TopicSubgraphView {
 public:
  TopicSubgraphView(const SignedTopicGraph& g, TopicId topic, bool symmetrize);

  TopicId topic() const { return topic_; }
  bool symmetrized() const { return symmetrized_; }

  // Endpoints of the topic's edges, ascending.
  const std::vector<NodeId>& nodes() const { return nodes_; }
  // Out-neighbors of u with edge signs, sorted by neighbor id.
  std::span<const std::pair<NodeId, int>> neighbors(NodeId u) const;
  std::size_t degree(NodeId u) const { return neighbors(u).size(); }
  std::optional<int> edge_sign(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const { return edge_sign(u, v).has_value(); }
  // Number of (directed, aggregated) edges of the topic, pre-symmetrization.
  std::size_t edge_count() const { return edge_count_; }

 private:
  TopicId topic_;
  bool symmetrized_;
  std::size_t edge_count_ = 0;
  std::vector<NodeId> nodes_;
  // CSR over the global node id space.
  std::vector<std::size_t> offsets_;
  std::vector<std::pair<NodeId, int>> adjacency_;
};

// Reads `source<TAB>target<TAB>sign<TAB>topic` lines; '#' lines and blank
// lines are skipped. Signs parse as +, -, 1, +1, -1. Malformed input and
// self-loops raise std::runtime_error naming the line number. Parallel edges
// are kept; aggregation is a separate step.
SignedTopicGraph load_edge_list(std::istream& in);
SignedTopicGraph load_edge_list_file(const std::string& path);

void write_edge_list(const SignedTopicGraph& g, std::ostream& out);
void write_edge_list_file(const SignedTopicGraph& g, const std::string& path);

// Collapses parallel (source, target, topic) edges into a single edge whose
// sign is +1 when the sign sum is positive and -1 otherwise. Output edges are
// sorted by (topic, source, target); node and topic sets are unchanged.
SignedTopicGraph aggregate_parallel_edges(const SignedTopicGraph& g);

TopicSubgraphView topic_subgraph(const SignedTopicGraph& g, TopicId topic,
                                 bool symmetrize = true);

}  // namespace signet
