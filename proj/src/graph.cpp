#include "signet/graph.hpp"

#include <algorithm>
#include <array>
#include <tuple>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace signet {

namespace {

int parse_sign(const std::string& token) {
  if (token == "+" || token == "1" || token == "+1") return +1;
  if (token == "-" || token == "-1") return -1;
  throw std::runtime_error("bad sign token '" + token + "'");
}

}  // namespace

NodeId SignedTopicGraph::intern_node(const std::string& name) {
  auto it = node_ids_.find(name);
  if (it != node_ids_.end()) return it->second;
  NodeId id = static_cast<NodeId>(node_names_.size());
  node_names_.push_back(name);
  node_ids_.emplace(name, id);
  return id;
}

TopicId SignedTopicGraph::intern_topic(const std::string& name) {
  auto it = topic_ids_.find(name);
  if (it != topic_ids_.end()) return it->second;
  TopicId id = static_cast<TopicId>(topic_names_.size());
  topic_names_.push_back(name);
  topic_ids_.emplace(name, id);
  return id;
}

void SignedTopicGraph::add_edge(NodeId source, NodeId target, int sign,
                                TopicId topic) {
  if (sign != +1 && sign != -1)
    throw std::runtime_error("edge sign must be +1 or -1");
  if (source == target) throw std::runtime_error("self-loop rejected");
  if (source < 0 || static_cast<std::size_t>(source) >= node_count() ||
      target < 0 || static_cast<std::size_t>(target) >= node_count())
    throw std::runtime_error("edge endpoint not interned");
  if (topic < 0 || static_cast<std::size_t>(topic) >= topic_count())
    throw std::runtime_error("edge topic not interned");
  edges_.push_back(Edge{source, target, sign, topic});
}

std::optional<NodeId> SignedTopicGraph::find_node(
    const std::string& name) const {
  auto it = node_ids_.find(name);
  if (it == node_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<TopicId> SignedTopicGraph::find_topic(
    const std::string& name) const {
  auto it = topic_ids_.find(name);
  if (it == topic_ids_.end()) return std::nullopt;
  return it->second;
}

SignedTopicGraph SignedTopicGraph::with_edges(std::vector<Edge> edges) const {
  SignedTopicGraph out;
  out.node_names_ = node_names_;
  out.topic_names_ = topic_names_;
  out.node_ids_ = node_ids_;
  out.topic_ids_ = topic_ids_;
  for (const Edge& e : edges) {
    if (e.sign != +1 && e.sign != -1)
      throw std::runtime_error("edge sign must be +1 or -1");
  }
  out.edges_ = std::move(edges);
  return out;
}

SignedTopicGraph load_edge_list(std::istream& in) {
  SignedTopicGraph g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::array<std::string, 4> field;
    std::size_t start = 0;
    int n_fields = 0;
    for (; n_fields < 4; ++n_fields) {
      std::size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        field[n_fields] = line.substr(start);
        ++n_fields;
        start = line.size() + 1;
        break;
      }
      field[n_fields] = line.substr(start, tab - start);
      start = tab + 1;
    }
    if (n_fields != 4 || start <= line.size())
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected 4 tab-separated fields");
    if (field[0].empty() || field[1].empty() || field[3].empty())
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": empty field");

    int sign;
    try {
      sign = parse_sign(field[2]);
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " +
                               e.what());
    }
    if (field[0] == field[1])
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": self-loop");

    NodeId s = g.intern_node(field[0]);
    NodeId t = g.intern_node(field[1]);
    TopicId topic = g.intern_topic(field[3]);
    g.add_edge(s, t, sign, topic);
  }
  return g;
}

SignedTopicGraph load_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_edge_list(in);
}

void write_edge_list(const SignedTopicGraph& g, std::ostream& out) {
  for (const Edge& e : g.edges()) {
    out << g.node_name(e.source) << '\t' << g.node_name(e.target) << '\t'
        << (e.sign > 0 ? "+1" : "-1") << '\t' << g.topic_name(e.topic) << '\n';
  }
}

void write_edge_list_file(const SignedTopicGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_edge_list(g, out);
}

SignedTopicGraph aggregate_parallel_edges(const SignedTopicGraph& g) {
  std::map<std::tuple<TopicId, NodeId, NodeId>, long long> sums;
  for (const Edge& e : g.edges())
    sums[{e.topic, e.source, e.target}] += e.sign;

  std::vector<Edge> merged;
  merged.reserve(sums.size());
  for (const auto& [key, sum] : sums) {
    const auto& [topic, source, target] = key;
    merged.push_back(Edge{source, target, sum > 0 ? +1 : -1, topic});
  }
  return g.with_edges(std::move(merged));
}

TopicSubgraphView::TopicSubgraphView(const SignedTopicGraph& g, TopicId topic,
                                     bool symmetrize)
    : topic_(topic), symmetrized_(symmetrize) {
  if (topic < 0 || static_cast<std::size_t>(topic) >= g.topic_count())
    throw std::runtime_error("unknown topic id " + std::to_string(topic));

  // Merge duplicates with the sign-sum rule; with an aggregated input graph
  // duplicates arise only from symmetrizing opposite-direction edges.
  std::map<std::pair<NodeId, NodeId>, long long> sums;
  for (const Edge& e : g.edges()) {
    if (e.topic != topic) continue;
    ++edge_count_;
    sums[{e.source, e.target}] += e.sign;
    if (symmetrize) sums[{e.target, e.source}] += e.sign;
  }

  for (const auto& [key, sum] : sums) {
    if (nodes_.empty() || nodes_.back() != key.first)
      nodes_.push_back(key.first);
  }
  std::vector<NodeId> targets;
  for (const auto& [key, sum] : sums) targets.push_back(key.second);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  std::vector<NodeId> merged_nodes;
  std::set_union(nodes_.begin(), nodes_.end(), targets.begin(), targets.end(),
                 std::back_inserter(merged_nodes));
  nodes_ = std::move(merged_nodes);

  offsets_.assign(g.node_count() + 1, 0);
  for (const auto& [key, sum] : sums) ++offsets_[key.first + 1];
  for (std::size_t i = 1; i < offsets_.size(); ++i)
    offsets_[i] += offsets_[i - 1];
  adjacency_.resize(sums.size());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (const auto& [key, sum] : sums)
    adjacency_[cursor[key.first]++] = {key.second, sum > 0 ? +1 : -1};
}

std::span<const std::pair<NodeId, int>> TopicSubgraphView::neighbors(
    NodeId u) const {
  if (u < 0 || static_cast<std::size_t>(u) + 1 >= offsets_.size()) return {};
  return {adjacency_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
}

std::optional<int> TopicSubgraphView::edge_sign(NodeId u, NodeId v) const {
  auto adj = neighbors(u);
  auto it = std::lower_bound(
      adj.begin(), adj.end(), v,
      [](const std::pair<NodeId, int>& a, NodeId b) { return a.first < b; });
  if (it == adj.end() || it->first != v) return std::nullopt;
  return it->second;
}

TopicSubgraphView topic_subgraph(const SignedTopicGraph& g, TopicId topic,
                                 bool symmetrize) {
  return TopicSubgraphView(g, topic, symmetrize);
}

}  // namespace signet
