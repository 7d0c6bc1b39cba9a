#include "signet/embedding.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "signet/rng.hpp"

namespace signet {

const char* to_string(CombineMode mode) {
  switch (mode) {
    case CombineMode::kMask:
      return "mask";
    case CombineMode::kAddition:
      return "addition";
    case CombineMode::kHadamard:
      return "hadamard";
  }
  return "?";
}

CombineMode combine_mode_from_string(const std::string& name) {
  if (name == "mask") return CombineMode::kMask;
  if (name == "addition") return CombineMode::kAddition;
  if (name == "hadamard") return CombineMode::kHadamard;
  throw std::runtime_error("unknown sigma mode '" + name + "'");
}

EmbeddingStore EmbeddingStore::init(Eigen::Index n_nodes,
                                    Eigen::Index n_topics, int dim,
                                    std::uint64_t seed) {
  if (dim < 1) throw std::runtime_error("dim must be >= 1");
  EmbeddingStore store;
  store.dim = dim;
  store.nodes.resize(n_nodes, dim);
  store.contexts = RowMatrixXd::Zero(2 * n_nodes, dim);
  store.topics.resize(n_topics, dim);

  double scale = 1.0 / dim;
  auto node_rng = rng::stream(seed, {rng::kTrainerInit, 0});
  for (Eigen::Index i = 0; i < store.nodes.size(); ++i)
    store.nodes.data()[i] = (rng::unit(node_rng) - 0.5) * scale;
  auto topic_rng = rng::stream(seed, {rng::kTrainerInit, 1});
  for (Eigen::Index i = 0; i < store.topics.size(); ++i)
    store.topics.data()[i] = (rng::unit(topic_rng) - 0.5) * scale;
  return store;
}

void write_embedding_table(const RowMatrixXd& table,
                           const std::vector<std::string>& names,
                           std::ostream& out) {
  if (static_cast<Eigen::Index>(names.size()) != table.rows())
    throw std::runtime_error("embedding export: name/row count mismatch");
  out << table.rows() << ' ' << table.cols() << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    out << names[r];
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      std::snprintf(buf, sizeof buf, " %.8g", table(r, c));
      out << buf;
    }
    out << '\n';
  }
}

void write_embedding_files(const EmbeddingStore& store,
                           const SignedTopicGraph& g,
                           const std::string& stem) {
  auto open = [](const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
  };

  std::vector<std::string> node_names(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i)
    node_names[i] = g.node_name(static_cast<NodeId>(i));
  auto nodes_out = open(stem + ".nodes.vec");
  write_embedding_table(store.nodes, node_names, nodes_out);

  std::vector<std::string> context_names(2 * g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    context_names[2 * i] = node_names[i] + "__pos";
    context_names[2 * i + 1] = node_names[i] + "__neg";
  }
  auto contexts_out = open(stem + ".contexts.vec");
  write_embedding_table(store.contexts, context_names, contexts_out);

  std::vector<std::string> topic_names(g.topic_count());
  for (std::size_t i = 0; i < g.topic_count(); ++i)
    topic_names[i] = g.topic_name(static_cast<TopicId>(i));
  auto topics_out = open(stem + ".topics.vec");
  write_embedding_table(store.topics, topic_names, topics_out);
}

}  // namespace signet
