#include "signet/edge_features.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace signet {

const char* to_string(EdgeOp op) {
  switch (op) {
    case EdgeOp::kHadamard:
      return "hadamard";
    case EdgeOp::kL1:
      return "l1";
    case EdgeOp::kL2:
      return "l2";
    case EdgeOp::kAverage:
      return "average";
    case EdgeOp::kConcat:
      return "concat";
  }
  return "?";
}

EdgeOp edge_op_from_string(const std::string& name) {
  if (name == "hadamard") return EdgeOp::kHadamard;
  if (name == "l1") return EdgeOp::kL1;
  if (name == "l2") return EdgeOp::kL2;
  if (name == "average") return EdgeOp::kAverage;
  if (name == "concat" || name == "concatenation") return EdgeOp::kConcat;
  throw std::runtime_error("unknown edge op '" + name + "'");
}

Eigen::Index phi_output_dim(EdgeOp op, Eigen::Index dim) {
  return op == EdgeOp::kConcat ? 2 * dim : dim;
}

namespace {

void check_edge(const EmbeddingStore& store, const Edge& edge) {
  if (edge.source < 0 || 2 * edge.source >= store.contexts.rows() ||
      edge.target < 0 || 2 * edge.target >= store.contexts.rows() ||
      edge.source >= store.nodes.rows() || edge.target >= store.nodes.rows())
    throw std::runtime_error("edge endpoint not present in embedding store");
  if (edge.topic < 0 || edge.topic >= store.topics.rows())
    throw std::runtime_error("edge topic not present in embedding store");
}

}  // namespace

EdgeFeature edge_feature(const EmbeddingStore& store, const Edge& edge,
                         std::optional<CombineMode> sigma_mode, EdgeOp op) {
  check_edge(store, edge);
  EdgeFeature out;
  out.label = edge.sign;
  out.topic = edge.topic;
  out.source = edge.source;
  out.target = edge.target;
  Eigen::RowVectorXd source_vec = store.nodes.row(edge.source);
  Eigen::RowVectorXd target_vec = store.nodes.row(edge.target);
  if (sigma_mode)
    target_vec = combine_sigma(*sigma_mode, store.topics.row(edge.topic),
                               target_vec)
                     .transpose();
  out.vector = phi(op, source_vec.transpose(), target_vec.transpose());
  return out;
}

EdgeFeatureMatrix edge_feature_matrix(const EmbeddingStore& store,
                                      std::span<const Edge> edges,
                                      std::optional<CombineMode> sigma_mode,
                                      EdgeOp op) {
  EdgeFeatureMatrix out;
  out.rows.resize(static_cast<Eigen::Index>(edges.size()),
                  phi_output_dim(op, store.dim));
  out.labels.reserve(edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    EdgeFeature f = edge_feature(store, edges[i], sigma_mode, op);
    out.rows.row(static_cast<Eigen::Index>(i)) = f.vector.transpose();
    out.labels.push_back(f.label);
  }
  return out;
}

void write_feature_dump(const SignedTopicGraph& g,
                        std::span<const EdgeFeature> features,
                        std::ostream& out) {
  char buf[32];
  for (const EdgeFeature& f : features) {
    out << g.node_name(f.source) << '\t' << g.node_name(f.target) << '\t'
        << g.topic_name(f.topic) << '\t' << (f.label > 0 ? "+1" : "-1")
        << '\t';
    for (Eigen::Index i = 0; i < f.vector.size(); ++i) {
      if (i) out << ',';
      std::snprintf(buf, sizeof buf, "%.8g", f.vector(i));
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace signet
