#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>

#include "signet/graph.hpp"
#include "signet/types.hpp"

namespace signet {

// How a topic vector is merged into a node vector before the skip-gram dot
// product (and, optionally, before edge-feature construction).
enum class CombineMode { kMask, kAddition, kHadamard };

const char* to_string(CombineMode mode);
CombineMode combine_mode_from_string(const std::string& name);

// Overflow-safe logistic function.
template <typename Scalar>
Scalar stable_sigmoid(Scalar x) {
  if (x >= Scalar(0)) {
    Scalar e = std::exp(-x);
    return Scalar(1) / (Scalar(1) + e);
  }
  Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

// log(sigmoid(x)) without overflow for large |x|.
template <typename Scalar>
Scalar log_sigmoid(Scalar x) {
  if (x >= Scalar(0)) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// sigma(topic, node): mask ignores the topic, addition sums, hadamard
// multiplies elementwise. Dimension mismatch throws.
template <typename DerivedT, typename DerivedU>
Eigen::VectorXd combine_sigma(CombineMode mode,
                              const Eigen::MatrixBase<DerivedT>& topic,
                              const Eigen::MatrixBase<DerivedU>& node) {
  if (mode != CombineMode::kMask && topic.size() != node.size())
    throw std::runtime_error("sigma: dimension mismatch");
  switch (mode) {
    case CombineMode::kMask:
      return node;
    case CombineMode::kAddition:
      return topic + node;
    case CombineMode::kHadamard:
      return topic.cwiseProduct(node);
  }
  throw std::logic_error("unreachable");
}

// The three learned tables. Context rows are indexed by (node, sign):
// row 2*node holds (node, +1) and row 2*node + 1 holds (node, -1).
struct EmbeddingStore {
  int dim = 0;
  RowMatrixXd nodes;     // |V| x d
  RowMatrixXd contexts;  // 2|V| x d
  RowMatrixXd topics;    // |T| x d

  static Eigen::Index context_row(NodeId node, int sign) {
    return 2 * static_cast<Eigen::Index>(node) + (sign < 0 ? 1 : 0);
  }

  // Node and topic rows uniform in [-0.5/dim, +0.5/dim]; context rows zero.
  static EmbeddingStore init(Eigen::Index n_nodes, Eigen::Index n_topics,
                             int dim, std::uint64_t seed);
};

// Text export: first line `<count> <dim>`, then `name v1 ... vd` per row.
// Node rows use original string ids, context rows `<node>__pos`/`<node>__neg`,
// topic rows the topic string id.
void write_embedding_table(const RowMatrixXd& table,
                           const std::vector<std::string>& names,
                           std::ostream& out);

// Writes `<stem>.nodes.vec`, `<stem>.contexts.vec`, `<stem>.topics.vec`.
void write_embedding_files(const EmbeddingStore& store,
                           const SignedTopicGraph& g, const std::string& stem);

}  // namespace signet
