#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "signet/embedding.hpp"
#include "signet/graph.hpp"

namespace signet {

// The five operators turning two node vectors into an edge vector.
enum class EdgeOp { kHadamard, kL1, kL2, kAverage, kConcat };

const char* to_string(EdgeOp op);
EdgeOp edge_op_from_string(const std::string& name);
inline constexpr EdgeOp kAllEdgeOps[] = {EdgeOp::kHadamard, EdgeOp::kL1,
                                         EdgeOp::kL2, EdgeOp::kAverage,
                                         EdgeOp::kConcat};

Eigen::Index phi_output_dim(EdgeOp op, Eigen::Index dim);

// hadamard: e1[i]*e2[i]; l1: |e1[i]-e2[i]|; l2: (e1[i]-e2[i])^2;
// average: (e1[i]+e2[i])/2; concat: e1 followed by e2.
template <typename D1, typename D2>
Eigen::VectorXd phi(EdgeOp op, const Eigen::MatrixBase<D1>& e1,
                    const Eigen::MatrixBase<D2>& e2) {
  if (e1.size() != e2.size()) throw std::runtime_error("phi: dimension mismatch");
  switch (op) {
    case EdgeOp::kHadamard:
      return e1.cwiseProduct(e2);
    case EdgeOp::kL1:
      return (e1 - e2).cwiseAbs();
    case EdgeOp::kL2:
      return (e1 - e2).cwiseAbs2();
    case EdgeOp::kAverage:
      return 0.5 * (e1 + e2);
    case EdgeOp::kConcat: {
      Eigen::VectorXd out(e1.size() + e2.size());
      out.head(e1.size()) = e1;
      out.tail(e2.size()) = e2;
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

struct EdgeFeature {
  Eigen::VectorXd vector;
  int label = +1;
  TopicId topic = 0;
  NodeId source = 0;
  NodeId target = 0;
};

// Feature for one edge. Without a sigma mode the topic is ignored:
// phi(W_u[source], W_u[target]). With one, the topic vector is folded into
// the TARGET embedding only: phi(W_u[source], sigma(W_t[topic], W_u[target])).
EdgeFeature edge_feature(const EmbeddingStore& store, const Edge& edge,
                         std::optional<CombineMode> sigma_mode, EdgeOp op);

// Bulk variant: one feature row per edge, plus +-1 labels.
struct EdgeFeatureMatrix {
  RowMatrixXd rows;
  std::vector<int> labels;
};
EdgeFeatureMatrix edge_feature_matrix(const EmbeddingStore& store,
                                      std::span<const Edge> edges,
                                      std::optional<CombineMode> sigma_mode,
                                      EdgeOp op);

// Diagnostic dump: `src<TAB>dst<TAB>topic<TAB>label<TAB>v1,...,vd`.
void write_feature_dump(const SignedTopicGraph& g,
                        std::span<const EdgeFeature> features,
                        std::ostream& out);

}  // namespace signet
