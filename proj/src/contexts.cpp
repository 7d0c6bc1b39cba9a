#include "signet/contexts.hpp"

#include <stdexcept>
#include <string>

namespace signet {

namespace {

int step_sign(const TopicSubgraphView& view, NodeId from, NodeId to) {
  auto sign = view.edge_sign(from, to);
  if (!sign)
    throw std::runtime_error("walk step " + std::to_string(from) + " -> " +
                             std::to_string(to) +
                             " has no signed edge in topic " +
                             std::to_string(view.topic()));
  return *sign;
}

}  // namespace

void ContextConfig::validate() const {
  if (window < 1) throw std::runtime_error("window must be >= 1");
}

int inferred_sign(const TopicSubgraphView& view, const Walk& walk, int center,
                  int offset) {
  if (offset == 0) throw std::runtime_error("offset must be nonzero");
  int other = center + offset;
  int len = static_cast<int>(walk.nodes.size());
  if (center < 0 || center >= len || other < 0 || other >= len)
    throw std::runtime_error("walk segment out of bounds");
  int lo = std::min(center, other);
  int hi = std::max(center, other);
  int sign = +1;
  for (int i = lo; i < hi; ++i)
    sign *= step_sign(view, walk.nodes[i], walk.nodes[i + 1]);
  return sign;
}

std::vector<int> walk_sign_prefix(const TopicSubgraphView& view,
                                  const Walk& walk) {
  std::vector<int> prefix(walk.nodes.size(), +1);
  for (std::size_t i = 1; i < walk.nodes.size(); ++i)
    prefix[i] =
        prefix[i - 1] * step_sign(view, walk.nodes[i - 1], walk.nodes[i]);
  return prefix;
}

std::vector<TrainingExample> build_examples(const TopicSubgraphView& view,
                                            const Walk& walk,
                                            const ContextConfig& cfg) {
  cfg.validate();
  std::vector<TrainingExample> examples;
  int len = static_cast<int>(walk.nodes.size());
  if (len < 2) return examples;

  std::vector<int> prefix = walk_sign_prefix(view, walk);
  examples.reserve(len);
  for (int i = 0; i < len; ++i) {
    TrainingExample ex;
    ex.source = walk.nodes[i];
    ex.topic = walk.topic;
    int lo = std::max(0, i - cfg.window);
    int hi = std::min(len - 1, i + cfg.window);
    ex.contexts.reserve(hi - lo);
    for (int j = lo; j <= hi; ++j) {
      if (j == i) continue;
      ex.contexts.push_back(SignedContext{walk.nodes[j], prefix[i] * prefix[j]});
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

}  // namespace signet
