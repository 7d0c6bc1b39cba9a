#pragma once

#include <vector>

#include "signet/walks.hpp"

namespace signet {

struct ContextConfig {
  int window = 5;  // k

  void validate() const;
};

struct SignedContext {
  NodeId node = 0;
  int sign = +1;

  friend bool operator==(const SignedContext&, const SignedContext&) = default;
};

// One walk position turned into a skip-gram example: the source node predicts
// the (node, sign) pairs within the window, where each sign is the product of
// edge signs along the walk segment between source and context.
struct TrainingExample {
  NodeId source = 0;
  TopicId topic = 0;
  std::vector<SignedContext> contexts;
};

// Sign between walk positions `center` and `center + offset`, computed as the
// product of the signs of the edges traversed between them (balance-theory
// composition). Throws when a consecutive pair has no signed edge in the view
// (corpus/view mismatch) or the indices fall outside the walk.
int inferred_sign(const TopicSubgraphView& view, const Walk& walk, int center,
                  int offset);

// prefix[0] = +1, prefix[i] = product of edge signs over the first i steps.
// The sign between positions i and j is prefix[i] * prefix[j].
std::vector<int> walk_sign_prefix(const TopicSubgraphView& view,
                                  const Walk& walk);

// One example per walk position, with up to cfg.window contexts on each side.
// Length-1 walks produce nothing. Signs come from prefix products; every
// occurrence of a revisited node is kept as its own context pair.
std::vector<TrainingExample> build_examples(const TopicSubgraphView& view,
                                            const Walk& walk,
                                            const ContextConfig& cfg);

}  // namespace signet
