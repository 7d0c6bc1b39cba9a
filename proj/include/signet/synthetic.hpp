#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "signet/graph.hpp"

namespace signet {

// Polarized two-community benchmark. Topics are partitioned into correlated
// groups; within a group every topic shares the same community split. With
// intergroup_flip, a node's community is redrawn independently per group,
// which is the structure that rewards topic-aware training.
struct SyntheticConfig {
  int n_nodes = 1000;
  int n_topics = 20;
  std::vector<int> topic_group_of;  // size n_topics; filled contiguously if empty
  int n_topic_groups = 4;           // used only when topic_group_of is empty
  int edges_per_topic = 2000;
  double sign_noise = 0.05;
  bool intergroup_flip = false;
  std::uint64_t seed = 1;

  void validate() const;
  std::vector<int> resolved_groups() const;
};

struct GroundTruth {
  int n_groups = 0;
  // community[group][node] in {0, 1}
  std::vector<std::vector<int>> community;
};

// Edge sign is +1 within a community and -1 across, then flipped with
// probability sign_noise. Endpoints are drawn uniformly; self-pairs redrawn.
std::pair<SignedTopicGraph, GroundTruth> generate_synthetic(
    const SyntheticConfig& cfg);

// Sidecar format: `node<TAB>topic_group<TAB>community`.
void write_ground_truth(const GroundTruth& truth, const SignedTopicGraph& g,
                        std::ostream& out);

}  // namespace signet
