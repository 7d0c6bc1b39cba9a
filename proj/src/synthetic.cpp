#include "signet/synthetic.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "signet/rng.hpp"

namespace signet {

void SyntheticConfig::validate() const {
  if (n_nodes < 4) throw std::runtime_error("need at least 4 nodes");
  if (n_topics < 1) throw std::runtime_error("need at least 1 topic");
  if (edges_per_topic < 1) throw std::runtime_error("edges_per_topic must be >= 1");
  if (!(sign_noise >= 0.0) || sign_noise >= 0.5)
    throw std::runtime_error("sign_noise must be in [0, 0.5)");
  if (topic_group_of.empty()) {
    if (n_topic_groups < 1 || n_topic_groups > n_topics)
      throw std::runtime_error("n_topic_groups out of range");
  } else if (static_cast<int>(topic_group_of.size()) != n_topics) {
    throw std::runtime_error("topic_group_of must cover every topic");
  }
}

std::vector<int> SyntheticConfig::resolved_groups() const {
  if (!topic_group_of.empty()) {
    int n_groups = *std::max_element(topic_group_of.begin(),
                                     topic_group_of.end()) + 1;
    for (int g : topic_group_of)
      if (g < 0 || g >= n_groups)
        throw std::runtime_error("topic group ids must be dense from 0");
    return topic_group_of;
  }
  // Contiguous, near-equal blocks.
  std::vector<int> groups(n_topics);
  int base = n_topics / n_topic_groups;
  int rem = n_topics % n_topic_groups;
  int t = 0;
  for (int g = 0; g < n_topic_groups; ++g) {
    int size = base + (g < rem ? 1 : 0);
    for (int i = 0; i < size; ++i) groups[t++] = g;
  }
  return groups;
}

std::pair<SignedTopicGraph, GroundTruth> generate_synthetic(
    const SyntheticConfig& cfg) {
  cfg.validate();
  std::vector<int> topic_group = cfg.resolved_groups();
  int n_groups = *std::max_element(topic_group.begin(), topic_group.end()) + 1;

  SignedTopicGraph g;
  for (int n = 0; n < cfg.n_nodes; ++n) g.intern_node("n" + std::to_string(n));
  for (int t = 0; t < cfg.n_topics; ++t) g.intern_topic("t" + std::to_string(t));

  GroundTruth truth;
  truth.n_groups = n_groups;
  truth.community.resize(n_groups);

  // Exact half split per group: seeded shuffle, first half is community 0.
  auto assign_communities = [&](std::uint64_t stream_id) {
    std::vector<int> order(cfg.n_nodes);
    std::iota(order.begin(), order.end(), 0);
    auto rng = rng::stream(cfg.seed, {rng::kSynthetic, 0, stream_id});
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> community(cfg.n_nodes, 1);
    for (int i = 0; i < cfg.n_nodes / 2; ++i) community[order[i]] = 0;
    return community;
  };
  std::vector<int> shared = assign_communities(0);
  for (int grp = 0; grp < n_groups; ++grp)
    truth.community[grp] =
        cfg.intergroup_flip ? assign_communities(grp) : shared;

  for (int t = 0; t < cfg.n_topics; ++t) {
    const std::vector<int>& community = truth.community[topic_group[t]];
    auto rng = rng::stream(cfg.seed,
                           {rng::kSynthetic, 1, static_cast<std::uint64_t>(t)});
    for (int e = 0; e < cfg.edges_per_topic; ++e) {
      int u = static_cast<int>(rng() % cfg.n_nodes);
      int v = u;
      while (v == u) v = static_cast<int>(rng() % cfg.n_nodes);
      int sign = community[u] == community[v] ? +1 : -1;
      if (rng::unit(rng) < cfg.sign_noise) sign = -sign;
      g.add_edge(u, v, sign, t);
    }
  }
  return {std::move(g), std::move(truth)};
}

void write_ground_truth(const GroundTruth& truth, const SignedTopicGraph& g,
                        std::ostream& out) {
  for (std::size_t n = 0; n < g.node_count(); ++n)
    for (int grp = 0; grp < truth.n_groups; ++grp)
      out << g.node_name(static_cast<NodeId>(n)) << '\t' << grp << '\t'
          << truth.community[grp][n] << '\n';
}

}  // namespace signet
