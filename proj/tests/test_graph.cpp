#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "signet/graph.hpp"

using namespace signet;

namespace {

SignedTopicGraph load_str(const std::string& text) {
  std::istringstream in(text);
  return load_edge_list(in);
}

std::vector<Edge> sorted_edges(const SignedTopicGraph& g) {
  auto edges = g.edges();
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.topic, a.source, a.target, a.sign) <
           std::tie(b.topic, b.source, b.target, b.sign);
  });
  return edges;
}

// Random multigraph over small node/topic sets, for property checks.
SignedTopicGraph random_multigraph(std::mt19937_64& rng, int n_nodes,
                                   int n_topics, int n_edges) {
  SignedTopicGraph g;
  for (int i = 0; i < n_nodes; ++i) g.intern_node("n" + std::to_string(i));
  for (int t = 0; t < n_topics; ++t) g.intern_topic("t" + std::to_string(t));
  for (int e = 0; e < n_edges; ++e) {
    NodeId u = rng() % n_nodes;
    NodeId v = u;
    while (v == u) v = rng() % n_nodes;
    g.add_edge(u, v, rng() % 2 ? +1 : -1, rng() % n_topics);
  }
  return g;
}

}  // namespace

TEST_CASE("single line parses into two nodes, one topic, one positive edge") {
  auto g = load_str("a\tb\t+1\tT0\n");
  CHECK(g.node_count() == 2);
  CHECK(g.topic_count() == 1);
  REQUIRE(g.edges().size() == 1);
  CHECK(g.edges()[0].sign == +1);
  CHECK(g.node_name(g.edges()[0].source) == "a");
  CHECK(g.node_name(g.edges()[0].target) == "b");
  CHECK(g.topic_name(g.edges()[0].topic) == "T0");
}

TEST_CASE("parallel edges are retained before aggregation") {
  auto g = load_str("a\tb\t+1\tT0\na\tb\t-1\tT0\n");
  CHECK(g.edges().size() == 2);
}

TEST_CASE("self-loop is rejected with its line number") {
  CHECK_THROWS_WITH_AS(load_str("a\ta\t+1\tT0\n"),
                       doctest::Contains("line 1"), std::runtime_error);
}

TEST_CASE("malformed lines name the offending line") {
  CHECK_THROWS_WITH_AS(load_str("a\tb\t+1\tT0\na\tb\t+1\n"),
                       doctest::Contains("line 2"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_str("a\tb\t+2\tT0\n"),
                       doctest::Contains("line 1"), std::runtime_error);
  CHECK_THROWS_WITH_AS(load_str("a\tb\t+1\tT0\textra\n"),
                       doctest::Contains("line 1"), std::runtime_error);
}

TEST_CASE("comments and blank lines are skipped, all sign spellings accepted") {
  auto g = load_str("# header\n\na\tb\t+\tT0\nb\tc\t-\tT0\nc\td\t1\tT0\n"
                    "d\te\t-1\tT0\ne\tf\t+1\tT0\n");
  REQUIRE(g.edges().size() == 5);
  CHECK(g.edges()[0].sign == +1);
  CHECK(g.edges()[1].sign == -1);
  CHECK(g.edges()[2].sign == +1);
  CHECK(g.edges()[3].sign == -1);
  CHECK(g.edges()[4].sign == +1);
}

TEST_CASE("aggregation follows the sign-sum rule") {
  SUBCASE("signs {+,+,-} sum positive, merge to +1") {
    auto g = aggregate_parallel_edges(
        load_str("a\tb\t+1\tT0\na\tb\t+1\tT0\na\tb\t-1\tT0\n"));
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges()[0].sign == +1);
  }
  SUBCASE("zero sum falls to the otherwise branch, -1") {
    auto g = aggregate_parallel_edges(load_str("a\tb\t+1\tT0\na\tb\t-1\tT0\n"));
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges()[0].sign == -1);
  }
  SUBCASE("single edge is unchanged") {
    auto g = aggregate_parallel_edges(load_str("a\tb\t-1\tT0\n"));
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges()[0].sign == -1);
  }
  SUBCASE("same pair in different topics stays separate") {
    auto g = aggregate_parallel_edges(load_str("a\tb\t+1\tT0\na\tb\t-1\tT1\n"));
    CHECK(g.edges().size() == 2);
  }
}

TEST_CASE("aggregation is idempotent and shrinks only the edge list") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = random_multigraph(rng, 8, 3, 60);
    auto once = aggregate_parallel_edges(g);
    auto twice = aggregate_parallel_edges(once);
    CHECK(once.edges().size() <= g.edges().size());
    CHECK(once.node_count() == g.node_count());
    CHECK(once.topic_count() == g.topic_count());
    CHECK(sorted_edges(once) == sorted_edges(twice));
  }
}

TEST_CASE("topic subgraph filters exactly the topic's edges") {
  auto g = aggregate_parallel_edges(
      load_str("a\tb\t+1\tT0\nb\tc\t-1\tT0\na\tc\t+1\tT1\n"));
  TopicId t0 = *g.find_topic("T0");
  TopicId t1 = *g.find_topic("T1");

  auto v0 = topic_subgraph(g, t0, false);
  CHECK(v0.nodes().size() == 3);
  CHECK(v0.edge_count() == 2);

  auto v1 = topic_subgraph(g, t1, false);
  CHECK(v1.edge_count() == 1);
  CHECK(v1.nodes().size() == 2);
}

TEST_CASE("symmetrization adds the reverse direction with the same sign") {
  auto g = aggregate_parallel_edges(load_str("a\tb\t+1\tT0\n"));
  auto view = topic_subgraph(g, 0, true);
  NodeId a = *g.find_node("a");
  NodeId b = *g.find_node("b");
  REQUIRE(view.neighbors(b).size() == 1);
  CHECK(view.neighbors(b)[0].first == a);
  CHECK(view.neighbors(b)[0].second == +1);
  CHECK(view.edge_sign(a, b) == +1);
}

TEST_CASE("opposite-direction edges with conflicting signs merge by sign sum") {
  // a->b + and b->a -: the unordered pair ties, so the merged sign is -1.
  auto g = aggregate_parallel_edges(load_str("a\tb\t+1\tT0\nb\ta\t-1\tT0\n"));
  auto view = topic_subgraph(g, 0, true);
  NodeId a = *g.find_node("a");
  NodeId b = *g.find_node("b");
  CHECK(view.edge_sign(a, b) == -1);
  CHECK(view.edge_sign(b, a) == -1);
  CHECK(view.neighbors(a).size() == 1);
}

TEST_CASE("unknown topic id raises") {
  auto g = load_str("a\tb\t+1\tT0\n");
  CHECK_THROWS_AS(topic_subgraph(g, 5, true), std::runtime_error);
}

TEST_CASE("the union of topic subgraphs covers the aggregated edge set") {
  std::mt19937_64 rng(7);
  auto g = aggregate_parallel_edges(random_multigraph(rng, 10, 4, 80));
  std::size_t total = 0;
  for (std::size_t t = 0; t < g.topic_count(); ++t) {
    auto view = topic_subgraph(g, static_cast<TopicId>(t), false);
    total += view.edge_count();
    for (NodeId u : view.nodes())
      for (auto [v, sign] : view.neighbors(u)) {
        Edge expect{u, v, sign, static_cast<TopicId>(t)};
        CHECK(std::count(g.edges().begin(), g.edges().end(), expect) == 1);
      }
  }
  CHECK(total == g.edges().size());
}

TEST_CASE("write/load round-trip preserves the graph up to line order") {
  std::mt19937_64 rng(3);
  auto g = random_multigraph(rng, 9, 3, 50);
  std::ostringstream out;
  write_edge_list(g, out);
  auto reloaded = load_str(out.str());
  CHECK(reloaded.node_count() == g.node_count());
  CHECK(reloaded.topic_count() == g.topic_count());
  // Same interning order on reload, so edge ids are directly comparable.
  auto a = sorted_edges(g);
  std::vector<Edge> b;
  for (const Edge& e : reloaded.edges())
    b.push_back(Edge{*g.find_node(reloaded.node_name(e.source)),
                     *g.find_node(reloaded.node_name(e.target)), e.sign,
                     *g.find_topic(reloaded.topic_name(e.topic))});
  std::sort(b.begin(), b.end(), [](const Edge& x, const Edge& y) {
    return std::tie(x.topic, x.source, x.target, x.sign) <
           std::tie(y.topic, y.source, y.target, y.sign);
  });
  CHECK(a == b);
}

TEST_CASE("add_edge validates sign, endpoints and topic") {
  SignedTopicGraph g;
  NodeId a = g.intern_node("a");
  NodeId b = g.intern_node("b");
  TopicId t = g.intern_topic("T0");
  CHECK_THROWS_AS(g.add_edge(a, b, 2, t), std::runtime_error);
  CHECK_THROWS_AS(g.add_edge(a, a, 1, t), std::runtime_error);
  CHECK_THROWS_AS(g.add_edge(a, 99, 1, t), std::runtime_error);
  CHECK_THROWS_AS(g.add_edge(a, b, 1, 7), std::runtime_error);
  g.add_edge(a, b, -1, t);
  CHECK(g.edges().size() == 1);
}
