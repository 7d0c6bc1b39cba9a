#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "signet/rng.hpp"
#include "signet/synthetic.hpp"
#include "signet/trainer.hpp"

using namespace signet;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Eigen::VectorXd random_vec(std::mt19937_64& rng, int d, double scale = 1.0) {
  Eigen::VectorXd v(d);
  for (int i = 0; i < d; ++i) v(i) = (rng::unit(rng) * 2.0 - 1.0) * scale;
  return v;
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1e-4, std::abs(a), std::abs(b)});
}

template <typename A, typename B>
bool same_bits(const A& a, const B& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         (a.array() == b.array()).all();
}

// Loss as a scalar function of perturbed inputs, for finite differences.
double sigma_pair_loss(CombineMode mode, const Eigen::VectorXd& wt,
                       const Eigen::VectorXd& wu, const Eigen::VectorXd& wp,
                       const std::vector<Eigen::VectorXd>& negs) {
  return sigma_pair_gradients(mode, wt, wu, wp, negs).loss;
}

SignedTopicGraph load_str(const std::string& text) {
  std::istringstream in(text);
  return aggregate_parallel_edges(load_edge_list(in));
}

}  // namespace

TEST_CASE("sigma combiner: mask, addition, hadamard") {
  Eigen::VectorXd wt = vec({3, 4});
  Eigen::VectorXd wu = vec({1, 2});
  CHECK(same_bits(combine_sigma(CombineMode::kMask, wt, wu), vec({1, 2})));
  CHECK(same_bits(combine_sigma(CombineMode::kAddition, wt, wu), vec({4, 6})));
  CHECK(same_bits(combine_sigma(CombineMode::kHadamard, wt, wu), vec({3, 8})));
  CHECK_THROWS_AS(combine_sigma(CombineMode::kAddition, vec({1}), wu),
                  std::runtime_error);
  // Mask never reads the topic vector, so its size is irrelevant.
  CHECK(same_bits(combine_sigma(CombineMode::kMask, vec({1}), wu), wu));
}

TEST_CASE("pair loss at a zero dot product is ln 2") {
  Eigen::VectorXd h = vec({1, 0});
  Eigen::VectorXd wp = vec({0, 1});
  auto g = pair_loss_and_grads(h, wp, {});
  CHECK(g.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("pair loss saturates to zero without overflow") {
  Eigen::VectorXd h = vec({1000.0, 0.0});
  Eigen::VectorXd wp = vec({1000.0, 0.0});
  Eigen::VectorXd wn = vec({-1000.0, 0.0});
  auto g = pair_loss_and_grads(h, wp, {wn});
  CHECK(g.loss == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(std::isfinite(g.grad_input.norm()));
  CHECK(std::isfinite(g.grad_positive.norm()));
  // The mirrored case stays finite too.
  auto bad = pair_loss_and_grads(h, wn, {wp});
  CHECK(std::isfinite(bad.loss));
  CHECK(bad.loss > 1000.0);
}

TEST_CASE("analytic pair gradients match central finite differences") {
  const int d = 8;
  const double step = 1e-5;
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::VectorXd h = random_vec(rng, d);
    Eigen::VectorXd wp = random_vec(rng, d);
    std::vector<Eigen::VectorXd> negs;
    for (int n = 0; n < 3; ++n) negs.push_back(random_vec(rng, d));
    auto grads = pair_loss_and_grads(h, wp, negs);

    auto loss_at = [&](const Eigen::VectorXd& hh, const Eigen::VectorXd& wpp,
                       const std::vector<Eigen::VectorXd>& nn) {
      return pair_loss_and_grads(hh, wpp, nn).loss;
    };
    for (int i = 0; i < d; ++i) {
      Eigen::VectorXd hp = h, hm = h;
      hp(i) += step;
      hm(i) -= step;
      double fd = (loss_at(hp, wp, negs) - loss_at(hm, wp, negs)) / (2 * step);
      CHECK(rel_err(grads.grad_input(i), fd) < 1e-4);

      Eigen::VectorXd wpp = wp, wpm = wp;
      wpp(i) += step;
      wpm(i) -= step;
      fd = (loss_at(h, wpp, negs) - loss_at(h, wpm, negs)) / (2 * step);
      CHECK(rel_err(grads.grad_positive(i), fd) < 1e-4);
    }
    for (std::size_t n = 0; n < negs.size(); ++n) {
      for (int i = 0; i < d; ++i) {
        auto np = negs, nm = negs;
        np[n](i) += step;
        nm[n](i) -= step;
        double fd = (loss_at(h, wp, np) - loss_at(h, wp, nm)) / (2 * step);
        CHECK(rel_err(grads.grad_negatives[n](i), fd) < 1e-4);
      }
    }
  }
}

TEST_CASE("sigma-chained gradients match finite differences for every mode") {
  const int d = 8;
  const double step = 1e-5;
  std::mt19937_64 rng(321);
  for (CombineMode mode : {CombineMode::kMask, CombineMode::kAddition,
                           CombineMode::kHadamard}) {
    for (int trial = 0; trial < 10; ++trial) {
      Eigen::VectorXd wt = random_vec(rng, d);
      Eigen::VectorXd wu = random_vec(rng, d);
      Eigen::VectorXd wp = random_vec(rng, d);
      std::vector<Eigen::VectorXd> negs{random_vec(rng, d), random_vec(rng, d)};
      auto grads = sigma_pair_gradients(mode, wt, wu, wp, negs);
      for (int i = 0; i < d; ++i) {
        Eigen::VectorXd up = wu, um = wu;
        up(i) += step;
        um(i) -= step;
        double fd = (sigma_pair_loss(mode, wt, up, wp, negs) -
                     sigma_pair_loss(mode, wt, um, wp, negs)) / (2 * step);
        CHECK(rel_err(grads.grad_node(i), fd) < 1e-4);

        Eigen::VectorXd tp = wt, tm = wt;
        tp(i) += step;
        tm(i) -= step;
        fd = (sigma_pair_loss(mode, tp, wu, wp, negs) -
              sigma_pair_loss(mode, tm, wu, wp, negs)) / (2 * step);
        CHECK(rel_err(grads.grad_topic(i), fd) < 1e-4);
      }
    }
  }
}

TEST_CASE("discard probability hits the word2vec formula") {
  const double t = 1e-5;
  CHECK(discard_probability(t, t) == 0.0);
  CHECK(discard_probability(t / 2, t) == 0.0);
  CHECK(discard_probability(4 * t, t) == doctest::Approx(0.5));
  CHECK(discard_probability(1e4 * t, t) == doctest::Approx(0.99));
}

TEST_CASE("should_discard matches its probability empirically") {
  // Single topic, node frequency forced to 4 * threshold.
  auto g = load_str("a\tb\t+1\tT0\n");
  WalkConfig wcfg;
  wcfg.walks_per_node = 1;
  wcfg.walk_length = 4;
  auto corpus = generate_corpus(g, wcfg);
  // Both nodes appear twice in each of 2 walks: frequency 0.5 each.
  double f = corpus.frequency(0, 0);
  CHECK(f == doctest::Approx(0.5));
  const double threshold = 0.125;  // f = 4 * threshold -> discard 0.5
  auto rng = rng::stream(9, {rng::kTrainerPairs});
  int discarded = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    discarded += should_discard(corpus, 0, 0, threshold, rng);
  CHECK(std::abs(discarded / double(n) - 0.5) < 0.02);
}

TEST_CASE("noise table follows the 0.75-power unigram distribution") {
  SUBCASE("counts {4, 1} sample at ratio 4^0.75 : 1") {
    NoiseTable noise({4, 1}, 0.75);
    CHECK(noise.probability(0) ==
          doctest::Approx(std::pow(4.0, 0.75) / (std::pow(4.0, 0.75) + 1.0)));
    auto rng = rng::stream(2, {rng::kTrainerPairs});
    int first = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) first += noise.sample(rng) == 0;
    double ratio = first / double(n - first);
    CHECK(std::abs(ratio - std::pow(4.0, 0.75)) / std::pow(4.0, 0.75) < 0.05);
  }
  SUBCASE("uniform counts give a uniform distribution") {
    NoiseTable noise({7, 7, 7, 7}, 0.75);
    for (Eigen::Index r = 0; r < 4; ++r)
      CHECK(noise.probability(r) == doctest::Approx(0.25));
  }
  SUBCASE("zero-count rows never appear") {
    NoiseTable noise({0, 5, 0, 3}, 0.75);
    CHECK(noise.vocabulary_size() == 2);
    CHECK(noise.probability(0) == 0.0);
    auto rng = rng::stream(3, {rng::kTrainerPairs});
    for (int i = 0; i < 1000; ++i) {
      auto row = noise.sample(rng);
      CHECK((row == 1 || row == 3));
    }
  }
}

TEST_CASE("negative sampling rejects the positive row") {
  NoiseTable noise({10, 1}, 0.75);
  auto rng = rng::stream(4, {rng::kTrainerPairs});
  auto negs = sample_negatives(noise, 0, 50, rng);
  for (auto row : negs) CHECK(row == 1);

  SUBCASE("a single-row vocabulary cannot avoid the positive") {
    NoiseTable lonely({5}, 0.75);
    CHECK_THROWS_AS(sample_negatives(lonely, 0, 1, rng), std::runtime_error);
  }
  SUBCASE("an empty vocabulary raises immediately") {
    NoiseTable empty;
    CHECK_THROWS_AS(sample_negatives(empty, 0, 1, rng), std::runtime_error);
  }
}

TEST_CASE("mask training leaves the topic table at its initialization") {
  auto g = load_str("a\tb\t+1\tT0\nb\tc\t-1\tT0\nc\ta\t+1\tT1\n");
  WalkConfig wcfg;
  wcfg.walks_per_node = 3;
  wcfg.walk_length = 8;
  auto corpus = generate_corpus(g, wcfg);
  TrainerConfig cfg;
  cfg.sigma_mode = CombineMode::kMask;
  cfg.dim = 6;
  cfg.negatives_per_context = 3;
  cfg.subsample_threshold = 1.0;
  cfg.epochs = 2;
  cfg.seed = 5;
  auto store = train(corpus, g, ContextConfig{2}, cfg);
  auto init = EmbeddingStore::init(g.node_count(), g.topic_count(), cfg.dim,
                                   cfg.seed);
  CHECK(same_bits(store.topics, init.topics));
  CHECK(!same_bits(store.nodes, init.nodes));
}

TEST_CASE("under mask the topic universe is irrelevant to node training") {
  // Same edges, one graph carries two extra never-used topics. Mask-mode
  // training must produce bit-identical node and context tables.
  auto g1 = load_str("a\tb\t+1\tT0\nb\tc\t-1\tT0\nc\ta\t+1\tT0\n");
  SignedTopicGraph g2;
  for (const char* n : {"a", "b", "c"}) g2.intern_node(n);
  g2.intern_topic("T0");
  g2.intern_topic("unused1");
  g2.intern_topic("unused2");
  for (const Edge& e : g1.edges()) g2.add_edge(e.source, e.target, e.sign, 0);

  WalkConfig wcfg;
  wcfg.walks_per_node = 4;
  wcfg.walk_length = 10;
  wcfg.seed = 3;
  TrainerConfig cfg;
  cfg.sigma_mode = CombineMode::kMask;
  cfg.dim = 5;
  cfg.negatives_per_context = 2;
  cfg.subsample_threshold = 1.0;
  cfg.epochs = 3;
  cfg.seed = 8;
  auto s1 = train(generate_corpus(g1, wcfg), g1, ContextConfig{2}, cfg);
  auto s2 = train(generate_corpus(g2, wcfg), g2, ContextConfig{2}, cfg);
  CHECK(same_bits(s1.nodes, s2.nodes));
  CHECK(same_bits(s1.contexts, s2.contexts));
}

TEST_CASE("training on an empty corpus returns the initialization") {
  SignedTopicGraph g;
  g.intern_node("a");
  g.intern_topic("T0");
  WalkCorpus corpus;
  TrainerConfig cfg;
  cfg.dim = 4;
  cfg.seed = 13;
  auto store = train(corpus, g, ContextConfig{2}, cfg);
  auto init = EmbeddingStore::init(1, 1, 4, 13);
  CHECK(same_bits(store.nodes, init.nodes));
  CHECK(same_bits(store.contexts, init.contexts));
  CHECK(same_bits(store.topics, init.topics));
}

TEST_CASE("fixed seed is bit-reproducible in single-thread mode") {
  SyntheticConfig syn;
  syn.n_nodes = 30;
  syn.n_topics = 3;
  syn.n_topic_groups = 1;
  syn.edges_per_topic = 60;
  syn.sign_noise = 0.1;
  syn.seed = 4;
  auto [g, truth] = generate_synthetic(syn);
  auto agg = aggregate_parallel_edges(g);
  WalkConfig wcfg;
  wcfg.walks_per_node = 2;
  wcfg.walk_length = 10;
  auto corpus = generate_corpus(agg, wcfg);
  TrainerConfig cfg;
  cfg.sigma_mode = CombineMode::kAddition;
  cfg.dim = 8;
  cfg.negatives_per_context = 4;
  cfg.epochs = 2;
  cfg.subsample_threshold = 1.0;
  cfg.seed = 77;
  std::vector<double> l1, l2;
  auto s1 = train(corpus, agg, ContextConfig{3}, cfg, 1, &l1);
  auto s2 = train(corpus, agg, ContextConfig{3}, cfg, 1, &l2);
  CHECK(same_bits(s1.nodes, s2.nodes));
  CHECK(same_bits(s1.contexts, s2.contexts));
  CHECK(same_bits(s1.topics, s2.topics));
  CHECK(l1 == l2);
}

TEST_CASE("epoch losses are non-increasing on a fixed small corpus") {
  SyntheticConfig syn;
  syn.n_nodes = 40;
  syn.n_topics = 2;
  syn.n_topic_groups = 1;
  syn.edges_per_topic = 150;
  syn.sign_noise = 0.0;
  syn.seed = 6;
  auto [g, truth] = generate_synthetic(syn);
  auto agg = aggregate_parallel_edges(g);
  WalkConfig wcfg;
  wcfg.walks_per_node = 3;
  wcfg.walk_length = 15;
  auto corpus = generate_corpus(agg, wcfg);

  for (CombineMode mode : {CombineMode::kMask, CombineMode::kAddition,
                           CombineMode::kHadamard}) {
    TrainerConfig cfg;
    cfg.sigma_mode = mode;
    cfg.dim = 12;
    cfg.negatives_per_context = 5;
    cfg.epochs = 5;
    cfg.subsample_threshold = 1.0;
    cfg.seed = 10;
    std::vector<double> losses;
    train(corpus, agg, ContextConfig{4}, cfg, 1, &losses);
    REQUIRE(losses.size() == 5);
    for (std::size_t e = 1; e < losses.size(); ++e)
      CHECK(losses[e] <= losses[e - 1] * 1.01);
  }
}

TEST_CASE("two-community training separates the communities in cosine") {
  SyntheticConfig syn;
  syn.n_nodes = 40;
  syn.n_topics = 2;
  syn.n_topic_groups = 1;
  syn.edges_per_topic = 200;
  syn.sign_noise = 0.0;
  syn.seed = 12;
  auto [g, truth] = generate_synthetic(syn);
  auto agg = aggregate_parallel_edges(g);
  WalkConfig wcfg;
  wcfg.walks_per_node = 5;
  wcfg.walk_length = 15;
  auto corpus = generate_corpus(agg, wcfg);
  TrainerConfig cfg;
  cfg.sigma_mode = CombineMode::kMask;
  cfg.dim = 12;
  cfg.negatives_per_context = 5;
  cfg.epochs = 3;
  cfg.subsample_threshold = 1.0;
  cfg.seed = 14;
  auto store = train(corpus, agg, ContextConfig{4}, cfg);

  double intra = 0.0, inter = 0.0;
  int n_intra = 0, n_inter = 0;
  const auto& comm = truth.community[0];
  for (int u = 0; u < syn.n_nodes; ++u) {
    for (int v = u + 1; v < syn.n_nodes; ++v) {
      double cos = store.nodes.row(u).dot(store.nodes.row(v)) /
                   (store.nodes.row(u).norm() * store.nodes.row(v).norm());
      if (comm[u] == comm[v]) {
        intra += cos;
        ++n_intra;
      } else {
        inter += cos;
        ++n_inter;
      }
    }
  }
  CHECK(intra / n_intra > inter / n_inter);
}

TEST_CASE("hogwild mode produces usable embeddings") {
  SyntheticConfig syn;
  syn.n_nodes = 30;
  syn.n_topics = 2;
  syn.n_topic_groups = 1;
  syn.edges_per_topic = 100;
  syn.sign_noise = 0.0;
  syn.seed = 15;
  auto [g, truth] = generate_synthetic(syn);
  auto agg = aggregate_parallel_edges(g);
  WalkConfig wcfg;
  wcfg.walks_per_node = 4;
  wcfg.walk_length = 12;
  auto corpus = generate_corpus(agg, wcfg);
  TrainerConfig cfg;
  cfg.sigma_mode = CombineMode::kMask;
  cfg.dim = 8;
  cfg.negatives_per_context = 4;
  cfg.epochs = 3;
  cfg.subsample_threshold = 1.0;
  cfg.seed = 16;
  auto store = train(corpus, agg, ContextConfig{3}, cfg, 4);
  double intra = 0.0, inter = 0.0;
  int n_intra = 0, n_inter = 0;
  const auto& comm = truth.community[0];
  for (int u = 0; u < syn.n_nodes; ++u)
    for (int v = u + 1; v < syn.n_nodes; ++v) {
      double cos = store.nodes.row(u).dot(store.nodes.row(v)) /
                   (store.nodes.row(u).norm() * store.nodes.row(v).norm());
      (comm[u] == comm[v] ? intra : inter) += cos;
      (comm[u] == comm[v] ? n_intra : n_inter) += 1;
    }
  CHECK(intra / n_intra > inter / n_inter);
}

TEST_CASE("context rows are indexed 2v for positive and 2v+1 for negative") {
  CHECK(EmbeddingStore::context_row(3, +1) == 6);
  CHECK(EmbeddingStore::context_row(3, -1) == 7);
}

TEST_CASE("embedding files carry the count/dim header and row names") {
  auto g = load_str("a\tb\t+1\tT0\n");
  auto store = EmbeddingStore::init(g.node_count(), g.topic_count(), 3, 1);
  std::ostringstream out;
  std::vector<std::string> names{"a", "b"};
  write_embedding_table(store.nodes, names, out);
  std::istringstream lines(out.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "2 3");
  std::getline(lines, line);
  CHECK(line.rfind("a ", 0) == 0);
}

TEST_CASE("trainer config validation") {
  TrainerConfig cfg;
  cfg.negatives_per_context = 0;
  CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
  cfg = TrainerConfig{};
  cfg.subsample_threshold = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
  cfg = TrainerConfig{};
  cfg.subsample_threshold = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
  cfg = TrainerConfig{};
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
  cfg = TrainerConfig{};
  cfg.initial_learning_rate = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
}
