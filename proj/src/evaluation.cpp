#include "signet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "signet/rng.hpp"

namespace signet {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t engagement_key(NodeId node, TopicId topic) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(node)) << 32) |
         static_cast<std::uint32_t>(topic);
}

int signum(double x) { return (x > 0) - (x < 0); }

}  // namespace

std::vector<FoldSplit> make_folds(const SignedTopicGraph& g, int n_folds,
                                  std::uint64_t seed) {
  if (n_folds < 2) throw std::runtime_error("need at least 2 folds");
  const auto& edges = g.edges();
  if (edges.size() < static_cast<std::size_t>(n_folds))
    throw std::runtime_error("fewer edges than folds");

  std::vector<std::size_t> perm(edges.size());
  std::iota(perm.begin(), perm.end(), 0);
  auto rng = rng::stream(seed, {rng::kFolds});
  std::shuffle(perm.begin(), perm.end(), rng);

  std::vector<FoldSplit> folds(n_folds);
  std::size_t base = edges.size() / n_folds;
  std::size_t rem = edges.size() % n_folds;
  std::size_t cursor = 0;
  for (int f = 0; f < n_folds; ++f) {
    std::size_t size = base + (static_cast<std::size_t>(f) < rem ? 1 : 0);
    std::vector<std::size_t> test_idx(perm.begin() + cursor,
                                      perm.begin() + cursor + size);
    cursor += size;
    std::sort(test_idx.begin(), test_idx.end());
    folds[f].fold_index = f;
    folds[f].test_edges.reserve(size);
    folds[f].train_edges.reserve(edges.size() - size);
    std::size_t next = 0;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (next < test_idx.size() && test_idx[next] == i) {
        folds[f].test_edges.push_back(edges[i]);
        ++next;
      } else {
        folds[f].train_edges.push_back(edges[i]);
      }
    }
  }
  return folds;
}

std::vector<Edge> balance_downsample(const std::vector<Edge>& edges,
                                     std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < edges.size(); ++i)
    (edges[i].sign > 0 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty())
    throw std::runtime_error("cannot balance a single-sign edge set");

  auto& majority = pos.size() >= neg.size() ? pos : neg;
  std::size_t keep = std::min(pos.size(), neg.size());
  auto rng = rng::stream(seed, {rng::kDownsample});
  std::shuffle(majority.begin(), majority.end(), rng);
  majority.resize(keep);

  std::vector<bool> selected(edges.size(), false);
  for (std::size_t i : pos) selected[i] = true;
  for (std::size_t i : neg) selected[i] = true;
  std::vector<Edge> out;
  out.reserve(2 * keep);
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (selected[i]) out.push_back(edges[i]);
  return out;
}

namespace {

double score_from_candidates(std::vector<std::pair<double, int>>& cand, int k,
                             const std::vector<int>& labels) {
  std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
  int positives = 0;
  for (int i = 0; i < k; ++i)
    if (labels[cand[i].second] > 0) ++positives;
  return static_cast<double>(positives) / k;
}

}  // namespace

double knn_score(const std::vector<EdgeFeature>& train,
                 const EdgeFeature& query, int k) {
  if (train.empty()) throw std::runtime_error("knn: empty training set");
  if (k < 1 || static_cast<std::size_t>(k) > train.size())
    throw std::runtime_error("knn: k out of range");
  double qsq = query.vector.squaredNorm();
  std::vector<std::pair<double, int>> cand(train.size());
  std::vector<int> labels(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    const auto& t = train[i];
    if (t.vector.size() != query.vector.size())
      throw std::runtime_error("knn: dimension mismatch");
    double dist = qsq + t.vector.squaredNorm() - 2.0 * t.vector.dot(query.vector);
    cand[i] = {dist, static_cast<int>(i)};
    labels[i] = t.label;
  }
  return score_from_candidates(cand, k, labels);
}

Eigen::VectorXd knn_scores(const RowMatrixXd& train,
                           const std::vector<int>& train_labels,
                           const RowMatrixXd& queries, int k) {
  const Eigen::Index n = train.rows();
  if (n == 0) throw std::runtime_error("knn: empty training set");
  if (k < 1 || k > n) throw std::runtime_error("knn: k out of range");
  if (train.cols() != queries.cols())
    throw std::runtime_error("knn: dimension mismatch");
  if (static_cast<Eigen::Index>(train_labels.size()) != n)
    throw std::runtime_error("knn: label count mismatch");

  Eigen::VectorXd tsq = train.rowwise().squaredNorm();
  Eigen::VectorXd out(queries.rows());
  const Eigen::Index block = 256;
  RowMatrixXd dots(std::min(block, queries.rows()), n);
  std::vector<std::pair<double, int>> cand(n);
  for (Eigen::Index qb = 0; qb < queries.rows(); qb += block) {
    Eigen::Index b = std::min(block, queries.rows() - qb);
    dots.topRows(b).noalias() = queries.middleRows(qb, b) * train.transpose();
    for (Eigen::Index r = 0; r < b; ++r) {
      double qsq = queries.row(qb + r).squaredNorm();
      for (Eigen::Index j = 0; j < n; ++j)
        cand[j] = {qsq + tsq(j) - 2.0 * dots(r, j), static_cast<int>(j)};
      int positives = 0;
      std::nth_element(cand.begin(), cand.begin() + (k - 1), cand.end());
      for (int i = 0; i < k; ++i)
        if (train_labels[cand[i].second] > 0) ++positives;
      out(qb + r) = static_cast<double>(positives) / k;
    }
  }
  return out;
}

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size())
    throw std::runtime_error("auc: size mismatch");
  std::size_t n_pos = 0, n_neg = 0;
  for (int l : labels) (l > 0 ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0)
    throw std::runtime_error("auc: both classes must be present");

  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j < idx.size() && scores[idx[j]] == scores[idx[i]]) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
    for (std::size_t m = i; m < j; ++m)
      if (labels[idx[m]] > 0) rank_sum_pos += avg_rank;
    i = j;
  }
  double u = rank_sum_pos - 0.5 * n_pos * (n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

std::vector<std::size_t> coldstart_indices(std::span<const Edge> train_edges,
                                           std::span<const Edge> test_edges) {
  std::unordered_set<std::uint64_t> source_seen, target_seen;
  source_seen.reserve(train_edges.size());
  target_seen.reserve(train_edges.size());
  for (const Edge& e : train_edges) {
    source_seen.insert(engagement_key(e.source, e.topic));
    target_seen.insert(engagement_key(e.target, e.topic));
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < test_edges.size(); ++i) {
    const Edge& e = test_edges[i];
    bool src_cold = !source_seen.contains(engagement_key(e.source, e.topic));
    bool dst_cold = !target_seen.contains(engagement_key(e.target, e.topic));
    if (src_cold || dst_cold) out.push_back(i);
  }
  return out;
}

std::vector<Edge> coldstart_subset(std::span<const Edge> train_edges,
                                   std::span<const Edge> test_edges) {
  std::vector<Edge> out;
  for (std::size_t i : coldstart_indices(train_edges, test_edges))
    out.push_back(test_edges[i]);
  return out;
}

LogisticGrads logistic_gradients(const Eigen::VectorXd& weights, double bias,
                                 const Eigen::VectorXd& u1,
                                 const Eigen::VectorXd& u2,
                                 const Eigen::VectorXd& topic_vec,
                                 CombineMode sigma, EdgeOp op, int label01) {
  Eigen::VectorXd m = combine_sigma(sigma, topic_vec, u2);
  Eigen::VectorXd x = phi(op, u1, m);
  if (x.size() != weights.size())
    throw std::runtime_error("logistic: feature/weight dimension mismatch");

  double z = weights.dot(x) + bias;
  LogisticGrads out;
  out.loss = label01 == 1 ? -log_sigmoid(z) : -log_sigmoid(-z);
  double dz = stable_sigmoid(z) - label01;
  out.grad_weights = dz * x;
  out.grad_bias = dz;

  // Backpropagate through phi into the (possibly) topic-combined target.
  Eigen::Index d = u1.size();
  Eigen::VectorXd back_m(d);
  switch (op) {
    case EdgeOp::kHadamard:
      back_m = weights.cwiseProduct(u1);
      break;
    case EdgeOp::kL1:
      for (Eigen::Index i = 0; i < d; ++i)
        back_m(i) = -weights(i) * signum(u1(i) - m(i));
      break;
    case EdgeOp::kL2:
      back_m = -2.0 * weights.cwiseProduct(u1 - m);
      break;
    case EdgeOp::kAverage:
      back_m = 0.5 * weights;
      break;
    case EdgeOp::kConcat:
      back_m = weights.tail(d);
      break;
  }
  switch (sigma) {
    case CombineMode::kMask:
      out.grad_topic = Eigen::VectorXd::Zero(topic_vec.size());
      break;
    case CombineMode::kAddition:
      out.grad_topic = dz * back_m;
      break;
    case CombineMode::kHadamard:
      out.grad_topic = dz * back_m.cwiseProduct(u2);
      break;
  }
  return out;
}

LRModel train_logistic(const EmbeddingStore& store,
                       std::span<const Edge> edges, CombineMode sigma,
                       EdgeOp op, TopicMode mode, const LogisticConfig& cfg) {
  if (edges.empty()) throw std::runtime_error("logistic: empty training set");
  LRModel model;
  model.sigma = mode == TopicMode::kNone ? CombineMode::kMask : sigma;
  model.op = op;
  model.topic_mode = mode;
  model.weights = Eigen::VectorXd::Zero(phi_output_dim(op, store.dim));
  model.bias = 0.0;

  std::vector<std::size_t> order(edges.size());
  std::iota(order.begin(), order.end(), 0);
  auto shuffle_rng = rng::stream(cfg.seed, {rng::kLogistic, 0});

  if (mode == TopicMode::kLearned) {
    // Fresh topic table, optimized jointly with the classifier.
    model.topic_table.resize(store.topics.rows(), store.dim);
    auto init_rng = rng::stream(cfg.seed, {rng::kLogistic, 1});
    double scale = 1.0 / store.dim;
    for (Eigen::Index i = 0; i < model.topic_table.size(); ++i)
      model.topic_table.data()[i] = (rng::unit(init_rng) - 0.5) * scale;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), shuffle_rng);
      for (std::size_t i : order) {
        const Edge& e = edges[i];
        LogisticGrads g = logistic_gradients(
            model.weights, model.bias, store.nodes.row(e.source).transpose(),
            store.nodes.row(e.target).transpose(),
            model.topic_table.row(e.topic).transpose(), model.sigma, op,
            e.sign > 0 ? 1 : 0);
        model.weights -= cfg.learning_rate * g.grad_weights;
        model.bias -= cfg.learning_rate * g.grad_bias;
        if (model.sigma != CombineMode::kMask)
          model.topic_table.row(e.topic) -=
              cfg.learning_rate * g.grad_topic.transpose();
      }
    }
    return model;
  }

  // Frozen/none: features are constant, so precompute them.
  std::optional<CombineMode> fold_sigma;
  if (mode == TopicMode::kFrozen) fold_sigma = model.sigma;
  EdgeFeatureMatrix feats = edge_feature_matrix(store, edges, fold_sigma, op);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t i : order) {
      double z = model.weights.dot(feats.rows.row(i).transpose()) + model.bias;
      double dz = stable_sigmoid(z) - (feats.labels[i] > 0 ? 1.0 : 0.0);
      model.weights -= (cfg.learning_rate * dz) * feats.rows.row(i).transpose();
      model.bias -= cfg.learning_rate * dz;
    }
  }
  return model;
}

Eigen::VectorXd logistic_scores(const LRModel& model,
                                const EmbeddingStore& store,
                                std::span<const Edge> edges) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    Eigen::VectorXd u1 = store.nodes.row(e.source).transpose();
    Eigen::VectorXd u2 = store.nodes.row(e.target).transpose();
    Eigen::VectorXd topic_vec;
    switch (model.topic_mode) {
      case TopicMode::kNone:
        topic_vec = Eigen::VectorXd::Zero(store.dim);
        break;
      case TopicMode::kFrozen:
        topic_vec = store.topics.row(e.topic).transpose();
        break;
      case TopicMode::kLearned:
        topic_vec = model.topic_table.row(e.topic).transpose();
        break;
    }
    Eigen::VectorXd x = phi(model.op, u1, combine_sigma(model.sigma, topic_vec, u2));
    out(i) = model.weights.dot(x) + model.bias;
  }
  return out;
}

namespace {

double mean_ignoring_nan(const std::vector<double>& xs) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : xs)
    if (!std::isnan(x)) {
      sum += x;
      ++n;
    }
  return n == 0 ? kNaN : sum / n;
}

double auc_or_nan(const Eigen::VectorXd& scores, const std::vector<int>& labels,
                  std::span<const std::size_t> subset) {
  std::vector<double> s;
  std::vector<int> l;
  s.reserve(subset.size());
  l.reserve(subset.size());
  for (std::size_t i : subset) {
    s.push_back(scores(static_cast<Eigen::Index>(i)));
    l.push_back(labels[i]);
  }
  try {
    return auc(s, l);
  } catch (const std::exception&) {
    return kNaN;
  }
}

}  // namespace

std::vector<double> EvalReport::fold_aucs(const std::string& classifier,
                                          const std::string& sigma,
                                          const std::string& phi,
                                          const std::string& split) const {
  std::vector<double> out;
  for (const EvalRow& r : rows)
    if (r.classifier == classifier && r.sigma == sigma && r.phi == phi &&
        r.split == split)
      out.push_back(r.auc);
  return out;
}

double EvalReport::mean_auc(const std::string& classifier,
                            const std::string& sigma, const std::string& phi,
                            const std::string& split) const {
  return mean_ignoring_nan(fold_aucs(classifier, sigma, phi, split));
}

std::pair<std::string, double> EvalReport::best_over_phi(
    const std::string& classifier, const std::string& sigma,
    const std::string& split) const {
  std::vector<std::string> phis;
  for (const EvalRow& r : rows)
    if (r.classifier == classifier && r.sigma == sigma && r.split == split &&
        std::find(phis.begin(), phis.end(), r.phi) == phis.end())
      phis.push_back(r.phi);
  std::pair<std::string, double> best{"", kNaN};
  for (const std::string& p : phis) {
    double m = mean_auc(classifier, sigma, p, split);
    if (std::isnan(m)) continue;
    if (std::isnan(best.second) || m > best.second) best = {p, m};
  }
  return best;
}

void EvalReport::write_csv(std::ostream& out) const {
  out << "classifier,sigma,phi,fold,split,auc\n";
  char buf[32];
  for (const EvalRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.6f", r.auc);
    out << r.classifier << ',' << r.sigma << ',' << r.phi << ',' << r.fold
        << ',' << r.split << ',' << (std::isnan(r.auc) ? "nan" : buf) << '\n';
  }
}

void EvalReport::print_summary(std::ostream& out) const {
  std::vector<std::tuple<std::string, std::string, std::string>> combos;
  std::vector<std::string> splits;
  for (const EvalRow& r : rows) {
    auto c = std::make_tuple(r.classifier, r.sigma, r.phi);
    if (std::find(combos.begin(), combos.end(), c) == combos.end())
      combos.push_back(c);
    if (std::find(splits.begin(), splits.end(), r.split) == splits.end())
      splits.push_back(r.split);
  }
  char buf[256];
  out << "classifier  sigma      phi        split      mean_auc  folds\n";
  for (const auto& [cls, sigma, phi] : combos) {
    for (const std::string& split : splits) {
      auto aucs = fold_aucs(cls, sigma, phi, split);
      if (aucs.empty()) continue;
      std::snprintf(buf, sizeof buf, "%-11s %-10s %-10s %-10s %8.4f  %zu\n",
                    cls.c_str(), sigma.c_str(), phi.c_str(), split.c_str(),
                    mean_ignoring_nan(aucs), aucs.size());
      out << buf;
    }
  }
  // best over phi per (classifier, sigma, split)
  std::vector<std::tuple<std::string, std::string>> groups;
  for (const auto& [cls, sigma, phi] : combos)
    if (std::find(groups.begin(), groups.end(), std::make_tuple(cls, sigma)) ==
        groups.end())
      groups.push_back({cls, sigma});
  for (const auto& [cls, sigma] : groups) {
    for (const std::string& split : splits) {
      auto [phi, value] = best_over_phi(cls, sigma, split);
      if (phi.empty()) continue;
      std::snprintf(buf, sizeof buf,
                    "%-11s %-10s best=%-8s %-10s %8.4f\n", cls.c_str(),
                    sigma.c_str(), phi.c_str(), split.c_str(), value);
      out << buf;
    }
  }
}

EvalReport evaluate(const SignedTopicGraph& g,
                    const std::vector<TrainerConfig>& trainer_cfgs,
                    const EvalConfig& cfg) {
  if (trainer_cfgs.empty())
    throw std::runtime_error("evaluate: no trainer configs");
  EvalReport report;
  auto folds = make_folds(g, cfg.n_folds, cfg.seed);

  for (const FoldSplit& fold : folds) {
    SignedTopicGraph fold_graph = g.with_edges(fold.train_edges);
    WalkConfig walk_cfg = cfg.walk;
    walk_cfg.seed = rng::derive(cfg.seed,
                                {rng::kWalks, static_cast<std::uint64_t>(fold.fold_index)});
    WalkCorpus corpus = generate_corpus(fold_graph, walk_cfg, cfg.threads);

    std::vector<Edge> balanced = balance_downsample(
        fold.train_edges,
        rng::derive(cfg.seed, {rng::kDownsample,
                               static_cast<std::uint64_t>(fold.fold_index)}));
    std::vector<std::size_t> cold_idx =
        coldstart_indices(fold.train_edges, fold.test_edges);

    std::span<const Edge> scored_edges(fold.test_edges);
    std::vector<Edge> cold_edges;
    if (cfg.coldstart_only) {
      cold_edges = coldstart_subset(fold.train_edges, fold.test_edges);
      scored_edges = cold_edges;
    }
    std::vector<std::size_t> all_idx(scored_edges.size());
    std::iota(all_idx.begin(), all_idx.end(), 0);

    for (std::size_t tc_idx = 0; tc_idx < trainer_cfgs.size(); ++tc_idx) {
      TrainerConfig tc = trainer_cfgs[tc_idx];
      tc.seed = rng::derive(cfg.seed, {0x7261u, tc.seed,
                                       static_cast<std::uint64_t>(fold.fold_index)});
      EmbeddingStore store =
          train(corpus, fold_graph, cfg.context, tc, cfg.threads);
      std::string sigma_name = to_string(trainer_cfgs[tc_idx].sigma_mode);
      std::optional<CombineMode> sigma_eval;
      if (cfg.use_topic_at_eval && tc.sigma_mode != CombineMode::kMask)
        sigma_eval = tc.sigma_mode;

      for (EdgeOp op : cfg.phi_ops) {
        EdgeFeatureMatrix train_feats =
            edge_feature_matrix(store, balanced, sigma_eval, op);
        EdgeFeatureMatrix test_feats =
            edge_feature_matrix(store, scored_edges, sigma_eval, op);

        auto emit = [&](const std::string& classifier,
                        const Eigen::VectorXd& scores) {
          if (!cfg.coldstart_only) {
            report.rows.push_back(
                {classifier, sigma_name, to_string(op), fold.fold_index,
                 "full", auc_or_nan(scores, test_feats.labels, all_idx),
                 scored_edges.size()});
            report.rows.push_back(
                {classifier, sigma_name, to_string(op), fold.fold_index,
                 "coldstart", auc_or_nan(scores, test_feats.labels, cold_idx),
                 cold_idx.size()});
          } else {
            report.rows.push_back(
                {classifier, sigma_name, to_string(op), fold.fold_index,
                 "coldstart", auc_or_nan(scores, test_feats.labels, all_idx),
                 scored_edges.size()});
          }
        };

        if (cfg.run_knn) {
          for (int k : cfg.knn_ks) {
            Eigen::VectorXd scores =
                knn_scores(train_feats.rows, train_feats.labels,
                           test_feats.rows, k);
            emit("knn" + std::to_string(k), scores);
          }
        }
        if (cfg.run_lr) {
          TopicMode mode = TopicMode::kNone;
          if (cfg.lr_learn_topics)
            mode = TopicMode::kLearned;
          else if (sigma_eval)
            mode = TopicMode::kFrozen;
          CombineMode lr_sigma = tc.sigma_mode;
          if (mode == TopicMode::kLearned &&
              lr_sigma == CombineMode::kMask)
            lr_sigma = CombineMode::kAddition;
          LogisticConfig lr_cfg = cfg.logistic;
          lr_cfg.seed = rng::derive(
              cfg.seed, {rng::kLogistic,
                         static_cast<std::uint64_t>(fold.fold_index), tc_idx,
                         static_cast<std::uint64_t>(op)});
          LRModel model =
              train_logistic(store, balanced, lr_sigma, op, mode, lr_cfg);
          Eigen::VectorXd scores = logistic_scores(model, store, scored_edges);
          emit("lr", scores);
        }
      }
    }
  }
  return report;
}

}  // namespace signet
