#include "mrfl/learner.hpp"

#include "mrfl/bounds.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace mrfl {

void LearnerConfig::validate() const {
  if (d1 < 0 || d2 < 0) throw std::invalid_argument("LearnerConfig: d1, d2 must be >= 0");
  if (!(epsilon > 0.0)) throw std::invalid_argument("LearnerConfig: epsilon must be positive");
  if (preprocess && !(epsilon_prime > 0.0))
    throw std::invalid_argument("LearnerConfig: epsilon_prime must be positive when preprocessing");
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  unsigned w = workers > 0 ? static_cast<unsigned>(workers) : std::thread::hardware_concurrency();
  w = std::max(1u, std::min<unsigned>(w, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (w <= 1) {
    for (std::size_t q = 0; q < count; ++q) fn(q);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < w; ++t)
    pool.emplace_back([&] {
      for (std::size_t q = next++; q < count; q = next++) fn(q);
    });
}

}  // namespace

template <Distribution B>
LearnResult cond_st(const B& backend, const LearnerConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  ScoreOptions opts;
  if (cfg.early_exit) opts.search.threshold = cfg.threshold();
  opts.workers = cfg.workers;
  LearnResult out;
  out.scores = score_matrix(backend, cfg.test, cfg.d1, cfg.d2, nullptr, opts);
  out.graph = out.scores.threshold(cfg.threshold());
  const int p = backend.num_nodes();
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j) out.evaluations += out.scores.witness(i, j).evaluations;
  out.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

template <Distribution B>
std::vector<NodeSet> candidate_sets(const B& backend, double epsilon_prime) {
  if (!(epsilon_prime > 0.0)) throw std::invalid_argument("candidate_sets: epsilon_prime must be positive");
  const int p = backend.num_nodes();
  std::vector<NodeSet> out(static_cast<std::size_t>(p));
  for (Node i = 0; i < p; ++i)
    for (Node j = 0; j < p; ++j)
      if (j != i && delta(backend, TestKind::Probability, i, j, {}) > epsilon_prime / 2.0)
        out[static_cast<std::size_t>(i)].push_back(j);
  return out;
}

template <Distribution B>
LearnResult cond_st_pre(const B& backend, const LearnerConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const int p = backend.num_nodes();
  LearnResult out;
  out.candidates = candidate_sets(backend, cfg.epsilon_prime);
  for (const auto& l : out.candidates) out.max_candidates = std::max(out.max_candidates, l.size());

  SearchOptions search;
  if (cfg.early_exit) search.threshold = cfg.threshold();

  // Directed work items (i, j) with j in L_i.
  std::vector<Edge> items;
  for (Node i = 0; i < p; ++i)
    for (Node j : out.candidates[static_cast<std::size_t>(i)]) items.emplace_back(i, j);
  std::vector<MaxMinResult> directed(items.size());
  parallel_for(items.size(), cfg.workers, [&](std::size_t q) {
    auto [i, j] = items[q];
    directed[q] = maxmin_score(backend, cfg.test, i, j, cfg.d1, cfg.d2, out.candidates[static_cast<std::size_t>(i)],
                               search);
  });

  out.scores = ScoreMatrix(p, cfg.d1, cfg.d2, cfg.test, backend_name(backend));
  std::vector<MaxMinResult> merged(static_cast<std::size_t>(p) * static_cast<std::size_t>(std::max(p - 1, 0)) / 2);
  std::vector<char> filled(merged.size(), 0);
  for (std::size_t q = 0; q < items.size(); ++q) {
    out.evaluations += directed[q].evaluations;
    const std::size_t k = pair_index(p, items[q].first, items[q].second);
    if (!filled[k] || directed[q].score > merged[k].score) merged[k] = directed[q];
    filled[k] = 1;
  }
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j) {
      const std::size_t k = pair_index(p, i, j);
      if (filled[k]) out.scores.set(i, j, merged[k]);
    }
  out.graph = out.scores.threshold(cfg.threshold());
  out.elapsed = std::chrono::steady_clock::now() - start;
  return out;
}

template <Distribution B>
LearnResult learn(const B& backend, const LearnerConfig& cfg) {
  return cfg.preprocess ? cond_st_pre(backend, cfg) : cond_st(backend, cfg);
}

Evaluation evaluate(const Graph& estimate, const Graph& truth) {
  if (estimate.num_nodes() != truth.num_nodes()) throw std::invalid_argument("evaluate: node count mismatch");
  const int p = truth.num_nodes();
  Evaluation ev;
  std::size_t correct = 0;
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j) {
      ++ev.pairs;
      const bool e = estimate.has_edge(i, j), t = truth.has_edge(i, j);
      if (e == t) ++correct;
      else if (t) ++ev.edge_errors;
      else ++ev.nonedge_errors;
    }
  ev.pair_accuracy = ev.pairs == 0 ? 1.0 : static_cast<double>(correct) / static_cast<double>(ev.pairs);
  return ev;
}

LearnerConfig ferromagnetic_preset(int d, double jmin, double jmax) {
  auto eps = ferro_epsilons(d, jmin, jmax);
  LearnerConfig cfg;
  cfg.d1 = d;
  cfg.d2 = 0;
  cfg.epsilon = eps.epsilon;
  cfg.epsilon_prime = eps.epsilon_prime;
  cfg.test = TestKind::Probability;
  cfg.preprocess = true;
  return cfg;
}

template LearnResult cond_st(const JointTable&, const LearnerConfig&);
template LearnResult cond_st(const EmpiricalDist&, const LearnerConfig&);
template std::vector<NodeSet> candidate_sets(const JointTable&, double);
template std::vector<NodeSet> candidate_sets(const EmpiricalDist&, double);
template LearnResult cond_st_pre(const JointTable&, const LearnerConfig&);
template LearnResult cond_st_pre(const EmpiricalDist&, const LearnerConfig&);
template LearnResult learn(const JointTable&, const LearnerConfig&);
template LearnResult learn(const EmpiricalDist&, const LearnerConfig&);

}  // namespace mrfl
