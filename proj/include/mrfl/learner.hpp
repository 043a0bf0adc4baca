#pragma once

#include "mrfl/citest.hpp"
#include "mrfl/graph.hpp"

#include <chrono>
#include <cstdint>
#include <vector>

namespace mrfl {

struct LearnerConfig {
  int d1 = 1;          ///< max separator size
  int d2 = 0;          ///< max breaker size
  double epsilon = 0;  ///< loose-connectivity scale; pairs are tested at epsilon / 2
  double epsilon_prime = 0;  ///< correlation screen scale; candidates pass at epsilon' / 2
  TestKind test = TestKind::MutualInformation;
  bool preprocess = false;
  bool early_exit = true;
  int workers = 0;

  /// Threshold applied to the min-max score.
  double threshold() const { return epsilon / 2.0; }
  void validate() const;
};

struct LearnResult {
  Graph graph;
  /// With early_exit the entries are decision certificates: score > threshold
  /// iff the pair is an edge. Otherwise exact min-max scores.
  ScoreMatrix scores;
  std::vector<NodeSet> candidates;  ///< L_i, filled when preprocessing
  std::size_t max_candidates = 0;   ///< L = max_i |L_i|
  std::uint64_t evaluations = 0;    ///< statistic evaluations in the pair decisions
  std::chrono::nanoseconds elapsed{0};
};

/// Algorithm 1: declare (i,j) a non-edge iff some |S| <= d1 makes every
/// |T| <= d2 satisfy delta(i, j | S, T) <= epsilon / 2, searching V \ {i,j}.
template <Distribution B>
LearnResult cond_st(const B& backend, const LearnerConfig& cfg);

/// L_i = { j != i : max |P(x_i | x_j) - P(x_i | x_j')| > epsilon' / 2 }.
template <Distribution B>
std::vector<NodeSet> candidate_sets(const B& backend, double epsilon_prime);

/// Algorithm 2: candidate screening, then the Algorithm 1 decision for each
/// j in L_i with S and T restricted to L_i. An edge found from either side
/// is kept.
template <Distribution B>
LearnResult cond_st_pre(const B& backend, const LearnerConfig& cfg);

/// Dispatches on cfg.preprocess.
template <Distribution B>
LearnResult learn(const B& backend, const LearnerConfig& cfg);

struct Evaluation {
  double pair_accuracy = 0.0;  ///< correctly classified pairs / C(p,2)
  std::size_t edge_errors = 0;     ///< missed true edges
  std::size_t nonedge_errors = 0;  ///< spurious edges
  std::size_t pairs = 0;
};

Evaluation evaluate(const Graph& estimate, const Graph& truth);

/// Zero-field ferromagnetic preset: d2 = 0, probability test, preprocessing,
/// epsilon and epsilon' from the ferromagnetic bounded-degree formulas.
LearnerConfig ferromagnetic_preset(int d, double jmin, double jmax);

}  // namespace mrfl
