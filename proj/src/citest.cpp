#include "mrfl/citest.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <stdexcept>
#include <thread>

namespace mrfl {

std::string to_string(TestKind kind) {
  return kind == TestKind::MutualInformation ? "mi" : "prob";
}

TestKind parse_test_kind(const std::string& s) {
  if (s == "mi") return TestKind::MutualInformation;
  if (s == "prob") return TestKind::Probability;
  throw std::invalid_argument("unknown test kind: " + s);
}

std::string backend_name(const JointTable&) { return "exact"; }
std::string backend_name(const EmpiricalDist& e) {
  return "empirical(n=" + std::to_string(e.num_samples()) + ")";
}

template <Distribution B>
double delta(const B& backend, TestKind kind, Node i, Node j, std::span<const Node> cond) {
  return kind == TestKind::MutualInformation ? mutual_information_test(backend, i, j, cond)
                                             : probability_test(backend, i, j, cond);
}

namespace {

/// Visits size-k combinations of `pool` in lexicographic position order.
/// The visitor returns false to stop; the function then returns false.
template <typename Fn>
bool for_each_combination(const NodeSet& pool, std::size_t k, NodeSet& out, Fn&& fn) {
  const std::size_t n = pool.size();
  if (k > n) return true;
  std::vector<std::size_t> idx(k);
  for (std::size_t q = 0; q < k; ++q) idx[q] = q;
  out.resize(k);
  while (true) {
    for (std::size_t q = 0; q < k; ++q) out[q] = pool[idx[q]];
    if (!fn(out)) return false;
    // Advance.
    std::size_t q = k;
    while (q > 0 && idx[q - 1] == n - k + (q - 1)) --q;
    if (q == 0) return true;
    ++idx[q - 1];
    for (std::size_t r = q; r < k; ++r) idx[r] = idx[r - 1] + 1;
  }
}

}  // namespace

template <Distribution B>
MaxMinResult maxmin_score(const B& backend, TestKind kind, Node i, Node j, int d1, int d2,
                          std::span<const Node> search_space, const SearchOptions& opts) {
  if (i == j) throw std::invalid_argument("maxmin_score: i and j must differ");
  if (d1 < 0 || d2 < 0) throw std::invalid_argument("maxmin_score: negative search size");
  NodeSet space;
  for (Node v : search_space)
    if (v != i && v != j && std::find(space.begin(), space.end(), v) == space.end()) space.push_back(v);

  MaxMinResult best;
  best.score = std::numeric_limits<double>::infinity();
  NodeSet s_buf, t_buf, rest, cond;
  bool done = false;

  for (std::size_t s_size = 0; s_size <= std::min<std::size_t>(static_cast<std::size_t>(d1), space.size()) && !done;
       ++s_size) {
    for_each_combination(space, s_size, s_buf, [&](const NodeSet& s) {
      rest.clear();
      for (Node v : space)
        if (std::find(s.begin(), s.end(), v) == s.end()) rest.push_back(v);
      double run_max = -1.0;
      NodeSet arg_t;
      bool abandoned = false;
      const std::size_t t_cap = std::min<std::size_t>(static_cast<std::size_t>(d2), rest.size());
      for (std::size_t t_size = 0; t_size <= t_cap && !abandoned; ++t_size) {
        for_each_combination(rest, t_size, t_buf, [&](const NodeSet& t) {
          cond.assign(s.begin(), s.end());
          cond.insert(cond.end(), t.begin(), t.end());
          const double v = delta(backend, kind, i, j, cond);
          ++best.evaluations;
          if (v > run_max) {
            run_max = v;
            arg_t = t;
          }
          if ((opts.threshold && v > *opts.threshold) || (opts.prune && run_max >= best.score)) {
            abandoned = true;
            return false;
          }
          return true;
        });
      }
      if (run_max < best.score) {
        best.score = run_max;
        best.separator = s;
        best.breaker = arg_t;
      }
      if (!abandoned) {
        if (opts.threshold && run_max <= *opts.threshold) done = true;
        if (opts.prune && best.score <= 0.0) done = true;
      }
      return !done;
    });
  }
  return best;
}

// ---------------------------------------------------------------------------
// ScoreMatrix

std::size_t pair_index(int p, Node i, Node j) {
  if (i > j) std::swap(i, j);
  // Pairs (a, b) with a < i come first: sum_{a<i} (p-1-a).
  const auto pi = static_cast<std::size_t>(i);
  const auto pp = static_cast<std::size_t>(p);
  return pi * (2 * pp - pi - 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

ScoreMatrix::ScoreMatrix(int p, int d1, int d2, TestKind kind, std::string backend)
    : scores_(Eigen::MatrixXd::Zero(p, p)),
      witnesses_(static_cast<std::size_t>(p) * static_cast<std::size_t>(std::max(p - 1, 0)) / 2),
      d1_(d1),
      d2_(d2),
      kind_(kind),
      backend_(std::move(backend)) {}

const MaxMinResult& ScoreMatrix::witness(Node i, Node j) const {
  if (i == j) throw std::invalid_argument("witness: diagonal");
  return witnesses_.at(pair_index(num_nodes(), i, j));
}

void ScoreMatrix::set(Node i, Node j, MaxMinResult r) {
  if (i == j) throw std::invalid_argument("ScoreMatrix::set: diagonal");
  if (r.score < 0.0) throw std::invalid_argument("ScoreMatrix::set: negative score");
  scores_(i, j) = scores_(j, i) = r.score;
  witnesses_.at(pair_index(num_nodes(), i, j)) = std::move(r);
}

std::vector<double> ScoreMatrix::pair_scores() const {
  std::vector<double> out;
  const int p = num_nodes();
  out.reserve(witnesses_.size());
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j) out.push_back(scores_(i, j));
  return out;
}

Graph ScoreMatrix::threshold(double threshold) const {
  std::vector<Edge> edges;
  const int p = num_nodes();
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j)
      if (scores_(i, j) > threshold) edges.emplace_back(i, j);
  return Graph(p, std::move(edges));
}

// ---------------------------------------------------------------------------

template <Distribution B>
ScoreMatrix score_matrix(const B& backend, TestKind kind, int d1, int d2,
                         const std::vector<NodeSet>* search_spaces, const ScoreOptions& opts) {
  const int p = backend.num_nodes();
  if (search_spaces && search_spaces->size() != static_cast<std::size_t>(p))
    throw std::invalid_argument("score_matrix: one search space per node required");
  ScoreMatrix out(p, d1, d2, kind, backend_name(backend));
  std::vector<Edge> pairs;
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j) pairs.emplace_back(i, j);

  NodeSet all(static_cast<std::size_t>(p));
  for (Node v = 0; v < p; ++v) all[static_cast<std::size_t>(v)] = v;
  const bool both_directions = search_spaces != nullptr || kind == TestKind::Probability;

  std::vector<MaxMinResult> results(pairs.size());
  auto work = [&](std::size_t q) {
    auto [i, j] = pairs[q];
    const NodeSet& si = search_spaces ? (*search_spaces)[static_cast<std::size_t>(i)] : all;
    MaxMinResult r = maxmin_score(backend, kind, i, j, d1, d2, si, opts.search);
    if (both_directions) {
      const NodeSet& sj = search_spaces ? (*search_spaces)[static_cast<std::size_t>(j)] : all;
      MaxMinResult back = maxmin_score(backend, kind, j, i, d1, d2, sj, opts.search);
      const auto evals = r.evaluations + back.evaluations;
      if (back.score > r.score) r = std::move(back);
      r.evaluations = evals;
    }
    results[q] = std::move(r);
  };

  unsigned workers = opts.workers > 0 ? static_cast<unsigned>(opts.workers) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(pairs.size())));
  if (workers <= 1) {
    for (std::size_t q = 0; q < pairs.size(); ++q) work(q);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t q = next++; q < pairs.size(); q = next++) work(q);
      });
  }
  for (std::size_t q = 0; q < pairs.size(); ++q) out.set(pairs[q].first, pairs[q].second, std::move(results[q]));
  return out;
}

// Explicit instantiations for the two backends.
template double delta(const JointTable&, TestKind, Node, Node, std::span<const Node>);
template double delta(const EmpiricalDist&, TestKind, Node, Node, std::span<const Node>);
template MaxMinResult maxmin_score(const JointTable&, TestKind, Node, Node, int, int, std::span<const Node>,
                                   const SearchOptions&);
template MaxMinResult maxmin_score(const EmpiricalDist&, TestKind, Node, Node, int, int, std::span<const Node>,
                                   const SearchOptions&);
template ScoreMatrix score_matrix(const JointTable&, TestKind, int, int, const std::vector<NodeSet>*,
                                  const ScoreOptions&);
template ScoreMatrix score_matrix(const EmpiricalDist&, TestKind, int, int, const std::vector<NodeSet>*,
                                  const ScoreOptions&);

}  // namespace mrfl
