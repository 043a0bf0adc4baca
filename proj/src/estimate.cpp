#include "mrfl/estimate.hpp"

#include "mrfl/info.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace mrfl {

EmpiricalDist::EmpiricalDist(SampleSet samples)
    : samples_(std::make_shared<const SampleSet>(std::move(samples))) {
  samples_->validate();
  const int n = num_samples();
  const int p = num_nodes();
  const int k = alphabet_size();
  words_ = (static_cast<std::size_t>(n) + 63) / 64;
  bits_.assign(static_cast<std::size_t>(p) * static_cast<std::size_t>(k) * words_, 0);
  for (Node i = 0; i < p; ++i) {
    for (int s = 0; s < n; ++s) {
      const int v = samples_->data(s, i);
      Word* w = bits_.data() + (static_cast<std::size_t>(i) * static_cast<std::size_t>(k) +
                                static_cast<std::size_t>(v)) * words_;
      w[static_cast<std::size_t>(s) / 64] |= Word{1} << (static_cast<unsigned>(s) % 64);
    }
  }
  const unsigned rem = static_cast<unsigned>(n) % 64;
  tail_mask_ = rem == 0 ? ~Word{0} : (Word{1} << rem) - 1;
  clogc_.resize(static_cast<std::size_t>(n) + 1);
  for (int c = 0; c <= n; ++c) clogc_[static_cast<std::size_t>(c)] = xlog2x(static_cast<double>(c));
}

std::vector<std::int32_t> EmpiricalDist::counts(std::span<const Node> vars) const {
  const int m = static_cast<int>(vars.size());
  if (m > kMaxEmpiricalSet) throw std::invalid_argument("counts: variable set too large");
  const int k = alphabet_size();
  for (Node v : vars)
    if (v < 0 || v >= num_nodes()) throw std::out_of_range("counts: node out of range");
  std::size_t cells = 1;
  for (int q = 0; q < m; ++q) cells *= static_cast<std::size_t>(k);
  std::vector<std::int32_t> out(cells, 0);
  if (m == 0) {
    out[0] = num_samples();
    return out;
  }

  // Depth-first refinement of the all-samples mask, splitting on the last
  // variable first so that vars[0] ends up as the fastest index digit.
  std::vector<Word> masks(static_cast<std::size_t>(m + 1) * words_);
  Word* root = masks.data();
  for (std::size_t w = 0; w < words_; ++w) root[w] = ~Word{0};
  root[words_ - 1] = tail_mask_;

  auto rec = [&](auto&& self, int depth, std::size_t index, std::size_t stride) -> void {
    const Word* parent = masks.data() + static_cast<std::size_t>(depth) * words_;
    const Node var = vars[static_cast<std::size_t>(m - 1 - depth)];
    Word* child = masks.data() + static_cast<std::size_t>(depth + 1) * words_;
    const std::size_t sub = stride / static_cast<std::size_t>(k);
    for (int v = 0; v < k; ++v) {
      const Word* ind = indicator(var, v);
      Word any = 0;
      if (depth + 1 == m) {
        std::int32_t c = 0;
        for (std::size_t w = 0; w < words_; ++w) c += std::popcount(parent[w] & ind[w]);
        out[index + static_cast<std::size_t>(v) * sub] = c;
        continue;
      }
      for (std::size_t w = 0; w < words_; ++w) {
        child[w] = parent[w] & ind[w];
        any |= child[w];
      }
      if (any == 0) continue;
      self(self, depth + 1, index + static_cast<std::size_t>(v) * sub, sub);
    }
  };
  rec(rec, 0, 0, cells);
  return out;
}

Eigen::VectorXd EmpiricalDist::marginal(std::span<const Node> vars) const {
  auto c = counts(vars);
  Eigen::VectorXd out(static_cast<Eigen::Index>(c.size()));
  const double n = num_samples();
  for (std::size_t q = 0; q < c.size(); ++q) out(static_cast<Eigen::Index>(q)) = c[q] / n;
  return out;
}

namespace {

std::size_t flat_index(const Assignment& a, int k, std::size_t offset_stride = 1) {
  std::size_t idx = 0, stride = offset_stride;
  for (std::size_t q = 0; q < a.size(); ++q) {
    if (a.values[q] < 0 || a.values[q] >= k) throw std::out_of_range("value outside alphabet");
    idx += static_cast<std::size_t>(a.values[q]) * stride;
    stride *= static_cast<std::size_t>(k);
  }
  return idx;
}

NodeSet pair_vars(Node i, Node j, std::span<const Node> s) {
  if (i == j) throw std::invalid_argument("pair test: i and j must differ");
  NodeSet vars{i, j};
  for (Node v : s) {
    if (v == i || v == j) throw std::invalid_argument("pair test: conditioning set must exclude i and j");
    vars.push_back(v);
  }
  return vars;
}

}  // namespace

double emp_marginal(const EmpiricalDist& e, const Assignment& a) {
  if (a.empty()) return 1.0;
  auto c = e.counts(a.nodes);
  return c[flat_index(a, e.alphabet_size())] / static_cast<double>(e.num_samples());
}

double emp_cond_prob(const EmpiricalDist& e, Node i, int xi, const Assignment& given) {
  NodeSet vars{i};
  vars.insert(vars.end(), given.nodes.begin(), given.nodes.end());
  auto c = e.counts(vars);
  const int k = e.alphabet_size();
  const std::size_t base = flat_index(given, k, static_cast<std::size_t>(k));
  std::int64_t denom = 0;
  for (int v = 0; v < k; ++v) denom += c[base + static_cast<std::size_t>(v)];
  if (denom == 0) throw std::domain_error("emp_cond_prob: zero-count conditioning event");
  return c[base + static_cast<std::size_t>(xi)] / static_cast<double>(denom);
}

double emp_entropy(const EmpiricalDist& e, std::span<const Node> a) {
  auto c = e.counts(a);
  const double n = e.num_samples();
  double s = 0.0;
  for (auto v : c) s += e.clog2c(v);
  return std::max(0.0, std::log2(n) - s / n);
}

double emp_cond_mutual_info(const EmpiricalDist& e, Node i, Node j, std::span<const Node> s) {
  auto c = e.counts(pair_vars(i, j, s));
  return pair_table_cmi(c, e.alphabet_size(), static_cast<double>(e.num_samples()),
                        [&e](std::int32_t w) { return e.clog2c(w); });
}

double emp_probability_test(const EmpiricalDist& e, Node i, Node j, std::span<const Node> s) {
  auto c = e.counts(pair_vars(i, j, s));
  return pair_table_probability_test(c, e.alphabet_size());
}

double l1_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("l1_distance: mismatched supports");
  return (a - b).cwiseAbs().sum();
}

}  // namespace mrfl
