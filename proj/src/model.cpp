#include "mrfl/model.hpp"

#include "mrfl/info.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mrfl {

Assignment::Assignment(NodeSet n, std::vector<int> v) : nodes(std::move(n)), values(std::move(v)) {
  if (nodes.size() != values.size()) throw std::invalid_argument("Assignment: size mismatch");
}

// ---------------------------------------------------------------------------
// IsingModel

IsingModel::IsingModel(Graph g, std::vector<double> couplings, Eigen::VectorXd fields)
    : graph_(std::move(g)), couplings_(std::move(couplings)), fields_(std::move(fields)) {
  if (couplings_.size() != graph_.num_edges())
    throw std::invalid_argument("IsingModel: one coupling per edge required");
  if (fields_.size() != graph_.num_nodes())
    throw std::invalid_argument("IsingModel: one field per node required");
  for (double j : couplings_)
    if (!std::isfinite(j)) throw std::invalid_argument("IsingModel: non-finite coupling");
  if (!fields_.allFinite()) throw std::invalid_argument("IsingModel: non-finite field");
}

double IsingModel::coupling(Node i, Node j) const {
  int e = graph_.edge_index(i, j);
  return e < 0 ? 0.0 : couplings_[static_cast<std::size_t>(e)];
}

Eigen::MatrixXd IsingModel::coupling_matrix() const {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(num_nodes(), num_nodes());
  for (std::size_t e = 0; e < couplings_.size(); ++e) {
    auto [a, b] = graph_.edges()[e];
    j(a, b) = j(b, a) = couplings_[e];
  }
  return j;
}

double IsingModel::min_abs_coupling() const {
  if (couplings_.empty()) return 0.0;
  double v = std::abs(couplings_.front());
  for (double j : couplings_) v = std::min(v, std::abs(j));
  return v;
}

double IsingModel::max_abs_coupling() const {
  double v = 0.0;
  for (double j : couplings_) v = std::max(v, std::abs(j));
  return v;
}

bool IsingModel::ferromagnetic() const {
  return std::all_of(couplings_.begin(), couplings_.end(), [](double j) { return j >= 0.0; });
}

// ---------------------------------------------------------------------------
// JointTable

JointTable::JointTable(int alphabet, int p, Eigen::VectorXd probs, bool spins, bool require_positive)
    : alphabet_(alphabet), p_(p), spins_(spins), probs_(std::move(probs)) {
  if (alphabet < 1) throw std::invalid_argument("JointTable: empty alphabet");
  if (p < 0) throw std::invalid_argument("JointTable: negative node count");
  if (spins && alphabet != 2) throw std::invalid_argument("JointTable: spin tables are binary");
  std::size_t n = 1;
  stride_.resize(static_cast<std::size_t>(p));
  for (int i = 0; i < p; ++i) {
    stride_[static_cast<std::size_t>(i)] = n;
    n *= static_cast<std::size_t>(alphabet);
  }
  if (static_cast<std::size_t>(probs_.size()) != n)
    throw std::invalid_argument("JointTable: table size must be |X|^p");
  if ((probs_.array() < 0.0).any()) throw std::invalid_argument("JointTable: negative mass");
  if (std::abs(probs_.sum() - 1.0) > 1e-12) throw std::invalid_argument("JointTable: masses must sum to 1");
  if (require_positive && (probs_.array() <= 0.0).any())
    throw std::invalid_argument("JointTable: positivity violated");
}

int JointTable::value(std::size_t config, Node node) const {
  return static_cast<int>((config / stride_.at(static_cast<std::size_t>(node))) %
                          static_cast<std::size_t>(alphabet_));
}

std::size_t JointTable::index_of(std::span<const int> values) const {
  if (values.size() != static_cast<std::size_t>(p_)) throw std::invalid_argument("index_of: need p values");
  std::size_t idx = 0;
  for (int i = 0; i < p_; ++i) {
    int v = values[static_cast<std::size_t>(i)];
    if (v < 0 || v >= alphabet_) throw std::out_of_range("index_of: value outside alphabet");
    idx += static_cast<std::size_t>(v) * stride_[static_cast<std::size_t>(i)];
  }
  return idx;
}

Eigen::VectorXd JointTable::marginal(std::span<const Node> vars) const {
  std::size_t cells = 1;
  std::vector<std::size_t> out_stride(vars.size());
  for (std::size_t m = 0; m < vars.size(); ++m) {
    if (vars[m] < 0 || vars[m] >= p_) throw std::out_of_range("marginal: node out of range");
    out_stride[m] = cells;
    cells *= static_cast<std::size_t>(alphabet_);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells));
  const std::size_t n = num_configs();
  const auto k = static_cast<std::size_t>(alphabet_);
  if (alphabet_ == 2) {
    for (std::size_t x = 0; x < n; ++x) {
      std::size_t idx = 0;
      for (std::size_t m = 0; m < vars.size(); ++m) idx |= ((x >> vars[m]) & 1u) << m;
      out(static_cast<Eigen::Index>(idx)) += probs_(static_cast<Eigen::Index>(x));
    }
    return out;
  }
  for (std::size_t x = 0; x < n; ++x) {
    std::size_t idx = 0;
    for (std::size_t m = 0; m < vars.size(); ++m)
      idx += ((x / stride_[static_cast<std::size_t>(vars[m])]) % k) * out_stride[m];
    out(static_cast<Eigen::Index>(idx)) += probs_(static_cast<Eigen::Index>(x));
  }
  return out;
}

double JointTable::mass(const Assignment& a) const {
  if (a.empty()) return 1.0;
  Eigen::VectorXd m = marginal(a.nodes);
  std::size_t idx = 0, stride = 1;
  for (std::size_t q = 0; q < a.size(); ++q) {
    if (a.values[q] < 0 || a.values[q] >= alphabet_) throw std::out_of_range("mass: value outside alphabet");
    idx += static_cast<std::size_t>(a.values[q]) * stride;
    stride *= static_cast<std::size_t>(alphabet_);
  }
  return m(static_cast<Eigen::Index>(idx));
}

// ---------------------------------------------------------------------------
// Constructions

JointTable exact_joint(const IsingModel& m) {
  const int p = m.num_nodes();
  if (p > kMaxExactNodes) throw std::invalid_argument("exact_joint: too many nodes for enumeration");
  const std::size_t n = std::size_t{1} << p;
  const auto& edges = m.graph().edges();
  const auto& jc = m.couplings();
  const auto& h = m.fields();
  Eigen::VectorXd energy(static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x) {
    double e = 0.0;
    for (int i = 0; i < p; ++i) e += ((x >> i) & 1u) ? h(i) : -h(i);
    for (std::size_t q = 0; q < edges.size(); ++q) {
      bool same = (((x >> edges[q].first) ^ (x >> edges[q].second)) & 1u) == 0;
      e += same ? jc[q] : -jc[q];
    }
    energy(static_cast<Eigen::Index>(x)) = e;
  }
  // Log-scale normalization.
  const double top = energy.maxCoeff();
  Eigen::VectorXd probs = (energy.array() - top).exp();
  probs /= probs.sum();
  return JointTable(2, p, std::move(probs), true);
}

JointTable xor_triangle(double agreement) {
  Eigen::VectorXd probs(8);
  for (std::size_t x = 0; x < 8; ++x) {
    int x1 = x & 1, x2 = (x >> 1) & 1, x3 = (x >> 2) & 1;
    probs(static_cast<Eigen::Index>(x)) = 0.25 * (x3 == (x1 ^ x2) ? agreement : 1.0 - agreement);
  }
  return JointTable(2, 3, std::move(probs));
}

JointTable condition(const JointTable& t, const Assignment& given) {
  if (given.empty()) return t;
  const int p = t.num_nodes();
  std::vector<int> fixed(static_cast<std::size_t>(p), -1);
  for (std::size_t q = 0; q < given.size(); ++q) {
    Node s = given.nodes[q];
    if (s < 0 || s >= p) throw std::out_of_range("condition: node out of range");
    if (given.values[q] < 0 || given.values[q] >= t.alphabet_size())
      throw std::out_of_range("condition: value outside alphabet");
    fixed[static_cast<std::size_t>(s)] = given.values[q];
  }
  NodeSet rest;
  for (Node v = 0; v < p; ++v)
    if (fixed[static_cast<std::size_t>(v)] < 0) rest.push_back(v);
  const auto k = static_cast<std::size_t>(t.alphabet_size());
  std::size_t cells = 1;
  for (std::size_t q = 0; q < rest.size(); ++q) cells *= k;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells));
  for (std::size_t x = 0; x < t.num_configs(); ++x) {
    bool match = true;
    for (std::size_t q = 0; q < given.size() && match; ++q)
      match = t.value(x, given.nodes[q]) == given.values[q];
    if (!match) continue;
    std::size_t idx = 0, stride = 1;
    for (Node v : rest) {
      idx += static_cast<std::size_t>(t.value(x, v)) * stride;
      stride *= k;
    }
    out(static_cast<Eigen::Index>(idx)) += t.prob(x);
  }
  const double z = out.sum();
  if (!(z > 0.0)) throw std::domain_error("condition: zero-probability conditioning event");
  out /= z;
  return JointTable(t.alphabet_size(), static_cast<int>(rest.size()), std::move(out), t.spins());
}

IsingModel reduce_by_conditioning(const IsingModel& m, const Assignment& given) {
  const int p = m.num_nodes();
  std::vector<int> fixed(static_cast<std::size_t>(p), -1);
  for (std::size_t q = 0; q < given.size(); ++q) fixed.at(static_cast<std::size_t>(given.nodes[q])) = given.values[q];
  std::vector<int> new_id(static_cast<std::size_t>(p), -1);
  int r = 0;
  for (Node v = 0; v < p; ++v)
    if (fixed[static_cast<std::size_t>(v)] < 0) new_id[static_cast<std::size_t>(v)] = r++;
  Eigen::VectorXd h(r);
  for (Node v = 0; v < p; ++v)
    if (new_id[static_cast<std::size_t>(v)] >= 0) h(new_id[static_cast<std::size_t>(v)]) = m.fields()(v);
  std::vector<Edge> edges;
  std::vector<double> jc;
  for (std::size_t e = 0; e < m.graph().num_edges(); ++e) {
    auto [a, b] = m.graph().edges()[e];
    const double j = m.couplings()[e];
    int fa = fixed[static_cast<std::size_t>(a)], fb = fixed[static_cast<std::size_t>(b)];
    if (fa < 0 && fb < 0) {
      edges.emplace_back(new_id[static_cast<std::size_t>(a)], new_id[static_cast<std::size_t>(b)]);
      jc.push_back(j);
    } else if (fa < 0) {
      h(new_id[static_cast<std::size_t>(a)]) += j * index_to_spin(fb);
    } else if (fb < 0) {
      h(new_id[static_cast<std::size_t>(b)]) += j * index_to_spin(fa);
    }
  }
  // Renumbering is monotone, so the edge order is preserved.
  return IsingModel(Graph(r, std::move(edges)), std::move(jc), std::move(h));
}

double cond_prob(const JointTable& t, Node i, int xi, const Assignment& given) {
  NodeSet vars{i};
  vars.insert(vars.end(), given.nodes.begin(), given.nodes.end());
  Eigen::VectorXd m = t.marginal(vars);
  const auto k = static_cast<std::size_t>(t.alphabet_size());
  std::size_t idx = 0, stride = k;
  for (std::size_t q = 0; q < given.size(); ++q) {
    idx += static_cast<std::size_t>(given.values[q]) * stride;
    stride *= k;
  }
  double denom = 0.0;
  for (std::size_t v = 0; v < k; ++v) denom += m(static_cast<Eigen::Index>(idx + v));
  if (!(denom > 0.0)) throw std::domain_error("cond_prob: zero-mass conditioning event");
  return m(static_cast<Eigen::Index>(idx + static_cast<std::size_t>(xi))) / denom;
}

namespace {

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

double cond_mutual_info(const JointTable& t, Node i, Node j, std::span<const Node> s) {
  Eigen::VectorXd m = t.marginal(pair_vars(i, j, s));
  return pair_table_cmi(m, t.alphabet_size(), 1.0, [](double w) { return xlog2x(w); });
}

double probability_test(const JointTable& t, Node i, Node j, std::span<const Node> s) {
  Eigen::VectorXd m = t.marginal(pair_vars(i, j, s));
  return pair_table_probability_test(m, t.alphabet_size());
}

// ---------------------------------------------------------------------------
// Samplers

SampleSet gibbs_sample(const IsingModel& m, int n, std::uint64_t seed, GibbsOptions opts) {
  if (n < 1) throw std::invalid_argument("gibbs_sample: n must be >= 1");
  if (opts.burnin < 0 || opts.thin < 1) throw std::invalid_argument("gibbs_sample: bad burnin/thin");
  const int p = m.num_nodes();
  std::vector<std::vector<std::pair<Node, double>>> nb(static_cast<std::size_t>(p));
  for (std::size_t e = 0; e < m.graph().num_edges(); ++e) {
    auto [a, b] = m.graph().edges()[e];
    nb[static_cast<std::size_t>(a)].emplace_back(b, m.couplings()[e]);
    nb[static_cast<std::size_t>(b)].emplace_back(a, m.couplings()[e]);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> x(static_cast<std::size_t>(p));
  for (auto& s : x) s = unif(rng) < 0.5 ? -1 : 1;

  auto sweep = [&] {
    for (int i = 0; i < p; ++i) {
      double f = m.fields()(i);
      for (auto [w, j] : nb[static_cast<std::size_t>(i)]) f += j * x[static_cast<std::size_t>(w)];
      const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * f));
      x[static_cast<std::size_t>(i)] = unif(rng) < p_plus ? 1 : -1;
    }
  };
  for (int s = 0; s < opts.burnin; ++s) sweep();
  SampleMatrix data(n, p);
  for (int k = 0; k < n; ++k) {
    for (int s = 0; s < opts.thin; ++s) sweep();
    for (int i = 0; i < p; ++i) data(k, i) = static_cast<std::uint8_t>(spin_to_index(x[static_cast<std::size_t>(i)]));
  }
  return SampleSet(std::move(data), 2, true);
}

SampleSet exact_sample(const JointTable& t, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("exact_sample: n must be >= 1");
  std::vector<double> cdf(t.num_configs());
  std::partial_sum(t.probs().data(), t.probs().data() + t.probs().size(), cdf.begin());
  const double total = cdf.back();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  SampleMatrix data(n, t.num_nodes());
  for (int k = 0; k < n; ++k) {
    const double u = unif(rng) * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t x = static_cast<std::size_t>(it - cdf.begin());
    // Guard against landing past the end through rounding, and on zero-mass
    // cells at the top of the table.
    if (x >= cdf.size()) x = cdf.size() - 1;
    while (t.prob(x) == 0.0 && x > 0) --x;
    for (Node i = 0; i < t.num_nodes(); ++i) data(k, i) = static_cast<std::uint8_t>(t.value(x, i));
  }
  return SampleSet(std::move(data), t.alphabet_size(), t.spins());
}

IsingModel random_coefficients(const Graph& g, double jmin, double jmax, CouplingMode mode,
                               std::uint64_t seed) {
  if (!(jmin > 0.0)) throw std::invalid_argument("random_coefficients: jmin must be positive");
  if (jmax < jmin) throw std::invalid_argument("random_coefficients: jmax < jmin");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> jc;
  jc.reserve(g.num_edges());
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    double mag = jmin + (jmax - jmin) * unif(rng);
    if (mode == CouplingMode::General && unif(rng) < 0.5) mag = -mag;
    jc.push_back(mag);
  }
  return IsingModel(g, std::move(jc), Eigen::VectorXd::Zero(g.num_nodes()));
}

}  // namespace mrfl
