#include "mrfl/sawtree.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

using namespace mrfl;
using doctest::Approx;

namespace {

IsingModel with_fields(Graph g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> j;
  for (std::size_t k = 0; k < g.num_edges(); ++k) j.push_back(u(rng));
  Eigen::VectorXd h(g.num_nodes());
  for (int k = 0; k < g.num_nodes(); ++k) h(k) = 0.5 * u(rng);
  return IsingModel(std::move(g), std::move(j), std::move(h));
}

double reduce_leaf_direct(double j, double h) {
  return 0.5 * std::log((std::exp(j + h) + std::exp(-j - h)) / (std::exp(-j + h) + std::exp(j - h)));
}

// Random graph with at least one cycle and random root, S and ordering.
struct Case {
  IsingModel model;
  Node root;
  NodeSet s;
  std::vector<Node> ordering;
};

Case random_case(std::mt19937_64& rng) {
  for (;;) {
    const int p = 3 + static_cast<int>(rng() % 6);
    auto m = testing::random_model(rng, p, 0.5, 0.2, 1.0, 0.5);
    if (is_forest(m.graph())) continue;
    std::vector<Node> order(static_cast<std::size_t>(p));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const Node root = static_cast<Node>(rng() % static_cast<unsigned>(p));
    NodeSet s;
    for (Node v : order)
      if (v != root && s.size() < 3 && rng() % 2) s.push_back(v);
    return {std::move(m), root, s, order};
  }
}

}  // namespace

TEST_CASE("tree input has no terminals") {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    const auto m = with_fields(testing::random_tree(rng, 7), rng);
    const auto tree = build_saw_tree(m, 0);
    CHECK(tree.terminals().empty());
    CHECK(tree.size() == 7);
  }
}

TEST_CASE("triangle terminals") {
  const IsingModel tri(Graph(3, {{0, 1}, {0, 2}, {1, 2}}), {0.5, 0.5, 0.5}, Eigen::VectorXd::Zero(3));
  const auto t = build_saw_tree(tri, 0);
  CHECK(t.size() == 7);
  const auto term = t.terminals();
  REQUIRE(term.size() == 2);
  std::vector<int> spins;
  for (int k : term) {
    CHECK(t[k].node == 0);
    CHECK(t[k].depth == 3);
    spins.push_back(t[k].fixed_spin);
  }
  std::sort(spins.begin(), spins.end());
  CHECK(spins == std::vector<int>{-1, 1});
  // Walk 0-1-2 closes with edge (0,2), larger than the starting edge (0,1).
  CHECK(t[t[term[0]].parent].node == 2);
  CHECK(t[term[0]].fixed_spin == 1);
}

TEST_CASE("four-cycle branches") {
  const IsingModel cyc(Graph(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}), {0.5, 0.5, 0.5, 0.5}, Eigen::VectorXd::Zero(4));
  const auto t = build_saw_tree(cyc, 0);
  CHECK(t.size() == 9);
  CHECK(t[0].children.size() == 2);
  CHECK(t.terminals().size() == 2);
  for (int c : t[0].children) {
    int k = c, leaves = 0;
    while (!t[k].children.empty()) {
      CHECK(t[k].children.size() == 1);
      k = t[k].children.front();
    }
    leaves += t[k].terminal;
    CHECK(leaves == 1);
    CHECK(t[k].node == 0);
  }
  CHECK(t.copies({2}).size() == 2);
}

TEST_CASE("small trees by hand") {
  const IsingModel one(Graph(1), {}, Eigen::VectorXd::Zero(1));
  const auto t1 = build_saw_tree(one, 0);
  CHECK(tree_cond_prob(t1, 1, std::vector<int>(1, 0)) == Approx(0.5));

  const IsingModel two(Graph(2, {{0, 1}}), {0.5}, Eigen::VectorXd::Zero(2));
  const auto t2 = build_saw_tree(two, 0);
  const NodeSet s{1};
  CHECK(tree_cond_prob(t2, 1, clamp_copies(t2, s, {1})) == Approx(0.731058578630005).epsilon(1e-14));
  CHECK(tree_cond_prob(t2, -1, clamp_copies(t2, s, {1})) == Approx(1 - 0.731058578630005).epsilon(1e-12));
  CHECK_THROWS_AS(tree_cond_prob(t2, 0, {0, 0}), std::invalid_argument);
  CHECK_THROWS_AS(clamp_copies(t2, s, {1, 1}), std::invalid_argument);
}

TEST_CASE("path graph equals iterated leaf reduction") {
  const IsingModel path(Graph(3, {{0, 1}, {1, 2}}), {0.7, -0.4}, Eigen::Vector3d(0.1, -0.3, 0.8));
  const auto t = build_saw_tree(path, 0);
  const double h1 = -0.3 + reduce_leaf_direct(-0.4, 0.8);
  const double h0 = 0.1 + reduce_leaf_direct(0.7, h1);
  CHECK(tree_cond_prob(t, 1, std::vector<int>(3, 0)) == Approx(1.0 / (1.0 + std::exp(-2 * h0))).epsilon(1e-14));
  CHECK(tree_cond_prob(t, 1, std::vector<int>(3, 0)) == Approx(cond_prob(exact_joint(path), 0, 1)).epsilon(1e-12));
}

TEST_CASE("leaf reduction") {
  CHECK(reduce_leaf(0.5, 1.0) == Approx(0.36766283202775957).epsilon(1e-14));
  CHECK(reduce_leaf(0.0, 2.0) == 0.0);
  CHECK(reduce_leaf(1.3, 0.0) == Approx(0.0).epsilon(1e-15));
  CHECK(std::isfinite(reduce_leaf(400.0, 300.0)));
  CHECK(reduce_leaf(400.0, 300.0) == Approx(300.0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int t = 0; t < 1000; ++t) {
    const double j = u(rng), h = u(rng);
    CHECK(reduce_leaf(j, h) == Approx(reduce_leaf_direct(j, h)).epsilon(1e-12));
    CHECK(std::abs(reduce_leaf(j, h)) <= std::abs(h) * std::tanh(std::abs(j)) + 1e-12);
    CHECK(std::abs(reduce_leaf(j, h)) <= std::abs(j) + 1e-12);
    CHECK(reduce_leaf(-j, h) == Approx(-reduce_leaf(j, h)).epsilon(1e-12));
  }
}

TEST_CASE("tree identity on random graphs") {
  std::mt19937_64 rng(3);
  double worst = 0.0;
  for (int t = 0; t < 60; ++t) {
    const auto c = random_case(rng);
    SawOptions opts;
    opts.ordering = c.ordering;
    worst = std::max(worst, verify_saw_identity(c.model, c.root, c.s, opts));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("terminal rule variants") {
  std::mt19937_64 rng(4);
  double flipped = 0.0, walk_end = 0.0;
  for (int t = 0; t < 40; ++t) {
    const auto c = random_case(rng);
    SawOptions opts;
    opts.ordering = c.ordering;
    opts.rule = TerminalRule::Flipped;
    flipped = std::max(flipped, verify_saw_identity(c.model, c.root, c.s, opts));
    opts.rule = TerminalRule::AtWalkEnd;
    walk_end = std::max(walk_end, verify_saw_identity(c.model, c.root, c.s, opts));
  }
  CHECK(flipped <= 1e-9);
  CHECK(walk_end > 1e-3);
}

TEST_CASE("limits and validation") {
  const auto g8 = IsingModel(generate(Grid8{4, 4}), std::vector<double>(generate(Grid8{4, 4}).num_edges(), 0.1),
                             Eigen::VectorXd::Zero(16));
  CHECK_THROWS_AS(build_saw_tree(g8, 0), std::invalid_argument);
  SawOptions capped;
  capped.depth_cap = 3;
  const auto t = build_saw_tree(g8, 5, capped);
  for (const auto& n : t.nodes()) CHECK(n.depth <= 3);
  capped.depth_cap = 12;
  capped.node_budget = 1000;
  CHECK_THROWS_AS(build_saw_tree(g8, 5, capped), std::length_error);

  const IsingModel tri(Graph(3, {{0, 1}, {0, 2}, {1, 2}}), {0.5, 0.5, 0.5}, Eigen::VectorXd::Zero(3));
  SawOptions bad;
  bad.ordering = {0, 1, 1};
  CHECK_THROWS_AS(build_saw_tree(tri, 0, bad), std::invalid_argument);
  CHECK_THROWS_AS(build_saw_tree(tri, 3), std::invalid_argument);
  CHECK_THROWS_AS(verify_saw_identity(tri, 0, {0}), std::invalid_argument);
}
