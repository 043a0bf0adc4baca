#include "mrfl/harness.hpp"
#include "mrfl/learner.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace mrfl;
using doctest::Approx;

namespace {

ScoreMatrix from_pairs(int p, const std::vector<double>& pair_scores) {
  ScoreMatrix m(p, 1, 0, TestKind::MutualInformation, "test");
  std::size_t k = 0;
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j) {
      MaxMinResult r;
      r.score = pair_scores[k++];
      m.set(i, j, r);
    }
  return m;
}

ExperimentSpec small_spec() {
  ExperimentSpec s;
  s.graph = Grid4{3, 3};
  s.sample_sizes = {300, 600};
  s.runs = 4;
  s.configs = {{1, 0}, {2, 0}};
  s.sampler = Sampler::Exact;
  s.workers = 1;
  s.seed = 11;
  return s;
}

}  // namespace

TEST_CASE("oracle threshold on separated scores") {
  // Pairs of a 4-node path: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).
  const Graph truth(4, {{0, 1}, {1, 2}, {2, 3}});
  const auto sm = from_pairs(4, {0.5, 0.01, 0.02, 0.4, 0.0, 0.6});
  const auto o = oracle_threshold(sm, truth);
  CHECK(o.errors == 0);
  CHECK(o.epsilon == Approx((0.02 + 0.4) / 2));
  CHECK(sm.threshold(o.epsilon) == truth);
  CHECK(threshold_errors(sm, truth, 0.0) == 2);

  const auto flat = from_pairs(4, std::vector<double>(6, 0.3));
  const auto of = oracle_threshold(flat, truth);
  CHECK(of.errors == 3);  // all-edges and no-edges both miss 3 pairs; the smaller epsilon wins
  CHECK(of.epsilon < 0.3);
  CHECK_THROWS_AS(oracle_threshold(flat, Graph(3)), std::invalid_argument);
}

TEST_CASE("oracle threshold is optimal") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const int p = 6;
    std::vector<double> s(15);
    for (auto& v : s) v = std::round(u(rng) * 20) / 20;  // ties on purpose
    std::vector<Edge> e;
    for (Node i = 0; i < p; ++i)
      for (Node j = i + 1; j < p; ++j)
        if (u(rng) < 0.4) e.emplace_back(i, j);
    const Graph truth(p, e);
    const auto sm = from_pairs(p, s);
    std::size_t best = threshold_errors(sm, truth, -1.0);
    for (double v : s) best = std::min(best, threshold_errors(sm, truth, v));
    const auto o = oracle_threshold(sm, truth);
    CHECK(o.errors == best);
    CHECK(threshold_errors(sm, truth, o.epsilon) == o.errors);
  }
}

TEST_CASE("kde threshold") {
  std::vector<double> scores;
  for (int k = 0; k < 30; ++k) scores.push_back(0.005 + 0.0005 * k);
  for (int k = 0; k < 10; ++k) scores.push_back(0.48 + 0.004 * k);
  const auto t = kde_threshold(scores);
  CHECK_FALSE(t.fallback);
  CHECK(t.epsilon > 0.05);
  CHECK(t.epsilon < 0.45);

  const auto one = kde_threshold(std::vector<double>(20, 1.0));
  CHECK(one.fallback);
  CHECK(one.epsilon == Approx(1.0));
  CHECK_THROWS_AS(kde_threshold(std::vector<double>(9, 0.1)), std::invalid_argument);

  const auto grid = linear_grid(0.0, 1.0, kKdeGrid);
  CHECK(grid.size() == 512);
  CHECK(grid.back() == Approx(1.0));
  const auto f = kde_density(scores, kde_bandwidth(scores), grid);
  double mass = 0.0;
  for (double v : f) {
    CHECK(v >= 0.0);
    mass += v / (kKdeGrid - 1);
  }
  CHECK(mass > 0.5);  // kernel mass left of zero is cut off
  CHECK(mass <= 1.0 + 1e-6);
  CHECK(kde_bandwidth(std::vector<double>(5, 2.0)) == Approx(1e-3));
}

TEST_CASE("density change") {
  const std::vector<double> a{0.1, 0.2, 0.3, 0.2, 0.1}, far{0.8, 0.9, 0.85, 0.95, 0.9};
  CHECK(density_change(a, a) == 0.0);
  CHECK(density_change(a, far) > 1.5);
  CHECK(density_change(a, far) <= 2.0 + 1e-6);
  CHECK_THROWS_AS(density_change({}, a), std::invalid_argument);
}

TEST_CASE("d1/d2 selection") {
  Eigen::VectorXd u = Eigen::VectorXd::Constant(32, 1.0 / 32);
  const auto flat = select_d1d2(JointTable(2, 5, u), TestKind::MutualInformation, 4);
  CHECK(flat.config == SearchConfig{0, 0});
  CHECK(flat.trace.size() == 1);

  const auto x = select_d1d2(xor_triangle(), TestKind::MutualInformation, 2);
  CHECK(x.config.d2 >= 1);
  CHECK(x.trace.size() <= 3);
  CHECK(x.trace.front().config == SearchConfig{0, 0});
  CHECK(x.trace.front().change_d2 > x.trace.front().change_d1);

  const auto capped = select_d1d2(xor_triangle(), TestKind::MutualInformation, 0);
  CHECK(capped.config == SearchConfig{0, 0});
  CHECK_THROWS_AS(select_d1d2(xor_triangle(), TestKind::MutualInformation, -1), std::invalid_argument);
}

TEST_CASE("seed derivation") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("experiment is deterministic across worker counts") {
  auto spec = small_spec();
  const auto a = run_experiment(spec);
  spec.workers = 3;
  const auto b = run_experiment(spec);
  REQUIRE(a.rows.size() == 4);
  CHECK(a.rows.front().n == 300);
  CHECK(a.rows[1].d1 == 2);
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    CHECK(a.rows[k].mean_acc == b.rows[k].mean_acc);
    CHECK(a.rows[k].thresholds == b.rows[k].thresholds);
    CHECK(a.rows[k].mean_acc >= 0.0);
    CHECK(a.rows[k].mean_acc <= 1.0);
  }
  CHECK(a.run_seeds == b.run_seeds);
  CHECK(a.spec_hash != "");
  CHECK(a.find(600, 2, 0) == &a.rows[3]);
  CHECK(a.find(600, 3, 0) == nullptr);

  int calls = 0;
  spec.workers = 1;
  run_experiment(spec, [&](int, int, const SearchConfig&, const ScoreMatrix& sm, const Graph& g) {
    ++calls;
    CHECK(sm.num_nodes() == g.num_nodes());
  });
  CHECK(calls == 4 * 2 * 2);
}

TEST_CASE("four-cycle is recovered from many exact samples") {
  ExperimentSpec s;
  s.graph = Explicit{4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}}};
  s.sample_sizes = {200000};
  s.runs = 2;
  s.configs = {{2, 0}, {2, 1}};
  s.sampler = Sampler::Exact;
  s.workers = 1;
  const auto r = run_experiment(s);
  for (const auto& row : r.rows) {
    CHECK(row.mean_acc == 1.0);
    CHECK(row.std_acc == 0.0);
  }
}

TEST_CASE("spec validation") {
  auto s = small_spec();
  CHECK_NOTHROW(s.validate());
  s.sample_sizes = {600, 300};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = small_spec();
  s.runs = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = small_spec();
  s.jmin = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("spec json round trip") {
  auto s = small_spec();
  s.graph = ErdosRenyi{20, 5.0};
  s.coupling = CouplingMode::Ferromagnetic;
  s.policy = ThresholdPolicy::Fixed;
  s.fixed_epsilon = 0.02;
  s.test = TestKind::Probability;
  const auto j = to_json(s);
  CHECK(to_json(spec_from_json(j)) == j);
  CHECK(j.at("graph").at("kind") == "er");
  const auto defaults = spec_from_json(nlohmann::json::object());
  CHECK(defaults.runs == 50);
}

TEST_CASE("report csv") {
  ExperimentReport empty;
  std::ostringstream e;
  write_report_csv(empty, e);
  CHECK(e.str() == "n,d1,d2,mean_acc,std_acc,runs\n");
  std::istringstream ei(e.str());
  CHECK(read_report_csv(ei).rows.empty());

  ExperimentReport r;
  r.rows.push_back({400, 2, 0, 0.8125, 0.05, 50, {}, 0.0});
  r.rows.push_back({400, 2, 1, 1.0 / 3.0, 0.1, 50, {}, 0.0});
  std::ostringstream os;
  write_report_csv(r, os);
  std::istringstream is(os.str());
  const auto back = read_report_csv(is);
  REQUIRE(back.rows.size() == 2);
  CHECK(back.rows[1].d2 == 1);
  CHECK(back.rows[1].mean_acc == r.rows[1].mean_acc);
  CHECK(back.rows[0].runs == 50);

  std::istringstream bad("n,d1\n");
  CHECK_THROWS(read_report_csv(bad));

  std::ostringstream svg;
  write_report_svg(r, svg);
  CHECK(svg.str().find("<svg") != std::string::npos);
  CHECK(svg.str().find("</svg>") != std::string::npos);
}
