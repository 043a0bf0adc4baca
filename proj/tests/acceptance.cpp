// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.
// Pass criterion numbers as arguments to run a subset.

#include "mrfl/bounds.hpp"
#include "mrfl/citest.hpp"
#include "mrfl/estimate.hpp"
#include "mrfl/harness.hpp"
#include "mrfl/learner.hpp"
#include "mrfl/sawtree.hpp"

#include "test_util.hpp"
#include "validations.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace mrfl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

NodeSet others(int p, Node i, Node j) { return testing::all_but(p, i, j); }

// 1. min_S max_T over unrestricted sets equals the CMI given everything else.
Outcome minmax_identity() {
  std::mt19937_64 rng(101);
  double worst_gap = 0.0, worst_nonedge = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int p = 4 + t % 3;
    const auto m = testing::random_model(rng, p, 0.5, 0.4, 0.6, 0.3);
    const auto joint = exact_joint(m);
    for (Node i = 0; i < p; ++i)
      for (Node j = i + 1; j < p; ++j) {
        const NodeSet rest = others(p, i, j);
        const double full = cond_mutual_info(joint, i, j, rest);
        const double score = maxmin_score(joint, TestKind::MutualInformation, i, j, p - 2, p - 2, rest).score;
        worst_gap = std::max(worst_gap, std::abs(score - full));
        if (!m.graph().has_edge(i, j)) worst_nonedge = std::max(worst_nonedge, score);
      }
  }
  return {worst_gap <= 1e-9 && worst_nonedge <= 1e-9,
          fmt("max |score - I(i;j|rest)| = %.2e, max non-edge score = %.2e", worst_gap, worst_nonedge)};
}

// 2. XOR triangle.
Outcome xor_example() {
  const auto x = xor_triangle();
  const NodeSet none, mid{1};
  const double marginal = cond_mutual_info(x, 0, 2, none);
  const double given = cond_mutual_info(x, 0, 2, mid);
  LearnerConfig cfg;
  cfg.epsilon = 0.5;
  cfg.test = TestKind::MutualInformation;
  cfg.d1 = 1;
  cfg.d2 = 1;
  const Graph with_max = cond_st(x, cfg).graph;
  cfg.d2 = 0;
  const Graph without = cond_st(x, cfg).graph;
  const bool ok = marginal <= 1e-12 && std::abs(given - 0.531004) <= 1e-6 && with_max.num_edges() == 3 &&
                  without.num_edges() == 0;
  return {ok, fmt("I(X1;X3) = %.1e, I(X1;X3|X2) = %.6f, edges (1,1) = %zu, (1,0) = %zu", marginal, given,
                  with_max.num_edges(), without.num_edges())};
}

// 3. Tree identity on random graphs with cycles.
Outcome saw_identity() {
  std::mt19937_64 rng(303);
  double worst = 0.0;
  int done = 0;
  while (done < 100) {
    const int p = 3 + static_cast<int>(rng() % 6);
    const auto m = testing::random_model(rng, p, 0.5, 0.2, 1.0, 0.5);
    if (is_forest(m.graph())) continue;
    SawOptions opts;
    opts.ordering.resize(static_cast<std::size_t>(p));
    std::iota(opts.ordering.begin(), opts.ordering.end(), 0);
    std::shuffle(opts.ordering.begin(), opts.ordering.end(), rng);
    const Node root = static_cast<Node>(rng() % static_cast<unsigned>(p));
    NodeSet s;
    for (Node v : opts.ordering)
      if (v != root && s.size() < 3 && rng() % 2) s.push_back(v);
    worst = std::max(worst, verify_saw_identity(m, root, s, opts));
    ++done;
  }
  return {worst <= 1e-9, fmt("max deviation over %d graphs = %.2e", done, worst)};
}

// 4. Closed-form bounds against exact tables.
Outcome bound_validations() {
  bool ok = true;
  std::ostringstream os;
  for (const auto& v : testing::all_validations(404)) {
    ok = ok && v.ok();
    os << "\n      " << v.name << ": " << v.instances << " instances, " << v.checks << " checks, " << v.violations
       << " violations, min margin " << fmt("%.3e", v.worst_margin);
  }
  return {ok, os.str()};
}

// 5. Gibbs pair marginals against exact ones.
Outcome gibbs_check() {
  std::mt19937_64 rng(505);
  double worst = 0.0;
  const int models = 10;
  for (int t = 0; t < models; ++t) {
    const int p = 3 + t % 4;
    const auto m = testing::random_model(rng, p, 0.5, 0.4, 0.6, 0.3);
    const auto joint = exact_joint(m);
    const EmpiricalDist emp(gibbs_sample(m, 200000, 5000 + t, GibbsOptions{200, 5}));
    for (Node i = 0; i < p; ++i)
      for (Node j = i + 1; j < p; ++j) {
        const NodeSet v{i, j};
        worst = std::max(worst, 0.5 * l1_distance(emp.marginal(v), joint.marginal(v)));
      }
  }
  return {worst <= 0.02, fmt("max pair TV over %d models = %.4f", models, worst)};
}

double acc(const ExperimentReport& r, int n, int d1, int d2) {
  const auto* row = r.find(n, d1, d2);
  return row ? row->mean_acc : std::nan("");
}

// 6. Desk-scale reproduction of the grid experiments.
Outcome grid_experiments() {
  ExperimentSpec g8;
  g8.graph = Grid8{5, 5};
  g8.sample_sizes = {400, 1000};
  g8.runs = 50;
  g8.configs = {{2, 0}, {2, 1}, {3, 1}};
  g8.seed = 606;
  const auto r8 = run_experiment(g8);

  ExperimentSpec g4 = g8;
  g4.graph = Grid4{4, 4};
  g4.configs = {{2, 0}, {2, 1}};
  const auto r4 = run_experiment(g4);

  const double a20 = acc(r8, 1000, 2, 0), a21 = acc(r8, 1000, 2, 1), a31 = acc(r8, 1000, 3, 1);
  const double b20 = acc(r4, 1000, 2, 0), b21 = acc(r4, 1000, 2, 1);
  const bool ok = a21 - a20 >= 0.03 && a31 - a21 <= 0.03 && std::abs(b21 - b20) <= 0.03;
  std::ostringstream os;
  os << fmt("grid8 n=1000: (2,0) %.4f (2,1) %.4f (3,1) %.4f; grid4 n=1000: (2,0) %.4f (2,1) %.4f", a20, a21, a31,
            b20, b21);
  os << fmt("\n      n=400: grid8 (2,0) %.4f (2,1) %.4f (3,1) %.4f; grid4 (2,0) %.4f (2,1) %.4f", acc(r8, 400, 2, 0),
            acc(r8, 400, 2, 1), acc(r8, 400, 3, 1), acc(r4, 400, 2, 0), acc(r4, 400, 2, 1));
  return {ok, os.str()};
}

// 7. Pair-decision evaluation counts grow like p^(d1 + d2).
Outcome complexity() {
  const std::vector<int> sizes{8, 12, 16, 20};
  const std::vector<SearchConfig> configs{{1, 0}, {1, 1}, {2, 0}};
  std::vector<std::vector<double>> counts(configs.size());
  for (int p : sizes) {
    const auto m = random_coefficients(generate(ErdosRenyi{p, 3.0}, static_cast<std::uint64_t>(p)), 0.4, 0.6,
                                       CouplingMode::General, 7);
    const EmpiricalDist e(gibbs_sample(m, 500, 70 + static_cast<std::uint64_t>(p)));
    SearchOptions off;
    off.prune = false;
    const NodeSet rest = others(p, 0, 1);
    for (std::size_t c = 0; c < configs.size(); ++c) {
      const auto r = maxmin_score(e, TestKind::MutualInformation, 0, 1, configs[c].d1, configs[c].d2, rest, off);
      counts[c].push_back(static_cast<double>(r.evaluations));
    }
  }
  bool ok = true;
  std::ostringstream os;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    // Least-squares slope of log count on log p.
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      mx += std::log(sizes[k]);
      my += std::log(counts[c][k]);
    }
    mx /= static_cast<double>(sizes.size());
    my /= static_cast<double>(sizes.size());
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      const double dx = std::log(sizes[k]) - mx;
      sxy += dx * (std::log(counts[c][k]) - my);
      sxx += dx * dx;
    }
    const double slope = sxy / sxx;
    const int want = configs[c].d1 + configs[c].d2;
    ok = ok && std::abs(slope - want) <= 0.4;
    os << fmt("%s(%d,%d) slope %.3f vs %d", c ? "; " : "", configs[c].d1, configs[c].d2, slope, want);
  }
  return {ok, os.str()};
}

// 8. Pairwise conditionals concentrate above the sample-size threshold.
Outcome concentration() {
  const int p = 8, trials = 200;
  const double gamma = 0.1;
  const int n = static_cast<int>(std::floor(bounds::pairwise_concentration_n(p, 2, gamma, 1.0))) + 1;
  std::mt19937_64 rng(808);
  const auto m = testing::random_model(rng, p, 0.4, 0.4, 0.6, 0.3);
  const auto joint = exact_joint(m);
  int good = 0;
  double worst = 0.0;
  for (int t = 0; t < trials; ++t) {
    const EmpiricalDist e(exact_sample(joint, n, 8000 + static_cast<std::uint64_t>(t)));
    double dev = 0.0;
    for (Node i = 0; i < p; ++i)
      for (Node j = 0; j < p; ++j) {
        if (i == j) continue;
        for (int xj : {0, 1}) {
          const Assignment given({j}, {xj});
          for (int xi : {0, 1}) {
            double hat = 0.0;
            try {
              hat = emp_cond_prob(e, i, xi, given);
            } catch (const std::domain_error&) {
              hat = 2.0;  // unseen conditioning value counts as a failure
            }
            dev = std::max(dev, std::abs(hat - cond_prob(joint, i, xi, given)));
          }
        }
      }
    worst = std::max(worst, dev);
    good += dev < 4 * gamma;
  }
  return {good >= 0.95 * trials,
          fmt("n = %d, %d/%d trials below %.1f, worst deviation %.4f", n, good, trials, 4 * gamma, worst)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "min-max identity", minmax_identity},
      {2, "xor triangle", xor_example},
      {3, "tree identity", saw_identity},
      {4, "bound validations", bound_validations},
      {5, "gibbs marginals", gibbs_check},
      {6, "grid experiments", grid_experiments},
      {7, "complexity scaling", complexity},
      {8, "pairwise concentration", concentration},
  };
  std::set<int> pick;
  for (int a = 1; a < argc; ++a) pick.insert(std::atoi(argv[a]));

  int failed = 0;
  for (const auto& c : all) {
    if (!pick.empty() && !pick.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
