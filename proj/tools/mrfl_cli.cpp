// Command-line front end: mrfl <subcommand> [options]

#include "mrfl/bounds.hpp"
#include "mrfl/citest.hpp"
#include "mrfl/estimate.hpp"
#include "mrfl/harness.hpp"
#include "mrfl/io.hpp"
#include "mrfl/learner.hpp"
#include "mrfl/sawtree.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace mrfl;
using nlohmann::json;

namespace {

NodeSet parse_nodes(const std::string& s) {
  NodeSet out;
  std::istringstream ls(s);
  std::string tok;
  while (std::getline(ls, tok, s.find(';') != std::string::npos ? ';' : ','))
    if (!tok.empty()) out.push_back(std::stoi(tok));
  return out;
}

void emit_json(const json& j, const std::string& out) {
  if (out.empty()) std::cout << j.dump(2) << '\n';
  else io::write_json_file(out, j);
}

template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  fn(os);
}

SampleSet load_samples(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return io::read_samples_csv(in);
}

json evaluation_json(const Evaluation& ev) {
  return {{"pair_accuracy", ev.pair_accuracy},
          {"edge_errors", ev.edge_errors},
          {"nonedge_errors", ev.nonedge_errors},
          {"pairs", ev.pairs}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure learning for discrete Markov random fields"};
  app.require_subcommand(1);

  // gen-graph
  auto* gg = app.add_subcommand("gen-graph", "Generate a graph");
  std::string gg_kind = "grid4", gg_out;
  int gg_rows = 4, gg_cols = 4, gg_p = 20;
  double gg_c = 5.0;
  std::uint64_t gg_seed = 0;
  gg->add_option("--kind", gg_kind)->check(CLI::IsMember({"grid4", "grid8", "er"}));
  gg->add_option("--rows", gg_rows);
  gg->add_option("--cols", gg_cols);
  gg->add_option("--p", gg_p);
  gg->add_option("--c", gg_c);
  gg->add_option("--seed", gg_seed);
  gg->add_option("--out", gg_out);
  gg->callback([&] {
    GraphKind kind = gg_kind == "grid4"   ? GraphKind(Grid4{gg_rows, gg_cols})
                     : gg_kind == "grid8" ? GraphKind(Grid8{gg_rows, gg_cols})
                                          : GraphKind(ErdosRenyi{gg_p, gg_c});
    emit_json(io::graph_to_json(generate(kind, gg_seed)), gg_out);
  });

  // gen-model
  auto* gm = app.add_subcommand("gen-model", "Draw zero-field coefficients on a graph");
  std::string gm_graph, gm_out;
  double gm_jmin = 0.4, gm_jmax = 0.6;
  bool gm_ferro = false;
  std::uint64_t gm_seed = 0;
  gm->add_option("--graph", gm_graph)->required();
  gm->add_option("--jmin", gm_jmin);
  gm->add_option("--jmax", gm_jmax);
  gm->add_flag("--ferro", gm_ferro);
  gm->add_option("--seed", gm_seed);
  gm->add_option("--out", gm_out);
  gm->callback([&] {
    const Graph g = io::graph_from_json(io::read_json_file(gm_graph));
    const auto m = random_coefficients(g, gm_jmin, gm_jmax,
                                       gm_ferro ? CouplingMode::Ferromagnetic : CouplingMode::General, gm_seed);
    emit_json(io::model_to_json(m), gm_out);
  });

  // sample
  auto* sp = app.add_subcommand("sample", "Gibbs-sample a model");
  std::string sp_model, sp_out;
  int sp_n = 1000;
  GibbsOptions sp_opts;
  std::uint64_t sp_seed = 0;
  sp->add_option("--model", sp_model)->required();
  sp->add_option("--n", sp_n);
  sp->add_option("--burnin", sp_opts.burnin);
  sp->add_option("--thin", sp_opts.thin);
  sp->add_option("--seed", sp_seed);
  sp->add_option("--out", sp_out);
  sp->callback([&] {
    const auto m = io::model_from_json(io::read_json_file(sp_model));
    const auto s = gibbs_sample(m, sp_n, sp_seed, sp_opts);
    with_output(sp_out, [&](std::ostream& os) { io::write_samples_csv(os, s, sp_seed); });
  });

  // scores
  auto* sc = app.add_subcommand("scores", "Min-max score matrix");
  std::string sc_samples, sc_model, sc_test = "mi", sc_out;
  bool sc_exact = false;
  int sc_d1 = 1, sc_d2 = 0;
  sc->add_option("--samples", sc_samples);
  sc->add_option("--model", sc_model);
  sc->add_flag("--exact", sc_exact);
  sc->add_option("--test", sc_test)->check(CLI::IsMember({"mi", "prob"}));
  sc->add_option("--d1", sc_d1);
  sc->add_option("--d2", sc_d2);
  sc->add_option("--out", sc_out);
  sc->callback([&] {
    const TestKind kind = parse_test_kind(sc_test);
    ScoreMatrix m;
    if (sc_exact) {
      if (sc_model.empty()) throw CLI::ValidationError("--exact needs --model");
      m = score_matrix(exact_joint(io::model_from_json(io::read_json_file(sc_model))), kind, sc_d1, sc_d2);
    } else {
      if (sc_samples.empty()) throw CLI::ValidationError("--samples or --exact --model required");
      m = score_matrix(EmpiricalDist(load_samples(sc_samples)), kind, sc_d1, sc_d2);
    }
    with_output(sc_out, [&](std::ostream& os) { io::write_scores_csv(os, m); });
  });

  // learn
  auto* ln = app.add_subcommand("learn", "Learn the graph");
  std::string ln_samples, ln_model, ln_test = "mi", ln_out, ln_scores_out, ln_truth;
  bool ln_exact = false, ln_pre = false;
  LearnerConfig ln_cfg;
  ln->add_option("--samples", ln_samples);
  ln->add_option("--model", ln_model);
  ln->add_flag("--exact", ln_exact);
  ln->add_option("--test", ln_test)->check(CLI::IsMember({"mi", "prob"}));
  ln->add_option("--d1", ln_cfg.d1);
  ln->add_option("--d2", ln_cfg.d2);
  ln->add_option("--epsilon", ln_cfg.epsilon)->required();
  ln->add_flag("--pre", ln_pre);
  ln->add_option("--epsilon-prime", ln_cfg.epsilon_prime);
  ln->add_option("--out", ln_out);
  ln->add_option("--scores-out", ln_scores_out);
  ln->add_option("--truth", ln_truth);
  ln->callback([&] {
    ln_cfg.test = parse_test_kind(ln_test);
    ln_cfg.preprocess = ln_pre;
    LearnResult r;
    if (ln_exact) {
      if (ln_model.empty()) throw CLI::ValidationError("--exact needs --model");
      r = learn(exact_joint(io::model_from_json(io::read_json_file(ln_model))), ln_cfg);
    } else {
      if (ln_samples.empty()) throw CLI::ValidationError("--samples or --exact --model required");
      r = learn(EmpiricalDist(load_samples(ln_samples)), ln_cfg);
    }
    emit_json(io::graph_to_json(r.graph), ln_out);
    if (!ln_scores_out.empty()) with_output(ln_scores_out, [&](std::ostream& os) { io::write_scores_csv(os, r.scores); });
    if (!ln_truth.empty()) {
      const Graph truth = io::graph_from_json(io::read_json_file(ln_truth));
      std::cout << evaluation_json(evaluate(r.graph, truth)).dump() << '\n';
    }
  });

  // bounds
  auto* bd = app.add_subcommand("bounds", "Evaluate closed-form constants");
  std::string bd_regime = "bdd_general";
  bounds::ModelParams bp;
  bp.d = 2;
  bp.jmin = 0.4;
  bp.jmax = 0.6;
  bp.p = 100;
  bp.c = 4.0;
  double bd_eps = 0.0, bd_l = 0.0;
  bd->add_option("--regime", bd_regime)
      ->check(CLI::IsMember({"bdd_general", "bdd_girth", "random_mi", "ferro_bdd", "ferro_random"}));
  bd->add_option("--d", bp.d);
  bd->add_option("--jmin", bp.jmin);
  bd->add_option("--jmax", bp.jmax);
  bd->add_option("--p", bp.p);
  bd->add_option("--c", bp.c);
  bd->add_option("--alpha", bp.alpha_conf);
  bd->add_option("--d1", bp.d1);
  bd->add_option("--d2", bp.d2);
  bd->add_option("--k", bp.k);
  bd->add_option("--epsilon", bd_eps, "epsilon for the random-graph regimes");
  bd->add_option("--L", bd_l, "candidate set size for the ferromagnetic regimes");
  bd->callback([&] {
    if (bd_eps > 0.0) bp.epsilon = bd_eps;
    if (bd_l > 0.0) bp.candidate_size = bd_l;
    json j;
    j["regime"] = bd_regime;
    j["prop2_epsilon"] = bounds::prop2_epsilon(bp.jmin, bp.jmax);
    j["bdd_delta"] = bounds::bdd_delta(bp.d, bp.jmax);
    j["set_prob_floor_2d"] = bounds::set_prob_floor(2 * bp.d, bp.d, bp.jmax);
    const auto fe = bounds::ferro_epsilons(bp.d, bp.jmin, bp.jmax);
    j["ferro"] = {{"epsilon", fe.epsilon}, {"epsilon_prime", fe.epsilon_prime}};
    auto guarded = [&](const char* key, auto&& fn) {
      try {
        j[key] = fn();
      } catch (const std::exception& e) {
        j[key] = {{"error", e.what()}};
      }
    };
    guarded("decay", [&] {
      const auto dp = bounds::decay_params(bp.d, bp.jmax);
      return json{{"alpha", dp.alpha}, {"beta", dp.beta}, {"decays", dp.decays()}};
    });
    guarded("girth", [&] {
      const auto g = bounds::girth_constants(bp.d, bp.jmin, bp.jmax);
      return json{{"A", g.a}, {"epsilon", g.epsilon}, {"A_prime", g.a_prime}, {"epsilon_prime", g.epsilon_prime},
                  {"min_girth", g.min_girth}};
    });
    guarded("sparse_loose", [&] {
      const auto s = bounds::sparse_loose_constants(bp.d, bp.jmin, bp.jmax, bp.d1, bp.d2);
      return json{{"A", s.a}, {"epsilon", s.epsilon}, {"min_h", s.min_h}};
    });
    guarded("random_graph", [&] {
      const auto r = bounds::random_graph_params(bp.p, bp.c, bp.jmax, bp.k);
      return json{{"alpha", r.alpha}, {"gamma_p", r.gamma_p}, {"kappa", r.kappa}, {"decays", r.decays()}};
    });
    guarded("sample_size", [&] {
      const auto s = bounds::sample_size(bounds::parse_regime(bd_regime), bp);
      return json{{"gamma", s.gamma}, {"n_min", s.n_min}};
    });
    std::cout << j.dump(2) << '\n';
  });

  // verify-saw
  auto* vs = app.add_subcommand("verify-saw", "Check the SAW-tree identity");
  std::string vs_graph, vs_model, vs_s, vs_order;
  int vs_root = 0, vs_trials = 64;
  vs->add_option("--graph", vs_graph);
  vs->add_option("--model", vs_model)->required();
  vs->add_option("--root", vs_root);
  vs->add_option("--s", vs_s, "conditioning set, e.g. \"2;5\"");
  vs->add_option("--ordering", vs_order, "node permutation, e.g. \"2;0;1\"");
  vs->add_option("--trials", vs_trials);
  vs->callback([&] {
    const auto m = io::model_from_json(io::read_json_file(vs_model));
    if (!vs_graph.empty() && !(io::graph_from_json(io::read_json_file(vs_graph)) == m.graph()))
      throw CLI::ValidationError("--graph does not match the model's graph");
    SawOptions opts;
    opts.ordering = parse_nodes(vs_order);
    std::cout << std::setprecision(6) << verify_saw_identity(m, vs_root, parse_nodes(vs_s), opts, vs_trials) << '\n';
  });

  // experiment
  auto* ex = app.add_subcommand("experiment", "Run an accuracy experiment");
  std::string ex_spec, ex_dir = ".";
  ex->add_option("--spec", ex_spec)->required();
  ex->add_option("--out-dir", ex_dir);
  ex->callback([&] {
    const auto spec = spec_from_json(io::read_json_file(ex_spec));
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(ex_dir) / "scores");
    const auto report = run_experiment(spec, [&](int run, int n, const SearchConfig& cfg, const ScoreMatrix& m,
                                                 const Graph&) {
      std::ostringstream name;
      name << "run" << run << "_n" << n << "_d" << cfg.d1 << cfg.d2 << ".csv";
      std::ofstream os(fs::path(ex_dir) / "scores" / name.str());
      io::write_scores_csv(os, m);
    });
    {
      std::ofstream os(fs::path(ex_dir) / "report.csv");
      write_report_csv(report, os);
    }
    {
      std::ofstream os(fs::path(ex_dir) / "report.svg");
      write_report_svg(report, os);
    }
    std::cout << "spec " << report.spec_hash << '\n';
    for (const auto& row : report.rows)
      std::cout << "n=" << row.n << " d1=" << row.d1 << " d2=" << row.d2 << " acc=" << row.mean_acc
                << " sd=" << row.std_acc << '\n';
  });

  // threshold
  auto* th = app.add_subcommand("threshold", "Pick a threshold from a score file");
  std::string th_scores, th_method = "kde", th_truth;
  th->add_option("--scores", th_scores)->required();
  th->add_option("--method", th_method)->check(CLI::IsMember({"kde", "oracle"}));
  th->add_option("--truth", th_truth);
  th->callback([&] {
    std::ifstream in(th_scores);
    if (!in) throw std::runtime_error("cannot open " + th_scores);
    std::optional<int> p;
    std::optional<Graph> truth;
    if (!th_truth.empty()) {
      truth = io::graph_from_json(io::read_json_file(th_truth));
      p = truth->num_nodes();
    }
    const auto m = io::read_scores_csv(in, p);
    json j;
    if (th_method == "oracle") {
      if (!truth) throw CLI::ValidationError("--method oracle needs --truth");
      const auto o = oracle_threshold(m, *truth);
      j = {{"epsilon", o.epsilon}, {"errors", o.errors}};
    } else {
      const auto k = kde_threshold(m);
      j = {{"epsilon", k.epsilon}, {"fallback", k.fallback}};
      if (truth) j["errors"] = threshold_errors(m, *truth, k.epsilon);
    }
    std::cout << j.dump(2) << '\n';
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
