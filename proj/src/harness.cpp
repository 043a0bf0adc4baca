#include "mrfl/harness.hpp"

#include "mrfl/estimate.hpp"
#include "mrfl/learner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace mrfl {

using nlohmann::json;

void ExperimentSpec::validate() const {
  if (runs < 1) throw std::invalid_argument("ExperimentSpec: runs must be >= 1");
  if (sample_sizes.empty()) throw std::invalid_argument("ExperimentSpec: no sample sizes");
  for (std::size_t k = 0; k < sample_sizes.size(); ++k) {
    if (sample_sizes[k] < 1) throw std::invalid_argument("ExperimentSpec: sample sizes must be positive");
    if (k > 0 && sample_sizes[k] <= sample_sizes[k - 1])
      throw std::invalid_argument("ExperimentSpec: sample sizes must be ascending");
  }
  if (configs.empty()) throw std::invalid_argument("ExperimentSpec: no (d1, d2) configs");
  for (const auto& c : configs)
    if (c.d1 < 0 || c.d2 < 0) throw std::invalid_argument("ExperimentSpec: negative d1/d2");
  if (!(jmin > 0.0) || jmax < jmin) throw std::invalid_argument("ExperimentSpec: need 0 < jmin <= jmax");
}

// ---------------------------------------------------------------------------
// JSON

namespace {

json graph_kind_json(const GraphKind& k) {
  return std::visit(
      [](const auto& g) -> json {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, Grid4>) return {{"kind", "grid4"}, {"rows", g.rows}, {"cols", g.cols}};
        else if constexpr (std::is_same_v<T, Grid8>) return {{"kind", "grid8"}, {"rows", g.rows}, {"cols", g.cols}};
        else if constexpr (std::is_same_v<T, ErdosRenyi>) return {{"kind", "er"}, {"p", g.p}, {"c", g.c}};
        else {
          json edges = json::array();
          for (auto [a, b] : g.edges) edges.push_back({a, b});
          return {{"kind", "explicit"}, {"p", g.p}, {"edges", edges}};
        }
      },
      k);
}

GraphKind graph_kind_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "grid4") return Grid4{j.at("rows").get<int>(), j.at("cols").get<int>()};
  if (kind == "grid8") return Grid8{j.at("rows").get<int>(), j.at("cols").get<int>()};
  if (kind == "er") return ErdosRenyi{j.at("p").get<int>(), j.at("c").get<double>()};
  if (kind == "explicit") {
    Explicit e{j.at("p").get<int>(), {}};
    for (const auto& pr : j.at("edges")) e.edges.emplace_back(pr.at(0).get<int>(), pr.at(1).get<int>());
    return e;
  }
  throw std::invalid_argument("unknown graph kind: " + kind);
}

const char* policy_name(ThresholdPolicy p) {
  switch (p) {
    case ThresholdPolicy::Oracle: return "oracle";
    case ThresholdPolicy::Kde: return "kde";
    case ThresholdPolicy::Fixed: return "fixed";
  }
  return "?";
}

ThresholdPolicy parse_policy(const std::string& s) {
  if (s == "oracle") return ThresholdPolicy::Oracle;
  if (s == "kde") return ThresholdPolicy::Kde;
  if (s == "fixed") return ThresholdPolicy::Fixed;
  throw std::invalid_argument("unknown threshold policy: " + s);
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

json to_json(const ExperimentSpec& s) {
  json configs = json::array();
  for (const auto& c : s.configs) configs.push_back({c.d1, c.d2});
  return {{"graph", graph_kind_json(s.graph)},
          {"jmin", s.jmin},
          {"jmax", s.jmax},
          {"ferromagnetic", s.coupling == CouplingMode::Ferromagnetic},
          {"sample_sizes", s.sample_sizes},
          {"runs", s.runs},
          {"configs", configs},
          {"test", to_string(s.test)},
          {"seed", s.seed},
          {"threshold", policy_name(s.policy)},
          {"epsilon", s.fixed_epsilon},
          {"sampler", s.sampler == Sampler::Gibbs ? "gibbs" : "exact"},
          {"burnin", s.gibbs.burnin},
          {"thin", s.gibbs.thin},
          {"workers", s.workers}};
}

ExperimentSpec spec_from_json(const json& j) {
  ExperimentSpec s;
  if (j.contains("graph")) s.graph = graph_kind_from_json(j.at("graph"));
  s.jmin = j.value("jmin", s.jmin);
  s.jmax = j.value("jmax", s.jmax);
  if (j.value("ferromagnetic", false)) s.coupling = CouplingMode::Ferromagnetic;
  if (j.contains("sample_sizes")) s.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
  s.runs = j.value("runs", s.runs);
  if (j.contains("configs")) {
    s.configs.clear();
    for (const auto& c : j.at("configs")) s.configs.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
  }
  if (j.contains("test")) s.test = parse_test_kind(j.at("test").get<std::string>());
  s.seed = j.value("seed", s.seed);
  if (j.contains("threshold")) s.policy = parse_policy(j.at("threshold").get<std::string>());
  s.fixed_epsilon = j.value("epsilon", s.fixed_epsilon);
  if (j.contains("sampler")) {
    const auto name = j.at("sampler").get<std::string>();
    if (name == "gibbs") s.sampler = Sampler::Gibbs;
    else if (name == "exact") s.sampler = Sampler::Exact;
    else throw std::invalid_argument("unknown sampler: " + name);
  }
  s.gibbs.burnin = j.value("burnin", s.gibbs.burnin);
  s.gibbs.thin = j.value("thin", s.gibbs.thin);
  s.workers = j.value("workers", s.workers);
  s.validate();
  return s;
}

const ReportRow* ExperimentReport::find(int n, int d1, int d2) const {
  for (const auto& r : rows)
    if (r.n == n && r.d1 == d1 && r.d2 == d2) return &r;
  return nullptr;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Thresholds

std::size_t threshold_errors(const ScoreMatrix& scores, const Graph& truth, double epsilon) {
  const int p = scores.num_nodes();
  if (truth.num_nodes() != p) throw std::invalid_argument("threshold_errors: node count mismatch");
  std::size_t errors = 0;
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j)
      if ((scores(i, j) > epsilon) != truth.has_edge(i, j)) ++errors;
  return errors;
}

OracleThreshold oracle_threshold(const ScoreMatrix& scores, const Graph& truth) {
  const int p = scores.num_nodes();
  if (truth.num_nodes() != p) throw std::invalid_argument("oracle_threshold: node count mismatch");
  struct Item {
    double score;
    bool edge;
  };
  std::vector<Item> items;
  for (Node i = 0; i < p; ++i)
    for (Node j = i + 1; j < p; ++j) items.push_back({scores(i, j), truth.has_edge(i, j)});
  if (items.empty()) return {};
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.score < b.score; });

  // Sweep upward: below every score all pairs are declared edges.
  std::size_t non_edges = 0;
  for (const auto& it : items) non_edges += it.edge ? 0 : 1;
  OracleThreshold best{std::nextafter(items.front().score, -std::numeric_limits<double>::infinity()), non_edges};
  auto errors = static_cast<long long>(non_edges);
  std::size_t k = 0;
  while (k < items.size()) {
    const double v = items[k].score;
    for (; k < items.size() && items[k].score == v; ++k) errors += items[k].edge ? 1 : -1;
    const double eps = k < items.size() ? v + (items[k].score - v) / 2.0 : v;
    if (static_cast<std::size_t>(errors) < best.errors) best = {eps, static_cast<std::size_t>(errors)};
  }
  return best;
}

double kde_bandwidth(const std::vector<double>& values) {
  const double m = static_cast<double>(values.size());
  if (values.size() < 2) return 1e-3;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= m;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (m - 1.0));
  return std::max(1.06 * sd * std::pow(m, -0.2), 1e-3);
}

std::vector<double> kde_density(const std::vector<double>& values, double bandwidth,
                                const std::vector<double>& grid) {
  const double norm = 1.0 / (static_cast<double>(values.size()) * bandwidth * std::sqrt(2.0 * std::numbers::pi));
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc = 0.0;
    for (double v : values) {
      const double z = (grid[g] - v) / bandwidth;
      acc += std::exp(-0.5 * z * z);
    }
    out[g] = acc * norm;
  }
  return out;
}

std::vector<double> linear_grid(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    out[static_cast<std::size_t>(k)] = count == 1 ? lo : lo + (hi - lo) * k / (count - 1);
  return out;
}

KdeThreshold kde_threshold(const std::vector<double>& scores) {
  if (scores.size() < kKdeMinScores) throw std::invalid_argument("kde_threshold: need at least 10 scores");
  const double top = *std::max_element(scores.begin(), scores.end());
  const auto grid = linear_grid(0.0, std::max(top, 0.0) * 1.05, kKdeGrid);
  const auto f = kde_density(scores, kde_bandwidth(scores), grid);

  std::size_t mode = 0;
  while (mode + 1 < f.size() && f[mode + 1] >= f[mode]) ++mode;
  // A valley needs the density to rise again after it; a flat tail does not count.
  for (std::size_t k = mode + 1; k + 1 < f.size(); ++k) {
    if (!(f[k] < f[k - 1])) continue;
    std::size_t r = k;
    while (r + 1 < f.size() && f[r + 1] == f[k]) ++r;
    if (r + 1 < f.size() && f[r + 1] > f[k]) return {grid[k], false};
  }

  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  // Linear interpolation between order statistics.
  const double pos = 0.75 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  const double q = lo + 1 < sorted.size() ? sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]) : sorted[lo];
  return {std::max(q, 0.0), true};
}

KdeThreshold kde_threshold(const ScoreMatrix& scores) { return kde_threshold(scores.pair_scores()); }

double density_change(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("density_change: empty score set");
  const double top = std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
  const double hi = top > 0.0 ? top : 1e-3;
  const auto grid = linear_grid(0.0, hi, kKdeGrid);
  const auto fa = kde_density(a, kde_bandwidth(a), grid);
  const auto fb = kde_density(b, kde_bandwidth(b), grid);
  const double dx = hi / (kKdeGrid - 1);
  double acc = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) acc += std::abs(fa[k] - fb[k]);
  return acc * dx;
}

template <Distribution B>
Selection select_d1d2(const B& backend, TestKind test, int max_steps, double tol) {
  if (max_steps < 0) throw std::invalid_argument("select_d1d2: max_steps must be >= 0");
  std::map<std::pair<int, int>, std::vector<double>> cache;
  auto scores = [&](int d1, int d2) -> const std::vector<double>& {
    auto it = cache.find({d1, d2});
    if (it == cache.end())
      it = cache.emplace(std::pair{d1, d2}, score_matrix(backend, test, d1, d2).pair_scores()).first;
    return it->second;
  };
  Selection sel;
  sel.config = {0, 0};
  for (int step = 0;; ++step) {
    SelectionStep st;
    st.config = sel.config;
    const auto& here = scores(sel.config.d1, sel.config.d2);
    if (step < max_steps) {
      st.change_d1 = density_change(here, scores(sel.config.d1 + 1, sel.config.d2));
      st.change_d2 = density_change(here, scores(sel.config.d1, sel.config.d2 + 1));
    }
    sel.trace.push_back(st);
    if (step >= max_steps || (st.change_d1 < tol && st.change_d2 < tol)) break;
    if (st.change_d1 >= st.change_d2) ++sel.config.d1;
    else ++sel.config.d2;
  }
  return sel;
}

template Selection select_d1d2(const JointTable&, TestKind, int, double);
template Selection select_d1d2(const EmpiricalDist&, TestKind, int, double);

// ---------------------------------------------------------------------------
// Experiment

namespace {

struct Cell {
  double accuracy = 0.0;
  double threshold = 0.0;
  double seconds = 0.0;
};

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec, const RunObserver& observer) {
  spec.validate();
  const bool redraw_graph = std::holds_alternative<ErdosRenyi>(spec.graph);
  const Graph fixed_graph = redraw_graph ? Graph() : generate(spec.graph, 0);
  const std::size_t nn = spec.sample_sizes.size();
  const std::size_t nc = spec.configs.size();

  ExperimentReport report;
  report.master_seed = spec.seed;
  report.spec_hash = hex64(fnv1a(to_json(spec).dump()));
  for (int r = 0; r < spec.runs; ++r) report.run_seeds.push_back(derive_seed(spec.seed, static_cast<std::uint64_t>(r)));

  // cells[run][n][config]
  std::vector<Cell> cells(static_cast<std::size_t>(spec.runs) * nn * nc);
  auto one_run = [&](int r) {
    const std::uint64_t rs = report.run_seeds[static_cast<std::size_t>(r)];
    const Graph g = redraw_graph ? generate(spec.graph, derive_seed(rs, 0)) : fixed_graph;
    const IsingModel model = random_coefficients(g, spec.jmin, spec.jmax, spec.coupling, derive_seed(rs, 1));
    JointTable joint;
    if (spec.sampler == Sampler::Exact) joint = exact_joint(model);
    for (std::size_t a = 0; a < nn; ++a) {
      const int n = spec.sample_sizes[a];
      const std::uint64_t ss = derive_seed(rs, 2 + a);
      SampleSet samples = spec.sampler == Sampler::Gibbs ? gibbs_sample(model, n, ss, spec.gibbs)
                                                         : exact_sample(joint, n, ss);
      const EmpiricalDist emp(std::move(samples));
      for (std::size_t b = 0; b < nc; ++b) {
        const auto& cfg = spec.configs[b];
        const auto start = std::chrono::steady_clock::now();
        ScoreOptions opts;
        opts.workers = 1;
        const ScoreMatrix sm = score_matrix(emp, spec.test, cfg.d1, cfg.d2, nullptr, opts);
        Cell& cell = cells[(static_cast<std::size_t>(r) * nn + a) * nc + b];
        cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        switch (spec.policy) {
          case ThresholdPolicy::Oracle: cell.threshold = oracle_threshold(sm, g).epsilon; break;
          case ThresholdPolicy::Kde: cell.threshold = kde_threshold(sm).epsilon; break;
          case ThresholdPolicy::Fixed: cell.threshold = spec.fixed_epsilon; break;
        }
        cell.accuracy = evaluate(sm.threshold(cell.threshold), g).pair_accuracy;
        if (observer) observer(r, n, cfg, sm, g);
      }
    }
  };

  unsigned workers = spec.workers > 0 ? static_cast<unsigned>(spec.workers) : std::thread::hardware_concurrency();
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(spec.runs)));
  if (workers == 1) {
    for (int r = 0; r < spec.runs; ++r) one_run(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int r = next++; r < spec.runs; r = next++) one_run(r);
      });
  }

  for (std::size_t a = 0; a < nn; ++a)
    for (std::size_t b = 0; b < nc; ++b) {
      ReportRow row;
      row.n = spec.sample_sizes[a];
      row.d1 = spec.configs[b].d1;
      row.d2 = spec.configs[b].d2;
      row.runs = spec.runs;
      double sum = 0.0;
      for (int r = 0; r < spec.runs; ++r) {
        const Cell& c = cells[(static_cast<std::size_t>(r) * nn + a) * nc + b];
        sum += c.accuracy;
        row.seconds += c.seconds;
        row.thresholds.push_back(c.threshold);
      }
      row.mean_acc = sum / spec.runs;
      double ss = 0.0;
      for (int r = 0; r < spec.runs; ++r) {
        const double d = cells[(static_cast<std::size_t>(r) * nn + a) * nc + b].accuracy - row.mean_acc;
        ss += d * d;
      }
      row.std_acc = spec.runs > 1 ? std::sqrt(ss / (spec.runs - 1)) : 0.0;
      report.rows.push_back(std::move(row));
    }
  return report;
}

// ---------------------------------------------------------------------------
// Reports

void write_report_csv(const ExperimentReport& r, std::ostream& os) {
  os << "n,d1,d2,mean_acc,std_acc,runs\n";
  os << std::setprecision(17);
  for (const auto& row : r.rows)
    os << row.n << ',' << row.d1 << ',' << row.d2 << ',' << row.mean_acc << ',' << row.std_acc << ',' << row.runs
       << '\n';
}

ExperimentReport read_report_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "n,d1,d2,mean_acc,std_acc,runs")
    throw std::runtime_error("report CSV: bad header");
  ExperimentReport r;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    ReportRow row;
    char c1, c2, c3, c4, c5;
    if (!(ls >> row.n >> c1 >> row.d1 >> c2 >> row.d2 >> c3 >> row.mean_acc >> c4 >> row.std_acc >> c5 >> row.runs) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',')
      throw std::runtime_error("report CSV: malformed row: " + line);
    r.rows.push_back(std::move(row));
  }
  return r;
}

void write_report_svg(const ExperimentReport& r, std::ostream& os) {
  constexpr double W = 640, H = 400, L = 60, R = 150, T = 30, B = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> series;
  int nmin = 0, nmax = 1;
  double amin = 1.0, amax = 0.0;
  bool first = true;
  for (const auto& row : r.rows) {
    series[{row.d1, row.d2}].emplace_back(row.n, row.mean_acc);
    nmin = first ? row.n : std::min(nmin, row.n);
    nmax = first ? row.n : std::max(nmax, row.n);
    amin = std::min(amin, row.mean_acc);
    amax = std::max(amax, row.mean_acc);
    first = false;
  }
  if (first) amin = 0.0, amax = 1.0;
  if (nmax == nmin) ++nmax;
  amin = std::max(0.0, amin - 0.02);
  amax = std::min(1.0, amax + 0.02);
  if (amax <= amin) amax = amin + 0.01;
  auto x = [&](double n) { return L + (n - nmin) / (nmax - nmin) * (W - L - R); };
  auto y = [&](double a) { return H - B - (a - amin) / (amax - amin) * (H - T - B); };

  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">samples n</text>\n";
  os << "<text x=\"15\" y=\"" << (T + H - B) / 2 << "\" transform=\"rotate(-90 15," << (T + H - B) / 2
     << ")\" text-anchor=\"middle\">mean accuracy</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double a = amin + (amax - amin) * k / 4.0;
    os << "<text x=\"" << L - 5 << "\" y=\"" << y(a) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
       << std::setprecision(3) << a << std::setprecision(2) << "</text>\n";
  }
  std::vector<int> ns;
  for (const auto& row : r.rows) ns.push_back(row.n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  for (int n : ns)
    os << "<text x=\"" << x(n) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\" font-size=\"11\">" << n
       << "</text>\n";
  std::size_t idx = 0;
  for (auto& [key, pts] : series) {
    std::sort(pts.begin(), pts.end());
    const char* color = kColors[idx % std::size(kColors)];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [n, a] : pts) os << x(n) << ',' << y(a) << ' ';
    os << "\"/>\n";
    for (const auto& [n, a] : pts)
      os << "<circle cx=\"" << x(n) << "\" cy=\"" << y(a) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    const double ly = T + 18.0 * static_cast<double>(idx);
    os << "<text x=\"" << W - R + 10 << "\" y=\"" << ly + 4 << "\" fill=\"" << color << "\">D1=" << key.first
       << ", D2=" << key.second << "</text>\n";
    ++idx;
  }
  os << "</svg>\n";
}

}  // namespace mrfl
