#pragma once

// Experiment pipeline: graph -> coefficients -> samples -> scores ->
// threshold -> pair accuracy, averaged over independent runs.

#include "mrfl/citest.hpp"
#include "mrfl/graph.hpp"
#include "mrfl/model.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace mrfl {

enum class ThresholdPolicy { Oracle, Kde, Fixed };
enum class Sampler { Gibbs, Exact };

struct SearchConfig {
  int d1 = 1;
  int d2 = 0;
  friend bool operator==(const SearchConfig&, const SearchConfig&) = default;
};

struct ExperimentSpec {
  GraphKind graph = Grid4{4, 4};
  double jmin = 0.4;
  double jmax = 0.6;
  CouplingMode coupling = CouplingMode::General;
  std::vector<int> sample_sizes{400, 600, 800, 1000};
  int runs = 50;
  std::vector<SearchConfig> configs{{2, 0}, {2, 1}};
  TestKind test = TestKind::MutualInformation;
  std::uint64_t seed = 1;
  ThresholdPolicy policy = ThresholdPolicy::Oracle;
  double fixed_epsilon = 0.0;  ///< used by ThresholdPolicy::Fixed
  Sampler sampler = Sampler::Gibbs;
  GibbsOptions gibbs;
  int workers = 0;  ///< parallel runs; 0 picks hardware concurrency

  void validate() const;
};

nlohmann::json to_json(const ExperimentSpec& s);
ExperimentSpec spec_from_json(const nlohmann::json& j);

struct ReportRow {
  int n = 0;
  int d1 = 0;
  int d2 = 0;
  double mean_acc = 0.0;
  double std_acc = 0.0;  ///< sample standard deviation over runs
  int runs = 0;
  std::vector<double> thresholds;  ///< chosen epsilon per run
  double seconds = 0.0;            ///< scoring wall-clock summed over runs
};

struct ExperimentReport {
  std::vector<ReportRow> rows;  ///< sample size major, then config order
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> run_seeds;
  std::string spec_hash;

  const ReportRow* find(int n, int d1, int d2) const;
};

/// Per-run seed: splitmix64 of the master seed mixed with the run index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Called once per (run, n, config) with the scores and the true graph.
/// Invocations may come from several threads.
using RunObserver = std::function<void(int run, int n, const SearchConfig& cfg, const ScoreMatrix& scores,
                                       const Graph& truth)>;

/// Grids are fixed across runs; Erdos-Renyi graphs are redrawn every run.
/// Each sample size gets its own draw, shared by all configs of that run.
ExperimentReport run_experiment(const ExperimentSpec& spec, const RunObserver& observer = {});

struct OracleThreshold {
  double epsilon = 0.0;
  std::size_t errors = 0;
};

/// Error-minimizing threshold given the truth. Candidates are just below the
/// smallest score, the midpoints of consecutive distinct scores, and the
/// largest score; ties go to the smaller epsilon.
OracleThreshold oracle_threshold(const ScoreMatrix& scores, const Graph& truth);

/// Misclassified pairs when declaring score > epsilon an edge.
std::size_t threshold_errors(const ScoreMatrix& scores, const Graph& truth, double epsilon);

inline constexpr int kKdeGrid = 512;
inline constexpr std::size_t kKdeMinScores = 10;

/// 1.06 * sd * m^(-1/5), floored at 1e-3.
double kde_bandwidth(const std::vector<double>& values);

/// Gaussian-kernel density of `values` at each grid point.
std::vector<double> kde_density(const std::vector<double>& values, double bandwidth,
                                const std::vector<double>& grid);

/// `count` evenly spaced points on [lo, hi].
std::vector<double> linear_grid(double lo, double hi, int count);

struct KdeThreshold {
  double epsilon = 0.0;
  bool fallback = false;  ///< true when the 75th percentile was used
};

/// First valley (drop followed by a rise) of the density right of its leftmost mode, on 512
/// points over [0, 1.05 * max]. Throws std::invalid_argument on fewer than
/// 10 scores.
KdeThreshold kde_threshold(const std::vector<double>& scores);
KdeThreshold kde_threshold(const ScoreMatrix& scores);

struct SelectionStep {
  SearchConfig config;
  double change_d1 = 0.0;  ///< L1 density change for (d1 + 1, d2)
  double change_d2 = 0.0;  ///< L1 density change for (d1, d2 + 1)
};

struct Selection {
  SearchConfig config;
  std::vector<SelectionStep> trace;  ///< visited configs, starting at (0, 0)
};

/// L1 distance between the KDE densities of two score sets on a common
/// 512-point grid over [0, max of both].
double density_change(const std::vector<double>& a, const std::vector<double>& b);

/// Greedy ascent from (0, 0): move to whichever of (d1 + 1, d2), (d1, d2 + 1)
/// changes the score density more; stop once both changes are below `tol`
/// or after `max_steps` moves.
template <Distribution B>
Selection select_d1d2(const B& backend, TestKind test, int max_steps, double tol = 0.05);

void write_report_csv(const ExperimentReport& r, std::ostream& os);
void write_report_svg(const ExperimentReport& r, std::ostream& os);
/// Reads the numeric columns back (thresholds and timings are not stored).
ExperimentReport read_report_csv(std::istream& is);

}  // namespace mrfl
