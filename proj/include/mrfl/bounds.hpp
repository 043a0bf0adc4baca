#pragma once

// Closed-form constants, thresholds and sample-size bounds for Ising models.
//
// All logarithms in the sample-size formulas are natural logarithms.

#include "mrfl/model.hpp"

#include <optional>
#include <string>

namespace mrfl::bounds {

/// Edge lower bound of the probability test on bounded-degree graphs:
/// tanh(2 Jmin) / (2 e^{2 Jmax} + 2 e^{-2 Jmax}).
double prop2_epsilon(double jmin, double jmax);

struct DecayParams {
  double beta = 0.0;
  double alpha = 0.0;  ///< (d-1) tanh Jmax
  bool decays() const { return alpha < 1.0; }
  /// beta * alpha^l
  double bound(double l) const;
};

/// Requires d >= 2 and Jmax > 0.
DecayParams decay_params(int d, double jmax);

struct GirthConstants {
  double a = 0.0;              ///< (1/1800)(1 - e^{-4 Jmin}) e^{-8 d Jmax}
  double epsilon = 0.0;        ///< 48 A e^{4 d Jmax}
  double a_prime = 0.0;        ///< (1/1800)(1 - e^{-4 Jmin})
  double epsilon_prime = 0.0;  ///< 48 A'
  int min_girth = 0;
};

/// Throws std::domain_error outside the correlation-decay regime.
GirthConstants girth_constants(int d, double jmin, double jmax);

struct SparseLooseConstants {
  double a = 0.0;
  double epsilon = 0.0;
  int min_h = 0;  ///< smallest h >= 1 with beta alpha^h <= min(A, ln 2)
};

SparseLooseConstants sparse_loose_constants(int d, double jmin, double jmax, int d1, int d2);

/// 2^{-2d} exp(-12 d^2 Jmax)
double bdd_delta(int d, double jmax);

/// Lower bound on P(x_S) for |S| = setsize: 2^{-|S|} exp(-2(|S| + d)|S| Jmax).
double set_prob_floor(int setsize, int d, double jmax);

struct FerroEpsilons {
  double epsilon = 0.0;        ///< (1/16)(1 - e^{-4 Jmin}) e^{-4 d^2 Jmax}
  double epsilon_prime = 0.0;  ///< (1/16)(1 - e^{-4 Jmin})
};

FerroEpsilons ferro_epsilons(int d, double jmin, double jmax);

/// Ferromagnetic edge lower bound for a conditioning set with |N_S| = ns:
/// (1/16)(1 - e^{-4 Jmin}) e^{-4 ns Jmax}.
double ferro_edge_floor(int neighborhood_size, double jmin, double jmax);

enum class Regime { BddGeneral, BddGirth, RandomMi, FerroBdd, FerroRandom };

Regime parse_regime(const std::string& s);
std::string to_string(Regime r);

struct ModelParams {
  int d = 0;
  double jmin = 0.0;
  double jmax = 0.0;
  int p = 0;
  double c = 0.0;
  int d1 = 0;
  int d2 = 0;
  double k = 3.5;
  int alphabet = 2;
  double alpha_conf = 1.0;  ///< high-probability exponent
  /// Existence-only constants (random-graph regimes), and the candidate-set
  /// size L for the preprocessing regimes.
  std::optional<double> epsilon;
  std::optional<double> candidate_size;
};

struct SampleSize {
  double gamma = 0.0;
  double n_min = 0.0;
};

/// (gamma, n threshold) for the named regime. Throws std::invalid_argument
/// when a regime-specific parameter is missing.
SampleSize sample_size(Regime regime, const ModelParams& params);

/// Pairwise concentration threshold: n > 2[(2+a) log p + 2 log |X|] / gamma^2.
double pairwise_concentration_n(int p, int alphabet, double gamma, double alpha_conf);

struct RandomGraphParams {
  double alpha = 0.0;    ///< c tanh Jmax
  double gamma_p = 0.0;  ///< log p / (K log c)
  double kappa = 0.0;    ///< log(1/alpha) / (4 log c)
  bool decays() const { return alpha < 1.0; }
};

RandomGraphParams random_graph_params(int p, double c, double jmax, double k);

struct ModelSummary {
  int d = 0;
  double jmin = 0.0;
  double jmax = 0.0;
};

/// Scans a model for (max degree, min |J|, max |J|).
ModelSummary summarize(const IsingModel& m);

}  // namespace mrfl::bounds

namespace mrfl {
using bounds::ferro_epsilons;
}
