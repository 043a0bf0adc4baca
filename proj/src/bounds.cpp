#include "mrfl/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrfl::bounds {

namespace {

constexpr int kScanCap = 1'000'000;

void check_couplings(double jmin, double jmax) {
  if (!(jmin > 0.0) || jmax < jmin) throw std::invalid_argument("bounds: need 0 < jmin <= jmax");
}

double one_minus_exp(double jmin) { return -std::expm1(-4.0 * jmin); }

}  // namespace

double prop2_epsilon(double jmin, double jmax) {
  return std::tanh(2.0 * jmin) / (2.0 * std::exp(2.0 * jmax) + 2.0 * std::exp(-2.0 * jmax));
}

double DecayParams::bound(double l) const { return beta * std::pow(alpha, l); }

DecayParams decay_params(int d, double jmax) {
  if (d < 2) throw std::invalid_argument("decay_params: d must be >= 2");
  if (!(jmax > 0.0)) throw std::invalid_argument("decay_params: jmax must be positive");
  DecayParams out;
  out.alpha = (d - 1) * std::tanh(jmax);
  out.beta = 4.0 * jmax * d / out.alpha;
  return out;
}

GirthConstants girth_constants(int d, double jmin, double jmax) {
  check_couplings(jmin, jmax);
  const auto dp = decay_params(d, jmax);
  if (!dp.decays()) throw std::domain_error("girth_constants: (d-1) tanh Jmax >= 1");
  GirthConstants out;
  out.a_prime = one_minus_exp(jmin) / 1800.0;
  out.a = out.a_prime * std::exp(-8.0 * d * jmax);
  out.epsilon = 48.0 * out.a * std::exp(4.0 * d * jmax);
  out.epsilon_prime = 48.0 * out.a_prime;
  const double cap = std::min(out.a, std::log(2.0));
  const double cap_prime = std::min(out.a_prime, std::log(2.0));
  for (int g = 3; g <= kScanCap; ++g) {
    if (dp.bound(g / 2.0) <= cap && dp.bound(g - 1.0) <= cap_prime) {
      out.min_girth = g;
      return out;
    }
  }
  throw std::domain_error("girth_constants: girth scan exceeded cap");
}

SparseLooseConstants sparse_loose_constants(int d, double jmin, double jmax, int d1, int d2) {
  check_couplings(jmin, jmax);
  if (d1 < 0 || d2 < 0) throw std::invalid_argument("sparse_loose_constants: negative search size");
  const auto dp = decay_params(d, jmax);
  if (!dp.decays()) throw std::domain_error("sparse_loose_constants: (d-1) tanh Jmax >= 1");
  const double s = d1 + d2;
  SparseLooseConstants out;
  out.a = one_minus_exp(jmin) / 1800.0 * std::exp(-8.0 * s * d * jmax);
  out.epsilon = 48.0 * out.a * std::exp(4.0 * s * d * jmax);
  const double cap = std::min(out.a, std::log(2.0));
  for (int h = 1; h <= kScanCap; ++h) {
    if (dp.bound(h) <= cap) {
      out.min_h = h;
      return out;
    }
  }
  throw std::domain_error("sparse_loose_constants: h scan exceeded cap");
}

double bdd_delta(int d, double jmax) {
  return std::exp2(-2.0 * d) * std::exp(-12.0 * d * d * jmax);
}

double set_prob_floor(int setsize, int d, double jmax) {
  if (setsize < 1) throw std::invalid_argument("set_prob_floor: setsize must be >= 1");
  const double s = setsize;
  return std::exp2(-s) * std::exp(-2.0 * (s + d) * s * jmax);
}

FerroEpsilons ferro_epsilons(int d, double jmin, double jmax) {
  FerroEpsilons out;
  out.epsilon_prime = one_minus_exp(jmin) / 16.0;
  out.epsilon = out.epsilon_prime * std::exp(-4.0 * d * d * jmax);
  return out;
}

double ferro_edge_floor(int neighborhood_size, double jmin, double jmax) {
  return one_minus_exp(jmin) / 16.0 * std::exp(-4.0 * neighborhood_size * jmax);
}

Regime parse_regime(const std::string& s) {
  if (s == "bdd_general") return Regime::BddGeneral;
  if (s == "bdd_girth") return Regime::BddGirth;
  if (s == "random_mi") return Regime::RandomMi;
  if (s == "ferro_bdd") return Regime::FerroBdd;
  if (s == "ferro_random") return Regime::FerroRandom;
  throw std::invalid_argument("unknown regime: " + s);
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::BddGeneral: return "bdd_general";
    case Regime::BddGirth: return "bdd_girth";
    case Regime::RandomMi: return "random_mi";
    case Regime::FerroBdd: return "ferro_bdd";
    case Regime::FerroRandom: return "ferro_random";
  }
  return "?";
}

SampleSize sample_size(Regime regime, const ModelParams& m) {
  if (m.p < 2) throw std::invalid_argument("sample_size: p must be >= 2");
  const double lp = std::log(static_cast<double>(m.p));
  const double l2 = std::log(2.0);
  const double a = m.alpha_conf;
  SampleSize out;
  auto need_l = [&] {
    if (!m.candidate_size || *m.candidate_size < 1.0)
      throw std::invalid_argument("sample_size: regime needs candidate_size >= 1");
    return *m.candidate_size;
  };
  auto need_eps = [&] {
    if (!m.epsilon || !(*m.epsilon > 0.0)) throw std::invalid_argument("sample_size: regime needs epsilon > 0");
    return *m.epsilon;
  };
  switch (regime) {
    case Regime::BddGeneral: {
      check_couplings(m.jmin, m.jmax);
      const double eps = prop2_epsilon(m.jmin, m.jmax);
      const double delta = bdd_delta(m.d, m.jmax);
      out.gamma = std::min(eps * delta / 16.0, delta / 2.0);
      out.n_min = 2.0 * ((2.0 * m.d + 1.0 + a) * lp + (2.0 * m.d + 1.0) * l2) / (out.gamma * out.gamma);
      break;
    }
    case Regime::BddGirth: {
      const auto gc = girth_constants(m.d, m.jmin, m.jmax);
      const auto dp = decay_params(m.d, m.jmax);
      const double delta = bdd_delta(m.d, m.jmax);
      out.gamma = std::min({gc.epsilon_prime / 32.0, gc.epsilon * delta / 16.0, delta / 2.0});
      const double l_eps = std::log(4.0 * dp.beta / gc.epsilon_prime) / std::log(1.0 / dp.alpha);
      out.n_min = 2.0 * ((2.0 + a) * lp + 2.0 * l_eps * std::log(static_cast<double>(m.d)) + 3.0 * l2) /
                  (out.gamma * out.gamma);
      break;
    }
    case Regime::RandomMi: {
      const double eps = need_eps();
      const double r = eps / (32.0 * 32.0);
      out.gamma = std::min(r * r, 1.0 / 64.0);
      out.n_min = 2.0 * ((5.0 + a) * lp + 5.0 * l2) / (out.gamma * out.gamma);
      break;
    }
    case Regime::FerroBdd: {
      check_couplings(m.jmin, m.jmax);
      const double l = need_l();
      const auto fe = ferro_epsilons(m.d, m.jmin, m.jmax);
      const double delta = bdd_delta(m.d, m.jmax);
      out.gamma = std::min({fe.epsilon_prime / 32.0, fe.epsilon * delta / 16.0, delta / 2.0});
      out.n_min = 2.0 * ((1.0 + a) * lp + (m.d + 1.0) * std::log(l) + (m.d + 2.0) * l2) / (out.gamma * out.gamma);
      break;
    }
    case Regime::FerroRandom: {
      check_couplings(m.jmin, m.jmax);
      const double l = need_l();
      const double e1 = ferro_epsilons(m.d, m.jmin, m.jmax).epsilon_prime;
      const double r = need_eps() / 512.0;
      out.gamma = std::min({e1 / 32.0, r * r, 1.0 / 32.0});
      out.n_min = 2.0 * ((2.0 + a) * lp + 3.0 * std::log(l) + 5.0 * l2) / (out.gamma * out.gamma);
      break;
    }
  }
  return out;
}

double pairwise_concentration_n(int p, int alphabet, double gamma, double alpha_conf) {
  if (p < 2 || alphabet < 2 || !(gamma > 0.0)) throw std::invalid_argument("pairwise_concentration_n: bad params");
  return 2.0 * ((2.0 + alpha_conf) * std::log(static_cast<double>(p)) + 2.0 * std::log(static_cast<double>(alphabet))) /
         (gamma * gamma);
}

RandomGraphParams random_graph_params(int p, double c, double jmax, double k) {
  if (!(c > 1.0)) throw std::invalid_argument("random_graph_params: c must exceed 1");
  if (p < 2) throw std::invalid_argument("random_graph_params: p must be >= 2");
  RandomGraphParams out;
  const double lc = std::log(c);
  out.alpha = c * std::tanh(jmax);
  out.gamma_p = std::log(static_cast<double>(p)) / (k * lc);
  out.kappa = std::log(1.0 / out.alpha) / (4.0 * lc);
  return out;
}

ModelSummary summarize(const IsingModel& m) {
  return {max_degree(m.graph()), m.min_abs_coupling(), m.max_abs_coupling()};
}

}  // namespace mrfl::bounds
