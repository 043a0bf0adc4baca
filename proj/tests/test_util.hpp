#pragma once

#include "mrfl/graph.hpp"
#include "mrfl/model.hpp"

#include <random>

namespace mrfl::testing {

/// Each pair an edge with probability `edge_prob`; |J| ~ U[jlo, jhi] with a
/// fair sign unless `ferro`; h ~ U[-hmax, hmax].
inline IsingModel random_model(std::mt19937_64& rng, int p, double edge_prob, double jlo, double jhi,
                               double hmax = 0.0, bool ferro = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = i + 1; j < p; ++j)
      if (u(rng) < edge_prob) edges.emplace_back(i, j);
  std::vector<double> j;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const double a = jlo + (jhi - jlo) * u(rng);
    j.push_back(ferro || u(rng) < 0.5 ? a : -a);
  }
  Eigen::VectorXd h(p);
  for (int i = 0; i < p; ++i) h(i) = hmax * (2.0 * u(rng) - 1.0);
  return IsingModel(Graph(p, std::move(edges)), std::move(j), std::move(h));
}

/// Random tree on p nodes: node k attaches to a uniform earlier node.
inline Graph random_tree(std::mt19937_64& rng, int p) {
  std::vector<Edge> edges;
  for (int k = 1; k < p; ++k) edges.emplace_back(static_cast<int>(rng() % static_cast<unsigned>(k)), k);
  return Graph(p, std::move(edges));
}

inline double h2(double q) { return -(q * std::log2(q) + (1 - q) * std::log2(1 - q)); }

}  // namespace mrfl::testing
