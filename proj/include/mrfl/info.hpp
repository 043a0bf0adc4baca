#pragma once

// Table-level information kernels shared by the exact and empirical backends.
//
// A "pair table" holds weights for the variables (X_i, X_j, X_C) laid out with
// x_i fastest, then x_j, then the flattened conditioning cell c:
//   index = x_i + k * x_j + k * k * c.
// Weights may be probabilities (total 1) or counts (total n).

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace mrfl {

inline constexpr double kMiClampTolerance = 1e-12;

/// Clamps floating-point noise in [-1e-12, 0) to 0; anything more negative
/// is a logic error.
inline double clamp_information(double v) {
  if (v >= 0.0) return v;
  if (v >= -kMiClampTolerance) return 0.0;
  throw std::logic_error("negative conditional mutual information beyond tolerance");
}

inline double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

/// Entropy in bits of a probability vector, with 0 log 0 = 0.
template <typename Derived>
double entropy_bits(const Eigen::DenseBase<Derived>& probs) {
  double h = 0.0;
  for (Eigen::Index k = 0; k < probs.size(); ++k) h -= xlog2x(static_cast<double>(probs(k)));
  return h;
}

/// I(X_i; X_j | X_C) in bits from a pair table, via
/// H(i,C) + H(j,C) - H(i,j,C) - H(C).
///
/// `wlog2w(w)` must return w*log2(w) (0 at 0) for a cell weight w, and
/// `total` the sum of all weights.
template <typename Weights, typename WLogW>
double pair_table_cmi(const Weights& t, int k, double total, WLogW&& wlog2w) {
  using W = std::decay_t<decltype(t[0])>;
  const std::size_t kk = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
  const std::size_t cells = static_cast<std::size_t>(t.size()) / kk;
  // Sum of w log w over (i,j,c), (c), (i,c), (j,c). Entropy of a weight table
  // is log2(total) - (1/total) * sum w log w; the log2(total) terms cancel.
  double s_ijc = 0.0, s_c = 0.0, s_ic = 0.0, s_jc = 0.0;
  W row_i[16];
  W row_j[16];
  std::vector<W> heap_i, heap_j;
  W* wi = row_i;
  W* wj = row_j;
  if (k > 16) {
    heap_i.resize(static_cast<std::size_t>(k));
    heap_j.resize(static_cast<std::size_t>(k));
    wi = heap_i.data();
    wj = heap_j.data();
  }
  for (std::size_t c = 0; c < cells; ++c) {
    const std::size_t base = c * kk;
    std::fill(wi, wi + k, W{});
    std::fill(wj, wj + k, W{});
    W wc{};
    for (int xj = 0; xj < k; ++xj) {
      for (int xi = 0; xi < k; ++xi) {
        W w = t[static_cast<Eigen::Index>(base + static_cast<std::size_t>(xi + k * xj))];
        s_ijc += wlog2w(w);
        wi[xi] += w;
        wj[xj] += w;
        wc += w;
      }
    }
    s_c += wlog2w(wc);
    for (int x = 0; x < k; ++x) {
      s_ic += wlog2w(wi[x]);
      s_jc += wlog2w(wj[x]);
    }
  }
  return clamp_information((s_ijc + s_c - s_ic - s_jc) / total);
}

/// max over x_i, x_j, x_j', c of |P(x_i | x_j, c) - P(x_i | x_j', c)|, with
/// conditioning events of zero weight skipped. Returns 0 when no pair of
/// observed conditioning events exists.
template <typename Weights>
double pair_table_probability_test(const Weights& t, int k) {
  const std::size_t kk = static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
  const std::size_t cells = static_cast<std::size_t>(t.size()) / kk;
  double best = 0.0;
  std::vector<double> cond(kk);
  std::vector<char> seen(static_cast<std::size_t>(k));
  for (std::size_t c = 0; c < cells; ++c) {
    const std::size_t base = c * kk;
    for (int xj = 0; xj < k; ++xj) {
      double wj = 0.0;
      for (int xi = 0; xi < k; ++xi)
        wj += static_cast<double>(t[static_cast<Eigen::Index>(base + static_cast<std::size_t>(xi + k * xj))]);
      seen[static_cast<std::size_t>(xj)] = wj > 0.0;
      for (int xi = 0; xi < k; ++xi) {
        double w = static_cast<double>(t[static_cast<Eigen::Index>(base + static_cast<std::size_t>(xi + k * xj))]);
        cond[static_cast<std::size_t>(xi + k * xj)] = wj > 0.0 ? w / wj : 0.0;
      }
    }
    for (int xi = 0; xi < k; ++xi) {
      double lo = 2.0, hi = -1.0;
      for (int xj = 0; xj < k; ++xj) {
        if (!seen[static_cast<std::size_t>(xj)]) continue;
        double v = cond[static_cast<std::size_t>(xi + k * xj)];
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi >= lo) best = std::max(best, hi - lo);
    }
  }
  return best;
}

}  // namespace mrfl
