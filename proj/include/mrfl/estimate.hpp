#pragma once

#include "mrfl/graph.hpp"
#include "mrfl/model.hpp"
#include "mrfl/samples.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace mrfl {

inline constexpr int kMaxEmpiricalSet = 12;

/// Plug-in distribution of a SampleSet.
///
/// Every node/value pair is indexed as a bitset over samples, so the counts
/// of any small variable subset come from AND + popcount in one pass.
/// Shares ownership of the samples; cheap to copy.
class EmpiricalDist {
 public:
  explicit EmpiricalDist(SampleSet samples);

  int num_nodes() const { return samples_->num_nodes(); }
  int num_samples() const { return samples_->num_samples(); }
  int alphabet_size() const { return samples_->alphabet; }
  const SampleSet& samples() const { return *samples_; }

  /// Counts over `vars` laid out with vars[0] fastest. |vars| <= 12.
  std::vector<std::int32_t> counts(std::span<const Node> vars) const;

  /// counts(vars) / n.
  Eigen::VectorXd marginal(std::span<const Node> vars) const;

  /// c * log2(c) for integer counts, tabulated up to n.
  double clog2c(std::int32_t c) const { return clogc_[static_cast<std::size_t>(c)]; }

 private:
  using Word = std::uint64_t;
  const Word* indicator(Node i, int v) const {
    return bits_.data() + (static_cast<std::size_t>(i) * static_cast<std::size_t>(alphabet_size()) +
                           static_cast<std::size_t>(v)) * words_;
  }

  std::shared_ptr<const SampleSet> samples_;
  std::size_t words_ = 0;
  std::vector<Word> bits_;
  Word tail_mask_ = 0;
  std::vector<double> clogc_;
};

/// P^(X_A = x_A).
double emp_marginal(const EmpiricalDist& e, const Assignment& a);

/// P^(X_i = x_i | given). Throws std::domain_error on a zero-count condition.
double emp_cond_prob(const EmpiricalDist& e, Node i, int xi, const Assignment& given = {});

/// Plug-in entropy in bits of X_A.
double emp_entropy(const EmpiricalDist& e, std::span<const Node> a);

/// Plug-in I(X_i; X_j | X_S) in bits via the four-entropy decomposition.
double emp_cond_mutual_info(const EmpiricalDist& e, Node i, Node j, std::span<const Node> s = {});

/// Probability-test statistic on P^, skipping zero-count conditioning events.
double emp_probability_test(const EmpiricalDist& e, Node i, Node j, std::span<const Node> s = {});

/// sum_x |a(x) - b(x)|. Throws std::invalid_argument on mismatched supports.
double l1_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Uniform names used by the test-statistic layer.
inline double mutual_information_test(const JointTable& t, Node i, Node j, std::span<const Node> s) {
  return cond_mutual_info(t, i, j, s);
}
inline double mutual_information_test(const EmpiricalDist& e, Node i, Node j, std::span<const Node> s) {
  return emp_cond_mutual_info(e, i, j, s);
}
inline double probability_test(const EmpiricalDist& e, Node i, Node j, std::span<const Node> s) {
  return emp_probability_test(e, i, j, s);
}

}  // namespace mrfl
