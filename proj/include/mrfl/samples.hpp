#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <stdexcept>

namespace mrfl {

using SampleMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// n i.i.d. configurations stored as an n x p matrix of alphabet indices.
///
/// When `spins` is set the alphabet is {-1,+1} with index 0 <-> -1 and
/// index 1 <-> +1; files then carry the spin values.
struct SampleSet {
  SampleMatrix data;
  int alphabet = 2;
  bool spins = false;

  SampleSet() = default;
  SampleSet(SampleMatrix d, int alphabet_size, bool spin_encoding)
      : data(std::move(d)), alphabet(alphabet_size), spins(spin_encoding) {
    validate();
  }

  int num_samples() const { return static_cast<int>(data.rows()); }
  int num_nodes() const { return static_cast<int>(data.cols()); }

  void validate() const {
    if (alphabet < 1 || alphabet > 255) throw std::invalid_argument("SampleSet: bad alphabet size");
    if (spins && alphabet != 2) throw std::invalid_argument("SampleSet: spin encoding needs alphabet 2");
    if (data.rows() < 1) throw std::invalid_argument("SampleSet: need at least one sample");
    if ((data.array() >= static_cast<std::uint8_t>(alphabet)).any())
      throw std::invalid_argument("SampleSet: entry outside alphabet");
  }

  /// First m rows.
  SampleSet head(int m) const {
    return SampleSet(data.topRows(m), alphabet, spins);
  }
};

inline int spin_to_index(int s) { return s > 0 ? 1 : 0; }
inline int index_to_spin(int v) { return v == 1 ? 1 : -1; }

}  // namespace mrfl
