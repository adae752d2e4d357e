#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace mfl {

/// Binomial coefficient as double-free 64-bit integer; throws on overflow.
std::uint64_t binomial(int n, int k);

/// Bosonic occupation vectors n = (n_1, ..., n_d), sum n_k = N, in descending
/// lexicographic order: (N,0,...,0) is state 0 and (0,...,0,N) the last.
/// index_of() ranks a vector directly (combinatorial number system), so the
/// map is a perfect hash with no table lookup.
class OccupationBasis {
 public:
  OccupationBasis(int modes, int particles);

  int modes() const { return modes_; }
  int particles() const { return particles_; }
  std::size_t size() const { return count_; }

  std::span<const int> state(std::size_t i) const {
    return {occupations_.data() + i * static_cast<std::size_t>(modes_),
            static_cast<std::size_t>(modes_)};
  }

  /// Rank of an occupation vector; nullopt when it does not belong to the basis.
  std::optional<std::size_t> index_of(std::span<const int> occupation) const;

  /// Occupation vector of a tensor multi-index (the permutation orbit label).
  std::vector<int> occupation_of_tensor_index(std::size_t flat, int slots) const;

  friend bool operator==(const OccupationBasis& a, const OccupationBasis& b) {
    return a.modes_ == b.modes_ && a.particles_ == b.particles_;
  }

 private:
  int modes_;
  int particles_;
  std::size_t count_;
  std::vector<int> occupations_;
  // states_with_[m][r]: number of occupation vectors over m modes holding r particles
  std::vector<std::vector<std::uint64_t>> states_with_;
};

}  // namespace mfl
