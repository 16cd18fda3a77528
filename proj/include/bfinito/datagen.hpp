#pragma once

#include <cstdint>
#include <string>

#include "bfinito/kernel.hpp"

namespace bfinito {

struct PhaseRetrievalInstance {
  enum class Family { squared, poisson };

  Mat A;  // N x n, rows a_i
  Vec b;  // N, nonnegative
  Vec x_true;
  std::vector<std::uint8_t> corruption_mask;
  Family family = Family::squared;

  int n() const { return static_cast<int>(A.cols()); }
  int count() const { return static_cast<int>(A.rows()); }
};

// Sylvester Hadamard matrix scaled by n^{-1/2}; n must be a power of two.
Mat hadamard(int n);

// A stacks d blocks M S_j with i.i.d. +-1 diagonal sign matrices S_j (N = n d
// rows); b_i = <a_i, x_true>^2, independently zeroed with probability
// p_corrupt.
PhaseRetrievalInstance make_squared_instance(int n, int d, const Vec& x_true,
                                             double p_corrupt, std::uint64_t seed);

// A = |Gaussian|, x_true = |N(0, I)|, b_i ~ Poisson(<a_i, x_true>^2); with
// probability 1/10 a measurement is replaced by the nearest integer to
// ||x_true|^2 N(0,1)|.
PhaseRetrievalInstance make_poisson_instance(int n, int N, std::uint64_t seed);

// Power iteration on W = (1/N) sum_i b_i a_i a_i^T from a seeded random start,
// scaled so (1/N) sum_i <a_i, x0>^2 = (1/N) sum_i b_i; Poisson-family outputs
// are mapped into the positive orthant (absolute value, floored at the domain
// eps). Zero b falls back to a random unit vector.
Vec spectral_init(const PhaseRetrievalInstance& instance, int power_iterations,
                  std::uint64_t seed);

// Plain text serialization: header "n N family", then A rowwise, then b, then
// x_true, whitespace-separated decimals (17 significant digits). The
// corruption mask is not serialized; load returns an all-false mask.
void save_instance(const PhaseRetrievalInstance& instance, const std::string& path);
PhaseRetrievalInstance load_instance(const std::string& path);

}  // namespace bfinito
