#pragma once

#include <cstdint>
#include <vector>

#include "gsi/tensor.hpp"

namespace gsi {

enum class LatentModel { SingleLatent, MultiLatent };

struct SyntheticSpec {
  LatentModel model = LatentModel::MultiLatent;
  Index n_a = 50;
  Index n_b = 100;
  Index dim = 3;
  Index rank = 2;
  double noise_std = 0.1;
  double missing_fraction = 0.3;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Factors are always stored n x dim x rank. For SingleLatent the v factors
/// are drawn once per element of B and repeated across dimensions.
struct SyntheticInstance {
  SyntheticSpec spec;
  std::vector<double> u_factors;  // [(i * dim + d) * rank + r]
  std::vector<double> v_factors;  // [(j * dim + d) * rank + r]
  std::vector<double> clean;      // [(i * n_b + j) * dim + d]
  IncompleteTensor observed_tensor;

  std::vector<double> ground_truth(Index i, Index j) const;
};

/// clean[i,j,d] = sum_r u[i,d,r] * v[j,d,r].
std::vector<double> contract_factors(Index n_a, Index n_b, Index dim, Index rank,
                                     const std::vector<double>& u,
                                     const std::vector<double>& v);

/// Throws InfeasibleMask when no mask with every row and column covered is
/// found within 1000 draws.
SyntheticInstance generate(const SyntheticSpec& spec);

/// Uniform mask with round(missing_fraction * n_a * n_b) hidden cells and at
/// least one observed entry in every row and column.
std::vector<std::uint8_t> draw_mask(Index n_a, Index n_b, double missing_fraction,
                                    std::uint64_t seed);

}  // namespace gsi
