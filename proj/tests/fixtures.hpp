#pragma once

#include <cmath>
#include <vector>

#include "gsi/rng.hpp"
#include "gsi/synthgen.hpp"
#include "gsi/tensor.hpp"

namespace gsi::testing {

// Two actions, three contexts, d = 2, rank-1 latents
//   U0 = (1, 2), U1 = (2, 2); V0 = (1, 1), V1 = (2, 3), V2 = (1, 0)
// with m_12 = (2, 0) held out.
inline IncompleteTensor fixture_f2() {
  IncompleteTensor t(2, 3, 2);
  t.set(0, 0, std::vector<double>{1, 2});
  t.set(0, 1, std::vector<double>{2, 6});
  t.set(0, 2, std::vector<double>{1, 0});
  t.set(1, 0, std::vector<double>{2, 2});
  t.set(1, 1, std::vector<double>{4, 6});
  return t;
}

inline SyntheticInstance fixture_f2_instance() {
  SyntheticInstance inst;
  inst.spec.model = LatentModel::MultiLatent;
  inst.spec.n_a = 2;
  inst.spec.n_b = 3;
  inst.spec.dim = 2;
  inst.spec.rank = 1;
  inst.spec.noise_std = 0.0;
  inst.u_factors = {1, 2, 2, 2};
  inst.v_factors = {1, 1, 2, 3, 1, 0};
  inst.clean = contract_factors(2, 3, 2, 1, inst.u_factors, inst.v_factors);
  inst.observed_tensor = fixture_f2();
  return inst;
}

/// Small random tensor with a random mask (every row and column keeps at
/// least one observed cell).
inline IncompleteTensor random_tensor(CounterRng& rng, Index min_n = 2, Index max_n = 8,
                                      Index max_dim = 4) {
  const Index n_a = min_n + rng.below(max_n - min_n + 1);
  const Index n_b = min_n + rng.below(max_n - min_n + 1);
  const Index dim = 1 + rng.below(max_dim);
  const double keep = 0.5 + 0.5 * rng.uniform();
  IncompleteTensor t(n_a, n_b, dim);
  std::vector<double> v(dim);
  for (Index i = 0; i < n_a; ++i) {
    for (Index j = 0; j < n_b; ++j) {
      const bool anchor = i % n_b == j || j % n_a == i;
      if (rng.uniform() > keep && !anchor) continue;
      for (double& x : v) x = rng.normal();
      t.set(i, j, v);
    }
  }
  return t;
}

/// Shared-latent tensor whose per-dimension context factors drift by eps:
/// v_jd = v_j + eps * w_jd. Noise and mask are those of the SingleLatent draw.
inline IncompleteTensor perturbed_single_latent(SyntheticSpec spec, double eps) {
  spec.model = LatentModel::SingleLatent;
  const SyntheticInstance single = generate(spec);
  spec.model = LatentModel::MultiLatent;
  const SyntheticInstance multi = generate(spec);
  std::vector<double> v = single.v_factors;
  for (std::size_t q = 0; q < v.size(); ++q) v[q] += eps * multi.v_factors[q];
  const auto clean = contract_factors(spec.n_a, spec.n_b, spec.dim, spec.rank, single.u_factors, v);
  const auto& t = single.observed_tensor;
  std::vector<std::uint8_t> mask(t.mask().begin(), t.mask().end());
  std::vector<double> vals(clean.size(), 0.0);
  for (std::size_t q = 0; q < vals.size(); ++q) {
    if (mask[q / spec.dim]) vals[q] = clean[q] + (t.raw_values()[q] - single.clean[q]);
  }
  return IncompleteTensor(spec.n_a, spec.n_b, spec.dim, std::move(vals), std::move(mask));
}

/// Relative Euclidean error.
inline double relative_error(const std::vector<double>& est, const std::vector<double>& truth) {
  double num = 0.0, den = 0.0;
  for (std::size_t d = 0; d < truth.size(); ++d) {
    num += (est[d] - truth[d]) * (est[d] - truth[d]);
    den += truth[d] * truth[d];
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace gsi::testing
