#include <Eigen/SVD>
#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "gsi/error.hpp"
#include "gsi/synthgen.hpp"

using namespace gsi;

TEST_SUITE("synthgen") {
  TEST_CASE("default experiment shape") {
    SyntheticSpec spec;
    spec.seed = 7;
    const SyntheticInstance inst = generate(spec);
    CHECK(inst.observed_tensor.n_a() == 50);
    CHECK(inst.observed_tensor.n_b() == 100);
    CHECK(inst.observed_tensor.dim() == 3);
    CHECK(inst.observed_tensor.observed_count() == 5000 - 1500);
  }

  TEST_CASE("single cell contraction") {
    SyntheticSpec spec;
    spec.n_a = spec.n_b = 1;
    spec.rank = 1;
    spec.noise_std = 0.0;
    spec.missing_fraction = 0.0;
    const SyntheticInstance inst = generate(spec);
    for (Index d = 0; d < spec.dim; ++d)
      CHECK(inst.clean[d] == inst.u_factors[d] * inst.v_factors[d]);
  }

  TEST_CASE("same seed, same bytes") {
    SyntheticSpec spec;
    spec.n_a = 10;
    spec.n_b = 12;
    spec.seed = 99;
    const SyntheticInstance a = generate(spec), b = generate(spec);
    CHECK(a.u_factors == b.u_factors);
    CHECK(a.v_factors == b.v_factors);
    CHECK(a.clean == b.clean);
    CHECK(std::equal(a.observed_tensor.mask().begin(), a.observed_tensor.mask().end(),
                     b.observed_tensor.mask().begin()));
    CHECK(std::equal(a.observed_tensor.raw_values().begin(), a.observed_tensor.raw_values().end(),
                     b.observed_tensor.raw_values().begin()));
    spec.seed = 100;
    CHECK(generate(spec).clean != a.clean);
  }

  TEST_CASE("ground truth accessor") {
    CHECK(gsi::testing::fixture_f2_instance().ground_truth(1, 2) == std::vector<double>{2, 0});
    const auto z = contract_factors(2, 2, 3, 2, std::vector<double>(12, 0.0),
                                    std::vector<double>(12, 0.0));
    CHECK(z == std::vector<double>(12, 0.0));
    // identity rows of u pick out v
    std::vector<double> u = {1, 0, 0, 1}, v = {3, 4, -1, 2};
    const auto c = contract_factors(2, 2, 1, 2, u, v);
    CHECK(c == std::vector<double>{3, -1, 4, 2});
  }

  TEST_CASE("clean tensor is the factor contraction") {
    for (LatentModel m : {LatentModel::SingleLatent, LatentModel::MultiLatent}) {
      SyntheticSpec spec;
      spec.model = m;
      spec.n_a = 6;
      spec.n_b = 7;
      spec.dim = 3;
      spec.rank = 2;
      spec.seed = 4;
      const SyntheticInstance inst = generate(spec);
      for (Index i = 0; i < 6; ++i)
        for (Index j = 0; j < 7; ++j)
          for (Index d = 0; d < 3; ++d) {
            double s = 0;
            for (Index r = 0; r < 2; ++r) {
              const Index vd = m == LatentModel::SingleLatent ? 0 : d;
              s += inst.u_factors[(i * 3 + d) * 2 + r] * inst.v_factors[(j * 3 + vd) * 2 + r];
            }
            CHECK(inst.clean[(i * 7 + j) * 3 + d] == doctest::Approx(s).epsilon(1e-15));
          }
    }
  }

  TEST_CASE("single latent nests in multi latent") {
    SyntheticSpec spec;
    spec.model = LatentModel::SingleLatent;
    spec.n_a = 8;
    spec.n_b = 9;
    spec.seed = 5;
    const SyntheticInstance inst = generate(spec);
    for (Index j = 0; j < 9; ++j)
      for (Index d = 1; d < spec.dim; ++d)
        for (Index r = 0; r < spec.rank; ++r)
          CHECK(inst.v_factors[(j * spec.dim + d) * spec.rank + r] ==
                inst.v_factors[(j * spec.dim) * spec.rank + r]);
    CHECK(contract_factors(8, 9, spec.dim, spec.rank, inst.u_factors, inst.v_factors) == inst.clean);
  }

  TEST_CASE("rank certificate per slice") {
    SyntheticSpec spec;
    spec.n_a = 20;
    spec.n_b = 25;
    spec.rank = 3;
    spec.noise_std = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      spec.seed = seed;
      const SyntheticInstance inst = generate(spec);
      for (Index d = 0; d < spec.dim; ++d) {
        Eigen::MatrixXd m(20, 25);
        for (Index i = 0; i < 20; ++i)
          for (Index j = 0; j < 25; ++j) m(i, j) = inst.clean[(i * 25 + j) * spec.dim + d];
        const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues();
        for (Index r = spec.rank; r < Index(sv.size()); ++r) CHECK(sv(r) < 1e-8 * sv(0));
        CHECK(sv(spec.rank - 1) > 1e-3 * sv(0));
      }
    }
  }

  TEST_CASE("noise standard deviation") {
    SyntheticSpec spec;
    spec.n_a = 100;
    spec.n_b = 150;
    spec.noise_std = 0.37;
    spec.missing_fraction = 0.1;
    spec.seed = 8;
    const SyntheticInstance inst = generate(spec);
    const IncompleteTensor& t = inst.observed_tensor;
    double s = 0, ss = 0;
    std::size_t n = 0;
    for (Index i = 0; i < t.n_a(); ++i)
      for (Index j = 0; j < t.n_b(); ++j) {
        if (!t.observed(i, j)) continue;
        for (Index d = 0; d < t.dim(); ++d) {
          const double e = t.value(i, j, d) - inst.clean[(i * t.n_b() + j) * t.dim() + d];
          s += e;
          ss += e * e;
          ++n;
        }
      }
    REQUIRE(n >= 10000);
    const double mean = s / double(n);
    const double sd = std::sqrt(ss / double(n) - mean * mean);
    CHECK(std::abs(sd - 0.37) < 0.05 * 0.37);
  }

  TEST_CASE("mask covers every row and column") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto m = draw_mask(7, 9, 0.6, seed);
      std::size_t hidden = 0;
      for (auto x : m) hidden += x == 0;
      CHECK(hidden == std::size_t(std::lround(0.6 * 63)));
      for (Index i = 0; i < 7; ++i) {
        bool any = false;
        for (Index j = 0; j < 9; ++j) any |= m[i * 9 + j] != 0;
        CHECK(any);
      }
      for (Index j = 0; j < 9; ++j) {
        bool any = false;
        for (Index i = 0; i < 7; ++i) any |= m[i * 9 + j] != 0;
        CHECK(any);
      }
    }
  }

  TEST_CASE("infeasible coverage") {
    try {
      draw_mask(5, 5, 0.9, 1);
      FAIL("expected InfeasibleMask");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InfeasibleMask);
    }
  }

  TEST_CASE("generator parameter validation") {
    SyntheticSpec spec;
    spec.rank = 0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.missing_fraction = 1.0;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.noise_std = -0.1;
    CHECK_THROWS_AS(spec.validate(), Error);
  }
}
