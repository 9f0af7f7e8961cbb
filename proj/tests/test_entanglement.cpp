// Entanglement measures: closed forms are pitted against the honest
// optimizers (symmetric ansatz, alternating ascent, exhaustive bipartitions),
// which share no code with them.
#include <cmath>
#include <complex>

#include <doctest.h>

#include "xxzbath/bethe.hpp"
#include "xxzbath/entanglement.hpp"

using namespace xxzbath;

namespace {
Eigen::VectorXcd w_profile(int n) {
  const ChainSpec chain{n, 0.5};
  return dense_vector(MagnonState{chain, OneMagnon{0.0}});
}

Eigen::VectorXcd edge_profile(int n) {
  const ChainSpec chain{n, 0.5};
  return dense_vector(MagnonState{chain, TwoMagnonEdge{EdgeKind::ZeroPlus}});
}
}  // namespace

TEST_CASE("ghz block measure: exact endpoints and cone handling") {
  CHECK(gme_ghz_block(1.0, 0.5) == 0.5);
  CHECK(gme_ghz_block(1.0, 0.0) == 0.0);
  CHECK(gme_ghz_block(0.0, 0.0) == 0.0);
  CHECK(gme_ghz_block(-1e-3, 0.0) == 0.0);
  // Interior point against the defining expression.
  const double u = 0.8, v = 0.3;
  CHECK(gme_ghz_block(u, v) ==
        doctest::Approx(0.5 * u * (1 - std::sqrt(1 - 4 * v * v / (u * u))))
            .epsilon(1e-14));
  // Slight cone violations are clamped; gross ones rejected.
  CHECK(gme_ghz_block(0.6, 0.3 + 1e-13) == doctest::Approx(0.3).epsilon(1e-10));
  CHECK_THROWS_AS(gme_ghz_block(0.6, 0.4), std::domain_error);
}

TEST_CASE("closed forms reach their infinite-chain limits") {
  CHECK(closed_form_measure(MeasureKind::CmeW, kInfiniteChain) ==
        doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(closed_form_measure(MeasureKind::Cme2M, kInfiniteChain) ==
        doctest::Approx(1 - 3 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(closed_form_measure(MeasureKind::GmeW, kInfiniteChain) == 0.0);
  CHECK(closed_form_measure(MeasureKind::Gme2M, kInfiniteChain) == 0.0);
  // Finite chains approach monotonically from below (W) and above (2M gme).
  CHECK(closed_form_measure(MeasureKind::CmeW, 6) ==
        doctest::Approx(1 - std::pow(5.0 / 6.0, 5)).epsilon(1e-14));
  CHECK(closed_form_measure(MeasureKind::GmeW, 10) == 0.1);
  CHECK_THROWS_AS(closed_form_measure(MeasureKind::CmeW, 2), std::domain_error);
  CHECK_THROWS_AS(closed_form_measure(MeasureKind::Cme2M, 3), std::domain_error);
}

TEST_CASE("one-magnon profile: optimizers reproduce the closed form") {
  for (int n : {6, 8, 12}) {
    const OverlapResult sym = optimize_symmetric_product_overlap(w_profile(n), n);
    REQUIRE(sym.converged);
    const double closed = std::pow(1.0 - 1.0 / n, n - 1);
    CHECK(sym.overlap_sq == doctest::Approx(closed).epsilon(1e-10));
    CHECK(1 - sym.overlap_sq ==
          doctest::Approx(closed_form_measure(MeasureKind::CmeW, n))
              .epsilon(1e-10));
  }
  // The unrestricted ascent finds nothing better than the symmetric point.
  const int n = 8;
  const Eigen::VectorXcd full = embed_sector_vector(w_profile(n), n, 1);
  const OverlapResult gen = optimize_product_overlap(full, n, 8, 1);
  REQUIRE(gen.converged);
  CHECK(gen.overlap_sq ==
        doctest::Approx(std::pow(1.0 - 1.0 / n, n - 1)).epsilon(1e-8));
}

TEST_CASE("two-magnon edge profile: the optimizer value is reproducible") {
  // The best symmetric-product overlap of the band-edge profile factorises as
  // (4/3) (1 - 1/N^2) (1 - 2/N)^{N-2}; the optimizer must land on it exactly.
  for (int n : {6, 8, 10, 12}) {
    const OverlapResult sym =
        optimize_symmetric_product_overlap(edge_profile(n), n);
    REQUIRE(sym.converged);
    const double factored = (4.0 / 3.0) * (1.0 - 1.0 / (double(n) * n)) *
                            std::pow(1.0 - 2.0 / n, n - 2);
    CHECK(sym.overlap_sq == doctest::Approx(factored).epsilon(1e-10));
  }
}

TEST_CASE("bipartite scan: GHZ and one-magnon references") {
  CHECK(max_bipartite_schmidt(ghz_full_vector(6), 6) ==
        doctest::Approx(0.5).epsilon(1e-12));
  const Eigen::VectorXcd w_full = embed_sector_vector(w_profile(6), 6, 1);
  CHECK(max_bipartite_schmidt(w_full, 6) ==
        doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  // Product states have unit Schmidt weight across every cut.
  Eigen::VectorXcd prod = Eigen::VectorXcd::Zero(1 << 4);
  prod[5] = 1.0;  // |0101>
  CHECK(max_bipartite_schmidt(prod, 4) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("schmidt conventions and sector embedding") {
  CHECK(geometric_measure(0.75, SchmidtConvention::OneMinusLambda) ==
        doctest::Approx(0.25));
  CHECK(geometric_measure(0.75, SchmidtConvention::OneMinusLambdaSq) ==
        doctest::Approx(1 - 0.5625));
  // Two-magnon embedding: basis tuple (x1, x2) lands on the mask with those
  // site bits set.
  Eigen::VectorXcd sector = Eigen::VectorXcd::Zero(3);  // N = 3, l = 2
  sector[0] = 1.0;  // (1,2)
  Eigen::VectorXcd full = embed_sector_vector(sector, 3, 2);
  REQUIRE(full.size() == 8);
  CHECK(std::abs(full[3] - std::complex<double>(1, 0)) < 1e-15);
  sector.setZero();
  sector[1] = 1.0;  // (1,3)
  full = embed_sector_vector(sector, 3, 2);
  CHECK(std::abs(full[5] - std::complex<double>(1, 0)) < 1e-15);
  // Norm is preserved.
  const Eigen::VectorXcd e = edge_profile(6);
  CHECK(embed_sector_vector(e, 6, 2).norm() == doctest::Approx(e.norm()));
}

TEST_CASE("mixture bound weighs the channel measures") {
  const Eigen::Vector4d w(0.25, 0.25, 0.25, 0.25);
  const double expected =
      0.25 * closed_form_measure(MeasureKind::CmeW, kInfiniteChain) +
      0.5 * closed_form_measure(MeasureKind::Cme2M, kInfiniteChain);
  CHECK(cme_upper_bound_mixture(w, kInfiniteChain) ==
        doctest::Approx(expected).epsilon(1e-14));
  // The vacuum weight contributes nothing.
  CHECK(cme_upper_bound_mixture(Eigen::Vector4d(1, 0, 0, 0), kInfiniteChain) ==
        0.0);
  CHECK_THROWS_AS(cme_upper_bound_mixture(Eigen::Vector4d(0.5, 0.7, 0, 0), 8),
                  std::domain_error);
}
