// Eigenstructure checks: every closed form is compared against the dense
// sector Hamiltonian built independently in xxzbath::oracles, so each test is
// a genuine two-route agreement rather than a restatement of the formula.
#include <cmath>
#include <complex>
#include <vector>

#include <doctest.h>

#include "xxzbath/bethe.hpp"
#include "xxzbath/oracles.hpp"

using namespace xxzbath;

namespace {
constexpr double kPi = 3.141592653589793238462643;
}

TEST_CASE("scattering matrix is unimodular with antisymmetric phase") {
  for (double delta : {-2.0, -0.5, 0.0, 0.5, 2.0}) {
    for (double qj : {0.3, 1.1, 2.7}) {
      for (double qk : {0.7, 2.0, 5.9}) {
        const std::complex<double> s = scattering_matrix(delta, qj, qk);
        CHECK(std::abs(std::abs(s) - 1.0) < 1e-13);
        const double sum =
            scattering_phase(delta, qj, qk) + scattering_phase(delta, qk, qj);
        CHECK(sum == doctest::Approx(2 * kPi).epsilon(1e-12));
      }
    }
  }
  // Coinciding momenta take the continuity value -1 for any anisotropy.
  CHECK(scattering_matrix(0.7, 1.3, 1.3) == std::complex<double>(-1.0, 0.0));
  CHECK(scattering_matrix(0.0, 0.4, 2.2) == std::complex<double>(-1.0, 0.0));
}

TEST_CASE("one-magnon states are exact eigenstates of the dense Hamiltonian") {
  for (int n : {6, 9}) {
    for (double delta : {-1.5, 0.5}) {
      const ChainSpec chain{n, delta};
      for (int m = 0; m < n; ++m) {
        const MagnonState state{chain, OneMagnon{2 * kPi * m / n}};
        CHECK(oracles::eigenstate_residual(state) < 1e-12);
      }
    }
  }
}

TEST_CASE("zero-momentum pair labels and the free-fermion limit") {
  CHECK(zero_momentum_pair(8, 1) == std::vector<int>{1, 0});
  CHECK(zero_momentum_pair(8, 4) == std::vector<int>{4, 5});
  // At delta = 0 the pair momentum is exactly 2 pi (I - 1/2) / N.
  const ChainSpec chain{10, 0.0};
  for (int index = 1; index <= 5; ++index) {
    const BetheRootSet rs = solve_bethe_roots(chain, zero_momentum_pair(10, index));
    REQUIRE(rs.converged);
    CHECK(rs.roots[0].real() ==
          doctest::Approx(2 * kPi * (index - 0.5) / 10).epsilon(1e-12));
    CHECK(rs.roots[0].imag() == 0.0);
  }
}

TEST_CASE("converged pair states diagonalise the dense sector Hamiltonian") {
  for (int n : {6, 8}) {
    for (double delta : {-2.0, -0.5, 0.5, 2.0}) {
      const ChainSpec chain{n, delta};
      int unconverged = 0;
      for (int index = 1; index <= n / 2; ++index) {
        const BetheRootSet rs =
            solve_bethe_roots(chain, zero_momentum_pair(n, index));
        if (!rs.converged) {
          ++unconverged;
          continue;
        }
        CHECK(rs.residual < 1e-10);
        CHECK(oracles::eigenstate_residual(MagnonState{chain, GeneralL{rs}}) <
              1e-10);
      }
      // Beyond |delta| = 1 exactly one label's real pair is replaced by the
      // localized two-magnon state; inside the band every label survives.
      CHECK(unconverged == (std::fabs(delta) > 1.0 ? 1 : 0));
    }
  }
}

TEST_CASE("pair labels exactly on the phase endpoint are owned once") {
  // q* = acos(1/delta) coincides with a quantisation point when
  // N q* = 2 pi (I - 1); the owning label converges to q* analytically and
  // the neighbouring label is rejected rather than double-counting the state.
  {
    const ChainSpec chain{12, -2.0};
    const BetheRootSet owner = solve_bethe_roots(chain, zero_momentum_pair(12, 5));
    REQUIRE(owner.converged);
    CHECK(owner.roots[0].real() == doctest::Approx(2 * kPi / 3).epsilon(1e-14));
    const MagnonState state{chain, GeneralL{owner}};
    CHECK(sector_energy(state) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(oracles::eigenstate_residual(state) < 1e-10);
    CHECK_FALSE(solve_bethe_roots(chain, zero_momentum_pair(12, 4)).converged);
  }
  {
    const ChainSpec chain{6, 2.0};
    const BetheRootSet owner = solve_bethe_roots(chain, zero_momentum_pair(6, 2));
    REQUIRE(owner.converged);
    CHECK(owner.roots[0].real() == doctest::Approx(kPi / 3).epsilon(1e-14));
    CHECK(std::fabs(sector_energy(MagnonState{chain, GeneralL{owner}})) < 1e-12);
    CHECK_FALSE(solve_bethe_roots(chain, zero_momentum_pair(6, 1)).converged);
  }
}

TEST_CASE("generic nonzero-momentum labels solve or are honestly rejected") {
  struct Case {
    int n;
    double delta;
    std::vector<int> labels;
    bool exists;
  };
  const Case cases[] = {
      {8, -0.5, {1, 3}, true},  {8, -0.5, {2, 5}, true}, {8, -0.5, {0, 4}, true},
      {10, 0.5, {1, 3}, true},  {10, 0.5, {0, 4}, true},
      // These labels have no real-pair solution (the state is a localized
      // pair at nonzero total momentum) and must come back unconverged.
      {8, 0.5, {1, 3}, false},  {10, -0.5, {2, 5}, false},
  };
  for (const Case& c : cases) {
    const ChainSpec chain{c.n, c.delta};
    const BetheRootSet rs = solve_bethe_roots(chain, c.labels);
    REQUIRE(rs.converged == c.exists);
    if (c.exists)
      CHECK(oracles::eigenstate_residual(MagnonState{chain, GeneralL{rs}}) <
            1e-10);
  }
}

TEST_CASE("bound pair: exact decay parameter, energy, and eigenvector") {
  for (int n : {8, 10, 12}) {
    for (double delta : {1.5, 2.0, 3.0}) {
      const ChainSpec chain{n, delta};
      const double z = bound_state_z(chain);
      REQUIRE(z > 0.0);
      REQUIRE(z < 1.0);
      // Defining finite-N condition.
      CHECK(1 + std::pow(z, n) ==
            doctest::Approx(delta * (z + std::pow(z, n - 1))).epsilon(1e-12));
      const MagnonState state{chain, TwoMagnonBound{}};
      CHECK(oracles::eigenstate_residual(state) < 1e-10);
      // The localized pair is the bottom of the zero-momentum band.
      const std::vector<double> band = oracles::k0_band(chain, 2);
      CHECK(sector_energy(state) == doctest::Approx(band.front()).epsilon(1e-12));
    }
  }
  // The large-N energy approaches the exact one from below-band at rate z^N.
  const ChainSpec chain{10, 2.0};
  const double gap = std::fabs(sector_energy(MagnonState{chain, TwoMagnonBound{}}) -
                               bound_state_energy_asymptotic(chain));
  CHECK(gap == doctest::Approx(8.606e-3).epsilon(1e-3));
}

TEST_CASE("bound root set reproduces the dense profile") {
  const ChainSpec chain{10, 2.0};
  const BetheRootSet rs = bound_root_set(chain);
  REQUIRE(rs.converged);
  CHECK(rs.roots[0].real() == 0.0);
  CHECK(rs.roots[0].imag() > 0.0);
  CHECK(rs.roots[1] == std::conj(rs.roots[0]));
  const double kappa = rs.roots[0].imag();
  CHECK(std::exp(-kappa) == doctest::Approx(bound_state_z(chain)).epsilon(1e-12));
}

TEST_CASE("pair normalization matches the direct basis sum") {
  const ChainSpec chain{12, 0.5};
  const BetheRootSet rs = solve_bethe_roots(chain, zero_momentum_pair(12, 3));
  REQUIRE(rs.converged);
  const double q = rs.roots[0].real();
  const MagnonState state{chain, TwoMagnonScattering{q}};
  const double a = normalization_constant(state);
  double direct = 0.0;
  for (int x1 = 1; x1 <= 12; ++x1)
    for (int x2 = x1 + 1; x2 <= 12; ++x2)
      direct += std::norm(amplitude(state, {x1, x2}));
  CHECK(a * a * direct == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("transition amplitudes take their closed edge and bound values") {
  const ChainSpec chain{12, 2.0};
  const auto lo = transition_amplitude_omega(
      MagnonState{chain, TwoMagnonEdge{EdgeKind::ZeroPlus}});
  const auto hi = transition_amplitude_omega(
      MagnonState{chain, TwoMagnonEdge{EdgeKind::PiMinus}});
  CHECK(std::abs(lo.real()) < 1e-12);
  CHECK(lo.imag() == doctest::Approx(-std::sqrt(36.0)).epsilon(1e-12));
  CHECK(hi.imag() == doctest::Approx(+std::sqrt(36.0)).epsilon(1e-12));
  const auto bound =
      transition_amplitude_omega(MagnonState{chain, TwoMagnonBound{}});
  CHECK(bound.real() == doctest::Approx(2 * std::sqrt(3.0)).epsilon(1e-12));
  CHECK(std::abs(bound.imag()) < 1e-12);
}

TEST_CASE("sector energies agree with dense diagonalisation extremes") {
  // Vacuum and saturated sectors are one-dimensional with energy -N delta / 2.
  for (double delta : {-1.0, 2.0}) {
    const ChainSpec chain{6, delta};
    CHECK(sector_energy(MagnonState{chain, Vacuum{}}) ==
          doctest::Approx(-3.0 * delta));
    CHECK(sector_energy(MagnonState{chain, Saturated{}}) ==
          doctest::Approx(-3.0 * delta));
  }
}

TEST_CASE("invalid chain or label inputs are rejected") {
  const ChainSpec tiny{1, 0.5};
  CHECK_THROWS_AS(tiny.validate(), std::domain_error);
  const ChainSpec chain{8, 0.5};
  const std::vector<int> too_many{1, 2, 3, 4, 5, 6, 7, 8, 9};
  CHECK_THROWS_AS(solve_bethe_roots(chain, too_many), std::domain_error);
  const ChainSpec planar{8, 0.5};
  CHECK_THROWS_AS(bound_state_z(planar), std::domain_error);
  CHECK_THROWS_AS(zero_momentum_pair(7, 1), std::domain_error);
}
