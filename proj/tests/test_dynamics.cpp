// Open-system dynamics: every closed form is replayed against an adaptive
// ODE integration or a dense matrix exponential from xxzbath::oracles, and
// the cubic spectrum is compared with a general eigensolver.
#include <cmath>
#include <vector>

#include <doctest.h>
#include <Eigen/Eigenvalues>

#include "xxzbath/dynamics.hpp"
#include "xxzbath/oracles.hpp"
#include "xxzbath/rng.hpp"

using namespace xxzbath;

namespace {
constexpr double kPi = 3.141592653589793238462643;

Eigen::Vector4d evolve_by_ode(const MarkovGenerator& gen,
                              const Eigen::Vector4d& w0, double t) {
  const Eigen::Matrix4d m = gen.matrix();
  const auto rhs = [&m](const std::vector<double>& y, std::vector<double>& dydt,
                        double) {
    for (int i = 0; i < 4; ++i) {
      dydt[i] = 0.0;
      for (int j = 0; j < 4; ++j) dydt[i] += m(i, j) * y[j];
    }
  };
  const std::vector<double> y = oracles::ode_integrate(
      rhs, {w0[0], w0[1], w0[2], w0[3]}, 0.0, t);
  return Eigen::Vector4d(y[0], y[1], y[2], y[3]);
}
}  // namespace

TEST_CASE("thermal population obeys its defining identities") {
  CHECK(gibbs_population(0.0, 3.7) == 0.5);
  CHECK(gibbs_population(4.2, 0.0) == 0.5);
  for (double beta : {0.3, 2.0, 20.0}) {
    for (double omega : {-3.0, -0.4, 1.2}) {
      CHECK(gibbs_population(beta, omega) + gibbs_population(beta, -omega) ==
            doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  // Overflow-safe at extreme arguments.
  CHECK(gibbs_population(1e8, 5.0) == 0.0);
  CHECK(gibbs_population(1e8, -5.0) == 1.0);
}

TEST_CASE("ghz block closed form solves its own rate equations") {
  for (double beta : {0.0, 1.0, 20.0}) {
    for (double delta : {-4.0, 0.5, 2.0}) {
      const BathSpec bath{beta, 1.0, 0.01, 10.0};
      const double k = bath.rate_scale();
      const double p = gibbs_population(beta, 1.0 - delta);
      const auto rhs = [&](const std::vector<double>& y,
                           std::vector<double>& dydt, double) {
        dydt[0] = k * (1 - p) * (1 - y[0]) - k * p * (1 + y[0]);
        dydt[1] = -k * p * y[1];
      };
      for (double t : {0.7, 13.0, 100.0}) {
        const GhzSectorState closed = ghz_sector_evolve(bath, delta, t);
        const std::vector<double> ode =
            oracles::ode_integrate(rhs, {1.0, 0.5}, 0.0, t);
        CHECK(closed.u == doctest::Approx(ode[0]).epsilon(1e-9));
        CHECK(closed.v == doctest::Approx(ode[1]).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("base rate and two-level relaxation helpers") {
  const BathSpec bath{1.0, 2.0, 0.05, 4.0};
  CHECK(bath.rate_scale() == doctest::Approx(kPi * 2.0 * 0.05 * 4.0));
  // Relaxation from the upper level approaches down/(down+up) ... the closed
  // form is checked against a direct integration.
  const double up = 0.3, down = 0.9;
  const auto rhs = [&](const std::vector<double>& y, std::vector<double>& dydt,
                       double) { dydt[0] = -2 * down * y[0] + 2 * up * (1 - y[0]); };
  for (double t : {0.1, 1.0, 10.0}) {
    const std::vector<double> ode = oracles::ode_integrate(rhs, {1.0}, 0.0, t);
    CHECK(relaxation_population(t, up, down) ==
          doctest::Approx(ode[0]).epsilon(1e-10));
  }
  CHECK(relaxation_population(5.0, 0.0, 0.0) == 1.0);
  // extremal coherence dephases at twice the rate: initial * e^{-2 t rate}
  CHECK(coherence_decay_extremal(2.0, 0.25, 0.5) ==
        doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("generator columns sum to zero and rates carry the multiplicity") {
  const BathSpec bath{2.0, 1.0, 0.01, 10.0};
  const MarkovGenerator gen = build_markov_generator(bath, 0.5);
  const double k = bath.rate_scale();
  CHECK(gen.a1 == doctest::Approx(k * gibbs_population(2.0, 0.5)));
  CHECK(gen.b2 == doctest::Approx(3 * k * gibbs_population(2.0, 0.5)));
  CHECK(gen.a2 == doctest::Approx(3 * k * gibbs_population(2.0, -0.5)));
  CHECK(gen.b3 == doctest::Approx(3 * k * gibbs_population(2.0, -3.5)));
  const Eigen::Matrix4d m = gen.matrix();
  for (int j = 0; j < 4; ++j) CHECK(std::fabs(m.col(j).sum()) < 1e-15);
}

TEST_CASE("cubic spectrum matches a general eigensolver on random rates") {
  SplitMix64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    MarkovGenerator gen;
    gen.a1 = rng.next_double();
    gen.b1 = rng.next_double();
    gen.a2 = rng.next_double();
    gen.b2 = rng.next_double();
    gen.a3 = rng.next_double();
    gen.b3 = rng.next_double();
    const GeneratorSpectrum sp = generator_spectrum(gen);
    REQUIRE_FALSE(sp.degenerate);
    Eigen::EigenSolver<Eigen::Matrix4d> es(gen.matrix());
    std::vector<double> reference;
    for (int i = 0; i < 4; ++i) {
      CHECK(std::fabs(es.eigenvalues()[i].imag()) < 1e-9);
      reference.push_back(es.eigenvalues()[i].real());
    }
    std::sort(reference.rbegin(), reference.rend());
    for (int i = 0; i < 4; ++i)
      CHECK(std::fabs(sp.eigenvalues[i] - reference[i]) < 1e-9);
  }
}

TEST_CASE("population evolution: spectral form vs matrix exponential vs ODE") {
  for (double beta : {0.0, 1.0, 20.0}) {
    for (double delta : {-3.5, 0.0, 2.0}) {
      const BathSpec bath{beta, 1.0, 0.01, 10.0};
      const MarkovGenerator gen = build_markov_generator(bath, delta);
      const Eigen::Vector4d w0(0.0, 1.0, 0.0, 0.0);
      CHECK((evolve_populations(gen, w0, 0.0) - w0).cwiseAbs().maxCoeff() == 0.0);
      for (double t : {0.5, 5.0, 50.0}) {
        const Eigen::Vector4d spectral = evolve_populations(gen, w0, t);
        const Eigen::Vector4d expm =
            oracles::matrix_exponential_small(gen.matrix() * t) * w0;
        const Eigen::Vector4d ode = evolve_by_ode(gen, w0, t);
        CHECK((spectral - expm).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((spectral - ode).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(spectral.sum() == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("infinite-temperature bath relaxes the magnon weight to a quarter") {
  const BathSpec bath{0.0, 1.0, 0.01, 10.0};
  const MarkovGenerator gen = build_markov_generator(bath, 0.5);
  const Eigen::Vector4d w =
      evolve_populations(gen, Eigen::Vector4d(0, 1, 0, 0), 100.0);
  for (int i = 0; i < 4; ++i) CHECK(w[i] == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("cold-bath long-time populations split by anisotropy regime") {
  const BathSpec bath{20.0, 1.0, 0.01, 10.0};
  const Eigen::Vector4d w0(0, 1, 0, 0);
  const Eigen::Vector4d frozen =
      evolve_populations(build_markov_generator(bath, -3.5), w0, 100.0);
  CHECK(frozen[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(frozen[3] < 1e-8);
  const Eigen::Vector4d split =
      evolve_populations(build_markov_generator(bath, 0.0), w0, 100.0);
  CHECK(split[0] == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(split[3] == doctest::Approx(0.75).epsilon(1e-8));
  const Eigen::Vector4d pairs =
      evolve_populations(build_markov_generator(bath, 2.0), w0, 100.0);
  CHECK(pairs[2] == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(pairs[3] == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("stationary distribution is the kernel and the long-time limit") {
  const BathSpec bath{2.0, 1.0, 0.01, 10.0};
  const MarkovGenerator gen = build_markov_generator(bath, 0.5);
  const Eigen::Vector4d st = stationary_distribution(gen);
  CHECK((gen.matrix() * st).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(st.sum() == doctest::Approx(1.0).epsilon(1e-14));
  const Eigen::Vector4d late =
      evolve_populations(gen, Eigen::Vector4d(0.2, 0.5, 0.1, 0.2), 2e4);
  CHECK((st - late).cwiseAbs().maxCoeff() < 1e-10);
  // With every backward rate zero the one-magnon point mass is stationary.
  MarkovGenerator oneway;
  oneway.a1 = 0.4;
  oneway.a2 = 0.3;
  oneway.a3 = 0.2;
  const Eigen::Vector4d point = stationary_distribution(oneway);
  CHECK(point[1] == doctest::Approx(1.0));
  CHECK(std::fabs(point[0]) + std::fabs(point[2]) + std::fabs(point[3]) < 1e-14);
}

TEST_CASE("threshold temperature inverts the thermal admixture") {
  const double x = 0.007;
  const double tc = critical_temperature(1.0, x);
  CHECK(gibbs_population(1.0 / tc, 1.0) == doctest::Approx(x).epsilon(1e-12));
  // Physical scale: exchange of 58 K puts the isotropic threshold near 23 K.
  CHECK(critical_temperature(1.0, 0.007) * 58.0 ==
        doctest::Approx(23.4115).epsilon(1e-4));
  CHECK_THROWS_AS(critical_temperature(1.0, 0.6), std::domain_error);
}

TEST_CASE("flat-coupling reduction of a dipolar bath") {
  // d = 3, nu = 3: gamma = c^2 sigma0 (2 pi^{3/2} / Gamma(3/2)) a^{-3} / 3,
  // and Gamma(3/2) = sqrt(pi)/2, so the unit-parameter value is 4 pi / 3.
  CHECK(effective_gamma(1.0, 1.0, 3, 3.0, 1.0) ==
        doctest::Approx(4 * kPi / 3).epsilon(1e-12));
  // The radial integral must converge: 2 nu > d.
  CHECK_THROWS_AS(effective_gamma(1.0, 1.0, 3, 1.0, 1.0), std::domain_error);
}

TEST_CASE("principal-value shift agrees with the quadrature oracle") {
  const BathSpec bath{1.5, 1.0, 0.01, 10.0};
  const double omega0 = 1.2, window = 0.9;
  // n p(beta, w) / (2w - omega0) = [n p(beta, w) / 2] / (w - omega0/2), so the
  // subtraction-method oracle integrates half the weight about x0 = omega0/2.
  const double direct = oracles::pv_quadrature(
      [&](double w) {
        return 0.5 * bath.n_density * gibbs_population(bath.beta, w);
      },
      omega0 / 2 - window, omega0 / 2 + window, omega0 / 2, 1e-12);
  const double shift = lamb_shift_pv(bath, omega0, window, 1e-10);
  CHECK(shift == doctest::Approx(direct).epsilon(1e-7));
}
