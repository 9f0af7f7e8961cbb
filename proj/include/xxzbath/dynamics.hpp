// Open-system dynamics of the chain coupled to a thermal spin bath.
//
// The bath enters through a flat spectral weight: every allowed transition of
// energy 2*omega relaxes with a rate proportional to k = pi * gamma * f * n,
// weighted by the equilibrium upper-level population p(beta, omega) =
// 1 / (1 + e^{2 beta omega}) of a two-level system with that splitting.
//
// Two reduced descriptions are evolved in closed form:
//  * the GHZ block (u, v): diagonal weight u on the |0...0>,|1...1> pair and
//    the extremal coherence v between them;
//  * the population vector w = (w0, w1, w2(0+), w2(pi-)) over the vacuum,
//    one-magnon and the two dominant two-magnon channels, governed by a
//    4-level Markov generator whose nonzero spectrum is the root set of an
//    explicit cubic.
#pragma once

#include <array>

#include <Eigen/Dense>

namespace xxzbath {

// Equilibrium upper-level population across a splitting 2*omega; overflow-safe
// for any finite arguments. p(0, omega) = 1/2, p(beta, 0) = 1/2,
// p(beta, omega) + p(beta, -omega) = 1.
double gibbs_population(double beta, double omega);

// Effective flat coupling from a d-dimensional dipolar bath with coupling
// amplitude c, spin density sigma0, falloff exponent nu and short-distance
// cutoff a:  gamma = c^2 sigma0 (2 pi^{d/2} / Gamma(d/2)) a^{d-2nu} / (2nu-d).
// Requires 2 nu > d for the radial integral to converge.
double effective_gamma(double c, double sigma0, int d, double nu, double a);

struct BathSpec {
  double beta = 1.0;        // inverse temperature; 0 = infinite temperature
  double gamma = 1.0;       // flat coupling strength
  double f = 0.01;          // filling fraction of resonant bath modes
  double n_density = 10.0;  // bath mode density

  // Base relaxation rate k multiplying every channel.
  double rate_scale() const;
  void validate() const;
};

// ----------------------------------------------------------------------------
// GHZ block

struct GhzSectorState {
  double u = 1.0;  // weight of the diagonal GHZ pair
  double v = 0.5;  // extremal coherence between |0...0> and |1...1>
  // False when the pair (u, v) has left the physical cone (u < 0 or 2v > u,
  // beyond rounding); consumers should clamp or zero downstream measures.
  bool physical = true;
};

// Closed-form relaxation of the GHZ block:
//   u(t) = 1 - 2 p (1 - e^{-k t}),   v(t) = (1/2) e^{-k t p},
// with p = gibbs_population(beta, 1 - delta). Satisfies
//   du/dt = b (1-u) - a (1+u),  dv/dt = -k p v,  a = k p, b = k (1-p).
GhzSectorState ghz_sector_evolve(const BathSpec& bath, double delta, double t);

// Population of a two-level system relaxing between rates up/down starting
// from the upper level: 1 - [down/(down+up)] (1 - e^{-2t(down+up)}).
// Both rates zero returns the initial population unchanged.
double relaxation_population(double t, double rate_up, double rate_down);

// Extremal coherence decaying at twice the dephasing rate.
double coherence_decay_extremal(double t, double rate, double initial);

// ----------------------------------------------------------------------------
// 4-level population dynamics

// Star-shaped generator around the one-magnon level. Rates into w1 are a.,
// rates out of w1 are b.; channel 1 couples w0, channel 2 the 0+ pair band
// edge, channel 3 the pi- one. Columns sum to zero exactly.
struct MarkovGenerator {
  double a1 = 0, b1 = 0;  // w0 <-> w1
  double a2 = 0, b2 = 0;  // w2(0+) <-> w1
  double a3 = 0, b3 = 0;  // w2(pi-) <-> w1

  Eigen::Matrix4d matrix() const;
};

// Rates: a1 = k p(1-delta), b1 = k p(delta-1); the two-magnon channels carry
// the threefold transition multiplicity: b2 = 3k p(1-delta), a2 = 3k p(delta-1),
// b3 = 3k p(-3-delta), a3 = 3k p(3+delta).
MarkovGenerator build_markov_generator(const BathSpec& bath, double delta);

struct GeneratorSpectrum {
  // {0, l1, l2, l3} with the nonzero eigenvalues sorted descending (<= 0).
  std::array<double, 4> eigenvalues{};
  // Matching right eigenvectors as columns; column 0 is the stationary
  // direction. Not populated meaningfully when degenerate is set.
  Eigen::Matrix4d vectors = Eigen::Matrix4d::Zero();
  // True when eigenvalues collide within 1e-10 or the closed-form eigenvector
  // expression degenerates; evolution then falls back to a matrix exponential.
  bool degenerate = false;
};

// Nonzero eigenvalues from the closed cubic
//   l^3 + (e1+B) l^2 + (e2 + B e1 - sum a_i b_i) l
//       + (e3 + a2 a3 b1 + a1 a3 b2 + a1 a2 b3) = 0,
// where B = b1+b2+b3, e1..e3 are the elementary symmetric sums of a1..a3.
// Eigenvectors are (b1/(a1+l), 1, b2/(a2+l), b3/(a3+l)) where defined.
GeneratorSpectrum generator_spectrum(const MarkovGenerator& gen);

// w(t) = e^{M t} w0 via the spectral form, or a dense matrix exponential when
// the spectrum is flagged degenerate. t = 0 returns w0 verbatim.
Eigen::Vector4d evolve_populations(const MarkovGenerator& gen,
                                   const Eigen::Vector4d& w0, double t);

// Normalised kernel of the generator. With every backward rate zero this is
// the one-magnon point mass (0,1,0,0): nothing feeds the other levels, and
// population already in w1 only leaves through rates that are themselves zero.
Eigen::Vector4d stationary_distribution(const MarkovGenerator& gen);

// Temperature at which the equilibrium admixture across a splitting 2*omega
// reaches the threshold x in (0, 1/2):  T = 2 omega / log((1-x)/x).
double critical_temperature(double omega, double x);

// Diagnostic principal-value energy shift: PV integral of
//   n_density * p(beta, w) / (2w - omega0)
// over [omega0/2 - window, omega0/2 + window], by symmetric excision with the
// excision radius halved until the value is stable to tol.
double lamb_shift_pv(const BathSpec& bath, double omega0, double window,
                     double tol);

}  // namespace xxzbath
