// Two-magnon eigenstructure of the anisotropic XXZ ring.
//
// Conventions used throughout:
//  * The chain Hamiltonian is H = -(1/2) sum_i (sx sx + sy sy + delta sz sz)
//    on a periodic ring of N sites; magnon number (flipped spins) is conserved.
//  * Momenta live on (0, 2pi]; a zero-total-momentum scattering pair is
//    described by the positive member q in (0, pi).
//  * The two-body scattering matrix for momenta (qj, qk) is
//      S(qj,qk) = -(cos((qj+qk)/2) - delta e^{+i(qj-qk)/2})
//               / (cos((qj+qk)/2) - delta e^{-i(qj-qk)/2}),
//    which is unimodular for real momenta. The phase Theta(qj,qk) is the
//    branch of -i log S lying in (0, 2pi], so Theta(qj,qk)+Theta(qk,qj) = 2pi.
//  * Quantisation on the ring reads N qj = 2pi Ij - sum_{k != j} Theta(qk, qj)
//    with integer quantum numbers Ij in {0,...,N-1}.  (Note the argument
//    order: the phase accumulated by magnon j lists j second.)
#pragma once

#include <complex>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "xxzbath/chain.hpp"

namespace xxzbath {

// ----------------------------------------------------------------------------
// Root sets and state descriptors

struct BetheRootSet {
  int magnon_number = 0;                      // l
  std::vector<int> quantum_numbers;           // Ij, each in {0,...,N-1}
  std::vector<std::complex<double>> roots;    // momenta qj
  double residual = 0.0;                      // max wrapped quantisation defect
  bool converged = true;
};

struct Vacuum {};     // no flipped spins
struct Saturated {};  // every spin flipped (the l = N sector is 1-dimensional)

struct OneMagnon {
  double momentum = 0.0;  // q in [0, 2pi)
};

// Zero-total-momentum scattering pair (q, -q) with q strictly inside (0, pi).
struct TwoMagnonScattering {
  double momentum = 0.0;
};

// Degenerate ends of the zero-momentum two-magnon band. These are the printed
// limiting profiles (amplitude linear in magnon separation, staggered for the
// band top); they are band-edge limits, not finite-N eigenvectors.
enum class EdgeKind { ZeroPlus, PiMinus };

struct TwoMagnonEdge {
  EdgeKind kind = EdgeKind::ZeroPlus;
};

// The isolated two-magnon bound state below the band, present for delta > 1.
struct TwoMagnonBound {};

// Arbitrary solved root set (supported for l <= 2 in amplitude routines).
struct GeneralL {
  BetheRootSet roots;
};

struct MagnonState {
  ChainSpec chain;
  std::variant<Vacuum, OneMagnon, TwoMagnonScattering, TwoMagnonEdge,
               TwoMagnonBound, Saturated, GeneralL>
      body{Vacuum{}};
};

// Number of flipped spins described by the state.
int magnon_number(const MagnonState& state);

// ----------------------------------------------------------------------------
// Scattering kernel

// Unimodular two-body S-matrix; S(q,q) = -1 by continuity at coinciding momenta.
std::complex<double> scattering_matrix(double delta, double qj, double qk);

// Phase Theta(qj,qk) in (0, 2pi] with exp(i Theta) = S(qj,qk).
double scattering_phase(double delta, double qj, double qk);

// ----------------------------------------------------------------------------
// Root solving

// Quantum numbers {I, (N+1-I) mod N} of the I-th zero-momentum pair, I in
// {1,...,N/2} for even N. Pair I has free-fermion momentum 2pi(I-1/2)/N.
std::vector<int> zero_momentum_pair(int n_sites, int index);

// Damped-Newton solution of the quantisation conditions for the given quantum
// numbers (initial guess qj = 2pi Ij / N). If plain Newton stalls, the solver
// retries by continuation in the anisotropy from the delta = 0 free-fermion
// roots, which is needed for some pairs at large |delta|. A set that still
// fails is returned with converged = false and the achieved residual.
//
// For |delta| > 1 the zero-momentum pair phase has an endpoint at
// q* = acos(1/delta) where the two-magnon scattering amplitude equals one.
// When N q* = 2pi (I-1) for some label I, that label's state sits exactly at
// the endpoint and is accepted analytically (endpoint phase value 2pi); any
// other pair label whose iterate lands at q* is rejected as unconverged,
// because its true root has left the real axis (one such label per
// anisotropy with |delta| > 1 — its state is the localized pair instead).
BetheRootSet solve_bethe_roots(const ChainSpec& chain,
                               const std::vector<int>& quantum_numbers);

// Decay parameter z in (0,1) of the bound pair, from the exact finite-N
// condition 1 + z^N = delta (z + z^{N-1}); requires delta > 1.
double bound_state_z(const ChainSpec& chain);

// Root set {+i kappa, -i kappa} of the bound pair, kappa = -log z.
BetheRootSet bound_root_set(const ChainSpec& chain);

// Large-N energy of the bound pair: -N delta / 2 + 2 (delta - 1/delta).
double bound_state_energy_asymptotic(const ChainSpec& chain);

// ----------------------------------------------------------------------------
// Observables

// Energy of the state: -N delta / 2 + sum_j 2 (delta - cos qj), evaluated with
// the complex cosine for complex roots (the bound state uses its exact finite-N
// decay parameter; edge states return the corresponding band-edge energy).
double sector_energy(const MagnonState& state);

// Wavefunction amplitude at the given strictly increasing 1-based positions,
// in each variant's printed closed form:
//   vacuum/saturated -> 1;  one-magnon -> e^{iqx}/sqrt(N);
//   scattering pair  -> e^{-iqd} + sigma e^{+iqd} with d = x2-x1 and
//                       sigma = S(-q, q)  (unnormalised);
//   band edges       -> (-i sqrt(3)/N^2) d, staggered by (-1)^d at the top;
//   bound pair       -> sqrt((delta^2-1)/N) delta^{-d}  (the closed asymptotic
//                       profile; dense_vector uses the exact finite-N one).
std::complex<double> amplitude(const MagnonState& state,
                               const std::vector<int>& positions);

// Normalisation constant A with A^2 sum_{x1<x2} |psi|^2 = 1 over ordered pairs.
// Within 1e-6 pi of the band bottom the printed small-q asymptote
// 1/(2 q N sqrt((N-1)(2N-1)/6)) is returned instead of the direct sum.
double normalization_constant(const MagnonState& state);

// Overlap <W| sum_i sigma_i^+ |state> with the normalised one-magnon q = 0
// state. Scattering pairs are summed directly over the pair basis; the band
// edges and the bound state return their closed forms -i sqrt(3N),
// +i sqrt(3N) and 2 sqrt((delta+1)/(delta-1)).
std::complex<double> transition_amplitude_omega(const MagnonState& state);

// Normalised coefficient vector over the lexicographic sector basis. The bound
// state uses the numerically exact profile z^d + z^{N-d}; scattering and edge
// profiles are the amplitude() forms, unit-normalised.
Eigen::VectorXcd dense_vector(const MagnonState& state);

}  // namespace xxzbath
