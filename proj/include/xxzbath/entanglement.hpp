// Geometric multipartite entanglement measures for the chain's magnon states
// and for the GHZ block of the open dynamics.
//
// Two families are exposed:
//  * closed-form values of the geometric measure (GME, distance of the pure
//    state itself from product states) and of a convex upper bound for the
//    evolving mixture (CME) on the one- and two-magnon profiles;
//  * honest numerical optimisers — a symmetric product ansatz, a general
//    alternating product-state ascent, and an exhaustive bipartite Schmidt
//    scan — used to cross-check the closed forms.
#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

#include "xxzbath/chain.hpp"

namespace xxzbath {

// Geometric measure of the GHZ block with diagonal weight u and extremal
// coherence v: (u/2)(1 - sqrt(1 - 4 v^2 / u^2)). Nonpositive u returns 0.
// |2v| may exceed u by at most 1e-12 (clamped); beyond that the pair is
// rejected as unphysical.
double gme_ghz_block(double u, double v);

enum class MeasureKind {
  CmeW,    // mixture bound contribution of the one-magnon profile
  GmeW,    // geometric measure of the one-magnon profile
  Cme2M,   // mixture bound contribution of the two-magnon band-edge profile
  Gme2M,   // geometric measure of the two-magnon band-edge profile
};

// Printed closed forms:
//   CmeW  = 1 - ((N-1)/N)^{N-1}          -> 1 - 1/e
//   GmeW  = 1/N                          -> 0
//   Cme2M = 1 - 3 (1 - 2/N)^{N-2}        -> 1 - 3/e^2
//   Gme2M = 1 - l^2, l = 1 - 1/(4N) - 1/(2N^3)   -> 0
// with the arrows giving the kInfiniteChain values. N >= 3 is required
// (N >= 4 for the two-magnon kinds).
double closed_form_measure(MeasureKind kind, int n_sites);

// Convex upper bound for the mixture with populations w = (w0, w1, w2(0+),
// w2(pi-)): w1 * CmeW + (w2(0+) + w2(pi-)) * Cme2M. The vacuum weight is
// separable and contributes nothing.
double cme_upper_bound_mixture(const Eigen::Vector4d& w, int n_sites);

struct OverlapResult {
  double overlap_sq = 0.0;  // best |<product|state>|^2
  double theta = 0.0;       // optimal angle (symmetric ansatz only)
  int iterations = 0;
  bool converged = false;
};

// Best overlap with the one-parameter symmetric product state
// prod_i (cos(theta)|0> + sin(theta)|1>), for an l-magnon sector vector
// (l inferred from the length: N -> 1, N(N-1)/2 -> 2). Golden-section search
// plus a Newton polish to 1e-12 in theta.
OverlapResult optimize_symmetric_product_overlap(const Eigen::VectorXcd& sector_vec,
                                                 int n_sites);

// Best overlap with an arbitrary product state, by alternating closed-form
// single-site updates (monotone ascent) from `starts` deterministic seeds;
// start 0 is the best symmetric ansatz, the rest are pseudo-random. The input
// is a full 2^N coefficient vector (see embed_sector_vector).
OverlapResult optimize_product_overlap(const Eigen::VectorXcd& full_state,
                                       int n_sites, int starts = 32,
                                       std::uint64_t seed = 1);

// Largest reduced-density eigenvalue over every bipartition of the ring,
// for a full 2^N pure state; N <= 14.
double max_bipartite_schmidt(const Eigen::VectorXcd& full_state, int n_sites);

// Both common conversions from a maximal Schmidt weight to a measure.
enum class SchmidtConvention { OneMinusLambda, OneMinusLambdaSq };
double geometric_measure(double lambda_max, SchmidtConvention convention);

// Place an l-magnon sector vector (lexicographic ordered-tuple basis) into
// the full 2^N computational basis.
Eigen::VectorXcd embed_sector_vector(const Eigen::VectorXcd& sector_vec,
                                     int n_sites, int l);

// (|0...0> + |1...1>)/sqrt(2) in the full basis.
Eigen::VectorXcd ghz_full_vector(int n_sites);

}  // namespace xxzbath
