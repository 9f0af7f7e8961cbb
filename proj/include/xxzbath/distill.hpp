// Recurrence (bilateral-CNOT) purification of the GHZ block and the
// associated distillation yields.
#pragma once

#include <utility>
#include <vector>

#include "xxzbath/chain.hpp"

namespace xxzbath {

// Block of the evolving density matrix relevant to purification: diagonal
// weight u on the GHZ pair, weight w spread evenly over the N one-magnon
// channels, and the extremal GHZ coherence v. Protocol inputs require real
// v >= 0 (the round map sends v to v^2 + |v|^2, which stays real nonnegative
// exactly on that domain). n_sites may be kInfiniteChain, making the
// one-magnon renewal w^2/N vanish.
struct BlockState {
  double u = 1.0;
  double w = 0.0;
  double v = 0.0;
  int n_sites = kInfiniteChain;

  void validate() const;
};

struct DistillationRound {
  BlockState state;           // unnormalised coefficients after the round
  double probability = 1.0;   // postselection weight of this round
};

// One purification round on two identical copies:
//   u' = u^2,   w' = w^2 / N,   v' = 2 v^2,   probability p = u' + w'.
// Coefficients are deliberately kept unnormalised so that round
// probabilities multiply: with w = v = 0, the cumulative weight after r
// rounds is u^{2^{r+1} - 2}.
DistillationRound recurrence_step(const BlockState& in);

struct ProtocolTrace {
  std::vector<DistillationRound> rounds;
  double cumulative = 1.0;  // product of the round probabilities
};

ProtocolTrace run_protocol(const BlockState& initial, int rounds);

// Populations of the two stabilizer outcomes after r rounds from initial
// coherence v0: ((1 + (2 v0)^{2^r})/2, (1 - (2 v0)^{2^r})/2).
std::pair<double, double> stabilizer_populations(int rounds, double v0);

struct RateResult {
  double rate = 0.0;
  int best_round = 0;
};

// Best yield-weighted stabilizer purity over r in {0,...,max_rounds}:
//   max_r u^{2^{r+1} - 2} (1 - h2(P+(r))),
// with h2 the binary entropy in bits; ties resolve to the smaller r.
// u = 0 aborts with rate 0.
RateResult distillable_rate(double u, double v, int max_rounds = 30);

// Two-way hashing yield 1 - h2(p_mu) - h2(p_nu); may be negative, in which
// case the protocol certifies nothing.
double hashing_rate(double p_mu, double p_nu);

// Binary entropy in bits; h2(0) = h2(1) = 0.
double binary_entropy(double p);

}  // namespace xxzbath
