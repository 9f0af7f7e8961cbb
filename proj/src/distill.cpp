#include "xxzbath/distill.hpp"

#include <cmath>
#include <stdexcept>

namespace xxzbath {

void BlockState::validate() const {
  if (!(u >= 0.0) || !(w >= 0.0))
    throw std::domain_error("BlockState: u and w must be >= 0");
  if (u + w > 1.0 + 1e-9)
    throw std::domain_error("BlockState: u + w must not exceed 1");
  if (!(v >= 0.0))
    throw std::domain_error("BlockState: protocol inputs need real v >= 0");
  if (2.0 * v > u + 1e-9)
    throw std::domain_error("BlockState: coherence exceeds the GHZ weight");
  if (n_sites != kInfiniteChain && n_sites < 2)
    throw std::domain_error("BlockState: need at least 2 sites");
}

DistillationRound recurrence_step(const BlockState& in) {
  in.validate();
  DistillationRound out;
  out.state.u = in.u * in.u;
  out.state.w = in.n_sites == kInfiniteChain ? 0.0 : in.w * in.w / in.n_sites;
  out.state.v = 2.0 * in.v * in.v;
  out.state.n_sites = in.n_sites;
  out.probability = out.state.u + out.state.w;
  return out;
}

ProtocolTrace run_protocol(const BlockState& initial, int rounds) {
  if (rounds < 0 || rounds > 40)
    throw std::domain_error("run_protocol: rounds must be in 0..40");
  ProtocolTrace trace;
  BlockState cur = initial;
  for (int r = 0; r < rounds; ++r) {
    DistillationRound step = recurrence_step(cur);
    trace.cumulative *= step.probability;
    cur = step.state;
    trace.rounds.push_back(std::move(step));
  }
  return trace;
}

std::pair<double, double> stabilizer_populations(int rounds, double v0) {
  if (rounds < 0 || rounds > 60)
    throw std::domain_error("stabilizer_populations: rounds must be in 0..60");
  if (!(v0 >= 0.0) || v0 > 0.5 + 1e-12)
    throw std::domain_error("stabilizer_populations: v0 must be in [0, 1/2]");
  const double x = std::pow(std::min(2.0 * v0, 1.0), std::exp2(rounds));
  return {0.5 * (1.0 + x), 0.5 * (1.0 - x)};
}

double binary_entropy(double p) {
  if (p < -1e-12 || p > 1.0 + 1e-12)
    throw std::domain_error("binary_entropy: p must be in [0, 1]");
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

RateResult distillable_rate(double u, double v, int max_rounds) {
  if (!(u >= 0.0) || u > 1.0 + 1e-12)
    throw std::domain_error("distillable_rate: u must be in [0, 1]");
  if (!(v >= 0.0) || v > 0.5 + 1e-12)
    throw std::domain_error("distillable_rate: v must be in [0, 1/2]");
  if (max_rounds < 0 || max_rounds > 60)
    throw std::domain_error("distillable_rate: max_rounds must be in 0..60");
  RateResult best;
  if (u == 0.0) return best;  // no GHZ weight: nothing to distil
  const double uc = std::min(u, 1.0);
  for (int r = 0; r <= max_rounds; ++r) {
    const double weight = std::pow(uc, std::exp2(r + 1) - 2.0);
    const double purity = 1.0 - binary_entropy(stabilizer_populations(r, v).first);
    const double rate = weight * purity;
    if (rate > best.rate) {
      best.rate = rate;
      best.best_round = r;
    }
  }
  return best;
}

double hashing_rate(double p_mu, double p_nu) {
  return 1.0 - binary_entropy(p_mu) - binary_entropy(p_nu);
}

}  // namespace xxzbath
