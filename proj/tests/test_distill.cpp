// Purification recurrence and rates, cross-checked against the full
// density-matrix simulation of one bilateral round in xxzbath::oracles.
#include <cmath>

#include <doctest.h>

#include "xxzbath/distill.hpp"
#include "xxzbath/oracles.hpp"

using namespace xxzbath;

TEST_CASE("one round reproduces the simulated density-matrix maps") {
  for (int n : {3, 4, 5}) {
    for (const auto& [u, w, v] :
         {std::tuple{0.6, 0.3, 0.25}, {0.5, 0.5, 0.0}, {0.9, 0.05, 0.45}}) {
      const BlockState in{u, w, v, n};
      const DistillationRound round = recurrence_step(in);
      const oracles::CnotRoundResult sim =
          oracles::bilateral_cnot_round(u, w, v, n);
      CHECK(round.state.u == doctest::Approx(sim.u).epsilon(1e-12));
      CHECK(round.state.w == doctest::Approx(sim.w).epsilon(1e-12));
      CHECK(std::fabs(round.state.v - sim.v) < 1e-12);
      CHECK(round.probability == doctest::Approx(sim.probability).epsilon(1e-12));
      // The kept weight is entirely inside the tracked block.
      CHECK(std::fabs(sim.leakage) < 1e-12);
    }
  }
}

TEST_CASE("recurrence closed forms") {
  const BlockState in{0.64, 0.2, 0.3, 10};
  const DistillationRound round = recurrence_step(in);
  CHECK(round.state.u == doctest::Approx(0.64 * 0.64).epsilon(1e-15));
  CHECK(round.state.w == doctest::Approx(0.2 * 0.2 / 10).epsilon(1e-15));
  CHECK(round.state.v == doctest::Approx(2 * 0.3 * 0.3).epsilon(1e-15));
  CHECK(round.probability ==
        doctest::Approx(0.64 * 0.64 + 0.004).epsilon(1e-15));
  // On the infinite ring the one-magnon renewal vanishes.
  const BlockState wide{0.64, 0.2, 0.3, kInfiniteChain};
  CHECK(recurrence_step(wide).state.w == 0.0);
}

TEST_CASE("protocol weight with pure inputs is the telescoped power") {
  const BlockState pure{0.8, 0.0, 0.0, kInfiniteChain};
  const ProtocolTrace trace = run_protocol(pure, 4);
  REQUIRE(trace.rounds.size() == 4);
  CHECK(trace.cumulative ==
        doctest::Approx(std::pow(0.8, (1 << 5) - 2)).epsilon(1e-12));
  // Each round keeps the unnormalised bookkeeping.
  CHECK(trace.rounds[1].state.u == doctest::Approx(std::pow(0.8, 4)));
}

TEST_CASE("stabilizer populations telescope the coherence") {
  const auto [p0, m0] = stabilizer_populations(0, 0.3);
  CHECK(p0 == doctest::Approx(0.8));
  CHECK(m0 == doctest::Approx(0.2));
  for (int r : {1, 3, 6}) {
    const auto [p, m] = stabilizer_populations(r, 0.3);
    CHECK(p + m == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p - m == doctest::Approx(std::pow(0.6, std::exp2(r))).epsilon(1e-12));
  }
  // A perfect input stays a point mass forever.
  const auto [pp, pm] = stabilizer_populations(12, 0.5);
  CHECK(pp == 1.0);
  CHECK(pm == 0.0);
}

TEST_CASE("distillable rate endpoints") {
  const RateResult perfect = distillable_rate(1.0, 0.5);
  CHECK(perfect.rate == 1.0);
  CHECK(perfect.best_round == 0);
  const RateResult dead = distillable_rate(1.0, 0.0);
  CHECK(dead.rate == 0.0);
  const RateResult none = distillable_rate(0.0, 0.0);
  CHECK(none.rate == 0.0);
  // For an in-cone input both the yield weight and the stabilizer purity
  // shrink with every extra round, so the scan's optimum sits at zero; the
  // reported rate must still dominate every scanned round value.
  const RateResult mid = distillable_rate(0.98, 0.42, 20);
  CHECK(mid.rate > 0.0);
  CHECK(mid.rate < 1.0);
  CHECK(mid.best_round == 0);
  for (int r = 0; r <= 20; ++r) {
    const double weight = std::pow(0.98, std::exp2(r + 1) - 2);
    const double purity =
        1 - binary_entropy(stabilizer_populations(r, 0.42).first);
    CHECK(mid.rate >= weight * purity - 1e-15);
  }
}

TEST_CASE("entropy and hashing identities") {
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(binary_entropy(0.11) == doctest::Approx(binary_entropy(0.89)).epsilon(1e-14));
  CHECK(hashing_rate(0.0, 0.0) == 1.0);
  CHECK(hashing_rate(0.5, 0.0) <= 0.0);
  CHECK(hashing_rate(0.11, 0.11) ==
        doctest::Approx(1 - 2 * binary_entropy(0.11)).epsilon(1e-14));
}

TEST_CASE("block state validation") {
  const BlockState fine{0.6, 0.3, 0.25, 8};
  CHECK_NOTHROW(fine.validate());
  const BlockState negative_v{0.6, 0.3, -0.1, 8};
  CHECK_THROWS_AS(negative_v.validate(), std::domain_error);
  const BlockState cone{0.4, 0.3, 0.25, 8};
  CHECK_THROWS_AS(cone.validate(), std::domain_error);
  const BlockState heavy{0.9, 0.3, 0.1, 8};
  CHECK_THROWS_AS(heavy.validate(), std::domain_error);
  const BlockState tiny_ring{1.0, 0.0, 0.5, 1};
  CHECK_THROWS_AS(tiny_ring.validate(), std::domain_error);
}
