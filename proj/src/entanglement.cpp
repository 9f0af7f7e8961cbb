#include "xxzbath/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include <Eigen/SVD>
#include <fmt/format.h>

#include "xxzbath/chain.hpp"
#include "xxzbath/errors.hpp"
#include "xxzbath/rng.hpp"

namespace xxzbath {
namespace {
constexpr double kPi = std::numbers::pi;

int require_finite_n(MeasureKind kind, int n_sites) {
  const int min_n = (kind == MeasureKind::Cme2M || kind == MeasureKind::Gme2M) ? 4 : 3;
  if (n_sites < min_n)
    throw std::domain_error(
        fmt::format("closed_form_measure: need at least {} sites", min_n));
  return n_sites;
}

struct SparseState {
  std::vector<std::uint32_t> idx;
  std::vector<std::complex<double>> amp;
};

SparseState sparsify(const Eigen::VectorXcd& v) {
  SparseState s;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::norm(v[i]) > 1e-60) {
      s.idx.push_back(static_cast<std::uint32_t>(i));
      s.amp.push_back(v[i]);
    }
  return s;
}

Eigen::VectorXcd checked_full_state(const Eigen::VectorXcd& state, int n_sites,
                                    int max_sites) {
  if (n_sites < 2) throw std::domain_error("need at least 2 sites");
  if (n_sites > max_sites)
    throw ResourceCapError(
        fmt::format("full-space routine capped at {} sites", max_sites));
  if (state.size() != (Eigen::Index{1} << n_sites))
    throw std::domain_error("state vector length must be 2^N");
  const double nrm = state.norm();
  if (nrm < 1e-12) throw std::domain_error("state vector is numerically zero");
  return state / nrm;
}

}  // namespace

double gme_ghz_block(double u, double v) {
  if (!std::isfinite(u) || !std::isfinite(v))
    throw std::domain_error("gme_ghz_block: arguments must be finite");
  if (u <= 0.0) return 0.0;
  double disc = 1.0 - 4.0 * v * v / (u * u);
  if (disc < 0.0) {
    if (disc < -1e-12)
      throw std::domain_error("gme_ghz_block: coherence exceeds the physical cone");
    disc = 0.0;
  }
  return 0.5 * u * (1.0 - std::sqrt(disc));
}

double closed_form_measure(MeasureKind kind, int n_sites) {
  const bool infinite = n_sites == kInfiniteChain;
  switch (kind) {
    case MeasureKind::CmeW: {
      if (infinite) return 1.0 - 1.0 / std::numbers::e;
      const double n = require_finite_n(kind, n_sites);
      return 1.0 - std::pow((n - 1.0) / n, n - 1.0);
    }
    case MeasureKind::GmeW: {
      if (infinite) return 0.0;
      return 1.0 / require_finite_n(kind, n_sites);
    }
    case MeasureKind::Cme2M: {
      if (infinite) return 1.0 - 3.0 / (std::numbers::e * std::numbers::e);
      const double n = require_finite_n(kind, n_sites);
      return 1.0 - 3.0 * std::pow(1.0 - 2.0 / n, n - 2.0);
    }
    case MeasureKind::Gme2M: {
      if (infinite) return 0.0;
      const double n = require_finite_n(kind, n_sites);
      const double l = 1.0 - 1.0 / (4.0 * n) - 1.0 / (2.0 * n * n * n);
      return 1.0 - l * l;
    }
  }
  throw std::logic_error("closed_form_measure: unknown kind");
}

double cme_upper_bound_mixture(const Eigen::Vector4d& w, int n_sites) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    if (w[i] < -1e-9 || w[i] > 1.0 + 1e-9)
      throw std::domain_error("cme_upper_bound_mixture: weights must be in [0,1]");
    sum += w[i];
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::domain_error("cme_upper_bound_mixture: weights must sum to 1");
  const double w1 = std::max(w[1], 0.0);
  const double w2 = std::max(w[2], 0.0) + std::max(w[3], 0.0);
  return w1 * closed_form_measure(MeasureKind::CmeW, n_sites) +
         w2 * closed_form_measure(MeasureKind::Cme2M, n_sites);
}

OverlapResult optimize_symmetric_product_overlap(const Eigen::VectorXcd& sector_vec,
                                                 int n_sites) {
  if (n_sites < 2)
    throw std::domain_error("optimize_symmetric_product_overlap: need N >= 2");
  int l;
  if (sector_vec.size() == n_sites)
    l = 1;
  else if (sector_vec.size() == binomial(n_sites, 2))
    l = 2;
  else
    throw std::domain_error(
        "optimize_symmetric_product_overlap: vector length matches neither the "
        "1- nor the 2-magnon sector");

  const double s_abs2 = std::norm(sector_vec.sum());
  OverlapResult out;
  if (s_abs2 == 0.0) {
    out.overlap_sq = 0.0;
    out.theta = 0.25 * kPi;
    out.converged = true;
    return out;
  }

  const auto value = [&](double th) {
    return s_abs2 * std::pow(std::sin(th), 2 * l) *
           std::pow(std::cos(th), 2 * (n_sites - l));
  };

  // Golden-section maximisation on (0, pi/2).
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 0.0, b = 0.5 * kPi;
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = value(c), fd = value(d);
  int evals = 2;
  while (b - a > 1e-10) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = value(d);
    }
    ++evals;
  }
  double th = 0.5 * (a + b);

  // Newton polish on the stationarity condition
  // l cos^2(theta) - (N-l) sin^2(theta) = 0 (the angular factor of dV/dtheta).
  bool converged = false;
  for (int i = 0; i < 50; ++i) {
    const double s = std::sin(th), cth = std::cos(th);
    const double g = l * cth * cth - (n_sites - l) * s * s;
    const double gp = -2.0 * n_sites * s * cth;
    if (std::abs(gp) < 1e-300) break;
    const double step = g / gp;
    th -= step;
    ++evals;
    if (std::abs(step) < 1e-12) {
      converged = true;
      break;
    }
  }

  out.overlap_sq = value(th);
  out.theta = th;
  out.iterations = evals;
  out.converged = converged;
  return out;
}

OverlapResult optimize_product_overlap(const Eigen::VectorXcd& full_state,
                                       int n_sites, int starts,
                                       std::uint64_t seed) {
  if (starts < 1) throw std::domain_error("optimize_product_overlap: starts >= 1");
  const Eigen::VectorXcd psi = checked_full_state(full_state, n_sites, 20);
  const SparseState sp = sparsify(psi);

  // Popcounts for the symmetric start.
  std::vector<int> pop(sp.idx.size());
  for (std::size_t i = 0; i < sp.idx.size(); ++i)
    pop[i] = __builtin_popcount(sp.idx[i]);

  const auto symmetric_value = [&](double th) {
    const double s = std::sin(th), c = std::cos(th);
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < sp.idx.size(); ++i)
      acc += sp.amp[i] * std::pow(s, pop[i]) * std::pow(c, n_sites - pop[i]);
    return std::norm(acc);
  };

  using Spinor = std::array<std::complex<double>, 2>;
  std::vector<Spinor> site(n_sites);

  const auto overlap = [&]() {
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < sp.idx.size(); ++i) {
      std::complex<double> prod = sp.amp[i];
      for (int j = 0; j < n_sites; ++j)
        prod *= std::conj(site[j][(sp.idx[i] >> j) & 1u]);
      acc += prod;
    }
    return acc;
  };

  OverlapResult best;
  int total_sweeps = 0;
  for (int start = 0; start < starts; ++start) {
    if (start == 0) {
      // Coarse scan for the best symmetric angle.
      double th_best = 0.0, v_best = -1.0;
      for (int i = 0; i <= 256; ++i) {
        const double th = 0.5 * kPi * i / 256.0;
        const double v = symmetric_value(th);
        if (v > v_best) {
          v_best = v;
          th_best = th;
        }
      }
      for (auto& s : site) s = {std::cos(th_best), std::sin(th_best)};
    } else {
      SplitMix64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(start));
      for (auto& s : site) {
        const Spinor raw{std::complex<double>(rng.next_double() - 0.5,
                                              rng.next_double() - 0.5),
                         std::complex<double>(rng.next_double() - 0.5,
                                              rng.next_double() - 0.5)};
        const double nrm = std::sqrt(std::norm(raw[0]) + std::norm(raw[1]));
        s = {raw[0] / nrm, raw[1] / nrm};
      }
    }

    double lam = std::norm(overlap());
    bool conv = false;
    int sweeps = 0;
    for (; sweeps < 500; ++sweeps) {
      for (int j = 0; j < n_sites; ++j) {
        std::complex<double> a0 = 0.0, a1 = 0.0;
        for (std::size_t i = 0; i < sp.idx.size(); ++i) {
          std::complex<double> prod = sp.amp[i];
          for (int m = 0; m < n_sites; ++m) {
            if (m == j) continue;
            prod *= std::conj(site[m][(sp.idx[i] >> m) & 1u]);
          }
          if ((sp.idx[i] >> j) & 1u)
            a1 += prod;
          else
            a0 += prod;
        }
        const double nrm = std::sqrt(std::norm(a0) + std::norm(a1));
        if (nrm < 1e-300) continue;  // site does not constrain the overlap
        site[j] = {a0 / nrm, a1 / nrm};
      }
      const double lam_new = std::norm(overlap());
      if (lam_new - lam <= 1e-13 * std::max(1.0, lam_new)) {
        lam = std::max(lam, lam_new);
        conv = true;
        break;
      }
      lam = lam_new;
    }
    total_sweeps += sweeps;
    if (lam > best.overlap_sq) {
      best.overlap_sq = lam;
      best.converged = conv;
    }
  }
  best.iterations = total_sweeps;
  return best;
}

double max_bipartite_schmidt(const Eigen::VectorXcd& full_state, int n_sites) {
  const Eigen::VectorXcd psi = checked_full_state(full_state, n_sites, 14);
  const SparseState sp = sparsify(psi);
  const std::uint32_t full = (n_sites == 32) ? ~0u : ((1u << n_sites) - 1u);

  double lam_max = 0.0;
  // Every bipartition once: subsets containing site 0.
  for (std::uint32_t cut = 0; cut < (1u << (n_sites - 1)); ++cut) {
    const std::uint32_t mask_a = (cut << 1) | 1u;  // bit 0 always in A
    if (mask_a == full) continue;
    std::unordered_map<std::uint32_t, int> rows, cols;
    std::vector<std::pair<std::pair<int, int>, std::complex<double>>> entries;
    for (std::size_t i = 0; i < sp.idx.size(); ++i) {
      const std::uint32_t a = sp.idx[i] & mask_a;
      const std::uint32_t b = sp.idx[i] & ~mask_a & full;
      const int ra = rows.try_emplace(a, static_cast<int>(rows.size())).first->second;
      const int cb = cols.try_emplace(b, static_cast<int>(cols.size())).first->second;
      entries.push_back({{ra, cb}, sp.amp[i]});
    }
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows.size(), cols.size());
    for (const auto& e : entries) m(e.first.first, e.first.second) = e.second;
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const double s0 = svd.singularValues()[0];
    lam_max = std::max(lam_max, s0 * s0);
  }
  return lam_max;
}

double geometric_measure(double lambda_max, SchmidtConvention convention) {
  if (lambda_max < -1e-9 || lambda_max > 1.0 + 1e-9)
    throw std::domain_error("geometric_measure: lambda must be in [0, 1]");
  const double l = std::clamp(lambda_max, 0.0, 1.0);
  return convention == SchmidtConvention::OneMinusLambda ? 1.0 - l : 1.0 - l * l;
}

Eigen::VectorXcd embed_sector_vector(const Eigen::VectorXcd& sector_vec,
                                     int n_sites, int l) {
  if (n_sites < 1 || n_sites > 24)
    throw std::domain_error("embed_sector_vector: N must be in 1..24");
  if (sector_vec.size() != binomial(n_sites, l))
    throw std::domain_error("embed_sector_vector: wrong sector length");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_sites);
  const auto basis = sector_basis(n_sites, l);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::uint32_t mask = 0;
    for (int x : basis[i]) mask |= 1u << (x - 1);
    out[mask] = sector_vec[static_cast<Eigen::Index>(i)];
  }
  return out;
}

Eigen::VectorXcd ghz_full_vector(int n_sites) {
  if (n_sites < 2 || n_sites > 24)
    throw std::domain_error("ghz_full_vector: N must be in 2..24");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(Eigen::Index{1} << n_sites);
  out[0] = 1.0 / std::sqrt(2.0);
  out[(Eigen::Index{1} << n_sites) - 1] = 1.0 / std::sqrt(2.0);
  return out;
}

}  // namespace xxzbath
