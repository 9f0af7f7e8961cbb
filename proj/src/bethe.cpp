#include "xxzbath/bethe.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace xxzbath {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::complex<double> kI{0.0, 1.0};

// Wrap to (-pi, pi].
double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

void check_positions(const MagnonState& s, const std::vector<int>& x) {
  const int l = magnon_number(s);
  if (static_cast<int>(x.size()) != l)
    throw std::domain_error(fmt::format(
        "amplitude: expected {} positions, got {}", l, x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 1 || x[i] > s.chain.n_sites)
      throw std::domain_error("amplitude: position outside 1..N");
    if (i > 0 && x[i] <= x[i - 1])
      throw std::domain_error("amplitude: positions must be strictly increasing");
  }
}

double scattering_momentum_checked(const TwoMagnonScattering& st) {
  if (!(st.momentum > 0.0) || !(st.momentum < kPi))
    throw std::domain_error(
        "scattering pair momentum must lie strictly inside (0, pi); "
        "use the band-edge states for the degenerate ends");
  return st.momentum;
}

double require_bound_regime(const ChainSpec& chain) {
  if (!(chain.delta > 1.0))
    throw std::domain_error("bound pair exists only for delta > 1");
  return chain.delta;
}

// sigma = S(-q, q): relative weight of the reflected wave in the pair profile.
std::complex<double> pair_sigma(double delta, double q) {
  return scattering_matrix(delta, -q, q);
}

// Unnormalised pair profile over separation d = x2 - x1 for each two-magnon
// variant, in the conventions documented on amplitude().
std::complex<double> pair_profile(const MagnonState& s, int d) {
  const int n = s.chain.n_sites;
  const double delta = s.chain.delta;
  if (const auto* sc = std::get_if<TwoMagnonScattering>(&s.body)) {
    const double q = scattering_momentum_checked(*sc);
    const auto sigma = pair_sigma(delta, q);
    return std::exp(-kI * (q * d)) + sigma * std::exp(kI * (q * d));
  }
  if (const auto* ed = std::get_if<TwoMagnonEdge>(&s.body)) {
    const double scale = std::sqrt(3.0) / (static_cast<double>(n) * n);
    std::complex<double> a = -kI * (scale * d);
    if (ed->kind == EdgeKind::PiMinus && (d % 2 != 0)) a = -a;
    return a;
  }
  if (std::holds_alternative<TwoMagnonBound>(s.body)) {
    require_bound_regime(s.chain);
    return std::sqrt((delta * delta - 1.0) / n) * std::pow(delta, -d);
  }
  throw std::logic_error("pair_profile: not a closed-form two-magnon state");
}

// General two-magnon Bethe profile for a solved real-root pair (q1, q2):
// psi(x1, x2) = e^{i(q1 x1 + q2 x2)} + S(q2, q1) e^{i(q2 x1 + q1 x2)}.
std::complex<double> general_pair_amp(double delta, double q1, double q2,
                                      int x1, int x2) {
  const auto s = scattering_matrix(delta, q2, q1);
  return std::exp(kI * (q1 * x1 + q2 * x2)) +
         s * std::exp(kI * (q2 * x1 + q1 * x2));
}

struct GeneralRoots {
  int l;
  std::vector<std::complex<double>> q;
};

GeneralRoots checked_general(const GeneralL& g, const ChainSpec& chain) {
  const auto& rs = g.roots;
  if (rs.magnon_number != static_cast<int>(rs.roots.size()))
    throw std::domain_error("root set: magnon number does not match root count");
  if (rs.magnon_number > chain.n_sites)
    throw std::domain_error("root set: more magnons than sites");
  return {rs.magnon_number, rs.roots};
}

bool roots_are_real(const GeneralRoots& gr) {
  for (const auto& q : gr.q)
    if (std::abs(q.imag()) > 1e-12) return false;
  return true;
}

}  // namespace

int magnon_number(const MagnonState& state) {
  struct V {
    int n;
    int operator()(const Vacuum&) const { return 0; }
    int operator()(const Saturated&) const { return n; }
    int operator()(const OneMagnon&) const { return 1; }
    int operator()(const TwoMagnonScattering&) const { return 2; }
    int operator()(const TwoMagnonEdge&) const { return 2; }
    int operator()(const TwoMagnonBound&) const { return 2; }
    int operator()(const GeneralL& g) const { return g.roots.magnon_number; }
  };
  return std::visit(V{state.chain.n_sites}, state.body);
}

// ----------------------------------------------------------------------------
// Scattering kernel

std::complex<double> scattering_matrix(double delta, double qj, double qk) {
  if (wrap_angle(qj - qk) == 0.0) return {-1.0, 0.0};
  if (delta == 0.0) return {-1.0, 0.0};
  const double c = std::cos(0.5 * (qj + qk));
  const std::complex<double> phase = std::polar(1.0, 0.5 * (qj - qk));
  const std::complex<double> num = c - delta * phase;
  const std::complex<double> den = c - delta * std::conj(phase);
  return -num / den;
}

double scattering_phase(double delta, double qj, double qk) {
  const auto s = scattering_matrix(delta, qj, qk);
  return kPi + std::arg(-s);  // branch in (0, 2pi]
}

// ----------------------------------------------------------------------------
// Root solving

std::vector<int> zero_momentum_pair(int n_sites, int index) {
  if (n_sites < 2 || n_sites % 2 != 0)
    throw std::domain_error("zero_momentum_pair: needs an even ring");
  if (index < 1 || index > n_sites / 2)
    throw std::domain_error(
        fmt::format("zero_momentum_pair: index must be in 1..{}", n_sites / 2));
  return {index, (n_sites + 1 - index) % n_sites};
}

namespace {

// Quantisation defects F_j = N q_j - 2 pi I_j + sum_{k != j} Theta(q_k, q_j).
Eigen::VectorXd quantisation_defect(double delta, int n_sites,
                                    const std::vector<int>& qn,
                                    const Eigen::VectorXd& q) {
  const int l = static_cast<int>(qn.size());
  Eigen::VectorXd f(l);
  for (int j = 0; j < l; ++j) {
    double acc = n_sites * q[j] - 2.0 * kPi * qn[j];
    for (int k = 0; k < l; ++k)
      if (k != j) acc += scattering_phase(delta, q[k], q[j]);
    f[j] = acc;
  }
  return f;
}

struct NewtonResult {
  Eigen::VectorXd q;
  double raw_residual;
};

NewtonResult damped_newton(double delta, int n_sites,
                           const std::vector<int>& qn, Eigen::VectorXd q) {
  const int l = static_cast<int>(q.size());
  const double h = 1e-7;
  Eigen::VectorXd f = quantisation_defect(delta, n_sites, qn, q);
  double res = f.cwiseAbs().maxCoeff();
  for (int iter = 0; iter < 200 && res > 1e-12; ++iter) {
    Eigen::MatrixXd jac(l, l);
    for (int j = 0; j < l; ++j) {
      Eigen::VectorXd qp = q, qm = q;
      qp[j] += h;
      qm[j] -= h;
      jac.col(j) = (quantisation_defect(delta, n_sites, qn, qp) -
                    quantisation_defect(delta, n_sites, qn, qm)) /
                   (2.0 * h);
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(-f);
    double scale = 1.0;
    bool improved = false;
    while (scale > 1e-6) {
      const Eigen::VectorXd qn_try = q + scale * step;
      const Eigen::VectorXd f_try = quantisation_defect(delta, n_sites, qn, qn_try);
      const double r_try = f_try.cwiseAbs().maxCoeff();
      if (r_try < res * (1.0 - 1e-4 * scale)) {
        q = qn_try;
        f = f_try;
        res = r_try;
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;  // stalled; caller decides on a fallback
  }
  return {q, res};
}

}  // namespace

BetheRootSet solve_bethe_roots(const ChainSpec& chain,
                               const std::vector<int>& quantum_numbers) {
  chain.validate();
  const int n = chain.n_sites;
  const int l = static_cast<int>(quantum_numbers.size());
  if (l > n) throw std::domain_error("solve_bethe_roots: more magnons than sites");
  for (int qn : quantum_numbers)
    if (qn < 0 || qn >= n)
      throw std::domain_error("solve_bethe_roots: quantum numbers must lie in 0..N-1");

  BetheRootSet out;
  out.magnon_number = l;
  out.quantum_numbers = quantum_numbers;
  if (l == 0) return out;

  if (l == 1) {
    out.roots = {std::complex<double>(2.0 * kPi * quantum_numbers[0] / n, 0.0)};
    out.residual = 0.0;
    return out;
  }

  // Plain damped Newton from the non-interacting guess q_j = 2 pi I_j / N.
  Eigen::VectorXd q0(l);
  for (int j = 0; j < l; ++j) q0[j] = 2.0 * kPi * quantum_numbers[j] / n;
  NewtonResult best = damped_newton(chain.delta, n, quantum_numbers, q0);

  if (best.raw_residual > 1e-12 && chain.delta != 0.0) {
    // Continuation in the anisotropy from the exactly known delta = 0 roots
    // q_j = (2 pi I_j - (l-1) pi) / N.  Some pairs (large quantum number at
    // large |delta|) are outside the plain iteration's basin.
    Eigen::VectorXd q(l);
    for (int j = 0; j < l; ++j)
      q[j] = (2.0 * kPi * quantum_numbers[j] - (l - 1) * kPi) / n;
    const int steps = 8;
    NewtonResult walk{q, 0.0};
    for (int s = 1; s <= steps; ++s) {
      const double d_now = chain.delta * s / steps;
      walk = damped_newton(d_now, n, quantum_numbers, walk.q);
    }
    if (walk.raw_residual < best.raw_residual) best = walk;
  }

  // For |delta| > 1 the scattering phase has a branch endpoint (S = 1) at
  // q* = acos(1/delta), and a zero-total-momentum pair can have its root land
  // exactly there.  The quantisation then holds with the endpoint value
  // Theta = 2 pi for exactly one label, which Newton cannot settle on because
  // the phase jumps across q*;  that owning label is accepted analytically.
  // The neighbouring label's equation only has an out-of-branch limit at q*,
  // so its near-endpoint stalls are rejected, keeping one label per state.
  bool rejected_at_branch = false;
  if (l == 2 && std::abs(chain.delta) > 1.0 && quantum_numbers[0] >= 1 &&
      quantum_numbers[0] <= n / 2 &&
      quantum_numbers == zero_momentum_pair(n, quantum_numbers[0])) {
    const int index = quantum_numbers[0];
    const double q_star = std::acos(1.0 / chain.delta);
    const bool owner = std::abs(n * q_star - 2.0 * kPi * (index - 1)) < 1e-8;
    if (owner) {
      best.q[0] = q_star;
      best.q[1] = index == 1 ? -q_star : 2.0 * kPi - q_star;
    } else if (std::abs(best.q[0] - q_star) < 1e-6) {
      rejected_at_branch = true;  // this label's root left the real axis
    }
  }

  out.roots.resize(l);
  for (int j = 0; j < l; ++j) out.roots[j] = {best.q[j], 0.0};
  const Eigen::VectorXd f = quantisation_defect(chain.delta, n, quantum_numbers, best.q);
  double wrapped = 0.0;
  for (int j = 0; j < l; ++j) wrapped = std::max(wrapped, std::abs(wrap_angle(f[j])));
  out.residual = wrapped;
  out.converged = !rejected_at_branch && wrapped < 1e-10;
  return out;
}

double bound_state_z(const ChainSpec& chain) {
  chain.validate();
  const double delta = require_bound_regime(chain);
  const int n = chain.n_sites;
  // 1 + z^N = delta (z + z^{N-1}) has exactly one root in (0, 1/delta):
  // g(0) = 1 > 0 and g(1/delta) = delta^{-N} (1 - delta^2) < 0.
  const auto g = [&](double z) {
    return 1.0 + std::pow(z, n) - delta * (z + std::pow(z, n - 1));
  };
  double lo = 0.0, hi = 1.0 / delta;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  double z = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {  // Newton polish
    const double gp = n * std::pow(z, n - 1) - delta -
                      delta * (n - 1) * std::pow(z, n - 2);
    z -= g(z) / gp;
  }
  return z;
}

BetheRootSet bound_root_set(const ChainSpec& chain) {
  const double z = bound_state_z(chain);
  const double kappa = -std::log(z);
  BetheRootSet out;
  out.magnon_number = 2;
  out.quantum_numbers = {0, 0};  // not meaningful for the complex pair
  out.roots = {std::complex<double>(0.0, kappa), std::complex<double>(0.0, -kappa)};
  out.residual = std::abs(1.0 + std::pow(z, chain.n_sites) -
                          chain.delta * (z + std::pow(z, chain.n_sites - 1)));
  out.converged = true;
  return out;
}

double bound_state_energy_asymptotic(const ChainSpec& chain) {
  chain.validate();
  const double delta = require_bound_regime(chain);
  return -chain.n_sites * delta / 2.0 + 2.0 * (delta - 1.0 / delta);
}

// ----------------------------------------------------------------------------
// Observables

double sector_energy(const MagnonState& state) {
  state.chain.validate();
  const int n = state.chain.n_sites;
  const double delta = state.chain.delta;
  const double base = -0.5 * n * delta;

  struct V {
    const MagnonState& s;
    int n;
    double delta;
    double base;

    double operator()(const Vacuum&) const { return base; }
    double operator()(const Saturated&) const { return base; }
    double operator()(const OneMagnon& m) const {
      return base + 2.0 * (delta - std::cos(m.momentum));
    }
    double operator()(const TwoMagnonScattering& m) const {
      const double q = scattering_momentum_checked(m);
      return base + 4.0 * delta - 4.0 * std::cos(q);
    }
    double operator()(const TwoMagnonEdge& e) const {
      return base + 4.0 * (delta + (e.kind == EdgeKind::ZeroPlus ? -1.0 : 1.0));
    }
    double operator()(const TwoMagnonBound&) const {
      const double z = bound_state_z(s.chain);
      return base + 4.0 * delta - 2.0 * (z + 1.0 / z);
    }
    double operator()(const GeneralL& g) const {
      const auto gr = checked_general(g, s.chain);
      std::complex<double> e = 0.0;
      for (const auto& q : gr.q) e += 2.0 * (delta - std::cos(q));
      if (std::abs(e.imag()) > 1e-8 * (1.0 + std::abs(e.real())))
        throw std::domain_error("sector_energy: root set has complex energy");
      return base + e.real();
    }
  };
  return std::visit(V{state, n, delta, base}, state.body);
}

std::complex<double> amplitude(const MagnonState& state,
                               const std::vector<int>& positions) {
  state.chain.validate();
  check_positions(state, positions);
  const int n = state.chain.n_sites;
  const double delta = state.chain.delta;

  if (std::holds_alternative<Vacuum>(state.body) ||
      std::holds_alternative<Saturated>(state.body))
    return {1.0, 0.0};
  if (const auto* m = std::get_if<OneMagnon>(&state.body))
    return std::exp(kI * (m->momentum * positions[0])) / std::sqrt(double(n));
  if (const auto* g = std::get_if<GeneralL>(&state.body)) {
    const auto gr = checked_general(*g, state.chain);
    if (!roots_are_real(gr))
      throw std::domain_error(
          "amplitude: complex root sets are handled by the bound-pair state");
    if (gr.l == 0) return {1.0, 0.0};
    if (gr.l == 1)
      return std::exp(kI * (gr.q[0].real() * positions[0])) / std::sqrt(double(n));
    if (gr.l == 2)
      return general_pair_amp(delta, gr.q[0].real(), gr.q[1].real(),
                              positions[0], positions[1]);
    throw std::domain_error("amplitude: root sets with more than 2 magnons "
                            "are not supported");
  }
  return pair_profile(state, positions[1] - positions[0]);
}

double normalization_constant(const MagnonState& state) {
  state.chain.validate();
  const int n = state.chain.n_sites;

  if (std::holds_alternative<Vacuum>(state.body) ||
      std::holds_alternative<Saturated>(state.body) ||
      std::holds_alternative<OneMagnon>(state.body))
    return 1.0;

  if (const auto* sc = std::get_if<TwoMagnonScattering>(&state.body)) {
    const double q = scattering_momentum_checked(*sc);
    if (q < 1e-6 * kPi) {
      // Printed small-q asymptote of the normalisation near the band bottom,
      // where the profile degenerates towards the linear band-edge one.
      const double s = (n - 1.0) * (2.0 * n - 1.0) / 6.0;
      return 1.0 / (2.0 * q * n * std::sqrt(s));
    }
  }

  if (const auto* g = std::get_if<GeneralL>(&state.body)) {
    const auto gr = checked_general(*g, state.chain);
    if (gr.l <= 1) return 1.0;
    if (!roots_are_real(gr) || gr.l > 2)
      throw std::domain_error("normalization_constant: unsupported root set");
    double sum = 0.0;
    for (int x1 = 1; x1 <= n; ++x1)
      for (int x2 = x1 + 1; x2 <= n; ++x2)
        sum += std::norm(general_pair_amp(state.chain.delta, gr.q[0].real(),
                                          gr.q[1].real(), x1, x2));
    return 1.0 / std::sqrt(sum);
  }

  double sum = 0.0;
  for (int d = 1; d <= n - 1; ++d)
    sum += (n - d) * std::norm(pair_profile(state, d));
  return 1.0 / std::sqrt(sum);
}

std::complex<double> transition_amplitude_omega(const MagnonState& state) {
  state.chain.validate();
  const int n = state.chain.n_sites;
  const double delta = state.chain.delta;

  if (std::holds_alternative<Vacuum>(state.body) ||
      std::holds_alternative<OneMagnon>(state.body))
    return {0.0, 0.0};

  if (const auto* ed = std::get_if<TwoMagnonEdge>(&state.body)) {
    const double v = std::sqrt(3.0 * n);
    return ed->kind == EdgeKind::ZeroPlus ? -kI * v : kI * v;
  }
  if (std::holds_alternative<TwoMagnonBound>(state.body)) {
    require_bound_regime(state.chain);
    return {2.0 * std::sqrt((delta + 1.0) / (delta - 1.0)), 0.0};
  }
  if (std::holds_alternative<TwoMagnonScattering>(state.body)) {
    const double a = normalization_constant(state);
    std::complex<double> acc = 0.0;
    for (int x1 = 1; x1 <= n; ++x1)
      for (int x2 = x1 + 1; x2 <= n; ++x2)
        acc += pair_profile(state, x2 - x1);
    return 2.0 / std::sqrt(double(n)) * a * acc;
  }
  if (const auto* g = std::get_if<GeneralL>(&state.body)) {
    const auto gr = checked_general(*g, state.chain);
    if (gr.l == 2 && roots_are_real(gr)) {
      const double a = normalization_constant(state);
      std::complex<double> acc = 0.0;
      for (int x1 = 1; x1 <= n; ++x1)
        for (int x2 = x1 + 1; x2 <= n; ++x2)
          acc += general_pair_amp(delta, gr.q[0].real(), gr.q[1].real(), x1, x2);
      return 2.0 / std::sqrt(double(n)) * a * acc;
    }
  }
  throw std::domain_error(
      "transition_amplitude_omega: defined for two-magnon states");
}

Eigen::VectorXcd dense_vector(const MagnonState& state) {
  state.chain.validate();
  const int n = state.chain.n_sites;
  const double delta = state.chain.delta;

  if (std::holds_alternative<Vacuum>(state.body) ||
      std::holds_alternative<Saturated>(state.body))
    return Eigen::VectorXcd::Ones(1);

  if (const auto* m = std::get_if<OneMagnon>(&state.body)) {
    Eigen::VectorXcd v(n);
    for (int x = 1; x <= n; ++x)
      v[x - 1] = std::exp(kI * (m->momentum * x)) / std::sqrt(double(n));
    return v;
  }

  const auto fill_pairs = [&](auto&& amp_of_pair) {
    Eigen::VectorXcd v(binomial(n, 2));
    int idx = 0;
    for (int x1 = 1; x1 <= n; ++x1)
      for (int x2 = x1 + 1; x2 <= n; ++x2) v[idx++] = amp_of_pair(x1, x2);
    v.normalize();
    return v;
  };

  if (std::holds_alternative<TwoMagnonScattering>(state.body) ||
      std::holds_alternative<TwoMagnonEdge>(state.body))
    return fill_pairs(
        [&](int x1, int x2) { return pair_profile(state, x2 - x1); });

  if (std::holds_alternative<TwoMagnonBound>(state.body)) {
    const double z = bound_state_z(state.chain);
    return fill_pairs([&](int x1, int x2) {
      const int d = x2 - x1;
      return std::complex<double>(std::pow(z, d) + std::pow(z, n - d), 0.0);
    });
  }

  if (const auto* g = std::get_if<GeneralL>(&state.body)) {
    const auto gr = checked_general(*g, state.chain);
    if (gr.l == 0) return Eigen::VectorXcd::Ones(1);
    if (gr.l == 1) {
      Eigen::VectorXcd v(n);
      for (int x = 1; x <= n; ++x)
        v[x - 1] = std::exp(kI * (gr.q[0] * double(x))) / std::sqrt(double(n));
      v.normalize();
      return v;
    }
    if (gr.l == 2) {
      if (roots_are_real(gr))
        return fill_pairs([&](int x1, int x2) {
          return general_pair_amp(delta, gr.q[0].real(), gr.q[1].real(), x1, x2);
        });
      // Conjugate pair +-i kappa: numerically exact bound profile.
      if (std::abs((gr.q[0] + gr.q[1]).real()) < 1e-12 &&
          std::abs((gr.q[0] + gr.q[1]).imag()) < 1e-12) {
        const double z = std::exp(-std::abs(gr.q[0].imag()));
        return fill_pairs([&](int x1, int x2) {
          const int d = x2 - x1;
          return std::complex<double>(std::pow(z, d) + std::pow(z, n - d), 0.0);
        });
      }
    }
    throw std::domain_error("dense_vector: unsupported root set");
  }
  throw std::logic_error("dense_vector: unhandled state variant");
}

}  // namespace xxzbath
