#include "xxzbath/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace xxzbath {
namespace {
constexpr double kPi = std::numbers::pi;
}

double gibbs_population(double beta, double omega) {
  if (!std::isfinite(beta) || !std::isfinite(omega))
    throw std::domain_error("gibbs_population: arguments must be finite");
  const double x = 2.0 * beta * omega;
  if (x > 0.0) {
    const double e = std::exp(-x);  // underflows to 0 for large x
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(x));
}

double effective_gamma(double c, double sigma0, int d, double nu, double a) {
  if (d < 1) throw std::domain_error("effective_gamma: dimension must be >= 1");
  if (!(a > 0.0)) throw std::domain_error("effective_gamma: cutoff must be positive");
  if (!(2.0 * nu > d))
    throw std::domain_error(
        "effective_gamma: needs 2 nu > d for a convergent radial integral");
  const double solid = 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
  return c * c * sigma0 * solid * std::pow(a, d - 2.0 * nu) / (2.0 * nu - d);
}

double BathSpec::rate_scale() const { return kPi * gamma * f * n_density; }

void BathSpec::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta))
    throw std::domain_error("BathSpec: beta must be finite and >= 0");
  if (!(gamma > 0.0) || !(f > 0.0) || !(n_density > 0.0))
    throw std::domain_error("BathSpec: gamma, f, n must be positive");
}

// ----------------------------------------------------------------------------
// GHZ block

GhzSectorState ghz_sector_evolve(const BathSpec& bath, double delta, double t) {
  bath.validate();
  if (!(t >= 0.0)) throw std::domain_error("ghz_sector_evolve: t must be >= 0");
  const double k = bath.rate_scale();
  const double p = gibbs_population(bath.beta, 1.0 - delta);
  GhzSectorState s;
  s.u = 1.0 - 2.0 * p * (1.0 - std::exp(-k * t));
  s.v = 0.5 * std::exp(-k * t * p);
  s.physical = s.u >= -1e-12 && 2.0 * s.v <= s.u + 1e-12;
  return s;
}

double relaxation_population(double t, double rate_up, double rate_down) {
  if (!(t >= 0.0) || !(rate_up >= 0.0) || !(rate_down >= 0.0))
    throw std::domain_error("relaxation_population: nonnegative arguments required");
  const double total = rate_up + rate_down;
  if (total == 0.0) return 1.0;
  return 1.0 - rate_down / total * (1.0 - std::exp(-2.0 * t * total));
}

double coherence_decay_extremal(double t, double rate, double initial) {
  if (!(t >= 0.0) || !(rate >= 0.0))
    throw std::domain_error("coherence_decay_extremal: nonnegative t and rate required");
  return initial * std::exp(-2.0 * t * rate);
}

// ----------------------------------------------------------------------------
// 4-level population dynamics

Eigen::Matrix4d MarkovGenerator::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(1, 0) = a1;
  m(0, 1) = b1;
  m(2, 1) = b2;
  m(1, 2) = a2;
  m(3, 1) = b3;
  m(1, 3) = a3;
  for (int c = 0; c < 4; ++c) m(c, c) = -(m.col(c).sum() - m(c, c));
  return m;
}

MarkovGenerator build_markov_generator(const BathSpec& bath, double delta) {
  bath.validate();
  const double k = bath.rate_scale();
  MarkovGenerator g;
  g.a1 = k * gibbs_population(bath.beta, 1.0 - delta);
  g.b1 = k * gibbs_population(bath.beta, delta - 1.0);
  g.b2 = 3.0 * k * gibbs_population(bath.beta, 1.0 - delta);
  g.a2 = 3.0 * k * gibbs_population(bath.beta, delta - 1.0);
  g.b3 = 3.0 * k * gibbs_population(bath.beta, -3.0 - delta);
  g.a3 = 3.0 * k * gibbs_population(bath.beta, 3.0 + delta);
  return g;
}

namespace {

// Roots of x^3 + c2 x^2 + c1 x + c0 when all three are real (the generator
// cubic always is); trigonometric form with clamped arguments.
std::array<double, 3> solve_cubic_real(double c2, double c1, double c0) {
  const double q = (c2 * c2 - 3.0 * c1) / 9.0;
  const double r = (2.0 * c2 * c2 * c2 - 9.0 * c2 * c1 + 27.0 * c0) / 54.0;
  const double qc = std::max(q, 0.0);
  const double q3 = qc * qc * qc;
  double cosarg = 0.0;
  if (q3 > 0.0) cosarg = std::clamp(r / std::sqrt(q3), -1.0, 1.0);
  const double th = std::acos(cosarg);
  const double m = -2.0 * std::sqrt(qc);
  return {m * std::cos(th / 3.0) - c2 / 3.0,
          m * std::cos((th + 2.0 * kPi) / 3.0) - c2 / 3.0,
          m * std::cos((th - 2.0 * kPi) / 3.0) - c2 / 3.0};
}

}  // namespace

GeneratorSpectrum generator_spectrum(const MarkovGenerator& g) {
  const double bsum = g.b1 + g.b2 + g.b3;
  const double e1 = g.a1 + g.a2 + g.a3;
  const double e2 = g.a1 * g.a2 + g.a1 * g.a3 + g.a2 * g.a3;
  const double e3 = g.a1 * g.a2 * g.a3;
  const double c2 = e1 + bsum;
  const double c1 = e2 + bsum * e1 - (g.a1 * g.b1 + g.a2 * g.b2 + g.a3 * g.b3);
  const double c0 = e3 + g.a2 * g.a3 * g.b1 + g.a1 * g.a3 * g.b2 + g.a1 * g.a2 * g.b3;

  GeneratorSpectrum out;
  auto roots = solve_cubic_real(c2, c1, c0);
  std::sort(roots.begin(), roots.end(), std::greater<>());
  out.eigenvalues = {0.0, roots[0], roots[1], roots[2]};

  const double scale = std::max({1.0, std::abs(roots[0]), std::abs(roots[2])});
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (std::abs(out.eigenvalues[i] - out.eigenvalues[j]) < 1e-10 * scale)
        out.degenerate = true;

  if (!out.degenerate) {
    const std::array<double, 3> a{g.a1, g.a2, g.a3};
    const std::array<double, 3> b{g.b1, g.b2, g.b3};
    Eigen::Matrix4d v = Eigen::Matrix4d::Zero();
    for (int m = 1; m < 4 && !out.degenerate; ++m) {
      const double l = out.eigenvalues[m];
      v(1, m) = 1.0;
      for (int ch = 0; ch < 3; ++ch) {
        const double den = a[ch] + l;
        if (std::abs(den) < 1e-12 * scale) {
          out.degenerate = true;  // closed-form eigenvector breaks down
          break;
        }
        v((ch == 0 ? 0 : ch + 1), m) = b[ch] / den;
      }
    }
    if (!out.degenerate) {
      // Column 0 is the lambda = 0 direction: the actual kernel, which
      // degrades gracefully when individual rates vanish (point masses at
      // absorbing levels) where the b/a expression would not.
      Eigen::FullPivLU<Eigen::Matrix4d> lu(g.matrix());
      lu.setThreshold(1e-12);
      if (lu.dimensionOfKernel() != 1) {
        out.degenerate = true;
      } else {
        Eigen::Vector4d k0 = lu.kernel().col(0);
        if (k0.sum() < 0.0) k0 = -k0;
        v.col(0) = k0;
        out.vectors = v;
      }
    }
  }
  return out;
}

Eigen::Vector4d evolve_populations(const MarkovGenerator& gen,
                                   const Eigen::Vector4d& w0, double t) {
  if (!(t >= 0.0)) throw std::domain_error("evolve_populations: t must be >= 0");
  if (t == 0.0) return w0;
  const auto spec = generator_spectrum(gen);
  if (!spec.degenerate) {
    const Eigen::FullPivLU<Eigen::Matrix4d> lu(spec.vectors);
    if (lu.isInvertible()) {
      const Eigen::Vector4d c = lu.solve(w0);
      Eigen::Vector4d w = Eigen::Vector4d::Zero();
      for (int m = 0; m < 4; ++m)
        w += c[m] * std::exp(spec.eigenvalues[m] * t) * spec.vectors.col(m);
      return w;
    }
  }
  const Eigen::Matrix4d e = (gen.matrix() * t).exp();
  return e * w0;
}

Eigen::Vector4d stationary_distribution(const MarkovGenerator& gen) {
  const Eigen::Matrix4d m = gen.matrix();
  Eigen::FullPivLU<Eigen::Matrix4d> lu(m);
  lu.setThreshold(1e-12);
  const auto kernel = lu.kernel();
  if (kernel.cols() < 1)
    throw std::runtime_error("stationary_distribution: no kernel found");
  Eigen::Vector4d w = kernel.col(0);
  const double s = w.sum();
  if (std::abs(s) < 1e-300)
    throw std::runtime_error("stationary_distribution: traceless kernel vector");
  w /= s;
  return w;
}

double critical_temperature(double omega, double x) {
  if (!(omega > 0.0))
    throw std::domain_error("critical_temperature: omega must be positive");
  if (!(x > 0.0 && x < 0.5))
    throw std::domain_error("critical_temperature: threshold must be in (0, 1/2)");
  return 2.0 * omega / std::log((1.0 - x) / x);
}

namespace {

// Adaptive Simpson on [a, b] (f smooth there).
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double tol,
                        int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, 0.5 * tol, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol) {
  if (a >= b) return 0.0;
  const double m = 0.5 * (a + b);
  return adaptive_simpson(f, a, b, f(a), f(m), f(b), tol, 30);
}

}  // namespace

double lamb_shift_pv(const BathSpec& bath, double omega0, double window,
                     double tol) {
  bath.validate();
  if (!(window > 0.0) || !(tol > 0.0))
    throw std::domain_error("lamb_shift_pv: window and tol must be positive");
  const double pole = 0.5 * omega0;
  const auto f = [&](double w) {
    return bath.n_density * gibbs_population(bath.beta, w) / (2.0 * w - omega0);
  };
  double eps = window / 8.0;
  auto value = [&](double e) {
    return integrate(f, pole - window, pole - e, tol / 8.0) +
           integrate(f, pole + e, pole + window, tol / 8.0);
  };
  double prev = value(eps);
  for (int i = 0; i < 40; ++i) {
    eps *= 0.5;
    const double cur = value(eps);
    if (std::abs(cur - prev) < tol) return cur;
    prev = cur;
  }
  throw std::runtime_error("lamb_shift_pv: excision sequence did not settle");
}

}  // namespace xxzbath
