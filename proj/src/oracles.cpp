#include "xxzbath/oracles.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>

#include "xxzbath/errors.hpp"

namespace xxzbath::oracles {

namespace {

// Enumerate all l-magnon occupation bitmasks (bit i <-> site i+1) in the
// lexicographic order of the corresponding increasing position tuples.
std::vector<std::uint32_t> sector_masks(int n, int l) {
  std::vector<std::uint32_t> masks;
  std::vector<int> cur;
  const std::function<void(int)> rec = [&](int next) {
    if (static_cast<int>(cur.size()) == l) {
      std::uint32_t m = 0;
      for (int x : cur) m |= 1u << (x - 1);
      masks.push_back(m);
      return;
    }
    for (int x = next; x <= n; ++x) {
      cur.push_back(x);
      rec(x + 1);
      cur.pop_back();
    }
  };
  rec(1);
  return masks;
}

void check_sector_cap(const ChainSpec& chain, int magnons) {
  chain.validate();
  if (magnons < 0 || magnons > chain.n_sites)
    throw std::domain_error("sector Hamiltonian: magnon count out of range");
  const int cap = magnons <= 2 ? 16 : 12;
  if (chain.n_sites > cap)
    throw ResourceCapError("sector Hamiltonian: chain too long for the dense oracle");
}

// Cyclic shift by one site: bit b -> bit (b+1) mod n.
std::uint32_t shift_mask(std::uint32_t m, int n) {
  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  return ((m << 1) | (m >> (n - 1))) & full;
}

}  // namespace

Eigen::MatrixXd build_sector_hamiltonian(const ChainSpec& chain, int magnons) {
  check_sector_cap(chain, magnons);
  const int n = chain.n_sites;
  const double delta = chain.delta;

  const auto masks = sector_masks(n, magnons);
  std::unordered_map<std::uint32_t, int> index;
  index.reserve(masks.size());
  for (int i = 0; i < static_cast<int>(masks.size()); ++i)
    index.emplace(masks[i], i);

  const int dim = static_cast<int>(masks.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col) {
    const std::uint32_t m = masks[col];
    int walls = 0;
    for (int site = 0; site < n; ++site) {
      const int nxt = (site + 1) % n;
      const bool a = (m >> site) & 1u;
      const bool b = (m >> nxt) & 1u;
      if (a != b) {
        ++walls;
        // Exchange term hops the magnon across this bond.
        const std::uint32_t flipped = m ^ (1u << site) ^ (1u << nxt);
        h(index.at(flipped), col) += -1.0;
      }
    }
    h(col, col) = -0.5 * delta * (n - 2 * walls);
  }
  return h;
}

std::vector<double> k0_band(const ChainSpec& chain, int magnons) {
  check_sector_cap(chain, magnons);
  const int n = chain.n_sites;

  const auto masks = sector_masks(n, magnons);
  std::unordered_map<std::uint32_t, int> index;
  for (int i = 0; i < static_cast<int>(masks.size()); ++i)
    index.emplace(masks[i], i);

  const int dim = static_cast<int>(masks.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(dim, dim);
  for (int col = 0; col < dim; ++col)
    t(index.at(shift_mask(masks[col], n)), col) = 1.0;

  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(dim, dim);
  for (int step = 0; step < n; ++step) {
    p += power;
    power = t * power;
  }
  p /= double(n);

  Eigen::BDCSVD<Eigen::MatrixXd> svd(p, Eigen::ComputeThinU);
  int rank = 0;
  while (rank < svd.singularValues().size() && svd.singularValues()[rank] > 0.5)
    ++rank;
  const Eigen::MatrixXd basis = svd.matrixU().leftCols(rank);

  const Eigen::MatrixXd h = build_sector_hamiltonian(chain, magnons);
  const Eigen::MatrixXd restricted = basis.transpose() * h * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      0.5 * (restricted + restricted.transpose()));
  const auto& vals = solver.eigenvalues();
  return {vals.data(), vals.data() + vals.size()};
}

double eigenstate_residual(const MagnonState& state) {
  const int l = magnon_number(state);
  const Eigen::MatrixXd h = build_sector_hamiltonian(state.chain, l);
  const Eigen::VectorXcd psi = dense_vector(state);
  if (psi.size() != h.rows())
    throw std::logic_error("eigenstate_residual: basis size mismatch");
  const double energy = sector_energy(state);
  return (h.cast<std::complex<double>>() * psi - energy * psi).norm();
}

std::vector<double> ode_integrate(const OdeRhs& rhs, std::vector<double> y0,
                                  double t0, double t1, double abs_tol,
                                  double rel_tol) {
  if (!(t1 >= t0)) throw std::domain_error("ode_integrate: need t1 >= t0");
  if (t1 == t0) return y0;
  namespace odeint = boost::numeric::odeint;
  using stepper_t = odeint::runge_kutta_dopri5<std::vector<double>>;
  auto stepper = odeint::make_controlled<stepper_t>(abs_tol, rel_tol);
  const auto system = [&rhs](const std::vector<double>& y,
                             std::vector<double>& dydt, double t) {
    rhs(y, dydt, t);
  };
  odeint::integrate_adaptive(stepper, system, y0, t0, t1, (t1 - t0) / 100.0);
  return y0;
}

Eigen::MatrixXd matrix_exponential_small(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw std::domain_error("matrix_exponential_small: matrix must be square");
  if (a.rows() > 8)
    throw ResourceCapError("matrix_exponential_small: dim capped at 8");
  const int dim = static_cast<int>(a.rows());
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);

  constexpr double theta13 = 5.371920351148152;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  Eigen::MatrixXd scaled = a;
  if (norm1 > theta13) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / theta13)));
    scaled /= std::pow(2.0, squarings);
  }

  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0,
                                 7771770303897600.0,  1187353796428800.0,
                                 129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,
                                 1323241920.0,        40840800.0,
                                 960960.0,            16380.0,
                                 182.0,               1.0};

  const Eigen::MatrixXd a2 = scaled * scaled;
  const Eigen::MatrixXd a4 = a2 * a2;
  const Eigen::MatrixXd a6 = a2 * a4;
  const Eigen::MatrixXd u =
      scaled * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
                b[5] * a4 + b[3] * a2 + b[1] * eye);
  const Eigen::MatrixXd v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                            b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * eye;
  Eigen::MatrixXd r = (v - u).fullPivLu().solve(v + u);
  for (int s = 0; s < squarings; ++s) r = r * r;
  return r;
}

CnotRoundResult bilateral_cnot_round(double u, double w, double v, int n_sites) {
  if (n_sites < 2) throw std::domain_error("bilateral_cnot_round: need N >= 2");
  if (n_sites > 5)
    throw ResourceCapError("bilateral_cnot_round: density-matrix oracle capped at N <= 5");
  if (!(u >= 0.0) || !(w >= 0.0) || !(v >= 0.0))
    throw std::domain_error("bilateral_cnot_round: weights must be >= 0");

  const int dim = 1 << n_sites;
  const int last = dim - 1;

  Eigen::MatrixXd rho = Eigen::MatrixXd::Zero(dim, dim);
  rho(0, 0) += 0.5 * u;
  rho(last, last) += 0.5 * u;
  rho(0, last) += v;
  rho(last, 0) += v;
  for (int k = 0; k < n_sites; ++k) {
    const int e = 1 << k;
    rho(e, e) += w / n_sites;
  }

  // Two copies: index (c * dim + t) for control register c, target t.
  const int big = dim * dim;
  Eigen::MatrixXd pair = Eigen::MatrixXd::Zero(big, big);
  for (int c1 = 0; c1 < dim; ++c1)
    for (int t1 = 0; t1 < dim; ++t1)
      for (int c2 = 0; c2 < dim; ++c2)
        for (int t2 = 0; t2 < dim; ++t2)
          pair(c1 * dim + t1, c2 * dim + t2) = rho(c1, c2) * rho(t1, t2);

  // Transversal CNOTs site by site: |c, t> -> |c, t XOR c>.
  const auto perm = [dim](int idx) {
    const int c = idx / dim;
    const int t = idx % dim;
    return c * dim + (t ^ c);
  };
  Eigen::MatrixXd rotated = Eigen::MatrixXd::Zero(big, big);
  for (int i = 0; i < big; ++i)
    for (int j = 0; j < big; ++j) rotated(perm(i), perm(j)) = pair(i, j);

  // Keep target readouts all-up (0) and all-down (dim-1); trace target out.
  Eigen::MatrixXd kept = Eigen::MatrixXd::Zero(dim, dim);
  for (int c1 = 0; c1 < dim; ++c1)
    for (int c2 = 0; c2 < dim; ++c2)
      for (int t : {0, last})
        kept(c1, c2) += rotated(c1 * dim + t, c2 * dim + t);

  CnotRoundResult out;
  out.probability = kept.trace();
  out.u = kept(0, 0) + kept(last, last);
  out.v = kept(0, last);
  for (int k = 0; k < n_sites; ++k) out.w += kept(1 << k, 1 << k);
  out.leakage = out.probability - out.u - out.w;
  return out;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double fa, double b, double fb, double m, double fm,
                        double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

double integrate_simpson(const std::function<double(double)>& f, double a,
                         double b, double tol) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, 40);
}

}  // namespace

double pv_quadrature(const std::function<double(double)>& f, double a, double b,
                     double x0, double tol) {
  if (!(a < x0 && x0 < b))
    throw std::domain_error("pv_quadrature: pole must lie strictly inside (a, b)");
  const double scale = std::max({1.0, std::abs(a), std::abs(b)});
  const double h = 1e-7 * scale;
  const double slope = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
  const double fx0 = f(x0);
  const auto regular = [&](double x) {
    if (std::abs(x - x0) < 1e-9 * scale) return slope;
    return (f(x) - fx0) / (x - x0);
  };
  const double smooth = integrate_simpson(regular, a, b, tol);
  return smooth + fx0 * std::log((b - x0) / (x0 - a));
}

}  // namespace xxzbath::oracles
