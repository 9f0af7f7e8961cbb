#pragma once
// Brute-force reference routines used by the test-suite to cross-check the
// closed-form library code: dense magnon-sector Hamiltonians, the
// zero-momentum band, a generic adaptive ODE integrator, a self-contained
// matrix exponential, a direct density-matrix simulation of one purification
// round, and a principal-value quadrature.  Everything here recomputes its
// answer from first principles so that agreement with the closed forms is a
// genuine two-route check.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "xxzbath/bethe.hpp"
#include "xxzbath/chain.hpp"

namespace xxzbath::oracles {

// Dense Hamiltonian of the l-magnon sector of the periodic anisotropic
// chain, built by enumerating configurations directly.  Basis order is the
// lexicographic order of strictly increasing 1-based position tuples (the
// same order sector_basis uses, so vectors are comparable).  Diagonal
// entries are -(delta/2)(N - 2 n_domain_walls); each nearest-neighbour hop
// contributes -1.  Capped at N <= 16 for l <= 2 and N <= 12 otherwise.
Eigen::MatrixXd build_sector_hamiltonian(const ChainSpec& chain, int magnons);

// Eigenvalues (ascending) of the zero-momentum block of the l-magnon
// sector: project onto the translation-invariant subspace with
// P = sum_t T^t / N, orthonormalise, and diagonalise the restriction.
std::vector<double> k0_band(const ChainSpec& chain, int magnons);

// || H psi - E psi ||_2 for the state's dense vector against the dense
// sector Hamiltonian.  Near machine precision for true eigenstates; order
// one for the band-edge profiles, which are not eigenvectors at finite N.
double eigenstate_residual(const MagnonState& state);

// Right-hand side signature for ode_integrate: rhs(y, dydt, t).
using OdeRhs =
    std::function<void(const std::vector<double>&, std::vector<double>&, double)>;

// Integrate dy/dt = rhs(y, t) from t0 to t1 with an adaptive
// Runge-Kutta-Dormand-Prince 5(4) stepper; returns y(t1).
std::vector<double> ode_integrate(const OdeRhs& rhs, std::vector<double> y0,
                                  double t0, double t1, double abs_tol = 1e-12,
                                  double rel_tol = 1e-12);

// exp(A) for small dense matrices (dim <= 8) via Pade-13 approximation with
// scaling and squaring.  Independent of any library matrix-function code.
Eigen::MatrixXd matrix_exponential_small(const Eigen::MatrixXd& a);

// Result of one simulated purification round (see bilateral_cnot_round).
struct CnotRoundResult {
  double u = 0.0;            // weight of the GHZ block after the round
  double w = 0.0;            // total one-magnon weight after the round
  double v = 0.0;            // GHZ off-diagonal coherence after the round
  double probability = 0.0;  // postselection probability of the round
  double leakage = 0.0;      // kept weight outside the tracked components
};

// Simulate one purification round on the full 2^(2N) density matrix:
// form rho x rho for the block state (u, w, v), apply transversal CNOTs
// control->target on every site pair, keep the runs where the target
// register reads all-up or all-down, and trace the target out.  Capped at
// N <= 5.  The closed-form recurrence must match this exactly.
CnotRoundResult bilateral_cnot_round(double u, double w, double v, int n_sites);

// Cauchy principal value of  integral_a^b f(x) / (x - x0) dx  with
// x0 strictly inside (a, b), via the subtraction
//   PV = integral_a^b (f(x) - f(x0)) / (x - x0) dx + f(x0) ln((b-x0)/(x0-a))
// and adaptive Simpson quadrature on the now-regular integrand.
double pv_quadrature(const std::function<double(double)>& f, double a, double b,
                     double x0, double tol = 1e-10);

}  // namespace xxzbath::oracles
