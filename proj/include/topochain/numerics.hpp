#pragma once

// Dense Hermitian linear-algebra kernel: eigendecomposition, spectral
// propagators, and piecewise-constant time-ordered evolution for the
// slowly ramped chain Hamiltonians.  All matrices here are small (a few
// hundred sites at most), so every propagator is built from an exact
// eigendecomposition rather than a series expansion.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "topochain/errors.hpp"
#include "topochain/types.hpp"

namespace topochain::numerics {

inline constexpr double kHermiticityTol = 1e-12;

struct EigenSystem {
  RVector eigenvalues;   // ascending
  CMatrix eigenvectors;  // orthonormal columns, same order as eigenvalues
};

inline double hermiticity_defect(const CMatrix& m) {
  if (m.rows() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const CMatrix& m, double tol = kHermiticityTol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("require_hermitian: matrix is not square (" +
                                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
  }
  const double defect = hermiticity_defect(m);
  if (!(defect <= tol)) {
    throw ContractError("matrix is not Hermitian: max |H - H^dagger| = " + std::to_string(defect) +
                        " exceeds " + std::to_string(tol));
  }
}

inline EigenSystem eigh(const CMatrix& h) {
  require_hermitian(h);
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw ContractError("eigendecomposition did not converge");
  }
  return EigenSystem{solver.eigenvalues(), solver.eigenvectors()};
}

// psi(t) = V exp(-i E t) V^dagger psi(0).  Exact for a static Hamiltonian.
inline StateVector evolve_spectral(const EigenSystem& es, const StateVector& psi, double t) {
  if (es.eigenvectors.rows() != psi.size()) {
    throw std::invalid_argument("evolve_spectral: state dimension " + std::to_string(psi.size()) +
                                " does not match Hamiltonian dimension " +
                                std::to_string(es.eigenvectors.rows()));
  }
  CVector coeff = es.eigenvectors.adjoint() * psi;
  coeff.array() *= (Complex(0.0, -t) * es.eigenvalues.array()).exp();
  return es.eigenvectors * coeff;
}

inline StateVector evolve_spectral(const CMatrix& h, const StateVector& psi, double t) {
  if (h.rows() != psi.size()) {
    throw std::invalid_argument("evolve_spectral: state dimension " + std::to_string(psi.size()) +
                                " does not match Hamiltonian dimension " + std::to_string(h.rows()));
  }
  return evolve_spectral(eigh(h), psi, t);
}

using HamiltonianSchedule = std::function<CMatrix(double)>;

// Called after each step with the step index, the time at the end of the
// step, the eigensystem of the midpoint Hamiltonian, and the state after
// the step.
using StepObserver =
    std::function<void(int step, double t_end, const EigenSystem& es_mid, const StateVector& psi)>;

// Piecewise-constant midpoint rule: each sub-interval of width
// dt = (t1-t0)/steps is propagated exactly under H evaluated at the
// interval midpoint.  Second order in dt for smooth schedules.
inline StateVector evolve_schedule(const HamiltonianSchedule& h_of_t, const StateVector& psi0,
                                   double t0, double t1, int steps,
                                   const StepObserver& observer = nullptr) {
  if (steps < 1) {
    throw std::invalid_argument("evolve_schedule: steps must be >= 1, got " + std::to_string(steps));
  }
  const double dt = (t1 - t0) / steps;
  StateVector psi = psi0;
  for (int s = 0; s < steps; ++s) {
    const double t_mid = t0 + (s + 0.5) * dt;
    const EigenSystem es = eigh(h_of_t(t_mid));
    psi = evolve_spectral(es, psi, dt);
    if (observer) observer(s, t0 + (s + 1) * dt, es, psi);
  }
  return psi;
}

struct ConvergenceReport {
  int steps = 0;          // coarse step count
  double max_diff = 0.0;  // max |psi_steps - psi_{2 steps}| per amplitude
};

// Self-check for the midpoint rule: propagate with `steps` and `2*steps`
// and report the largest amplitude difference.  Halving dt shrinks this
// by roughly a factor of four on smooth schedules.
inline ConvergenceReport schedule_convergence_check(const HamiltonianSchedule& h_of_t,
                                                    const StateVector& psi0, double t0, double t1,
                                                    int steps) {
  const StateVector coarse = evolve_schedule(h_of_t, psi0, t0, t1, steps);
  const StateVector fine = evolve_schedule(h_of_t, psi0, t0, t1, 2 * steps);
  return ConvergenceReport{steps, (coarse - fine).cwiseAbs().maxCoeff()};
}

}  // namespace topochain::numerics
