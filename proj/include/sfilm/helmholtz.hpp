// Elliptic sub-solvers of the regularization, both with homogeneous Neumann
// closure on the cell-centered grid:
//   smooth:            u - eps^2 u'' = f
//   surface_pressure:  S - eps^2 (W S')' = g,  W = face average of H
//
// The reflective boundary closure keeps constants fixed points and makes
// mass preservation and the maximum principle exact (M-matrix assembly).

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sfilm/grid.hpp"

namespace sfilm {

// Raised when a regularization barrier (h >= sqrt(eps), Gamma >= eps, or a
// derived coefficient floor) is breached; time stepping converts it into a
// step rejection.
struct BarrierBreach : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TridiagonalSystem {
  std::vector<double> lower;  // sub-diagonal, lower[0] unused
  std::vector<double> diag;
  std::vector<double> upper;  // super-diagonal, upper[n-1] unused
  std::vector<double> rhs;

  explicit TridiagonalSystem(int n)
      : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {
    if (n < 2) throw std::invalid_argument("TridiagonalSystem: dimension must be >= 2");
  }

  int size() const { return static_cast<int>(diag.size()); }

  // Thomas elimination (no pivoting; assembly guarantees diagonal dominance).
  std::vector<double> solve() const;
};

// Discrete resolvent of u - eps^2 u'' = f with Neumann closure.
Field smooth(const Field& f, double eps);

// Discrete screened pressure: S - eps^2 d/dx(W dS/dx) = sigma_gamma with W the
// arithmetic face average of H. Requires H >= sqrt(eps) (up to the positivity
// tolerance the stepper grants accepted states).
Field surface_pressure(const Field& sigma_gamma, const Field& H, double eps);

// Shared kernel: (I - coef div(face_coef grad)) u = rhs, face_coef given on
// interior faces (boundary faces carry no flux). coef is eps^2 for the
// resolvents here and dt for the implicit diffusion stages of the stepper.
Field screened_neumann_solve(const Field& rhs, double coef, const FaceValues& face_coef);

struct SmoothingReport {
  struct Item {
    std::string name;
    double lhs = 0, rhs = 0;   // inequality lhs <= rhs
    double slack = 0;          // rhs - lhs
    bool applicable = true;
    bool holds = false;
  };
  std::vector<Item> items;
  bool all_hold() const {
    for (const auto& it : items)
      if (it.applicable && !it.holds) return false;
    return true;
  }
};

// Evaluates the discrete smoothing estimates for u = smooth(f, eps):
// Lp contraction for p in {1,2,inf}, the gradient-energy bound
// |grad u|^2 + 2 eps^2 |lap u|^2 <= |grad f|^2, and (for f >= 0)
// eps^2 |grad u|_inf <= |f|_1.
SmoothingReport smoothing_estimates(const Field& f, const Field& u, double eps);

}  // namespace sfilm
