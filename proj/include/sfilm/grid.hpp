// Uniform 1-D cell-centered mesh with Neumann-compatible faces, plus the
// discrete calculus and norms shared by every other module.
//
// Cells i = 0..n-1 live at x_i = (i + 1/2) dx; faces k = 0..n sit at k dx.
// Faces 0 and n are boundary faces and carry zero flux always, so the
// divergence of any admissible face flux telescopes to zero total mass.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sfilm {

struct Grid {
  int n = 0;          // number of cells, >= 4
  double length = 0;  // domain size L
  double dx = 0;      // length / n

  Grid() = default;
  Grid(int n_cells, double domain_length) : n(n_cells), length(domain_length) {
    if (n_cells < 4) throw std::invalid_argument("Grid: n_cells must be >= 4");
    if (!(domain_length > 0) || !std::isfinite(domain_length))
      throw std::invalid_argument("Grid: length must be positive and finite");
    dx = length / n;
  }

  double cell_center(int i) const { return (i + 0.5) * dx; }
  int n_faces() const { return n + 1; }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n == b.n && a.length == b.length;
  }
};

// Per-cell scalar samples on a grid.
struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0) : grid(g), values(g.n, fill) {}
  Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != g.n)
      throw std::invalid_argument("Field: values length must equal n_cells");
  }

  int size() const { return grid.n; }
  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
};

// Face-indexed values, length n_cells + 1; entries 0 and n are boundary faces.
using FaceValues = std::vector<double>;

bool all_finite(std::span<const double> v);
inline bool all_finite(const Field& f) { return all_finite(f.values); }

// Face gradients of cell data; boundary faces get exactly 0 (homogeneous
// Neumann enters only here and through zero boundary fluxes).
FaceValues face_gradient(const Field& f);

// Cell divergence of a face flux: cell i gets (F_{i+1} - F_i) / dx.
// Rejects nonzero boundary entries: a nonzero boundary flux means the
// no-flux contract is broken upstream.
Field flux_divergence(const Grid& g, const FaceValues& face_flux);

enum class Norm { L1, L2, Linf };

double discrete_norm(const Field& f, Norm kind);

// Sum over interior faces of dx * v_k^2 (the face realization of an L2 norm
// squared; exactly the quantity the summation-by-parts identities produce).
double face_l2_sq(const Grid& g, const FaceValues& v);

// Sum over interior faces of dx * w_k * v_k^2 for a nonnegative face weight.
double weighted_face_l2_sq(const Grid& g, const FaceValues& w, const FaceValues& v);

// Trapezoid rule over (t_k, v_k) samples; fewer than 2 samples -> 0.
double time_integral(std::span<const double> t, std::span<const double> v);

}  // namespace sfilm
