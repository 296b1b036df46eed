#include "sfilm/grid.hpp"

#include <algorithm>
#include <cmath>

namespace sfilm {

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

FaceValues face_gradient(const Field& f) {
  const int n = f.grid.n;
  FaceValues g(n + 1, 0.0);
  const double inv_dx = 1.0 / f.grid.dx;
  for (int k = 1; k < n; ++k) g[k] = (f.values[k] - f.values[k - 1]) * inv_dx;
  return g;
}

Field flux_divergence(const Grid& g, const FaceValues& face_flux) {
  if (static_cast<int>(face_flux.size()) != g.n + 1)
    throw std::invalid_argument("flux_divergence: need n_cells + 1 face values");
  if (face_flux.front() != 0.0 || face_flux.back() != 0.0)
    throw std::invalid_argument("flux_divergence: nonzero boundary flux breaks the no-flux contract");
  Field out(g);
  const double inv_dx = 1.0 / g.dx;
  for (int i = 0; i < g.n; ++i) out.values[i] = (face_flux[i + 1] - face_flux[i]) * inv_dx;
  return out;
}

double discrete_norm(const Field& f, Norm kind) {
  switch (kind) {
    case Norm::L1: {
      double s = 0;
      for (double x : f.values) s += std::abs(x);
      return s * f.grid.dx;
    }
    case Norm::L2: {
      double s = 0;
      for (double x : f.values) s += x * x;
      return std::sqrt(s * f.grid.dx);
    }
    case Norm::Linf: {
      double m = 0;
      for (double x : f.values) m = std::max(m, std::abs(x));
      return m;
    }
  }
  return 0;
}

double face_l2_sq(const Grid& g, const FaceValues& v) {
  double s = 0;
  for (int k = 1; k < g.n; ++k) s += v[k] * v[k];
  return s * g.dx;
}

double weighted_face_l2_sq(const Grid& g, const FaceValues& w, const FaceValues& v) {
  double s = 0;
  for (int k = 1; k < g.n; ++k) s += w[k] * v[k] * v[k];
  return s * g.dx;
}

double time_integral(std::span<const double> t, std::span<const double> v) {
  if (t.size() != v.size()) throw std::invalid_argument("time_integral: size mismatch");
  if (t.size() < 2) return 0.0;
  double s = 0;
  for (size_t k = 1; k < t.size(); ++k) {
    if (!(t[k] > t[k - 1])) throw std::invalid_argument("time_integral: times must increase");
    s += 0.5 * (v[k] + v[k - 1]) * (t[k] - t[k - 1]);
  }
  return s;
}

}  // namespace sfilm
