#include "sfilm/helmholtz.hpp"

#include <algorithm>
#include <cmath>

namespace sfilm {

std::vector<double> TridiagonalSystem::solve() const {
  const int n = size();
  std::vector<double> cp(n, 0.0), dp(n, 0.0), x(n, 0.0);
  cp[0] = upper[0] / diag[0];
  dp[0] = rhs[0] / diag[0];
  for (int i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * cp[i - 1];
    cp[i] = upper[i] / m;
    dp[i] = (rhs[i] - lower[i] * dp[i - 1]) / m;
  }
  x[n - 1] = dp[n - 1];
  for (int i = n - 2; i >= 0; --i) x[i] = dp[i] - cp[i] * x[i + 1];
  return x;
}

Field screened_neumann_solve(const Field& rhs, double coef, const FaceValues& face_coef) {
  const Grid& g = rhs.grid;
  const int n = g.n;
  if (static_cast<int>(face_coef.size()) != n + 1)
    throw std::invalid_argument("screened_neumann_solve: face_coef length must be n_cells + 1");
  const double r = coef / (g.dx * g.dx);
  TridiagonalSystem sys(n);
  for (int i = 0; i < n; ++i) {
    const double wl = (i > 0) ? face_coef[i] : 0.0;
    const double wr = (i < n - 1) ? face_coef[i + 1] : 0.0;
    sys.lower[i] = -r * wl;
    sys.upper[i] = -r * wr;
    sys.diag[i] = 1.0 + r * (wl + wr);
    sys.rhs[i] = rhs.values[i];
  }
  return Field(g, sys.solve());
}

Field smooth(const Field& f, double eps) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("smooth: eps must lie in (0, 1)");
  if (!all_finite(f)) throw std::invalid_argument("smooth: input field must be finite");
  return screened_neumann_solve(f, eps * eps, FaceValues(f.grid.n + 1, 1.0));
}

Field surface_pressure(const Field& sigma_gamma, const Field& H, double eps) {
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("surface_pressure: eps must lie in (0, 1)");
  if (!(sigma_gamma.grid == H.grid))
    throw std::invalid_argument("surface_pressure: fields must share a grid");
  if (!all_finite(sigma_gamma) || !all_finite(H))
    throw std::invalid_argument("surface_pressure: inputs must be finite");
  const double floor = std::sqrt(eps) - 1e-9;  // matches the stepper's positivity tolerance
  for (double v : H.values)
    if (v < floor) throw BarrierBreach("surface_pressure: H dropped below sqrt(eps)");
  const int n = H.grid.n;
  FaceValues w(n + 1, 0.0);
  for (int k = 1; k < n; ++k) w[k] = 0.5 * (H.values[k - 1] + H.values[k]);
  return screened_neumann_solve(sigma_gamma, eps * eps, w);
}

SmoothingReport smoothing_estimates(const Field& f, const Field& u, double eps) {
  SmoothingReport rep;
  auto push = [&rep](const std::string& name, double lhs, double rhs, bool applicable = true) {
    SmoothingReport::Item it;
    it.name = name;
    it.lhs = lhs;
    it.rhs = rhs;
    it.slack = rhs - lhs;
    it.applicable = applicable;
    // roundoff budget: several identities hold with equality
    const double tol = 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    it.holds = it.slack >= -tol;
    rep.items.push_back(it);
    return it.holds;
  };

  push("L1 contraction", discrete_norm(u, Norm::L1), discrete_norm(f, Norm::L1));
  push("L2 contraction", discrete_norm(u, Norm::L2), discrete_norm(f, Norm::L2));
  push("Linf contraction", discrete_norm(u, Norm::Linf), discrete_norm(f, Norm::Linf));

  const Grid& g = f.grid;
  const FaceValues gu = face_gradient(u);
  const FaceValues gf = face_gradient(f);
  const Field lap = flux_divergence(g, gu);
  double lap_sq = 0;
  for (double v : lap.values) lap_sq += v * v;
  lap_sq *= g.dx;
  push("gradient energy", face_l2_sq(g, gu) + 2.0 * eps * eps * lap_sq, face_l2_sq(g, gf));

  double min_f = f.values.empty() ? 0.0 : *std::min_element(f.values.begin(), f.values.end());
  double gu_inf = 0;
  for (double v : gu) gu_inf = std::max(gu_inf, std::abs(v));
  push("eps^2 sup-gradient", eps * eps * gu_inf, discrete_norm(f, Norm::L1), min_f >= 0.0);

  return rep;
}

}  // namespace sfilm
