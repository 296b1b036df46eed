#include "sfilm/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace sfilm {

namespace {

double alpha1_of(double G, double r) { return 0.4 * std::sqrt(G / 3.0) * std::pow(r, 2.5); }

double min_value(const Field& f) {
  return *std::min_element(f.values.begin(), f.values.end());
}

}  // namespace

double sqrt_a1_face_mean(double G, double hl, double hr) {
  const double m = std::max(std::abs(hl), std::abs(hr));
  if (hl == hr || std::abs(hr - hl) <= 1e-8 * m) {
    const double mid = 0.5 * (hl + hr);
    return std::sqrt(G * mid * mid * mid / 3.0);
  }
  return (alpha1_of(G, hr) - alpha1_of(G, hl)) / (hr - hl);
}

double concentration_face_mean(const SigmaModel& sigma, double gl, double gr) {
  double a = std::min(gl, gr), b = std::max(gl, gr);
  if (a <= 0.0) return 0.0;  // phi' diverges at 0, the mean degenerates with the data
  if (a == b) return a;
  if (b - a <= 1e-8 * b) return 0.5 * (a + b);
  if (sigma.kind() == SigmaModel::Kind::linear) return (b - a) / std::log1p((b - a) / a);
  return -(sigma.value(b) - sigma.value(a)) / (sigma.phi_prime(b) - sigma.phi_prime(a));
}

double sigma_divided_difference(const SigmaModel& sigma, double gl, double gr) {
  const double m = std::max(std::abs(gl), std::abs(gr));
  if (gl == gr || std::abs(gr - gl) <= 1e-8 * m) return sigma.prime(0.5 * (gl + gr));
  return (sigma.value(gr) - sigma.value(gl)) / (gr - gl);
}

AuxFields assemble_aux(const State& state, const ModelParams& params) {
  if (!all_finite(state.h) || !all_finite(state.gamma))
    throw std::invalid_argument("assemble_aux: state must be finite");
  const Grid& g = state.grid();
  Field alpha1_h(g), sig(g);
  for (int i = 0; i < g.n; ++i) {
    alpha1_h.values[i] = params.alpha1(state.h.values[i]);
    sig.values[i] = params.sigma.value(state.gamma.values[i]);
  }
  AuxFields aux;
  aux.H = smooth(state.h, params.eps);
  aux.A = smooth(alpha1_h, params.eps);
  aux.B = smooth(state.gamma, params.eps);
  aux.Sigma = surface_pressure(sig, aux.H, params.eps);
  return aux;
}

namespace {

void size_assembly(FaceAssembly& F, int n) {
  for (FaceValues* v :
       {&F.grad_h, &F.grad_gamma, &F.grad_sigma, &F.grad_alpha1, &F.grad_A, &F.grad_Sigma,
        &F.sqrt_a1, &F.h_avg, &F.H_avg, &F.alpha0_face, &F.gamma_mean, &F.beta1p_B, &F.J_f,
        &F.J_s, &F.flux_h, &F.flux_gamma, &F.impl_coef_h, &F.impl_coef_gamma, &F.expl_flux_h,
        &F.expl_flux_gamma})
    v->assign(n + 1, 0.0);
}

}  // namespace

FaceAssembly assemble_regularized_faces(const State& state, const AuxFields& aux, double G,
                                        double D, const SigmaModel& sigma, double eps,
                                        double eta1) {
  const Grid& grid = state.grid();
  const int n = grid.n;
  const double dx = grid.dx;
  const double sqe = std::sqrt(eps);
  const auto& h = state.h.values;
  const auto& ga = state.gamma.values;
  const auto& H = aux.H.values;
  const auto& A = aux.A.values;
  const auto& B = aux.B.values;
  const auto& S = aux.Sigma.values;

  // Cell prefactors; the divisions are safe above the sqrt(eps)/2 floor.
  std::vector<double> al1(n), sig(n), c(n), d(n), e(n);
  for (int i = 0; i < n; ++i) {
    if (sqe > 0 ? (h[i] < 0.5 * sqe) : (h[i] <= 0))
      throw BarrierBreach("regularized flux: film height below sqrt(eps)/2");
    al1[i] = alpha1_of(G, h[i]);
    sig[i] = sigma.value(ga[i]);
    const double a1 = G * h[i] * h[i] * h[i] / 3.0;
    const double root = std::sqrt(h[i] * a1);
    const double dd = h[i] - sqe;
    const double a2 = 0.5 * dd * dd;
    c[i] = a2 * std::sqrt(H[i]) / root;
    d[i] = a2 / root;
    e[i] = ga[i] > 0 ? (ga[i] - eps) / ga[i] : 0.0;
  }

  FaceAssembly F;
  size_assembly(F, n);
  const double b1B_floor = 0.5 * sigma.sigma0() * eps;
  for (int k = 1; k < n; ++k) {
    const int l = k - 1, r = k;
    F.grad_h[k] = (h[r] - h[l]) / dx;
    F.grad_gamma[k] = (ga[r] - ga[l]) / dx;
    F.grad_sigma[k] = (sig[r] - sig[l]) / dx;
    F.grad_alpha1[k] = (al1[r] - al1[l]) / dx;
    F.grad_A[k] = (A[r] - A[l]) / dx;
    F.grad_Sigma[k] = (S[r] - S[l]) / dx;
    F.sqrt_a1[k] = sqrt_a1_face_mean(G, h[l], h[r]);
    F.h_avg[k] = 0.5 * (h[l] + h[r]);
    F.H_avg[k] = 0.5 * (H[l] + H[r]);
    F.alpha0_face[k] = eta1 * F.H_avg[k] + (1.0 - eta1) * F.h_avg[k];
    F.gamma_mean[k] = concentration_face_mean(sigma, ga[l], ga[r]);
    F.beta1p_B[k] = concentration_face_mean(sigma, B[l], B[r]) *
                    (-sigma_divided_difference(sigma, B[l], B[r]));
    if (F.beta1p_B[k] < b1B_floor)
      throw BarrierBreach("regularized flux: beta1'(B) below sigma0*eps/2");

    const double ct = 0.5 * (c[l] + c[r]);
    const double dt = 0.5 * (d[l] + d[r]);
    const double et = 0.5 * (e[l] + e[r]);
    const double sqrt_a0 = std::sqrt(F.alpha0_face[k]);
    const double sdd = sigma_divided_difference(sigma, ga[l], ga[r]);

    F.J_f[k] = -F.grad_alpha1[k] + ct * F.grad_Sigma[k];
    F.J_s[k] = sqrt_a0 * F.grad_sigma[k] - G * dt * et * F.grad_A[k];

    F.flux_h[k] = -F.sqrt_a1[k] * F.J_f[k];
    F.flux_gamma[k] = -D * (F.gamma_mean[k] / F.beta1p_B[k]) * F.grad_sigma[k] -
                      sqrt_a0 * F.gamma_mean[k] * F.J_s[k];

    F.impl_coef_h[k] = F.sqrt_a1[k] * F.sqrt_a1[k];
    F.expl_flux_h[k] = -F.sqrt_a1[k] * ct * F.grad_Sigma[k];
    F.impl_coef_gamma[k] =
        (D * F.gamma_mean[k] / F.beta1p_B[k] + F.alpha0_face[k] * F.gamma_mean[k]) * (-sdd);
    F.expl_flux_gamma[k] = sqrt_a0 * F.gamma_mean[k] * G * dt * et * F.grad_A[k];
  }
  return F;
}

FaceAssembly assemble_original_faces(const State& state, double G, double D,
                                     const SigmaModel& sigma) {
  const Grid& grid = state.grid();
  const int n = grid.n;
  const double dx = grid.dx;
  const auto& h = state.h.values;
  const auto& ga = state.gamma.values;

  // Degenerate coefficients in their reduced closed forms:
  //   a2 sqrt(h)/sqrt(h a1) = sqrt(3 h / 4G),  a2/sqrt(h a1) = sqrt(3/4G),
  //   b2(Gamma)/Gamma = 1.
  std::vector<double> al1(n), sig(n), c(n);
  for (int i = 0; i < n; ++i) {
    al1[i] = alpha1_of(G, h[i]);
    sig[i] = sigma.value(ga[i]);
    c[i] = std::sqrt(0.75 * h[i] / G);
  }
  const double d_const = std::sqrt(0.75 / G);

  FaceAssembly F;
  size_assembly(F, n);
  for (int k = 1; k < n; ++k) {
    const int l = k - 1, r = k;
    F.grad_h[k] = (h[r] - h[l]) / dx;
    F.grad_gamma[k] = (ga[r] - ga[l]) / dx;
    F.grad_sigma[k] = (sig[r] - sig[l]) / dx;
    F.grad_alpha1[k] = (al1[r] - al1[l]) / dx;
    F.grad_A[k] = F.grad_alpha1[k];
    F.grad_Sigma[k] = F.grad_sigma[k];
    F.sqrt_a1[k] = sqrt_a1_face_mean(G, h[l], h[r]);
    F.h_avg[k] = 0.5 * (h[l] + h[r]);
    F.H_avg[k] = F.h_avg[k];
    F.alpha0_face[k] = F.h_avg[k];
    F.gamma_mean[k] = concentration_face_mean(sigma, ga[l], ga[r]);
    F.beta1p_B[k] = F.gamma_mean[k] * (-sigma_divided_difference(sigma, ga[l], ga[r]));

    const double ct = 0.5 * (c[l] + c[r]);
    const double sqrt_h = std::sqrt(F.h_avg[k]);
    const double sdd = sigma_divided_difference(sigma, ga[l], ga[r]);

    F.J_f[k] = -F.grad_alpha1[k] + ct * F.grad_sigma[k];
    F.J_s[k] = sqrt_h * F.grad_sigma[k] - G * d_const * F.grad_alpha1[k];

    F.flux_h[k] = -F.sqrt_a1[k] * F.J_f[k];
    F.flux_gamma[k] = D * F.grad_gamma[k] - sqrt_h * F.gamma_mean[k] * F.J_s[k];

    F.impl_coef_h[k] = F.sqrt_a1[k] * F.sqrt_a1[k];
    F.expl_flux_h[k] = -F.sqrt_a1[k] * ct * F.grad_sigma[k];
    F.impl_coef_gamma[k] = D + F.h_avg[k] * F.gamma_mean[k] * (-sdd);
    F.expl_flux_gamma[k] = sqrt_h * F.gamma_mean[k] * G * d_const * F.grad_alpha1[k];
  }
  return F;
}

FaceAssembly assemble_faces(const State& state, const AuxFields* aux, const ModelParams& params,
                            Scheme scheme) {
  if (scheme == Scheme::regularized) {
    if (!aux) throw std::invalid_argument("assemble_faces: regularized scheme needs aux fields");
    return assemble_regularized_faces(state, *aux, params.G, params.D, params.sigma, params.eps,
                                      params.eta1);
  }
  return assemble_original_faces(state, params.G, params.D, params.sigma);
}

FluxPair regularized_fluxes(const State& state, const AuxFields& aux, const ModelParams& params) {
  FaceAssembly F = assemble_regularized_faces(state, aux, params.G, params.D, params.sigma,
                                              params.eps, params.eta1);
  return {std::move(F.flux_h), std::move(F.flux_gamma)};
}

FluxPair original_fluxes(const State& state, const ModelParams& params) {
  FaceAssembly F = assemble_original_faces(state, params.G, params.D, params.sigma);
  return {std::move(F.flux_h), std::move(F.flux_gamma)};
}

FluxObservables fluxes_J(const State& state, const AuxFields& aux, const ModelParams& params) {
  FaceAssembly F = assemble_regularized_faces(state, aux, params.G, params.D, params.sigma,
                                              params.eps, params.eta1);
  return {std::move(F.J_f), std::move(F.J_s)};
}

FluxObservables fluxes_j_limit(const State& state, const ModelParams& params) {
  FaceAssembly F = assemble_original_faces(state, params.G, params.D, params.sigma);
  return {std::move(F.J_f), std::move(F.J_s)};
}

namespace {

// Conservative IMEX update from a frozen assembly. The accepted state is the
// flux-form update with the implicit face fluxes reconstructed from the
// tridiagonal solution, so the discrete masses telescope exactly.
StepResult attempt_step(const State& state, const FaceAssembly& F, const StepControl& control,
                        Scheme scheme, double eps, const SourceTerms* sources) {
  const Grid& grid = state.grid();
  const int n = grid.n;
  const double dx = grid.dx;
  const double dt = control.dt;
  const double t_next = state.t + dt;

  auto advance = [&](const Field& u, const FaceValues& impl, const FaceValues& expl,
                     const std::function<double(double, double)>* src) {
    Field rhs(grid);
    for (int i = 0; i < n; ++i) {
      double s = u.values[i] + dt * (expl[i + 1] - expl[i]) / dx;
      if (src && *src) s += dt * (*src)(t_next, grid.cell_center(i));
      rhs.values[i] = s;
    }
    Field x = screened_neumann_solve(rhs, dt, impl);
    FaceValues total(n + 1, 0.0);
    for (int k = 1; k < n; ++k)
      total[k] = impl[k] * (x.values[k] - x.values[k - 1]) / dx + expl[k];
    Field out(grid);
    for (int i = 0; i < n; ++i) {
      double s = u.values[i] + dt * (total[i + 1] - total[i]) / dx;
      if (src && *src) s += dt * (*src)(t_next, grid.cell_center(i));
      out.values[i] = s;
    }
    return out;
  };

  Field h_new = advance(state.h, F.impl_coef_h, F.expl_flux_h, sources ? &sources->h : nullptr);
  Field g_new = advance(state.gamma, F.impl_coef_gamma, F.expl_flux_gamma,
                        sources ? &sources->gamma : nullptr);

  if (!all_finite(h_new) || !all_finite(g_new))
    return {State{}, false, "non-finite state after step"};

  const double min_h = min_value(h_new);
  const double min_g = min_value(g_new);
  if (scheme == Scheme::regularized) {
    const double floor_h = std::sqrt(eps) - kPositivityTol;
    const double floor_g = eps - kPositivityTol;
    if (min_h < floor_h) return {State{}, false, "film height breached the sqrt(eps) barrier"};
    if (min_g < floor_g) return {State{}, false, "concentration breached the eps barrier"};
  } else {
    if (min_h < 0) return {State{}, false, "film height went negative"};
    if (min_g < 0) return {State{}, false, "concentration went negative"};
  }
  return {State(t_next, std::move(h_new), std::move(g_new)), true, {}};
}

}  // namespace

StepResult step(const State& state, const ModelParams& params, const StepControl& control,
                Scheme scheme, const SourceTerms* sources) {
  try {
    if (scheme == Scheme::regularized) {
      AuxFields aux = assemble_aux(state, params);
      FaceAssembly F = assemble_faces(state, &aux, params, scheme);
      return attempt_step(state, F, control, scheme, params.eps, sources);
    }
    FaceAssembly F = assemble_faces(state, nullptr, params, scheme);
    return attempt_step(state, F, control, scheme, params.eps, sources);
  } catch (const BarrierBreach& b) {
    return {State{}, false, b.what()};
  }
}

RunResult run(State initial, const ModelParams& params, StepControl control, double t_end,
              Scheme scheme, const RunOptions& options) {
  if (!(control.dt > 0) || !(control.dt_min > 0))
    throw std::invalid_argument("run: step control needs positive dt and dt_min");
  if (control.dt_max < control.dt) control.dt_max = control.dt;

  RunResult result;
  result.last_good = initial;
  StepStats stats;
  stats.min_h_seen = min_value(initial.h);
  stats.min_gamma_seen = min_value(initial.gamma);

  const double tiny = 1e-12 * std::max(1.0, std::abs(t_end));
  State state = std::move(initial);

  double last_record_t = -std::numeric_limits<double>::infinity();
  auto do_record = [&](const State& s) {
    if (!options.on_record) return;
    if (s.t <= last_record_t) return;
    if (scheme == Scheme::regularized) {
      AuxFields aux = assemble_aux(s, params);
      options.on_record(s, &aux);
    } else {
      options.on_record(s, nullptr);
    }
    last_record_t = s.t;
  };

  size_t snap_idx = 0;
  const auto& snaps = options.snapshot_times;
  auto emit_due_snapshots = [&](const State& s) {
    while (snap_idx < snaps.size() && snaps[snap_idx] <= s.t + tiny) {
      if (options.on_snapshot) options.on_snapshot(s);
      ++snap_idx;
    }
  };

  do_record(state);
  emit_due_snapshots(state);

  int consecutive_accepts = 0;
  int consecutive_rejects = 0;
  long long since_record = 0;

  while (state.t < t_end - tiny) {
    double stop = t_end;
    if (snap_idx < snaps.size() && snaps[snap_idx] < stop) stop = snaps[snap_idx];

    double dt_eff = control.dt;
    bool landed = false;
    if (state.t + dt_eff >= stop - tiny) {
      dt_eff = stop - state.t;
      landed = true;
    }

    StepControl attempt = control;
    attempt.dt = dt_eff;
    StepResult r = step(state, params, attempt, scheme, options.sources);

    if (r.accepted) {
      state = std::move(r.next);
      if (landed) state.t = stop;
      ++stats.accepted;
      ++consecutive_accepts;
      consecutive_rejects = 0;
      stats.min_h_seen = std::min(stats.min_h_seen, min_value(state.h));
      stats.min_gamma_seen = std::min(stats.min_gamma_seen, min_value(state.gamma));
      result.last_good = state;
      emit_due_snapshots(state);
      ++since_record;
      if (options.ledger_every > 0 && since_record >= options.ledger_every &&
          state.t < t_end - tiny) {
        do_record(state);
        since_record = 0;
      }
      if (consecutive_accepts >= control.grow_after) {
        control.dt = std::min(control.dt * control.grow, control.dt_max);
        consecutive_accepts = 0;
      }
    } else {
      ++stats.rejected;
      ++consecutive_rejects;
      consecutive_accepts = 0;
      control.dt *= control.shrink;
      if (control.dt < control.dt_min || consecutive_rejects > control.max_rejects) {
        stats.final_dt = control.dt;
        result.stats = stats;
        result.final_state = state;
        result.ok = false;
        result.error = control.dt < control.dt_min
                           ? "time step underflowed dt_min (" + r.reject_reason + ")"
                           : "too many consecutive rejections (" + r.reject_reason + ")";
        return result;
      }
    }
  }

  do_record(state);
  emit_due_snapshots(state);
  stats.final_dt = control.dt;
  result.stats = stats;
  result.final_state = std::move(state);
  result.ok = true;
  return result;
}

}  // namespace sfilm
