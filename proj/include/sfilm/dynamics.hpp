// Time-stepping core: flux assembly for the regularized and the original
// system, the semi-implicit step, and the flux observables.
//
// Face-value conventions (the discrete energy identities depend on them):
//   * sqrt_a1 face value s_k is the divided difference of alpha1 in h, so
//     s_k * grad(h)_k = grad(alpha1(h))_k at every face.
//   * The concentration face value m_k satisfies
//     m_k * (phi'(G_r) - phi'(G_l)) = -(sigma(G_r) - sigma(G_l))
//     (the log mean for linear sigma); paired with the face value of
//     beta1'(B) built the same way, the entropy production telescopes.
//   * All remaining scalar prefactors are arithmetic means of cell values,
//     which keeps G * c^2 <= eta * H and the companion mobility bounds exact
//     (convexity plus the pointwise mobility inequality).
// With these choices the semidiscrete Lyapunov inequality dL/dt <= -D holds
// up to rounding, so the ledger defect measures only the time discretization.

#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "sfilm/constitutive.hpp"
#include "sfilm/grid.hpp"
#include "sfilm/helmholtz.hpp"

namespace sfilm {

enum class Scheme { regularized, original };

// Positivity slack granted to accepted states below the exact barriers.
inline constexpr double kPositivityTol = 1e-10;

struct State {
  double t = 0;
  Field h;
  Field gamma;

  State() = default;
  State(double time, Field h_, Field g_) : t(time), h(std::move(h_)), gamma(std::move(g_)) {
    if (!(h.grid == gamma.grid)) throw std::invalid_argument("State: h and gamma must share a grid");
  }
  const Grid& grid() const { return h.grid; }
};

struct StepControl {
  double dt = 0;
  double dt_min = 1e-12;
  double dt_max = 0;
  double shrink = 0.5;
  double grow = 1.2;
  int grow_after = 5;   // consecutive accepts before dt may grow
  int max_rejects = 40;
};

// H = N_eps(h), A = N_eps(alpha1(h)), B = N_eps(Gamma), Sigma from the
// screened pressure solve.
struct AuxFields {
  Field H, A, B, Sigma;
};

// Manufactured-solution residuals added to the right-hand sides.
struct SourceTerms {
  std::function<double(double t, double x)> h;
  std::function<double(double t, double x)> gamma;
};

// Everything one flux assembly produces; all arrays are face-indexed with
// zero boundary entries.
struct FaceAssembly {
  FaceValues grad_h, grad_gamma, grad_sigma, grad_alpha1, grad_A, grad_Sigma;
  FaceValues sqrt_a1;       // s_k
  FaceValues h_avg, H_avg;  // arithmetic face means
  FaceValues alpha0_face;   // eta1 * H_avg + (1 - eta1) * h_avg
  FaceValues gamma_mean;    // entropic concentration mean
  FaceValues beta1p_B;      // face value of beta1'(B), entropic form
  FaceValues J_f, J_s;      // dissipation flux observables
  FaceValues flux_h, flux_gamma;            // total fluxes F with dh/dt = div F
  FaceValues impl_coef_h, impl_coef_gamma;  // diffusive coefficients taken implicit
  FaceValues expl_flux_h, expl_flux_gamma;  // remaining explicit flux parts
};

// Face means used throughout; exposed for the oracle tests.
double sqrt_a1_face_mean(double G, double hl, double hr);
double concentration_face_mean(const SigmaModel& sigma, double gl, double gr);
double sigma_divided_difference(const SigmaModel& sigma, double gl, double gr);

AuxFields assemble_aux(const State& state, const ModelParams& params);

// Low-level assemblers; the eps/eta1 arguments are separate so the formal
// eps -> 0 substitution can be exercised directly.
FaceAssembly assemble_regularized_faces(const State& state, const AuxFields& aux, double G,
                                        double D, const SigmaModel& sigma, double eps,
                                        double eta1);
FaceAssembly assemble_original_faces(const State& state, double G, double D,
                                     const SigmaModel& sigma);
FaceAssembly assemble_faces(const State& state, const AuxFields* aux, const ModelParams& params,
                            Scheme scheme);

struct FluxPair {
  FaceValues h;
  FaceValues gamma;
};

FluxPair regularized_fluxes(const State& state, const AuxFields& aux, const ModelParams& params);
FluxPair original_fluxes(const State& state, const ModelParams& params);

struct FluxObservables {
  FaceValues J_f;
  FaceValues J_s;
};

// Regularized flux observables (b-level J's).
FluxObservables fluxes_J(const State& state, const AuxFields& aux, const ModelParams& params);

// Weak-solution fluxes of the limit system: j_f and j_s from cell data.
FluxObservables fluxes_j_limit(const State& state, const ModelParams& params);

struct StepResult {
  State next;
  bool accepted = false;
  std::string reject_reason;
};

// One IMEX step of size control.dt: diagonal diffusion implicit with
// coefficients frozen at the old state (one tridiagonal solve per unknown),
// cross/Marangoni terms explicit. Positivity violations and non-finite
// results reject the step; accepted states are produced by the conservative
// face-flux update, so mass is invariant by construction.
StepResult step(const State& state, const ModelParams& params, const StepControl& control,
                Scheme scheme, const SourceTerms* sources = nullptr);

struct StepStats {
  long long accepted = 0;
  long long rejected = 0;
  double final_dt = 0;
  double min_h_seen = std::numeric_limits<double>::infinity();
  double min_gamma_seen = std::numeric_limits<double>::infinity();
};

struct RunOptions {
  int ledger_every = 1;                // record cadence in accepted steps (0 = endpoints only)
  std::vector<double> snapshot_times;  // strictly increasing; landed exactly
  const SourceTerms* sources = nullptr;
  // Invoked at t = 0, at the ledger cadence, and at t_end. aux is null for
  // the original scheme.
  std::function<void(const State&, const AuxFields*)> on_record;
  std::function<void(const State&)> on_snapshot;
};

struct RunResult {
  State final_state;
  StepStats stats;
  bool ok = false;
  std::string error;
  State last_good;
};

RunResult run(State initial, const ModelParams& params, StepControl control, double t_end,
              Scheme scheme, const RunOptions& options = {});

}  // namespace sfilm
