// Conservation, barrier, Lyapunov, and dissipation observables, recorded per
// step into an energy ledger and checked against the inequality
//   L(t) + integral_0^t D(s) ds <= L(0)
// for both the regularized functionals (L, D) and the limit ones (L0, D0).

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sfilm/dynamics.hpp"

namespace sfilm {

struct DiagnosticsRecord {
  double t = 0;
  double mass_h = 0, mass_gamma = 0;
  double min_h = 0, min_gamma = 0;
  double L_reg = 0, D_reg = 0, cum_D_reg = 0;
  double L0 = 0, D0 = 0, cum_D0 = 0;
};

struct Violation {
  double t = 0;
  std::string quantity;
  double slack = 0;
};

struct EnergyLedger {
  std::vector<DiagnosticsRecord> records;
  std::vector<Violation> violations;

  // Fills the cumulative dissipation integrals by trapezoid increments;
  // rejects records that do not advance time.
  void append(DiagnosticsRecord rec);
};

double lyapunov_reg(const State& state, const ModelParams& params);
double lyapunov_limit(const State& state, const ModelParams& params);

// The six contributions to D (each already halved, so total() sums them):
// G|J_f|^2, |J_s|^2, (eta1-eta)|sqrt(H) d_x sigma|^2,
// (1-eta1)|sqrt(h) d_x sigma|^2, (1-eta) G |d_x alpha1|^2, and
// 2D int |d_x sigma|^2 / beta1'(B).
struct DissipationTerms {
  double Jf = 0, Js = 0, marangoni_H = 0, marangoni_h = 0, alpha1_grad = 0, entropy = 0;
  double total() const { return Jf + Js + marangoni_H + marangoni_h + alpha1_grad + entropy; }
};

DissipationTerms dissipation_reg_terms(const State& state, const AuxFields& aux,
                                       const ModelParams& params);
double dissipation_reg(const State& state, const AuxFields& aux, const ModelParams& params);

// 2 D0 = G|j_f|^2 + |j_s|^2 + (G^2/75)|d_x h^{5/2}|^2
//        + (1/4)|sqrt(h) d_x sigma|^2 + 8 sigma0 D |d_x sqrt(Gamma)|^2.
struct DissipationLimitTerms {
  double jf = 0, js = 0, h52_grad = 0, marangoni = 0, sqrt_gamma = 0;
  double total() const { return jf + js + h52_grad + marangoni + sqrt_gamma; }
};

DissipationLimitTerms dissipation_limit_terms(const State& state, const ModelParams& params);
double dissipation_limit(const State& state, const ModelParams& params);

// One ledger row; aux == nullptr (original scheme) leaves the regularized
// dissipation NaN.
DiagnosticsRecord make_record(const State& state, const AuxFields* aux,
                              const ModelParams& params);

std::vector<double> ledger_slack_reg(const EnergyLedger& ledger);
std::vector<double> ledger_slack_limit(const EnergyLedger& ledger);

struct LedgerReport {
  double tol = 0;
  double worst_slack_reg = 0;
  double worst_slack_limit = 0;
  std::vector<Violation> violations;
};

// Default tolerance is the scheme-consistency budget
// 10 * (max record interval) * max |dL/dt| estimated from the ledger.
LedgerReport ledger_check(const EnergyLedger& ledger, std::optional<double> tol = {});

// Whether the inequality that the given scheme is accountable for holds.
bool ledger_ok_for(const LedgerReport& report, Scheme scheme);

struct BoundsReport {
  struct Item {
    std::string name;
    double value = 0, reference = 0, slack = 0;
    bool pass = false;
  };
  std::vector<Item> items;
  bool all_pass() const {
    for (const auto& it : items)
      if (!it.pass) return false;
    return true;
  }
};

// Barrier floors (sqrt(eps), eps for the regularized scheme; 0 otherwise)
// and mass invariance against the reference masses.
BoundsReport bounds_check(const State& state, const ModelParams& params, Scheme scheme,
                          double ref_mass_h, double ref_mass_gamma,
                          double barrier_tol = 1e-10, double mass_rel_tol = 1e-10);

// int Gamma |ln Gamma| dx by midpoint quadrature.
double entropy_integral(const Field& gamma);

// Bound on the entropy integral along a regularized trajectory:
// (L0(0) + sigma0 |Gamma_0|_1 + sigma0 L / e) / sigma0.
double entropy_admissible_bound(double L0_initial, double mass_gamma_initial, double sigma0,
                                double length);

// max_{i != j} |f_i - f_j| / |x_i - x_j|^theta (monitored only, no threshold).
double holder_quotient(const Field& f, double theta);

struct TrajectoryPoint {
  double t = 0;
  State state;
};

struct UniformMonitorReport {
  std::vector<double> t;
  std::vector<double> h_l2;         // |h(t)|_2
  std::vector<double> entropy;      // int Gamma |ln Gamma|
  std::vector<double> cum_flux_l2;  // int_0^t (|J_f|^2 + |J_s|^2)
  std::vector<double> cum_h52;      // int_0^t (|h^{5/2}|_{W12}^2 + |h|_inf^5)
};

UniformMonitorReport uniform_estimates_monitor(const std::vector<TrajectoryPoint>& trajectory,
                                               const ModelParams& params, Scheme scheme);

}  // namespace sfilm
