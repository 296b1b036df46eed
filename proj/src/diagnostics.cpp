#include "sfilm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sfilm {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

void EnergyLedger::append(DiagnosticsRecord rec) {
  if (!records.empty()) {
    const DiagnosticsRecord& prev = records.back();
    if (!(rec.t > prev.t))
      throw std::invalid_argument("EnergyLedger: records must be strictly increasing in t");
    const double dt = rec.t - prev.t;
    rec.cum_D_reg = prev.cum_D_reg + 0.5 * (prev.D_reg + rec.D_reg) * dt;
    rec.cum_D0 = prev.cum_D0 + 0.5 * (prev.D0 + rec.D0) * dt;
  } else {
    rec.cum_D_reg = 0;
    rec.cum_D0 = 0;
  }
  records.push_back(std::move(rec));
}

double lyapunov_reg(const State& state, const ModelParams& params) {
  double s = 0;
  for (int i = 0; i < state.grid().n; ++i) {
    const double h = state.h.values[i];
    s += 0.5 * params.G * h * h + params.sigma.phi(state.gamma.values[i]);
  }
  return s * state.grid().dx;
}

double lyapunov_limit(const State& state, const ModelParams& params) {
  return lyapunov_reg(state, params);
}

DissipationTerms dissipation_reg_terms(const State& state, const AuxFields& aux,
                                       const ModelParams& params) {
  const FaceAssembly F = assemble_regularized_faces(state, aux, params.G, params.D, params.sigma,
                                                    params.eps, params.eta1);
  const Grid& g = state.grid();
  DissipationTerms T;
  T.Jf = 0.5 * params.G * face_l2_sq(g, F.J_f);
  T.Js = 0.5 * face_l2_sq(g, F.J_s);
  T.marangoni_H = 0.5 * (params.eta1 - ModelParams::eta) *
                  weighted_face_l2_sq(g, F.H_avg, F.grad_sigma);
  T.marangoni_h = 0.5 * (1.0 - params.eta1) * weighted_face_l2_sq(g, F.h_avg, F.grad_sigma);
  T.alpha1_grad = 0.5 * (1.0 - ModelParams::eta) * params.G * face_l2_sq(g, F.grad_alpha1);
  double ent = 0;
  for (int k = 1; k < g.n; ++k)
    ent += F.grad_sigma[k] * F.grad_sigma[k] / F.beta1p_B[k];
  T.entropy = params.D * ent * g.dx;
  return T;
}

double dissipation_reg(const State& state, const AuxFields& aux, const ModelParams& params) {
  return dissipation_reg_terms(state, aux, params).total();
}

DissipationLimitTerms dissipation_limit_terms(const State& state, const ModelParams& params) {
  const FaceAssembly F = assemble_original_faces(state, params.G, params.D, params.sigma);
  const Grid& g = state.grid();
  Field h52(g), sqg(g);
  for (int i = 0; i < g.n; ++i) {
    h52.values[i] = std::pow(state.h.values[i], 2.5);
    sqg.values[i] = std::sqrt(state.gamma.values[i]);
  }
  DissipationLimitTerms T;
  T.jf = 0.5 * params.G * face_l2_sq(g, F.J_f);
  T.js = 0.5 * face_l2_sq(g, F.J_s);
  T.h52_grad = 0.5 * params.G * params.G / 75.0 * face_l2_sq(g, face_gradient(h52));
  T.marangoni = 0.125 * weighted_face_l2_sq(g, F.h_avg, F.grad_sigma);
  T.sqrt_gamma = 4.0 * params.sigma.sigma0() * params.D * face_l2_sq(g, face_gradient(sqg));
  return T;
}

double dissipation_limit(const State& state, const ModelParams& params) {
  return dissipation_limit_terms(state, params).total();
}

DiagnosticsRecord make_record(const State& state, const AuxFields* aux,
                              const ModelParams& params) {
  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.mass_h = discrete_norm(state.h, Norm::L1);
  rec.mass_gamma = discrete_norm(state.gamma, Norm::L1);
  rec.min_h = *std::min_element(state.h.values.begin(), state.h.values.end());
  rec.min_gamma = *std::min_element(state.gamma.values.begin(), state.gamma.values.end());
  rec.L_reg = lyapunov_reg(state, params);
  rec.L0 = rec.L_reg;
  rec.D_reg = aux ? dissipation_reg(state, *aux, params) : kNaN;
  rec.D0 = dissipation_limit(state, params);
  return rec;
}

std::vector<double> ledger_slack_reg(const EnergyLedger& ledger) {
  std::vector<double> s;
  if (ledger.records.empty()) return s;
  const double L0 = ledger.records.front().L_reg;
  s.reserve(ledger.records.size());
  for (const auto& r : ledger.records) s.push_back(L0 - r.L_reg - r.cum_D_reg);
  return s;
}

std::vector<double> ledger_slack_limit(const EnergyLedger& ledger) {
  std::vector<double> s;
  if (ledger.records.empty()) return s;
  const double L0 = ledger.records.front().L0;
  s.reserve(ledger.records.size());
  for (const auto& r : ledger.records) s.push_back(L0 - r.L0 - r.cum_D0);
  return s;
}

LedgerReport ledger_check(const EnergyLedger& ledger, std::optional<double> tol) {
  LedgerReport rep;
  const auto& recs = ledger.records;
  if (recs.size() < 2) {
    rep.tol = tol.value_or(0.0);
    return rep;
  }
  if (!tol) {
    double max_dt = 0, max_rate = 0;
    for (size_t m = 1; m < recs.size(); ++m) {
      const double dt = recs[m].t - recs[m - 1].t;
      max_dt = std::max(max_dt, dt);
      max_rate = std::max(max_rate, std::abs(recs[m].L0 - recs[m - 1].L0) / dt);
    }
    rep.tol = 10.0 * max_dt * max_rate;
  } else {
    rep.tol = *tol;
  }

  const auto sr = ledger_slack_reg(ledger);
  const auto sl = ledger_slack_limit(ledger);
  rep.worst_slack_reg = std::numeric_limits<double>::infinity();
  rep.worst_slack_limit = std::numeric_limits<double>::infinity();
  for (size_t m = 0; m < recs.size(); ++m) {
    if (!std::isnan(sr[m])) {
      rep.worst_slack_reg = std::min(rep.worst_slack_reg, sr[m]);
      if (sr[m] < -rep.tol) rep.violations.push_back({recs[m].t, "energy_reg", sr[m]});
    }
    rep.worst_slack_limit = std::min(rep.worst_slack_limit, sl[m]);
    if (sl[m] < -rep.tol) rep.violations.push_back({recs[m].t, "energy_limit", sl[m]});
  }
  return rep;
}

bool ledger_ok_for(const LedgerReport& report, Scheme scheme) {
  const std::string tag = scheme == Scheme::regularized ? "energy_reg" : "energy_limit";
  for (const auto& v : report.violations)
    if (v.quantity == tag) return false;
  return true;
}

BoundsReport bounds_check(const State& state, const ModelParams& params, Scheme scheme,
                          double ref_mass_h, double ref_mass_gamma, double barrier_tol,
                          double mass_rel_tol) {
  BoundsReport rep;
  const double floor_h = scheme == Scheme::regularized ? params.sqrt_eps() : 0.0;
  const double floor_g = scheme == Scheme::regularized ? params.eps : 0.0;
  const double min_h = *std::min_element(state.h.values.begin(), state.h.values.end());
  const double min_g = *std::min_element(state.gamma.values.begin(), state.gamma.values.end());

  auto barrier = [&](const std::string& name, double value, double floor) {
    BoundsReport::Item it;
    it.name = name;
    it.value = value;
    it.reference = floor;
    it.slack = value - floor;
    it.pass = it.slack >= -barrier_tol;
    rep.items.push_back(it);
  };
  barrier("barrier_h", min_h, floor_h);
  barrier("barrier_gamma", min_g, floor_g);

  auto mass = [&](const std::string& name, double value, double ref) {
    BoundsReport::Item it;
    it.name = name;
    it.value = value;
    it.reference = ref;
    const double scale = std::max(std::abs(ref), 1e-300);
    it.slack = mass_rel_tol - std::abs(value - ref) / scale;
    it.pass = it.slack >= 0;
    rep.items.push_back(it);
  };
  mass("mass_h", discrete_norm(state.h, Norm::L1), ref_mass_h);
  mass("mass_gamma", discrete_norm(state.gamma, Norm::L1), ref_mass_gamma);
  return rep;
}

double entropy_integral(const Field& gamma) {
  double s = 0;
  for (double g : gamma.values)
    if (g > 0) s += g * std::abs(std::log(g));
  return s * gamma.grid.dx;
}

double entropy_admissible_bound(double L0_initial, double mass_gamma_initial, double sigma0,
                                double length) {
  return (L0_initial + sigma0 * mass_gamma_initial + sigma0 * length / std::exp(1.0)) / sigma0;
}

double holder_quotient(const Field& f, double theta) {
  const Grid& g = f.grid;
  double q = 0;
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j) {
      const double dxij = (j - i) * g.dx;
      q = std::max(q, std::abs(f.values[i] - f.values[j]) / std::pow(dxij, theta));
    }
  return q;
}

UniformMonitorReport uniform_estimates_monitor(const std::vector<TrajectoryPoint>& trajectory,
                                               const ModelParams& params, Scheme scheme) {
  UniformMonitorReport rep;
  std::vector<double> flux_sq, h52_budget;
  for (const auto& p : trajectory) {
    const Grid& g = p.state.grid();
    rep.t.push_back(p.t);
    rep.h_l2.push_back(discrete_norm(p.state.h, Norm::L2));
    rep.entropy.push_back(entropy_integral(p.state.gamma));

    FluxObservables J = scheme == Scheme::regularized
                            ? fluxes_J(p.state, assemble_aux(p.state, params), params)
                            : fluxes_j_limit(p.state, params);
    flux_sq.push_back(face_l2_sq(g, J.J_f) + face_l2_sq(g, J.J_s));

    Field h52(g);
    for (int i = 0; i < g.n; ++i) h52.values[i] = std::pow(p.state.h.values[i], 2.5);
    const double w12 = discrete_norm(h52, Norm::L2) * discrete_norm(h52, Norm::L2) +
                       face_l2_sq(g, face_gradient(h52));
    const double hinf = discrete_norm(p.state.h, Norm::Linf);
    h52_budget.push_back(w12 + std::pow(hinf, 5));
  }
  rep.cum_flux_l2.assign(rep.t.size(), 0.0);
  rep.cum_h52.assign(rep.t.size(), 0.0);
  for (size_t m = 1; m < rep.t.size(); ++m) {
    const double dt = rep.t[m] - rep.t[m - 1];
    rep.cum_flux_l2[m] = rep.cum_flux_l2[m - 1] + 0.5 * (flux_sq[m] + flux_sq[m - 1]) * dt;
    rep.cum_h52[m] = rep.cum_h52[m - 1] + 0.5 * (h52_budget[m] + h52_budget[m - 1]) * dt;
  }
  return rep;
}

}  // namespace sfilm
