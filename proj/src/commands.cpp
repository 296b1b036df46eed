#include "sfilm/commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sfilm {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string time_label(double t) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.9g", t);
  return buf;
}

void write_snapshot(const fs::path& dir, const State& s, const ModelParams& params) {
  const FluxObservables j = fluxes_j_limit(s, params);
  std::ofstream out(dir / ("snap_" + time_label(s.t) + ".csv"));
  out << "x,h,gamma,j_f,j_s\n";
  const Grid& g = s.grid();
  for (int i = 0; i < g.n; ++i) {
    const double jf = 0.5 * (j.J_f[i] + j.J_f[i + 1]);
    const double js = 0.5 * (j.J_s[i] + j.J_s[i + 1]);
    out << format_double(g.cell_center(i)) << ',' << format_double(s.h.values[i]) << ','
        << format_double(s.gamma.values[i]) << ',' << format_double(jf) << ','
        << format_double(js) << '\n';
  }
}

void write_state_dump(const fs::path& path, const State& s) {
  std::ofstream out(path);
  out << "x,h,gamma\n";
  const Grid& g = s.grid();
  for (int i = 0; i < g.n; ++i)
    out << format_double(g.cell_center(i)) << ',' << format_double(s.h.values[i]) << ','
        << format_double(s.gamma.values[i]) << '\n';
}

void write_ledger_csv(const fs::path& path, const EnergyLedger& ledger) {
  const auto slack_reg = ledger_slack_reg(ledger);
  const auto slack_lim = ledger_slack_limit(ledger);
  std::ofstream out(path);
  out << "t,mass_h,mass_gamma,min_h,min_gamma,L_reg,D_reg,cum_D_reg,L0,D0,cum_D0,"
         "slack_reg,slack_limit\n";
  for (size_t m = 0; m < ledger.records.size(); ++m) {
    const auto& r = ledger.records[m];
    out << format_double(r.t) << ',' << format_double(r.mass_h) << ','
        << format_double(r.mass_gamma) << ',' << format_double(r.min_h) << ','
        << format_double(r.min_gamma) << ',' << format_double(r.L_reg) << ','
        << format_double(r.D_reg) << ',' << format_double(r.cum_D_reg) << ','
        << format_double(r.L0) << ',' << format_double(r.D0) << ',' << format_double(r.cum_D0)
        << ',' << format_double(slack_reg[m]) << ',' << format_double(slack_lim[m]) << '\n';
  }
}

json violations_json(const std::vector<Violation>& violations) {
  json arr = json::array();
  for (const auto& v : violations)
    arr.push_back({{"t", v.t}, {"quantity", v.quantity}, {"slack", v.slack}});
  return arr;
}

std::vector<double> snapshot_schedule(double every, double t_end) {
  std::vector<double> times{0.0};
  if (every > 0) {
    for (int k = 1;; ++k) {
      const double t = k * every;
      if (t >= t_end - 1e-12 * std::max(1.0, t_end)) break;
      times.push_back(t);
    }
  }
  times.push_back(t_end);
  return times;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& log) {
  const ModelParams params = config.make_params();
  const State initial = config.make_initial_state();
  const double mass_h0 = discrete_norm(initial.h, Norm::L1);
  const double mass_g0 = discrete_norm(initial.gamma, Norm::L1);

  const fs::path dir(config.directory);
  fs::create_directories(dir);

  EnergyLedger ledger;
  RunOptions opt;
  opt.ledger_every = config.ledger_every;
  opt.snapshot_times = snapshot_schedule(config.snapshot_every, config.t_end);
  opt.on_record = [&](const State& s, const AuxFields* aux) {
    ledger.append(make_record(s, aux, params));
  };
  opt.on_snapshot = [&](const State& s) { write_snapshot(dir, s, params); };

  const RunResult result =
      run(initial, params, config.make_control(), config.t_end, config.scheme, opt);

  write_ledger_csv(dir / "ledger.csv", ledger);
  const LedgerReport lrep = ledger_check(ledger);
  const bool energy_ok = ledger_ok_for(lrep, config.scheme);

  json summary;
  summary["scheme"] = config.scheme == Scheme::regularized ? "regularized" : "original";
  summary["status"] = result.ok ? (energy_ok ? "ok" : "energy_violation") : "step_failure";
  summary["t_final"] = result.final_state.t;
  summary["steps"] = {{"accepted", result.stats.accepted},
                      {"rejected", result.stats.rejected},
                      {"final_dt", result.stats.final_dt}};
  summary["minima"] = {{"h", result.stats.min_h_seen}, {"gamma", result.stats.min_gamma_seen}};

  if (result.ok) {
    const BoundsReport bounds =
        bounds_check(result.final_state, params, config.scheme, mass_h0, mass_g0);
    json bj = json::array();
    for (const auto& it : bounds.items)
      bj.push_back({{"name", it.name},
                    {"value", it.value},
                    {"reference", it.reference},
                    {"slack", it.slack},
                    {"pass", it.pass}});
    summary["bounds"] = bj;
    const auto& last = ledger.records.back();
    summary["conservation"] = {
        {"mass_h_drift_rel", std::abs(last.mass_h - mass_h0) / mass_h0},
        {"mass_gamma_drift_rel", std::abs(last.mass_gamma - mass_g0) / mass_g0}};
    if (config.scheme == Scheme::regularized) {
      const AuxFields aux = assemble_aux(result.final_state, params);
      const DissipationTerms T = dissipation_reg_terms(result.final_state, aux, params);
      summary["final_dissipation_terms"] = {{"Jf", T.Jf},
                                            {"Js", T.Js},
                                            {"marangoni_H", T.marangoni_H},
                                            {"marangoni_h", T.marangoni_h},
                                            {"alpha1_grad", T.alpha1_grad},
                                            {"entropy", T.entropy}};
    }
  } else {
    summary["error"] = result.error;
    write_state_dump(dir / "last_good_state.csv", result.last_good);
    summary["last_good_t"] = result.last_good.t;
  }

  summary["ledger"] = {{"records", ledger.records.size()},
                       {"tol", lrep.tol},
                       {"worst_slack_reg", lrep.worst_slack_reg},
                       {"worst_slack_limit", lrep.worst_slack_limit},
                       {"violations", violations_json(lrep.violations)}};

  std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';

  if (!result.ok) {
    log << "run failed: " << result.error << "\n";
    return 1;
  }
  log << "run complete: t=" << format_double(result.final_state.t)
      << " accepted=" << result.stats.accepted << " rejected=" << result.stats.rejected
      << " worst_slack=" << format_double(config.scheme == Scheme::regularized
                                              ? lrep.worst_slack_reg
                                              : lrep.worst_slack_limit)
      << "\n";
  return energy_ok ? 0 : 1;
}

int cmd_sweep(const RunConfig& config, const std::vector<double>& eps_list, int jobs,
              bool strict, std::ostream& log) {
  if (eps_list.size() < 3) {
    log << "sweep needs at least 3 eps values for rates\n";
    return 2;
  }
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] <= eps_list[i - 1])) {
      log << "eps list must be decreasing\n";
      return 2;
    }

  SweepPlan plan;
  plan.eps_list = eps_list;
  plan.base = config;
  const ConvergenceTable table = eps_sweep(plan, jobs);

  const fs::path dir(config.directory);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "sweep.csv");
    out << "eps_hi,eps_lo,d_l2qt_h,d_l2qt_gamma,d_l2sup_h,d_l2sup_gamma,"
           "rate_l2qt_h,rate_l2qt_gamma,status\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (size_t m = 0; m < table.rows.size(); ++m) {
      const auto& r = table.rows[m];
      const double rh = m < table.rate_l2qt_h.size() ? table.rate_l2qt_h[m] : nan;
      const double rg = m < table.rate_l2qt_gamma.size() ? table.rate_l2qt_gamma[m] : nan;
      out << format_double(r.eps_hi) << ',' << format_double(r.eps_lo) << ','
          << format_double(r.d_l2qt_h) << ',' << format_double(r.d_l2qt_gamma) << ','
          << format_double(r.d_l2sup_h) << ',' << format_double(r.d_l2sup_gamma) << ','
          << format_double(rh) << ',' << format_double(rg) << ','
          << (r.ok ? "ok" : ("failed: " + r.error)) << '\n';
    }
  }

  const bool mono = table.distances_strictly_decreasing();
  json summary;
  summary["members_ok"] = table.all_members_ok;
  summary["distances_strictly_decreasing"] = mono;
  summary["member_errors"] = table.member_errors;
  json monitors = json::array();
  for (const auto& m : table.monitors)
    monitors.push_back({{"eps", m.eps},
                        {"sup_h_l2", m.sup_h_l2},
                        {"sup_entropy", m.sup_entropy},
                        {"cum_flux_l2", m.cum_flux_l2},
                        {"cum_h52_budget", m.cum_h52_budget},
                        {"max_holder_h", m.max_holder_h}});
  summary["monitors"] = monitors;
  std::ofstream(dir / "sweep_summary.json") << summary.dump(2) << '\n';

  for (size_t m = 0; m < table.rows.size(); ++m) {
    const auto& r = table.rows[m];
    log << "eps " << format_double(r.eps_hi) << " -> " << format_double(r.eps_lo)
        << ": d_h=" << format_double(r.d_l2qt_h) << " d_gamma=" << format_double(r.d_l2qt_gamma)
        << (r.ok ? "" : " [failed]") << "\n";
  }
  if (!table.all_members_ok) {
    log << "sweep: member run failures\n";
    return 1;
  }
  if (strict && !mono) {
    log << "sweep: distances not strictly decreasing\n";
    return 1;
  }
  return 0;
}

int cmd_mms(const RunConfig& config, std::ostream& log) {
  MmsOptions opt;
  opt.length = config.length;
  const MmsReport rep = mms_verify(config.make_params(), opt);

  const fs::path dir(config.directory);
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "mms.csv");
    out << "kind,resolution,value,order\n";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (size_t m = 0; m < rep.spatial.size(); ++m) {
      const double o = m < rep.spatial_orders.size() ? rep.spatial_orders[m] : nan;
      out << "spatial," << rep.spatial[m].first << ',' << format_double(rep.spatial[m].second)
          << ',' << format_double(o) << '\n';
    }
    for (size_t m = 0; m < rep.temporal.size(); ++m) {
      const double o = m < rep.temporal_orders.size() ? rep.temporal_orders[m] : nan;
      out << "temporal," << format_double(rep.temporal[m].first) << ','
          << format_double(rep.temporal[m].second) << ',' << format_double(o) << '\n';
    }
  }

  log << "mms: spatial order " << format_double(rep.spatial_order) << ", temporal order "
      << format_double(rep.temporal_order) << "\n";
  return (rep.spatial_order >= 1.8 && rep.temporal_order >= 0.9) ? 0 : 1;
}

int cmd_check_config(const std::string& path, std::ostream& log) {
  try {
    const RunConfig cfg = load_config_file(path);
    log << "config ok: n_cells=" << cfg.n_cells << " length=" << format_double(cfg.length)
        << " scheme=" << (cfg.scheme == Scheme::regularized ? "regularized" : "original")
        << " eps=" << format_double(cfg.eps) << " eta1=" << format_double(cfg.eta1)
        << " t_end=" << format_double(cfg.t_end) << "\n";
    return 0;
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sfilm
