#include "sfilm/study.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace sfilm {

namespace {

std::vector<double> linspace(double a, double b, int m) {
  std::vector<double> v(m);
  for (int j = 0; j < m; ++j) v[j] = a + (b - a) * j / (m - 1);
  v.back() = b;
  return v;
}

struct MemberTrajectory {
  bool ok = false;
  std::string error;
  std::vector<Field> h, gamma;  // one entry per shared sample time
};

double combined_l2(const State& a, const State& b) {
  double s = 0;
  for (int i = 0; i < a.grid().n; ++i) {
    const double dh = a.h.values[i] - b.h.values[i];
    const double dg = a.gamma.values[i] - b.gamma.values[i];
    s += dh * dh + dg * dg;
  }
  return std::sqrt(s * a.grid().dx);
}

}  // namespace

bool ConvergenceTable::distances_strictly_decreasing() const {
  for (size_t m = 1; m < rows.size(); ++m) {
    if (!rows[m].ok || !rows[m - 1].ok) return false;
    if (!(rows[m].d_l2qt_h < rows[m - 1].d_l2qt_h)) return false;
    if (!(rows[m].d_l2qt_gamma < rows[m - 1].d_l2qt_gamma)) return false;
  }
  return !rows.empty();
}

ConvergenceTable eps_sweep(const SweepPlan& plan, int jobs) {
  if (plan.eps_list.size() < 3)
    throw std::invalid_argument("eps_sweep: need at least 3 eps values for rates");
  for (size_t i = 1; i < plan.eps_list.size(); ++i)
    if (!(plan.eps_list[i] <= plan.eps_list[i - 1]))
      throw std::invalid_argument("eps_sweep: eps list must be decreasing");

  const size_t members = plan.eps_list.size();
  const std::vector<double> times = linspace(0.0, plan.base.t_end, plan.n_snapshot_times);
  std::vector<MemberTrajectory> out(members);

  auto run_member = [&](size_t idx) {
    MemberTrajectory traj;
    try {
      RunConfig cfg = plan.base;
      cfg.scheme = Scheme::regularized;
      cfg.eps = plan.eps_list[idx];
      const ModelParams params = cfg.make_params();
      const State initial = cfg.make_initial_state();
      const double mass_h0 = discrete_norm(initial.h, Norm::L1);
      const double mass_g0 = discrete_norm(initial.gamma, Norm::L1);

      EnergyLedger ledger;
      RunOptions opt;
      opt.ledger_every = 1;
      opt.snapshot_times = times;
      opt.on_record = [&](const State& s, const AuxFields* aux) {
        ledger.append(make_record(s, aux, params));
      };
      opt.on_snapshot = [&](const State& s) {
        traj.h.push_back(s.h);
        traj.gamma.push_back(s.gamma);
      };
      RunResult r = run(initial, params, cfg.make_control(), cfg.t_end, Scheme::regularized, opt);
      if (!r.ok) {
        traj.error = r.error;
        return traj;
      }
      const BoundsReport bounds =
          bounds_check(r.final_state, params, Scheme::regularized, mass_h0, mass_g0);
      if (!bounds.all_pass()) {
        traj.error = "conservation/barrier check failed";
        return traj;
      }
      const LedgerReport lr = ledger_check(ledger);
      if (!ledger_ok_for(lr, Scheme::regularized)) {
        traj.error = "energy ledger violation";
        return traj;
      }
      if (traj.h.size() != times.size()) {
        traj.error = "trajectory sampling incomplete";
        return traj;
      }
      traj.ok = true;
    } catch (const std::exception& e) {
      traj.error = e.what();
    }
    return traj;
  };

  int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(members)));
  if (workers == 1) {
    for (size_t i = 0; i < members; ++i) out[i] = run_member(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (size_t i; (i = next.fetch_add(1)) < members;) out[i] = run_member(i);
      });
    for (auto& t : pool) t.join();
  }

  ConvergenceTable table;
  table.member_errors.resize(members);
  for (size_t i = 0; i < members; ++i) {
    table.member_errors[i] = out[i].error;
    if (!out[i].ok) table.all_members_ok = false;
  }

  // Per-member trend monitors over the sampled trajectories.
  for (size_t i = 0; i < members; ++i) {
    if (!out[i].ok) continue;
    RunConfig cfg = plan.base;
    cfg.scheme = Scheme::regularized;
    cfg.eps = plan.eps_list[i];
    const ModelParams params = cfg.make_params();
    std::vector<TrajectoryPoint> traj;
    traj.reserve(times.size());
    for (size_t j = 0; j < times.size(); ++j)
      traj.push_back({times[j], State(times[j], out[i].h[j], out[i].gamma[j])});
    const UniformMonitorReport mon = uniform_estimates_monitor(traj, params, Scheme::regularized);
    ConvergenceTable::MemberMonitor m;
    m.eps = plan.eps_list[i];
    for (size_t j = 0; j < mon.t.size(); ++j) {
      m.sup_h_l2 = std::max(m.sup_h_l2, mon.h_l2[j]);
      m.sup_entropy = std::max(m.sup_entropy, mon.entropy[j]);
      m.max_holder_h = std::max(m.max_holder_h, holder_quotient(out[i].h[j], 0.2));
    }
    m.cum_flux_l2 = mon.cum_flux_l2.back();
    m.cum_h52_budget = mon.cum_h52.back();
    table.monitors.push_back(m);
  }

  // Time-trapezoid weights over the shared sample times.
  const int M = plan.n_snapshot_times;
  std::vector<double> w(M);
  for (int j = 0; j < M; ++j) {
    const double left = j > 0 ? times[j] - times[j - 1] : 0.0;
    const double right = j + 1 < M ? times[j + 1] - times[j] : 0.0;
    w[j] = 0.5 * (left + right);
  }

  for (size_t m = 0; m + 1 < members; ++m) {
    ConvergenceTable::Row row;
    row.eps_hi = plan.eps_list[m];
    row.eps_lo = plan.eps_list[m + 1];
    if (out[m].ok && out[m + 1].ok) {
      const Grid& g = plan.base.make_grid();
      double qh = 0, qg = 0, sh = 0, sg = 0;
      for (int j = 0; j < M; ++j) {
        double l2h = 0, l2g = 0, suph = 0, supg = 0;
        for (int i = 0; i < g.n; ++i) {
          const double dh = out[m].h[j].values[i] - out[m + 1].h[j].values[i];
          const double dg = out[m].gamma[j].values[i] - out[m + 1].gamma[j].values[i];
          l2h += dh * dh;
          l2g += dg * dg;
          suph = std::max(suph, std::abs(dh));
          supg = std::max(supg, std::abs(dg));
        }
        qh += w[j] * l2h * g.dx;
        qg += w[j] * l2g * g.dx;
        sh += w[j] * suph * suph;
        sg += w[j] * supg * supg;
      }
      row.d_l2qt_h = std::sqrt(qh);
      row.d_l2qt_gamma = std::sqrt(qg);
      row.d_l2sup_h = std::sqrt(sh);
      row.d_l2sup_gamma = std::sqrt(sg);
      row.ok = true;
    } else {
      row.error = !out[m].ok ? out[m].error : out[m + 1].error;
    }
    table.rows.push_back(std::move(row));
  }

  for (size_t m = 0; m + 1 < table.rows.size(); ++m) {
    const auto& a = table.rows[m];
    const auto& b = table.rows[m + 1];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    table.rate_l2qt_h.push_back(a.ok && b.ok ? std::log2(a.d_l2qt_h / b.d_l2qt_h) : nan);
    table.rate_l2qt_gamma.push_back(a.ok && b.ok ? std::log2(a.d_l2qt_gamma / b.d_l2qt_gamma)
                                                 : nan);
  }
  return table;
}

ManufacturedSolution default_manufactured(double length) {
  const double k = M_PI / length;
  auto tau = [](double t) { return 1.0 + 0.25 * std::sin(t); };
  auto tau_t = [](double t) { return 0.25 * std::cos(t); };
  ManufacturedSolution ms;
  ms.h = [=](double t, double x) { return 1.0 + 0.2 * std::cos(k * x) * tau(t); };
  ms.h_t = [=](double t, double x) { return 0.2 * std::cos(k * x) * tau_t(t); };
  ms.h_x = [=](double t, double x) { return -0.2 * k * std::sin(k * x) * tau(t); };
  ms.h_xx = [=](double t, double x) { return -0.2 * k * k * std::cos(k * x) * tau(t); };
  ms.g = [=](double t, double x) { return 1.0 + 0.3 * std::cos(k * x) * tau(t); };
  ms.g_t = [=](double t, double x) { return 0.3 * std::cos(k * x) * tau_t(t); };
  ms.g_x = [=](double t, double x) { return -0.3 * k * std::sin(k * x) * tau(t); };
  ms.g_xx = [=](double t, double x) { return -0.3 * k * k * std::cos(k * x) * tau(t); };
  return ms;
}

SourceTerms make_mms_sources(const ManufacturedSolution& ms, const ModelParams& params) {
  const double G = params.G, D = params.D;
  const SigmaModel sigma = params.sigma;
  SourceTerms src;
  // S_h = h_t - d/dx[a1(h) h_x - (h^2/2) sigma'(g) g_x]
  src.h = [=](double t, double x) {
    const double h = ms.h(t, x), hx = ms.h_x(t, x), hxx = ms.h_xx(t, x);
    const double g = ms.g(t, x), gx = ms.g_x(t, x), gxx = ms.g_xx(t, x);
    const double sp = sigma.prime(g), spp = sigma.second(g);
    const double div = G * h * h * hx * hx + (G * h * h * h / 3.0) * hxx -
                       (h * hx * sp * gx + 0.5 * h * h * (spp * gx * gx + sp * gxx));
    return ms.h_t(t, x) - div;
  };
  // S_g = g_t - d/dx[(G h^2/2) g h_x + (D - h g sigma'(g)) g_x]
  src.gamma = [=](double t, double x) {
    const double h = ms.h(t, x), hx = ms.h_x(t, x), hxx = ms.h_xx(t, x);
    const double g = ms.g(t, x), gx = ms.g_x(t, x), gxx = ms.g_xx(t, x);
    const double sp = sigma.prime(g), spp = sigma.second(g);
    const double adv = G * (h * hx * g * hx + 0.5 * h * h * (gx * hx + g * hxx));
    const double diff = -(hx * g * sp + h * gx * sp + h * g * spp * gx) * gx +
                        (D - h * g * sp) * gxx;
    return ms.g_t(t, x) - (adv + diff);
  };
  return src;
}

State sample_manufactured(const ManufacturedSolution& ms, const Grid& grid, double t) {
  Field h(grid), g(grid);
  for (int i = 0; i < grid.n; ++i) {
    const double x = grid.cell_center(i);
    h.values[i] = ms.h(t, x);
    g.values[i] = ms.g(t, x);
  }
  return State(t, std::move(h), std::move(g));
}

namespace {

State run_mms_case(const ManufacturedSolution& ms, const SourceTerms& src,
                   const ModelParams& params, const Grid& grid, double dt, double t_final) {
  StepControl control;
  control.dt = control.dt_max = dt;
  RunOptions opt;
  opt.ledger_every = 0;
  opt.sources = &src;
  const RunResult r =
      run(sample_manufactured(ms, grid, 0.0), params, control, t_final, Scheme::original, opt);
  if (!r.ok) throw std::runtime_error("mms run failed: " + r.error);
  return r.final_state;
}

}  // namespace

MmsReport mms_verify(const ModelParams& params, const MmsOptions& options) {
  if (options.scheme != Scheme::original)
    throw std::invalid_argument(
        "mms_verify: closed-form residual sources exist only for the original system");
  const ManufacturedSolution ms = default_manufactured(options.length);

  // Positivity screen over a (t, x) sample of the manufactured pair.
  for (int j = 0; j <= 16; ++j)
    for (int i = 0; i <= 64; ++i) {
      const double t = options.t_final * j / 16.0;
      const double x = options.length * i / 64.0;
      if (!(ms.h(t, x) > 0) || !(ms.g(t, x) > 0))
        throw std::invalid_argument("mms_verify: manufactured data must stay strictly positive");
    }

  const SourceTerms src = make_mms_sources(ms, params);
  MmsReport rep;

  for (int n : options.grids) {
    const Grid grid(n, options.length);
    const double dt = options.spatial_dt_factor * grid.dx * grid.dx;
    const State end = run_mms_case(ms, src, params, grid, dt, options.t_final);
    const State exact = sample_manufactured(ms, grid, options.t_final);
    rep.spatial.emplace_back(n, combined_l2(end, exact));
  }
  for (size_t m = 0; m + 1 < rep.spatial.size(); ++m) {
    const double ratio = std::log2(double(rep.spatial[m + 1].first) / rep.spatial[m].first);
    rep.spatial_orders.push_back(std::log2(rep.spatial[m].second / rep.spatial[m + 1].second) /
                                 ratio);
  }

  std::vector<double> dts = options.dt_list;
  if (dts.empty())
    dts = {options.t_final / 64, options.t_final / 128, options.t_final / 256,
           options.t_final / 512};
  const Grid tgrid(options.temporal_n, options.length);
  std::vector<State> finals;
  finals.reserve(dts.size());
  for (double dt : dts)
    finals.push_back(run_mms_case(ms, src, params, tgrid, dt, options.t_final));
  for (size_t m = 0; m + 1 < finals.size(); ++m)
    rep.temporal.emplace_back(dts[m], combined_l2(finals[m], finals[m + 1]));
  for (size_t m = 0; m + 1 < rep.temporal.size(); ++m) {
    const double ratio = std::log2(dts[m] / dts[m + 1]);
    rep.temporal_orders.push_back(
        std::log2(rep.temporal[m].second / rep.temporal[m + 1].second) / ratio);
  }

  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0;
    for (double x : v) s += x;
    return s / v.size();
  };
  rep.spatial_order = mean(rep.spatial_orders);
  rep.temporal_order = mean(rep.temporal_orders);
  return rep;
}

DtReport dt_selfconvergence(const RunConfig& config, const std::vector<double>& dt_list) {
  if (dt_list.size() < 2)
    throw std::invalid_argument("dt_selfconvergence: need at least 2 dt values");
  const ModelParams params = config.make_params();
  const State initial = config.make_initial_state();

  DtReport rep;
  rep.dt_list = dt_list;
  std::vector<State> finals;
  for (double dt : dt_list) {
    StepControl control;
    control.dt = control.dt_max = dt;
    RunResult r = run(initial, params, control, config.t_end, config.scheme, {});
    if (!r.ok) throw std::runtime_error("dt_selfconvergence member failed: " + r.error);
    finals.push_back(r.final_state);
  }
  for (size_t m = 0; m + 1 < finals.size(); ++m)
    rep.dist.push_back(combined_l2(finals[m], finals[m + 1]));
  for (size_t m = 0; m + 1 < rep.dist.size(); ++m) {
    const double ratio = std::log2(dt_list[m] / dt_list[m + 1]);
    rep.orders.push_back(std::log2(rep.dist[m] / rep.dist[m + 1]) / ratio);
  }
  if (!rep.orders.empty()) {
    double s = 0;
    for (double x : rep.orders) s += x;
    rep.order = s / rep.orders.size();
  }
  return rep;
}

}  // namespace sfilm
