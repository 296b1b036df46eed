// Experiment orchestration: the eps -> 0 self-convergence sweep, manufactured
// solution order verification, and dt self-convergence.

#pragma once

#include <utility>
#include <vector>

#include "sfilm/config.hpp"
#include "sfilm/diagnostics.hpp"

namespace sfilm {

struct SweepPlan {
  std::vector<double> eps_list;  // strictly decreasing, length >= 3
  RunConfig base;                // scheme forced to regularized per member
  int n_snapshot_times = 51;     // shared sample times in [0, t_end]
};

struct ConvergenceTable {
  struct Row {
    double eps_hi = 0, eps_lo = 0;
    double d_l2qt_h = 0, d_l2qt_gamma = 0;   // discrete L2(Q_T)
    double d_l2sup_h = 0, d_l2sup_gamma = 0; // discrete L2(0,T; sup)
    bool ok = false;
    std::string error;
  };
  // Trend monitors per member (no pass/fail thresholds): the time suprema of
  // |h|_2 and the entropy, the accumulated flux and h^{5/2} budgets, and the
  // 1/5-Holder quotient of h over the sampled trajectory.
  struct MemberMonitor {
    double eps = 0;
    double sup_h_l2 = 0;
    double sup_entropy = 0;
    double cum_flux_l2 = 0;
    double cum_h52_budget = 0;
    double max_holder_h = 0;
  };
  std::vector<Row> rows;
  // log2 of successive distance ratios; size rows.size() - 1.
  std::vector<double> rate_l2qt_h, rate_l2qt_gamma;
  bool all_members_ok = true;
  std::vector<std::string> member_errors;  // aligned with eps_list
  std::vector<MemberMonitor> monitors;     // one per successful member

  bool distances_strictly_decreasing() const;
};

// Runs the sweep members (concurrently up to `jobs`), each lifted per its own
// eps, and tabulates consecutive-pair trajectory distances. Every member is
// also passed through the conservation and ledger checks; failures mark the
// member without aborting the sweep.
ConvergenceTable eps_sweep(const SweepPlan& plan, int jobs = 0);

// Manufactured solution (original system): closed-form fields and the exact
// x/t derivatives needed to build the residual sources by hand.
struct ManufacturedSolution {
  std::function<double(double, double)> h, h_t, h_x, h_xx;
  std::function<double(double, double)> g, g_t, g_x, g_xx;
};

ManufacturedSolution default_manufactured(double length);
SourceTerms make_mms_sources(const ManufacturedSolution& ms, const ModelParams& params);
State sample_manufactured(const ManufacturedSolution& ms, const Grid& grid, double t);

struct MmsOptions {
  Scheme scheme = Scheme::original;
  std::vector<int> grids{32, 64, 128};
  double spatial_dt_factor = 1.0;  // dt = factor * dx^2 on each spatial grid
  int temporal_n = 128;
  std::vector<double> dt_list;     // empty -> {T/64, T/128, T/256, T/512}
  double t_final = 0.25;
  double length = 1.0;
};

struct MmsReport {
  std::vector<std::pair<int, double>> spatial;       // (n, error vs manufactured at T)
  std::vector<double> spatial_orders;
  std::vector<std::pair<double, double>> temporal;   // (dt, distance to the dt/2 run)
  std::vector<double> temporal_orders;
  double spatial_order = 0;   // mean of pairwise observed orders
  double temporal_order = 0;
};

// Order verification against the default manufactured pair. Only the original
// system admits closed-form residual sources; requesting the regularized
// scheme is rejected.
MmsReport mms_verify(const ModelParams& params, const MmsOptions& options = {});

struct DtReport {
  std::vector<double> dt_list;
  std::vector<double> dist;    // consecutive-pair distance of final states
  std::vector<double> orders;  // log2 ratios
  double order = 0;
};

// Pairwise trajectory self-convergence under a geometric dt refinement
// (fixed dt per member run).
DtReport dt_selfconvergence(const RunConfig& config, const std::vector<double>& dt_list);

}  // namespace sfilm
