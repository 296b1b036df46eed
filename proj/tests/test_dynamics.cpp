#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "sfilm/dynamics.hpp"

using namespace sfilm;

namespace {

ModelParams make_params(double eps = 0.01, double G = 1.0, double D = 0.1) {
  return ModelParams(G, D, SigmaModel::linear(2.0, 1.0), eps);
}

State cosine_state(const Grid& g, double h_mean, double h_amp, double g_mean, double g_amp,
                   double lift_h = 0.0, double lift_g = 0.0) {
  Field h(g), ga(g);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.cell_center(i);
    h.values[i] = h_mean + h_amp * std::cos(M_PI * x / g.length) + lift_h;
    ga.values[i] = g_mean + g_amp * std::cos(M_PI * x / g.length) + lift_g;
  }
  return State(0.0, std::move(h), std::move(ga));
}

State random_positive_state(const Grid& g, std::mt19937_64& rng, double h_lo, double h_hi,
                            double g_lo, double g_hi) {
  std::uniform_real_distribution<double> uh(h_lo, h_hi), ug(g_lo, g_hi);
  Field h(g), ga(g);
  for (int i = 0; i < g.n; ++i) {
    h.values[i] = uh(rng);
    ga.values[i] = ug(rng);
  }
  return State(0.0, std::move(h), std::move(ga));
}

// Residual of the defining equation u - eps^2 div(w grad u) = f; an
// assembly-independent check that the elliptic solves are exact.
double helmholtz_residual(const Field& u, const Field& f, double eps, const FaceValues& w) {
  const Grid& g = u.grid;
  double worst = 0;
  for (int i = 0; i < g.n; ++i) {
    const double gl = i > 0 ? w[i] * (u.values[i] - u.values[i - 1]) / g.dx : 0.0;
    const double gr = i < g.n - 1 ? w[i + 1] * (u.values[i + 1] - u.values[i]) / g.dx : 0.0;
    const double res = u.values[i] - eps * eps * (gr - gl) / g.dx - f.values[i];
    worst = std::max(worst, std::abs(res));
  }
  return worst;
}

double max_abs(const FaceValues& a) {
  double m = 0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

TEST_CASE("assemble_aux: constants are fixed points") {
  Grid g(32, 1.0);
  ModelParams p = make_params(0.04);
  State s(0.0, Field(g, 1.5), Field(g, 0.8));
  AuxFields aux = assemble_aux(s, p);
  for (int i = 0; i < g.n; ++i) {
    CHECK(aux.H.values[i] == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(aux.A.values[i] == doctest::Approx(p.alpha1(1.5)).epsilon(1e-13));
    CHECK(aux.B.values[i] == doctest::Approx(0.8).epsilon(1e-13));
    CHECK(aux.Sigma.values[i] == doctest::Approx(p.sigma.value(0.8)).epsilon(1e-13));
  }
}

TEST_CASE("assemble_aux: lifted data respects the comparison floors") {
  Grid g(64, 1.0);
  ModelParams p = make_params(0.01);
  State s = cosine_state(g, 1.0, 0.25, 1.0, 0.25, p.sqrt_eps(), p.eps);
  AuxFields aux = assemble_aux(s, p);
  for (int i = 0; i < g.n; ++i) {
    CHECK(aux.H.values[i] >= p.sqrt_eps() - 1e-13);
    CHECK(aux.B.values[i] >= p.eps - 1e-13);
  }
}

TEST_CASE("assemble_aux solves match their defining equations") {
  Grid g(48, 1.0);
  ModelParams p = make_params(0.02);
  std::mt19937_64 rng(3);
  State s = random_positive_state(g, rng, 0.5, 2.0, 0.3, 1.8);
  AuxFields aux = assemble_aux(s, p);

  Field alpha1_h(g), sig(g);
  for (int i = 0; i < g.n; ++i) {
    alpha1_h.values[i] = p.alpha1(s.h.values[i]);
    sig.values[i] = p.sigma.value(s.gamma.values[i]);
  }
  const FaceValues ones(g.n + 1, 1.0);
  CHECK(helmholtz_residual(aux.H, s.h, p.eps, ones) < 1e-12);
  CHECK(helmholtz_residual(aux.A, alpha1_h, p.eps, ones) < 1e-12);
  CHECK(helmholtz_residual(aux.B, s.gamma, p.eps, ones) < 1e-12);
  FaceValues w(g.n + 1, 0.0);
  for (int k = 1; k < g.n; ++k) w[k] = 0.5 * (aux.H.values[k - 1] + aux.H.values[k]);
  CHECK(helmholtz_residual(aux.Sigma, sig, p.eps, w) < 1e-12);
}

TEST_CASE("regularized fluxes vanish on constant states") {
  Grid g(16, 1.0);
  ModelParams p = make_params(0.04);
  State s(0.0, Field(g, 1.2), Field(g, 0.9));
  AuxFields aux = assemble_aux(s, p);
  FluxPair f = regularized_fluxes(s, aux, p);
  CHECK(max_abs(f.h) < 1e-14);
  CHECK(max_abs(f.gamma) < 1e-14);
  FluxObservables J = fluxes_J(s, aux, p);
  CHECK(max_abs(J.J_f) < 1e-14);
  CHECK(max_abs(J.J_s) < 1e-14);
}

TEST_CASE("gamma diffusivity is positive for valid states") {
  Grid g(32, 1.0);
  ModelParams p = make_params(0.01);
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    State s = random_positive_state(g, rng, 0.3, 2.0, 0.2, 2.0);
    AuxFields aux = assemble_aux(s, p);
    for (int i = 0; i < g.n; ++i) {
      const double gam = s.gamma.values[i];
      const double diff = p.D * p.sigma.beta1_prime(gam) / p.sigma.beta1_prime(aux.B.values[i]) -
                          p.alpha0(s.h.values[i], aux.H.values[i]) * gam * p.sigma.prime(gam);
      CHECK(diff > 0.0);
    }
    const FaceAssembly F = assemble_faces(s, &aux, p, Scheme::regularized);
    for (int k = 1; k < g.n; ++k) CHECK(F.impl_coef_gamma[k] > 0.0);
  }
}

TEST_CASE("cosine h with constant gamma: gamma flux reduces to its advective term") {
  Grid g(48, 1.0);
  ModelParams p = make_params(0.01);
  State s = cosine_state(g, 1.0, 0.3, 0.7, 0.0);
  AuxFields aux = assemble_aux(s, p);
  FaceAssembly F = assemble_faces(s, &aux, p, Scheme::regularized);

  const double gbar = 0.7;
  for (int k = 1; k < g.n; ++k) {
    const int l = k - 1, r = k;
    const double hl = s.h.values[l], hr = s.h.values[r];
    auto dcell = [&](double h) { return p.a2_eps(h) / std::sqrt(h * p.a1(h)); };
    const double dt = 0.5 * (dcell(hl) + dcell(hr));
    const double et = (gbar - p.eps) / gbar;
    const double Ht = 0.5 * (aux.H.values[l] + aux.H.values[r]);
    const double ht = 0.5 * (hl + hr);
    const double a0 = p.eta1 * Ht + (1.0 - p.eta1) * ht;
    const double gA = (aux.A.values[r] - aux.A.values[l]) / g.dx;
    const double expected = std::sqrt(a0) * gbar * p.G * dt * et * gA;
    CHECK(std::abs(F.flux_gamma[k] - expected) < 1e-12 * (1.0 + std::abs(expected)));
  }
}

TEST_CASE("original fluxes: constants, degenerate h = 0, and formula oracle") {
  Grid g(32, 1.0);
  ModelParams p = make_params(0.01, 1.7, 0.3);

  State c(0.0, Field(g, 1.1), Field(g, 0.6));
  FluxPair fc = original_fluxes(c, p);
  CHECK(max_abs(fc.h) < 1e-14);
  CHECK(max_abs(fc.gamma) < 1e-14);

  Field zero_h(g, 0.0), varying_g(g);
  for (int i = 0; i < g.n; ++i)
    varying_g.values[i] = 1.0 + 0.4 * std::cos(M_PI * g.cell_center(i));
  State deg(0.0, zero_h, varying_g);
  FluxPair fd = original_fluxes(deg, p);
  CHECK(max_abs(fd.h) < 1e-14);
  const FaceValues gg = face_gradient(varying_g);
  for (int k = 1; k < g.n; ++k)
    CHECK(fd.gamma[k] == doctest::Approx(p.D * gg[k]).epsilon(1e-12));

  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 10; ++rep) {
    State s = random_positive_state(g, rng, 0.2, 2.0, 0.2, 2.0);
    FaceAssembly F = assemble_original_faces(s, p.G, p.D, p.sigma);
    for (int k = 1; k < g.n; ++k) {
      const int l = k - 1, r = k;
      const double hl = s.h.values[l], hr = s.h.values[r];
      const double gl = s.gamma.values[l], gr = s.gamma.values[r];
      const double galpha1 = (p.alpha1(hr) - p.alpha1(hl)) / g.dx;
      const double gsig = (p.sigma.value(gr) - p.sigma.value(gl)) / g.dx;
      const double ct = 0.5 * (std::sqrt(0.75 * hl / p.G) + std::sqrt(0.75 * hr / p.G));
      const double s_face = sqrt_a1_face_mean(p.G, hl, hr);
      const double jf = -galpha1 + ct * gsig;
      CHECK(std::abs(F.flux_h[k] - (-s_face * jf)) < 1e-12 * (1.0 + std::abs(F.flux_h[k])));
      const double ht = 0.5 * (hl + hr);
      const double js = std::sqrt(ht) * gsig - p.G * std::sqrt(0.75 / p.G) * galpha1;
      const double gmean = concentration_face_mean(p.sigma, gl, gr);
      const double fg = p.D * (gr - gl) / g.dx - std::sqrt(ht) * gmean * js;
      CHECK(std::abs(F.flux_gamma[k] - fg) < 1e-12 * (1.0 + std::abs(fg)));
    }
  }
}

TEST_CASE("formal eps -> 0 substitution reproduces the original fluxes") {
  Grid g(40, 1.0);
  const double G = 1.4, D = 0.2;
  SigmaModel sigma = SigmaModel::linear(2.0, 1.0);
  ModelParams p(G, D, sigma, 0.5);
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    State s = random_positive_state(g, rng, 0.4, 2.2, 0.3, 2.4);
    AuxFields aux;
    aux.H = s.h;
    aux.B = s.gamma;
    Field alpha1_h(g), sig(g);
    for (int i = 0; i < g.n; ++i) {
      alpha1_h.values[i] = p.alpha1(s.h.values[i]);
      sig.values[i] = sigma.value(s.gamma.values[i]);
    }
    aux.A = alpha1_h;
    aux.Sigma = sig;
    FaceAssembly reg = assemble_regularized_faces(s, aux, G, D, sigma, 0.0, p.eta1);
    FaceAssembly orig = assemble_original_faces(s, G, D, sigma);
    for (int k = 1; k < g.n; ++k) {
      CHECK(std::abs(reg.flux_h[k] - orig.flux_h[k]) < 1e-12 * (1.0 + std::abs(orig.flux_h[k])));
      CHECK(std::abs(reg.flux_gamma[k] - orig.flux_gamma[k]) <
            1e-12 * (1.0 + std::abs(orig.flux_gamma[k])));
      CHECK(std::abs(reg.J_f[k] - orig.J_f[k]) < 1e-12 * (1.0 + std::abs(orig.J_f[k])));
      CHECK(std::abs(reg.J_s[k] - orig.J_s[k]) < 1e-12 * (1.0 + std::abs(orig.J_s[k])));
    }
  }
}

TEST_CASE("h-face-flux equals -sqrt(a1) J_f") {
  Grid g(32, 1.0);
  ModelParams p = make_params(0.01);
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    State s = random_positive_state(g, rng, 0.3, 2.0, 0.2, 2.0);
    AuxFields aux = assemble_aux(s, p);
    FaceAssembly F = assemble_faces(s, &aux, p, Scheme::regularized);
    for (int k = 1; k < g.n; ++k)
      CHECK(std::abs(F.flux_h[k] + F.sqrt_a1[k] * F.J_f[k]) <
            1e-12 * (1.0 + std::abs(F.flux_h[k])));
  }
}

TEST_CASE("fluxes_J match an independent evaluation of the face formulas") {
  Grid g(40, 1.0);
  ModelParams p = make_params(0.02, 1.6, 0.25);
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    State s = random_positive_state(g, rng, 0.3, 2.0, 0.2, 2.0);
    AuxFields aux = assemble_aux(s, p);
    FluxObservables J = fluxes_J(s, aux, p);
    for (int k = 1; k < g.n; ++k) {
      const int l = k - 1, r = k;
      auto ccell = [&](int i) {
        const double h = s.h.values[i];
        return p.a2_eps(h) * std::sqrt(aux.H.values[i]) / std::sqrt(h * p.a1(h));
      };
      auto dcell = [&](int i) {
        const double h = s.h.values[i];
        return p.a2_eps(h) / std::sqrt(h * p.a1(h));
      };
      auto ecell = [&](int i) { return p.b2_eps(s.gamma.values[i]) / s.gamma.values[i]; };
      const double galpha1 = (p.alpha1(s.h.values[r]) - p.alpha1(s.h.values[l])) / g.dx;
      const double gS = (aux.Sigma.values[r] - aux.Sigma.values[l]) / g.dx;
      const double gA = (aux.A.values[r] - aux.A.values[l]) / g.dx;
      const double gsig =
          (p.sigma.value(s.gamma.values[r]) - p.sigma.value(s.gamma.values[l])) / g.dx;
      const double a0 = p.eta1 * 0.5 * (aux.H.values[l] + aux.H.values[r]) +
                        (1.0 - p.eta1) * 0.5 * (s.h.values[l] + s.h.values[r]);
      const double jf = -galpha1 + 0.5 * (ccell(l) + ccell(r)) * gS;
      const double js = std::sqrt(a0) * gsig -
                        p.G * 0.5 * (dcell(l) + dcell(r)) * 0.5 * (ecell(l) + ecell(r)) * gA;
      CHECK(std::abs(J.J_f[k] - jf) < 1e-12 * (1.0 + std::abs(jf)));
      CHECK(std::abs(J.J_s[k] - js) < 1e-12 * (1.0 + std::abs(js)));
    }
  }
}

TEST_CASE("limit flux identities: both evaluation routes agree") {
  Grid g(48, 1.0);
  ModelParams p = make_params(0.01, 2.1, 0.15);
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    State s = random_positive_state(g, rng, 0.1, 2.5, 0.1, 2.5);
    FluxObservables j = fluxes_j_limit(s, p);
    Field h52(g), sig(g), al1(g);
    for (int i = 0; i < g.n; ++i) {
      h52.values[i] = std::pow(s.h.values[i], 2.5);
      sig.values[i] = p.sigma.value(s.gamma.values[i]);
      al1.values[i] = p.alpha1(s.h.values[i]);
    }
    const FaceValues g52 = face_gradient(h52);
    const FaceValues gsig = face_gradient(sig);
    const FaceValues gal1 = face_gradient(al1);
    for (int k = 1; k < g.n; ++k) {
      const double ct = 0.5 * (std::sqrt(0.75 * s.h.values[k - 1] / p.G) +
                               std::sqrt(0.75 * s.h.values[k] / p.G));
      const double jf_thm = -0.4 * std::sqrt(p.G / 3.0) * g52[k] + ct * gsig[k];
      const double jf_al = -gal1[k] + ct * gsig[k];
      CHECK(std::abs(j.J_f[k] - jf_thm) < 1e-12 * (1.0 + std::abs(jf_thm)));
      CHECK(std::abs(j.J_f[k] - jf_al) < 1e-12 * (1.0 + std::abs(jf_al)));
      const double sqrt_h = std::sqrt(0.5 * (s.h.values[k - 1] + s.h.values[k]));
      const double js_thm = -(p.G / 5.0) * g52[k] + sqrt_h * gsig[k];
      const double js_al = sqrt_h * gsig[k] - std::sqrt(0.75 * p.G) * gal1[k];
      CHECK(std::abs(j.J_s[k] - js_thm) < 1e-12 * (1.0 + std::abs(js_thm)));
      CHECK(std::abs(j.J_s[k] - js_al) < 1e-12 * (1.0 + std::abs(js_al)));
    }
  }
}

TEST_CASE("step: constant states are fixed points of both schemes") {
  Grid g(32, 1.0);
  ModelParams p = make_params(0.04);
  StepControl c;
  c.dt = c.dt_max = g.dx * g.dx;
  for (Scheme scheme : {Scheme::regularized, Scheme::original}) {
    State s(0.0, Field(g, 1.3), Field(g, 0.9));
    StepResult r = step(s, p, c, scheme);
    REQUIRE(r.accepted);
    for (int i = 0; i < g.n; ++i) {
      CHECK(std::abs(r.next.h.values[i] - 1.3) < 1e-14);
      CHECK(std::abs(r.next.gamma.values[i] - 0.9) < 1e-14);
    }
  }
}

TEST_CASE("step conserves both masses") {
  Grid g(64, 1.0);
  ModelParams p = make_params(0.01);
  State s = cosine_state(g, 1.0, 0.25, 1.0, 0.25, p.sqrt_eps(), p.eps);
  StepControl c;
  c.dt = c.dt_max = g.dx * g.dx;
  const double mh0 = discrete_norm(s.h, Norm::L1);
  const double mg0 = discrete_norm(s.gamma, Norm::L1);
  for (int n = 0; n < 50; ++n) {
    StepResult r = step(s, p, c, Scheme::regularized);
    REQUIRE(r.accepted);
    s = r.next;
  }
  CHECK(std::abs(discrete_norm(s.h, Norm::L1) - mh0) < 1e-12 * mh0);
  CHECK(std::abs(discrete_norm(s.gamma, Norm::L1) - mg0) < 1e-12 * mg0);
}

TEST_CASE("step agrees with the fully explicit oracle at O(dt^2)") {
  Grid g(32, 1.0);
  ModelParams p = make_params(0.01);
  State s = cosine_state(g, 1.0, 0.2, 1.0, 0.2, p.sqrt_eps(), p.eps);

  auto imex_minus_explicit = [&](double dt) {
    StepControl c;
    c.dt = c.dt_max = dt;
    StepResult r = step(s, p, c, Scheme::regularized);
    REQUIRE(r.accepted);
    AuxFields aux = assemble_aux(s, p);
    FaceAssembly F = assemble_faces(s, &aux, p, Scheme::regularized);
    double worst = 0;
    for (int i = 0; i < g.n; ++i) {
      const double eh = s.h.values[i] + dt * (F.flux_h[i + 1] - F.flux_h[i]) / g.dx;
      const double eg =
          s.gamma.values[i] + dt * (F.flux_gamma[i + 1] - F.flux_gamma[i]) / g.dx;
      worst = std::max(worst, std::abs(r.next.h.values[i] - eh));
      worst = std::max(worst, std::abs(r.next.gamma.values[i] - eg));
    }
    return worst;
  };

  const double e1 = imex_minus_explicit(4e-5);
  const double e2 = imex_minus_explicit(2e-5);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.0);
}

TEST_CASE("barrier breach rejects the step instead of clipping") {
  Grid g(16, 1.0);
  ModelParams p = make_params(0.04);

  // Guard path: a cell below sqrt(eps)/2 makes the assembly refuse.
  State bad = cosine_state(g, 1.0, 0.2, 1.0, 0.2, p.sqrt_eps(), p.eps);
  bad.h.values[5] = 0.4 * p.sqrt_eps();
  StepControl c;
  c.dt = c.dt_max = g.dx * g.dx;
  StepResult r = step(bad, p, c, Scheme::regularized);
  CHECK_FALSE(r.accepted);
  CHECK(!r.reject_reason.empty());

  // Floor path: a sink source drags h below the barrier within one step.
  State s = cosine_state(g, 1.0, 0.2, 1.0, 0.2, p.sqrt_eps(), p.eps);
  SourceTerms sink;
  sink.h = [](double, double) { return -1e6; };
  sink.gamma = [](double, double) { return 0.0; };
  StepResult r2 = step(s, p, c, Scheme::regularized, &sink);
  CHECK_FALSE(r2.accepted);
}

TEST_CASE("run: constant data stays constant") {
  Grid g(32, 1.0);
  ModelParams p = make_params(0.04);
  State s(0.0, Field(g, 1.0), Field(g, 1.0));
  StepControl c;
  c.dt = g.dx * g.dx;
  c.dt_max = 2.0 * g.dx * g.dx;
  RunResult r = run(s, p, c, 1.0, Scheme::regularized);
  REQUIRE(r.ok);
  CHECK(r.final_state.t == doctest::Approx(1.0));
  for (int i = 0; i < g.n; ++i) {
    CHECK(std::abs(r.final_state.h.values[i] - 1.0) < 1e-10);
    CHECK(std::abs(r.final_state.gamma.values[i] - 1.0) < 1e-10);
  }
}

TEST_CASE("run: lifted cosine conserves mass and keeps the barriers") {
  Grid g(64, 1.0);
  ModelParams p = make_params(0.01);
  State s = cosine_state(g, 1.0, 0.25, 1.0, 0.25, p.sqrt_eps(), p.eps);
  const double mh0 = discrete_norm(s.h, Norm::L1);
  const double mg0 = discrete_norm(s.gamma, Norm::L1);
  StepControl c;
  c.dt = g.dx * g.dx;
  c.dt_max = 2.0 * g.dx * g.dx;
  RunResult r = run(s, p, c, 0.05, Scheme::regularized);
  REQUIRE(r.ok);
  CHECK(std::abs(discrete_norm(r.final_state.h, Norm::L1) - mh0) < 1e-12 * mh0);
  CHECK(std::abs(discrete_norm(r.final_state.gamma, Norm::L1) - mg0) < 1e-12 * mg0);
  CHECK(r.stats.min_h_seen >= p.sqrt_eps() - 1e-10);
  CHECK(r.stats.min_gamma_seen >= p.eps - 1e-10);
}

TEST_CASE("run: persistent violation collapses dt and reports the failure") {
  Grid g(16, 1.0);
  ModelParams p = make_params(0.04);
  State s = cosine_state(g, 1.0, 0.2, 1.0, 0.2, p.sqrt_eps(), p.eps);
  SourceTerms sink;
  sink.h = [](double, double) { return -1e9; };
  sink.gamma = [](double, double) { return 0.0; };
  StepControl c;
  c.dt = c.dt_max = g.dx * g.dx;
  RunOptions opt;
  opt.sources = &sink;
  RunResult r = run(s, p, c, 1.0, Scheme::regularized, opt);
  CHECK_FALSE(r.ok);
  CHECK(!r.error.empty());
  CHECK(r.last_good.t == doctest::Approx(0.0));
}

TEST_CASE("run lands snapshots and records exactly") {
  Grid g(32, 1.0);
  ModelParams p = make_params(0.04);
  State s = cosine_state(g, 1.0, 0.1, 1.0, 0.1, p.sqrt_eps(), p.eps);
  StepControl c;
  c.dt = g.dx * g.dx;
  c.dt_max = 2.0 * g.dx * g.dx;
  RunOptions opt;
  opt.snapshot_times = {0.0, 0.005, 0.01};
  std::vector<double> seen;
  opt.on_snapshot = [&](const State& st) { seen.push_back(st.t); };
  std::vector<double> recorded;
  opt.on_record = [&](const State& st, const AuxFields*) { recorded.push_back(st.t); };
  RunResult r = run(s, p, c, 0.01, Scheme::regularized, opt);
  REQUIRE(r.ok);
  REQUIRE(seen.size() == 3);
  CHECK(seen[0] == 0.0);
  CHECK(seen[1] == 0.005);
  CHECK(seen[2] == 0.01);
  CHECK(recorded.front() == 0.0);
  CHECK(recorded.back() == 0.01);
  for (size_t m = 1; m < recorded.size(); ++m) CHECK(recorded[m] > recorded[m - 1]);
}

TEST_CASE("original scheme handles a film touching zero (contact line)") {
  Grid g(64, 1.0);
  ModelParams p = make_params(0.01);
  Field h(g), ga(g);
  for (int i = 0; i < g.n; ++i) {
    const double x = g.cell_center(i);
    h.values[i] = 0.5 * (1.0 + std::cos(2.0 * M_PI * x));  // zero contact at x = 1/2
    ga.values[i] = 1.0 + 0.2 * std::cos(M_PI * x);
  }
  State s(0.0, h, ga);
  const double mh = discrete_norm(s.h, Norm::L1);
  const double mg = discrete_norm(s.gamma, Norm::L1);
  StepControl c;
  c.dt = c.dt_max = 0.5 * g.dx * g.dx;
  RunResult r = run(s, p, c, 0.05, Scheme::original);
  REQUIRE(r.ok);
  CHECK(r.stats.min_h_seen >= 0.0);
  CHECK(r.stats.min_gamma_seen >= 0.0);
  CHECK(std::abs(discrete_norm(r.final_state.h, Norm::L1) - mh) < 1e-12 * mh);
  CHECK(std::abs(discrete_norm(r.final_state.gamma, Norm::L1) - mg) < 1e-12 * mg);
}

TEST_CASE("logarithmic surface tension runs the full regularized pipeline") {
  Grid g(48, 1.0);
  ModelParams p(1.0, 0.1, SigmaModel::logarithmic(3.0, 0.8, 2.0, +1, 5.0), 0.01);
  State s = cosine_state(g, 1.0, 0.25, 1.0, 0.25, p.sqrt_eps(), p.eps);
  const double mh = discrete_norm(s.h, Norm::L1);
  const double mg = discrete_norm(s.gamma, Norm::L1);
  StepControl c;
  c.dt = c.dt_max = g.dx * g.dx;
  RunResult r = run(s, p, c, 0.02, Scheme::regularized);
  REQUIRE(r.ok);
  CHECK(r.stats.min_h_seen >= p.sqrt_eps() - 1e-10);
  CHECK(r.stats.min_gamma_seen >= p.eps - 1e-10);
  CHECK(std::abs(discrete_norm(r.final_state.h, Norm::L1) - mh) < 1e-12 * mh);
  CHECK(std::abs(discrete_norm(r.final_state.gamma, Norm::L1) - mg) < 1e-12 * mg);
}
