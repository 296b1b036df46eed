#include "sfilm/constitutive.hpp"

#include <algorithm>
#include <cmath>

namespace sfilm {

namespace {
// r ln r extended by 0 at r = 0.
double xlogx(double r) { return r > 0.0 ? r * std::log(r) : 0.0; }
}  // namespace

SigmaModel SigmaModel::linear(double sigma_s, double beta) {
  SigmaModel m;
  m.kind_ = Kind::linear;
  m.sigma_s_ = sigma_s;
  m.beta_ = beta;
  m.gamma_max_ = std::numeric_limits<double>::infinity();
  m.sigma0_ = beta;
  m.sigma_inf_ = beta;
  m.validate();
  return m;
}

SigmaModel SigmaModel::logarithmic(double sigma_s, double beta, double gamma_inf,
                                   int sign, double gamma_max) {
  SigmaModel m;
  m.kind_ = Kind::logarithmic;
  m.sigma_s_ = sigma_s;
  m.beta_ = beta;
  m.gamma_inf_ = gamma_inf;
  m.sign_ = sign;
  m.gamma_max_ = gamma_max;
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("SigmaModel: sign must be +1 or -1");
  if (!(gamma_inf > 0)) throw std::invalid_argument("SigmaModel: gamma_inf must be positive");
  if (!(gamma_max > 0) || !std::isfinite(gamma_max))
    throw std::invalid_argument("SigmaModel: logarithmic variant needs a finite gamma_max > 0");
  if (sign == -1 && !(gamma_max < gamma_inf))
    throw std::invalid_argument("SigmaModel: with sign -1, gamma_max must stay below gamma_inf");
  // The entropy phi is anchored at r = 1, which must lie inside the law's
  // domain; with sign -1 the log blows up at gamma_inf.
  if (sign == -1 && !(gamma_inf > 1.0))
    throw std::invalid_argument("SigmaModel: with sign -1, gamma_inf must exceed 1");
  // -sigma'(r) = sign * beta / (gamma_inf + sign r), monotone in r; the
  // extrema over [0, gamma_max] sit at the endpoints.
  const double at0 = -m.prime(0.0);
  const double at_max = -m.prime(gamma_max);
  m.sigma0_ = std::min(at0, at_max);
  m.sigma_inf_ = std::max(at0, at_max);
  m.validate();
  return m;
}

void SigmaModel::validate() const {
  if (!(value(0.0) > 0)) throw std::invalid_argument("SigmaModel: sigma(0) must be positive");
  if (!(sigma0_ > 0) || !(sigma_inf_ >= sigma0_) || !std::isfinite(sigma_inf_))
    throw std::invalid_argument("SigmaModel: need 0 < sigma0 <= -sigma' <= sigma_inf on [0, gamma_max]");
}

void SigmaModel::require_admissible(double r) const {
  if (!admissible(r))
    throw std::domain_error("SigmaModel: concentration outside the admissible range [0, gamma_max]");
}

double SigmaModel::value(double r) const {
  require_admissible(r);
  if (kind_ == Kind::linear) return sigma_s_ - beta_ * r;
  return sigma_s_ - beta_ * std::log1p(sign_ * r / gamma_inf_);
}

double SigmaModel::prime(double r) const {
  require_admissible(r);
  if (kind_ == Kind::linear) return -beta_;
  return -sign_ * beta_ / (gamma_inf_ + sign_ * r);
}

double SigmaModel::second(double r) const {
  require_admissible(r);
  if (kind_ == Kind::linear) return 0.0;
  const double d = gamma_inf_ + sign_ * r;
  return beta_ / (d * d);
}

double SigmaModel::phi(double r) const {
  require_admissible(r);
  if (kind_ == Kind::linear) return beta_ * (xlogx(r) - r + 1.0);
  // phi''(rho) = s b / (rho (g + s rho)) with s = sign, g = gamma_inf.
  // Antiderivative of phi' anchored at phi(1) = phi'(1) = 0:
  //   phi(r) = (s b / g) (W(r) - W(1)),
  //   W(rho) = rho ln rho - rho - s (g + s rho) ln(g + s rho) + s (g + s rho)
  //            + rho ln(g + s).
  const double s = sign_, g = gamma_inf_;
  auto W = [&](double rho) {
    const double u = g + s * rho;
    return xlogx(rho) - rho - s * u * std::log(u) + s * u + rho * std::log(g + s);
  };
  return s * beta_ / g * (W(r) - W(1.0));
}

double SigmaModel::phi_prime(double r) const {
  require_admissible(r);
  if (kind_ == Kind::linear) return beta_ * std::log(r);
  const double s = sign_, g = gamma_inf_;
  return s * beta_ / g * std::log(r * (g + s) / (g + s * r));
}

double SigmaModel::beta1(double r) const {
  require_admissible(r);
  if (kind_ == Kind::linear) return 0.5 * beta_ * r * r;
  const double s = sign_, g = gamma_inf_;
  return beta_ * (r - s * g * std::log1p(s * r / g));
}

double SigmaModel::beta1_prime(double r) const { return r * std::abs(prime(r)); }

namespace {

double simpson(double a, double fa, double fm, double b, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, flm, m, fm);
  const double right = simpson(m, fm, frm, b, fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = simpson(a, fa, fm, b, fb);
  return adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

double phi_prime_by_quadrature(const SigmaModel& sigma, double r, double tol) {
  return adaptive_simpson([&](double rho) { return -sigma.prime(rho) / rho; }, 1.0, r, tol);
}

double phi_by_quadrature(const SigmaModel& sigma, double r, double tol) {
  return adaptive_simpson(
      [&](double s) { return phi_prime_by_quadrature(sigma, s, 0.1 * tol); }, 1.0, r, tol);
}

double beta1_by_quadrature(const SigmaModel& sigma, double r, double tol) {
  return adaptive_simpson(
      [&](double rho) { return rho * std::abs(sigma.prime(rho)); }, 0.0, r, tol);
}

void ModelParams::validate() const {
  if (!(G > 0) || !std::isfinite(G)) throw std::invalid_argument("ModelParams: G must be positive");
  if (!(D > 0) || !std::isfinite(D)) throw std::invalid_argument("ModelParams: D must be positive");
  if (!(eps > 0 && eps < 1)) throw std::invalid_argument("ModelParams: eps must lie in (0, 1)");
  if (!(eta1 > eta && eta1 < 1))
    throw std::invalid_argument("ModelParams: eta1 must lie in (3/4, 1)");
}

}  // namespace sfilm
