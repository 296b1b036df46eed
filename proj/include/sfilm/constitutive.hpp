// Scalar constitutive functions: surface tension sigma and its entropy phi,
// the mobilities a1 / a2_eps / b2_eps, the height interpolation alpha0, and
// the potentials alpha1 / A1 / beta1.
//
// Admissibility contract on [0, gamma_max]:
//   sigma(0) > 0   and   0 < sigma0 <= -sigma'(r) <= sigma_inf,
// which also gives |sigma(r)| <= sigma(0) + sigma_inf * r.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace sfilm {

class SigmaModel {
 public:
  enum class Kind { linear, logarithmic };

  // sigma(r) = sigma_s - beta * r
  static SigmaModel linear(double sigma_s, double beta);

  // sigma(r) = sigma_s - beta * ln(1 + sign * r / gamma_inf), sign = +-1.
  // The admissible range must be capped: with sign = +1 the lower bound on
  // -sigma' degrades to 0 as r grows, with sign = -1 the log blows up at
  // gamma_inf. gamma_max fixes the range on which the contract is enforced.
  static SigmaModel logarithmic(double sigma_s, double beta, double gamma_inf,
                                int sign, double gamma_max);

  Kind kind() const { return kind_; }
  double sigma0() const { return sigma0_; }        // inf of -sigma' on [0, gamma_max]
  double sigma_inf() const { return sigma_inf_; }  // sup of -sigma' on [0, gamma_max]
  double gamma_max() const { return gamma_max_; }
  double beta() const { return beta_; }

  bool admissible(double r) const { return r >= 0.0 && r <= gamma_max_; }
  void require_admissible(double r) const;

  double value(double r) const;   // sigma(r)
  double prime(double r) const;   // sigma'(r) < 0
  double second(double r) const;  // sigma''(r)

  // Entropy: phi''(r) = -sigma'(r)/r, phi(1) = phi'(1) = 0; phi(0) taken as
  // the continuous limit. Closed forms for both variants.
  double phi(double r) const;
  double phi_prime(double r) const;

  // beta1(r) = integral_0^r rho |sigma'(rho)| d rho (closed form), and its
  // derivative r |sigma'(r)|.
  double beta1(double r) const;
  double beta1_prime(double r) const;

 private:
  SigmaModel() = default;
  Kind kind_ = Kind::linear;
  double sigma_s_ = 0, beta_ = 0, gamma_inf_ = 0, gamma_max_ = 0;
  int sign_ = +1;
  double sigma0_ = 0, sigma_inf_ = 0;
  void validate() const;
};

// Adaptive Simpson quadrature; signed in the orientation of [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 40);

// Quadrature realizations of phi and beta1, anchored exactly like the closed
// forms (phi(1) = phi'(1) = 0, beta1(0) = 0). Independent evaluation routes
// for any sigma satisfying the admissibility contract.
double phi_by_quadrature(const SigmaModel& sigma, double r, double tol = 1e-10);
double phi_prime_by_quadrature(const SigmaModel& sigma, double r, double tol = 1e-10);
double beta1_by_quadrature(const SigmaModel& sigma, double r, double tol = 1e-10);

// Physical and regularization parameters of one run.
struct ModelParams {
  double G;           // gravity, > 0
  double D;           // surface diffusion, > 0
  SigmaModel sigma;
  double eps;         // regularization, in (0, 1)
  double eta1 = 0.875;             // in (eta, 1)
  static constexpr double eta = 0.75;

  ModelParams(double G_, double D_, SigmaModel sigma_, double eps_, double eta1_ = 0.875)
      : G(G_), D(D_), sigma(std::move(sigma_)), eps(eps_), eta1(eta1_) {
    validate();
  }
  void validate() const;

  double sqrt_eps() const { return std::sqrt(eps); }

  // a1(r) = G r^3 / 3 and A1 with A1' = a1, A1(0) = 0; a1(r) r = 4 A1(r).
  double a1(double r) const { return G * r * r * r / 3.0; }
  double a1_prime(double r) const { return G * r * r; }
  double A1(double r) const { return G * r * r * r * r / 12.0; }

  // alpha1(r) = integral_0^r sqrt(a1) = (2/5) sqrt(G/3) r^{5/2}.
  double alpha1(double r) const { return 0.4 * std::sqrt(G / 3.0) * std::pow(r, 2.5); }

  double a2_eps(double r) const {
    const double d = r - sqrt_eps();
    return 0.5 * d * d;
  }
  double b2_eps(double r) const { return r - eps; }

  double alpha0(double r, double s) const { return eta1 * s + (1.0 - eta1) * r; }
};

}  // namespace sfilm
