#pragma once

#include <cstdint>
#include <vector>

#include "brownray/process.hpp"
#include "brownray/sampler.hpp"

// European call pricing when the log price is a conditioned Brownian ray
// with drift (a geometric Brownian ray). The rational price is the
// Black-Scholes-Merton formula with effective variance rate theta = phi/delta
// of the ray: the ray's quadratic variation per unit time is theta and it is
// invariant under conditioning, so the same formula prices and hedges at
// every rebalance time. The replication harness validates this by
// simulation.

namespace brownray {

// Price model S(t) = s0 * exp(rho*t + X(t)) with X the given ray.
struct GbrSpec {
  GbrSpec(double s0, double rho, RayParams ray);

  double s0;
  double rho;
  RayParams ray;

  double theta() const { return ray.phi / ray.delta; }
};

// European call: strike, continuously compounded rate, time to expiry, and
// the conditioned spot S(0 | history up to u) it is written on.
struct OptionContract {
  OptionContract(double strike, double rate, double maturity, double spot);

  double strike;
  double rate;
  double maturity;
  double spot;
};

double call_payoff(double terminal_price, double strike);

// Black-Scholes-Merton call value with variance rate theta1 (sigma^2):
//   d1 = (ln(s/C) + (r + theta/2) h)/sqrt(theta h),  d2 = d1 - sqrt(theta h)
//   price = s Phi(d1) - C e^{-r h} Phi(d2)
// h = 0 returns the payoff directly.
double bsm_call_price(double spot, double strike, double rate, double h,
                      double theta1);
double bsm_call_delta(double spot, double strike, double rate, double h,
                      double theta1);

double bsm_call_price(const OptionContract& contract, double theta1);
double bsm_call_delta(const OptionContract& contract, double theta1);

// The two covariance identities recovering theta1 from kernel values:
//   form A: theta = R(u,u)/u + u*tau
//   form B: theta = ((u+H) R(u,u)/u - R(u,u+H)) / H
// Both are exact for kernel-consistent inputs; form A reduces to the plain
// volatility R(u,u)/u as tau -> 0.
double theta_from_variance_rate(double r_uu, double u, double tau);
double theta_from_horizon_cov(double r_uu, double r_u_uh, double u, double big_h);

// Spot conditioned on X(u) = x1: s0 * exp(rho*u + x1).
double conditioned_spot(const GbrSpec& spec, double u, double x1);

// Price under the GBR model: BSM with the ray's theta, which is the only
// ray characteristic the price depends on.
double gbr_call_price(const GbrSpec& spec, double u, double x1,
                      const OptionContract& contract);

// Terminal prices S(u+H) | X(u)=x1, drawn through the exact conditioned-ray
// sampler. The terminal log price is Gaussian with mean
// ln(spot) + rho_ux1*H and variance H(theta - tau_u*H).
std::vector<double> gbr_terminal_prices(const GbrSpec& spec, double u, double x1,
                                        double big_h, std::size_t n_paths,
                                        std::uint64_t seed,
                                        const SampleOptions& options = {});

// Discrete self-financing delta hedge along exact GBR paths: at each
// rebalance the portfolio holds bsm_call_delta(remaining, current) shares
// and the bond position implied by self-financing. Reports the terminal
// replication error statistics; the RMS error is the discrete-hedging error
// and shrinks as steps are added.
struct HedgeReport {
  int n_steps;
  double rms_error;
  double mean_error;
  double mean_se;
};

HedgeReport hedge_replicate(const GbrSpec& spec, double u, double x1,
                            const OptionContract& contract, int n_steps,
                            std::size_t n_paths, std::uint64_t seed,
                            const SampleOptions& options = {});

}  // namespace brownray
