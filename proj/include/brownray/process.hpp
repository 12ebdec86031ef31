#pragma once

#include <variant>
#include <vector>

// Parameter algebra for Brownian rays: a Brownian ray on [0, big_delta] is
// the zero-mean Gaussian process with covariance
//
//     cov(s, t) = phi * (s/delta) * (1 - t/delta),   0 <= s <= t <= big_delta,
//
// with phi > 0 and delta >= big_delta. delta = big_delta is a Brownian
// bridge, delta -> infinity a Brownian motion; delta quantifies the
// autoregressiveness of the increments. This header holds the ray types,
// their canonical bridge+motion decomposition, conditioning on an observed
// state, superposition, pinning and the Doob time change. Everything here
// is exact closed-form arithmetic; tolerances live only in tests.

namespace brownray {

// One Brownian ray: variance scale phi, autoregressive horizon delta,
// modeling horizon big_delta. Invariant: phi > 0, delta >= big_delta > 0.
struct RayParams {
  RayParams(double phi, double delta, double big_delta);

  double phi;
  double delta;
  double big_delta;
};

// Rate form of the same ray: theta = phi/delta (variance per unit time),
// tau = phi/delta^2 (autoregressive rate). The pair reconstructs
// (phi, delta) exactly as phi = theta^2/tau, delta = theta/tau.
struct ThetaTau {
  ThetaTau(double theta, double tau);

  double theta;
  double tau;
};

// Degenerate canonical-composition limit chi = 1: a pure Brownian motion
// with variance rate beta (delta = infinity). Kept as an explicit variant
// alternative, never encoded as a sentinel RayParams.
struct PureMotion {
  double beta;
};

using CanonicalRay = std::variant<RayParams, PureMotion>;

// Bridge weight psi and motion rate beta of the canonical decomposition
// (1-chi) sqrt(psi) * bridge + chi sqrt(beta) * motion.
struct CanonicalWeights {
  double psi;
  double beta;
};

// One weighted component of a superposition. The weight may be any real,
// including zero and negative values (only its square enters the law).
struct RayComponent {
  double weight;
  RayParams params;
};

// Weighted independent rays plus a constant drift rho: the net input
// model Z(t) = rho*t + sum_i k_i X_i(t). All components must share the
// same big_delta and at least one weight must be nonzero.
struct SuperpositionSpec {
  SuperpositionSpec(std::vector<RayComponent> components, double rho);

  std::vector<RayComponent> components;
  double rho;

  double big_delta() const { return components.front().params.big_delta; }
};

// Superposed covariance parameters: cov(s, t) = s * (big_theta - big_t * t)
// for s <= t. Valid on intervals where big_theta - big_t * t >= 0.
struct SuperposedCov {
  SuperposedCov(double big_theta, double big_t);

  double big_theta;
  double big_t;
};

// Conditioning data at observation time u: component states x_i and the
// queue level v >= 0 (v is consumed by the queue module). Requires
// 0 <= u < big_delta of the spec it is applied to.
struct ConditionedState {
  ConditionedState(double u, std::vector<double> x, double v);

  double u;
  std::vector<double> x;
  double v;
};

// Superposition conditioned on a state: covariance s*(big_theta - big_t_u*t)
// on [0, horizon] with drift rho_ux, horizon = big_delta - u.
struct ConditionedCov {
  double big_theta;
  double big_t_u;
  double rho_ux;
  double horizon;
};

// Doob time change mapping a ray with covariance s*(big_theta - big_t_u*t)
// to standard Brownian motion: scale * X(original_time) at transformed
// time t has covariance min(s, t).
struct DoobPoint {
  double original_time;
  double scale;
};

// Covariance kernels. All are symmetric (s > t handled by swap) so grid
// builders never need ordering discipline, zero whenever min(s,t) = 0.
double ray_cov(const RayParams& p, double s, double t);
double superposed_cov(const SuperposedCov& c, double s, double t);

// Pinned (bridge) kernel s*big_theta*(1 - t/w) on [0, w]: the law of net
// input increments conditioned on their value over a window of length w.
// Independent of the drift rho and of the conditioned states by
// construction (neither enters).
double pinned_bridge_cov(double big_theta, double w, double s, double t);

// Stationary-increment witness: var(X(t+d) - X(t)) = d*(big_theta - big_t*d)
// for every admissible anchor t.
double increment_variance(const SuperposedCov& c, double d);

ThetaTau to_theta_tau(const RayParams& p);
RayParams from_theta_tau(const ThetaTau& tt, double big_delta);

// Canonical composition: the ray equal in law to
// (1-chi) sqrt(psi) * bridge(big_delta) + chi sqrt(beta) * motion.
// chi in [0,1), psi > 0, beta >= 0; chi = 1 yields the PureMotion
// alternative (delta = infinity) instead of a RayParams.
CanonicalRay canonical_compose(double chi, double psi, double beta,
                               double big_delta);

// Inverse of canonical_compose at a given mixing weight chi in (0,1):
//   psi  = big_delta^2 * phi / (delta * (1-chi))^2
//   beta = (delta - big_delta) * phi / (delta * chi)^2
// The beta denominator must be (delta*chi)^2 for the round trip
// compose(decompose(p)) == p to hold; see the regression test covering the
// (big_delta*chi)^2 variant, which reproduces p only when delta == big_delta.
CanonicalWeights canonical_decompose(const RayParams& p, double chi);

// Conditioning on X(u) = x: the remaining process on [0, big_delta - u] is
// again a ray with phi_u = phi*(delta-u)/delta, delta_u = delta-u, plus an
// induced drift -x/(delta-u). theta is invariant under conditioning.
RayParams condition_ray(const RayParams& p, double u);
double induced_drift(double x, const RayParams& p, double u);

// Superposition rates: big_theta = sum k_i^2 theta_i, big_t = sum k_i^2 tau_i.
SuperposedCov superpose(const SuperpositionSpec& spec);

// Conditioned superposition: big_theta unchanged, big_t_u = sum k_i^2 tau_u_i
// with tau_u_i = theta_i/(delta_i - u), and drift
// rho_ux = rho - sum k_i x_i/(delta_i - u).
ConditionedCov condition_superposition(const SuperpositionSpec& spec,
                                       const ConditionedState& state);

DoobPoint doob_time_change(double big_theta, double big_t_u, double t);

}  // namespace brownray
