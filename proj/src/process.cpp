#include "brownray/process.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace brownray {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

void require_finite(double x, const char* name) {
  if (!std::isfinite(x))
    throw std::invalid_argument(std::string(name) + " must be finite");
}

}  // namespace

RayParams::RayParams(double phi_, double delta_, double big_delta_)
    : phi(phi_), delta(delta_), big_delta(big_delta_) {
  require_finite(phi, "phi");
  require_finite(delta, "delta");
  require_finite(big_delta, "big_delta");
  require(phi > 0.0, "phi must be > 0 (got " + std::to_string(phi) + ")");
  require(big_delta > 0.0,
          "big_delta must be > 0 (got " + std::to_string(big_delta) + ")");
  require(delta >= big_delta,
          "delta must be >= big_delta (delta=" + std::to_string(delta) +
              ", big_delta=" + std::to_string(big_delta) + ")");
}

ThetaTau::ThetaTau(double theta_, double tau_) : theta(theta_), tau(tau_) {
  require(theta > 0.0, "theta must be > 0");
  require(tau > 0.0, "tau must be > 0");
}

SuperpositionSpec::SuperpositionSpec(std::vector<RayComponent> components_,
                                     double rho_)
    : components(std::move(components_)), rho(rho_) {
  require(!components.empty(), "superposition needs at least one component");
  require_finite(rho, "rho");
  const double horizon = components.front().params.big_delta;
  bool any_nonzero = false;
  for (const auto& c : components) {
    require(c.params.big_delta == horizon,
            "all components must share the same big_delta");
    require_finite(c.weight, "weight");
    if (c.weight != 0.0) any_nonzero = true;
  }
  require(any_nonzero, "at least one component weight must be nonzero");
}

SuperposedCov::SuperposedCov(double big_theta_, double big_t_)
    : big_theta(big_theta_), big_t(big_t_) {
  require(big_theta > 0.0, "big_theta must be > 0");
  require(big_t >= 0.0, "big_t must be >= 0");
}

ConditionedState::ConditionedState(double u_, std::vector<double> x_, double v_)
    : u(u_), x(std::move(x_)), v(v_) {
  require_finite(u, "u");
  require(u >= 0.0, "u must be >= 0");
  require(v >= 0.0, "v must be >= 0");
  for (double xi : x) require_finite(xi, "x");
}

double ray_cov(const RayParams& p, double s, double t) {
  if (s > t) std::swap(s, t);
  require(s >= 0.0, "times must be nonnegative");
  require(t <= p.big_delta, "time exceeds big_delta (t=" + std::to_string(t) +
                                ", big_delta=" + std::to_string(p.big_delta) + ")");
  return p.phi * (s / p.delta) * (1.0 - t / p.delta);
}

double superposed_cov(const SuperposedCov& c, double s, double t) {
  if (s > t) std::swap(s, t);
  require(s >= 0.0, "times must be nonnegative");
  const double tail = c.big_theta - c.big_t * t;
  require(tail >= 0.0, "covariance invalid at t=" + std::to_string(t) +
                           " (big_theta - big_t*t < 0)");
  return s * tail;
}

double pinned_bridge_cov(double big_theta, double w, double s, double t) {
  require(big_theta > 0.0, "big_theta must be > 0");
  require(w > 0.0, "window must be > 0");
  if (s > t) std::swap(s, t);
  require(s >= 0.0, "times must be nonnegative");
  require(t <= w, "time exceeds the pinned window (t=" + std::to_string(t) +
                      ", w=" + std::to_string(w) + ")");
  return s * big_theta * (1.0 - t / w);
}

double increment_variance(const SuperposedCov& c, double d) {
  require(d >= 0.0, "lag must be >= 0");
  const double tail = c.big_theta - c.big_t * d;
  require(tail >= 0.0, "lag beyond covariance validity (d=" + std::to_string(d) + ")");
  return d * tail;
}

ThetaTau to_theta_tau(const RayParams& p) {
  return ThetaTau(p.phi / p.delta, p.phi / (p.delta * p.delta));
}

RayParams from_theta_tau(const ThetaTau& tt, double big_delta) {
  const double delta = tt.theta / tt.tau;
  require(delta >= big_delta,
          "theta/tau yields delta < big_delta (delta=" + std::to_string(delta) +
              ", big_delta=" + std::to_string(big_delta) + ")");
  return RayParams(tt.theta * tt.theta / tt.tau, delta, big_delta);
}

CanonicalRay canonical_compose(double chi, double psi, double beta,
                               double big_delta) {
  require(big_delta > 0.0, "big_delta must be > 0");
  require(psi > 0.0, "psi must be > 0");
  require(beta >= 0.0, "beta must be >= 0");
  require(chi >= 0.0 && chi <= 1.0, "chi must be in [0, 1]");
  if (chi == 1.0) return PureMotion{beta};
  const double bridge_var = psi * (1.0 - chi) * (1.0 - chi);
  const double motion_var = big_delta * beta * chi * chi;
  const double total = bridge_var + motion_var;
  const double phi = total * total / bridge_var;
  const double delta = big_delta * total / bridge_var;
  return RayParams(phi, delta, big_delta);
}

CanonicalWeights canonical_decompose(const RayParams& p, double chi) {
  require(chi > 0.0 && chi < 1.0, "chi must be in (0, 1)");
  const double bd = p.big_delta;
  const double psi =
      bd * bd * p.phi / (p.delta * (1.0 - chi) * p.delta * (1.0 - chi));
  const double beta = (p.delta - bd) * p.phi / (p.delta * chi * p.delta * chi);
  return CanonicalWeights{psi, beta};
}

RayParams condition_ray(const RayParams& p, double u) {
  require(u >= 0.0, "u must be >= 0");
  require(u < p.big_delta, "u must be < big_delta (u=" + std::to_string(u) +
                               ", big_delta=" + std::to_string(p.big_delta) + ")");
  const double delta_u = p.delta - u;
  return RayParams(p.phi * delta_u / p.delta, delta_u, p.big_delta - u);
}

double induced_drift(double x, const RayParams& p, double u) {
  require(u >= 0.0 && u < p.big_delta, "u must be in [0, big_delta)");
  return -x / (p.delta - u);
}

SuperposedCov superpose(const SuperpositionSpec& spec) {
  double big_theta = 0.0;
  double big_t = 0.0;
  for (const auto& c : spec.components) {
    const ThetaTau tt = to_theta_tau(c.params);
    big_theta += c.weight * c.weight * tt.theta;
    big_t += c.weight * c.weight * tt.tau;
  }
  return SuperposedCov(big_theta, big_t);
}

ConditionedCov condition_superposition(const SuperpositionSpec& spec,
                                       const ConditionedState& state) {
  require(state.x.size() == spec.components.size(),
          "state dimension must match the number of components");
  const double horizon = spec.big_delta();
  require(state.u < horizon, "u must be < big_delta");
  double big_theta = 0.0;
  double big_t_u = 0.0;
  double rho_ux = spec.rho;
  for (std::size_t i = 0; i < spec.components.size(); ++i) {
    const auto& c = spec.components[i];
    const double k2 = c.weight * c.weight;
    const double theta = c.params.phi / c.params.delta;
    big_theta += k2 * theta;
    // tau_u = phi_u/delta_u^2 simplifies to theta/(delta - u).
    big_t_u += k2 * theta / (c.params.delta - state.u);
    rho_ux -= c.weight * state.x[i] / (c.params.delta - state.u);
  }
  return ConditionedCov{big_theta, big_t_u, rho_ux, horizon - state.u};
}

DoobPoint doob_time_change(double big_theta, double big_t_u, double t) {
  require(big_theta > 0.0, "big_theta must be > 0");
  require(big_t_u >= 0.0, "big_t_u must be >= 0");
  require(t >= 0.0, "t must be >= 0");
  const double denom = 1.0 + t * big_t_u;
  return DoobPoint{t * big_theta / denom, denom / big_theta};
}

}  // namespace brownray
