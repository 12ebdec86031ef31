#include "brownray/queue.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "brownray/special.hpp"

namespace brownray {

namespace {

void check_rates(double big_theta, double big_t_u) {
  if (!(big_theta > 0.0)) throw std::domain_error("big_theta must be > 0");
  if (!(big_t_u >= 0.0)) throw std::domain_error("big_t_u must be >= 0");
}

// sqrt(2 h (Theta - T_u h)), the scale of the net-input increment over h.
double increment_scale(double big_theta, double big_t_u, double h) {
  if (!(h > 0.0)) throw std::domain_error("h must be > 0");
  const double tail = big_theta - big_t_u * h;
  if (!(tail > 0.0))
    throw std::domain_error("big_theta - big_t_u*h must be > 0 (h=" +
                            std::to_string(h) + ")");
  return std::sqrt(2.0 * h * tail);
}

}  // namespace

QueueQuery::QueueQuery(SuperpositionSpec spec_, ConditionedState state_,
                       double h_, double q_)
    : spec(std::move(spec_)), state(std::move(state_)), h(h_), q(q_) {
  const double remaining = spec.big_delta() - state.u;
  if (!(h > 0.0 && h <= remaining))
    throw std::invalid_argument("h must satisfy 0 < h <= big_delta - u");
  if (!(q >= 0.0)) throw std::invalid_argument("q must be >= 0");
}

PinnedQueueQuery::PinnedQueueQuery(SuperpositionSpec spec_,
                                   ConditionedState state_, double w_, double z_,
                                   double h_, double q_)
    : spec(std::move(spec_)),
      state(std::move(state_)),
      w(w_),
      z(z_),
      h(h_),
      q(q_) {
  const double remaining = spec.big_delta() - state.u;
  if (!(w > 0.0 && w <= remaining))
    throw std::invalid_argument("w must satisfy 0 < w <= big_delta - u");
  if (!(h > 0.0 && h < w))
    throw std::invalid_argument(
        "h must satisfy 0 < h < w (use the endpoint law at h = w)");
  if (!(q >= 0.0)) throw std::invalid_argument("q must be >= 0");
  if (!std::isfinite(z)) throw std::invalid_argument("z must be finite");
}

double queue_transient_cdf(double big_theta, double big_t_u, double rho,
                           double v, double h, double q) {
  check_rates(big_theta, big_t_u);
  if (!(v >= 0.0)) throw std::domain_error("v must be >= 0");
  if (!(q >= 0.0)) throw std::domain_error("q must be >= 0");
  const double s = increment_scale(big_theta, big_t_u, h);
  const double a = ((v - q) + rho * h) / s;
  const double b = ((q + v) - (2.0 * big_t_u * q / big_theta - rho) * h) / s;
  const double g = -2.0 * q * (big_t_u * q - big_theta * rho) /
                   (big_theta * big_theta);
  // 1/2 (1 - e^g - erf(a) + e^g erf(b)) regrouped into complements.
  return 0.5 * (std::erfc(a) - exp_mul_erfc(g, b));
}

double queue_transient_density(double big_theta, double big_t_u, double rho,
                               double v, double h, double q) {
  check_rates(big_theta, big_t_u);
  if (!(v >= 0.0)) throw std::domain_error("v must be >= 0");
  if (!(q >= 0.0)) throw std::domain_error("q must be >= 0");
  const double s = increment_scale(big_theta, big_t_u, h);
  const double a = ((v - q) + rho * h) / s;
  const double b = ((q + v) - (2.0 * big_t_u * q / big_theta - rho) * h) / s;
  const double g = -2.0 * q * (big_t_u * q - big_theta * rho) /
                   (big_theta * big_theta);
  // Differentiating F = 1/2 (erfc(a) - e^g erfc(b)) in q:
  //   da/dq = -1/s
  //   db/dq = (1 - 2 T_u h / Theta)/s
  //   dg/dq = 2 rho / Theta - 4 T_u q / Theta^2
  //   F' = e^{-a^2}/(sqrt(pi) s) - (dg/dq)/2 e^g erfc(b)
  //        + (db/dq) e^{g - b^2}/sqrt(pi)
  const double dbdq = (1.0 - 2.0 * big_t_u * h / big_theta) / s;
  const double dgdq =
      2.0 * rho / big_theta - 4.0 * big_t_u * q / (big_theta * big_theta);
  const double inv_sqrt_pi = 1.0 / std::sqrt(std::numbers::pi);
  return std::exp(-a * a) * inv_sqrt_pi / s -
         0.5 * dgdq * exp_mul_erfc(g, b) +
         dbdq * std::exp(g - b * b) * inv_sqrt_pi;
}

double transient_cdf(const QueueQuery& query) {
  const ConditionedCov cc = condition_superposition(query.spec, query.state);
  return queue_transient_cdf(cc.big_theta, cc.big_t_u, cc.rho_ux, query.state.v,
                             query.h, query.q);
}

double transient_density(const QueueQuery& query) {
  const ConditionedCov cc = condition_superposition(query.spec, query.state);
  return queue_transient_density(cc.big_theta, cc.big_t_u, cc.rho_ux,
                                 query.state.v, query.h, query.q);
}

double unconditional_cdf(const SuperpositionSpec& spec, double v, double t,
                         double q) {
  const ConditionedState origin(0.0, std::vector<double>(spec.components.size(), 0.0), v);
  return transient_cdf(QueueQuery(spec, origin, t, q));
}

double rbb_stationary_cdf(double big_theta, double big_t, double rho, double q) {
  if (!(big_theta > 0.0) || !(big_t > 0.0))
    throw std::domain_error("big_theta and big_t must be > 0");
  if (!(q >= 0.0)) throw std::domain_error("q must be >= 0");
  return -std::expm1(-2.0 * q * (big_t * q - big_theta * rho) /
                     (big_theta * big_theta));
}

double rbm_transient_cdf(double big_theta, double rho, double v, double t,
                         double q) {
  if (!(big_theta > 0.0)) throw std::domain_error("big_theta must be > 0");
  if (!(t > 0.0)) throw std::domain_error("t must be > 0");
  if (!(v >= 0.0) || !(q >= 0.0)) throw std::domain_error("v, q must be >= 0");
  const double s = std::sqrt(2.0 * big_theta * t);
  const double a = ((v - q) + rho * t) / s;
  const double b = ((q + v) + rho * t) / s;
  const double g = 2.0 * rho * q / big_theta;
  return 0.5 * (std::erfc(a) - exp_mul_erfc(g, b));
}

double netinput_cdf(double big_theta, double big_t_u, double rho, double h,
                    double a) {
  check_rates(big_theta, big_t_u);
  const double s = increment_scale(big_theta, big_t_u, h);
  // 1/2 (1 + erf((a - rho h)/sqrt(2 h (Theta - T_u h))))
  return 0.5 * std::erfc(-(a - rho * h) / s);
}

double netinput_density(double big_theta, double big_t_u, double rho, double h,
                        double a) {
  check_rates(big_theta, big_t_u);
  const double var = h * (big_theta - big_t_u * h);
  if (!(var > 0.0)) throw std::domain_error("increment variance must be > 0");
  const double sd = std::sqrt(var);
  return normal_pdf((a - rho * h) / sd) / sd;
}

double netinput_mean(const SuperpositionSpec& spec, const ConditionedState& state,
                     double h) {
  const ConditionedCov cc = condition_superposition(spec, state);
  return cc.rho_ux * h;
}

double netinput_var(const SuperpositionSpec& spec, const ConditionedState& state,
                    double h) {
  const ConditionedCov cc = condition_superposition(spec, state);
  return h * (cc.big_theta - cc.big_t_u * h);
}

double netinput_cdf(const SuperpositionSpec& spec, const ConditionedState& state,
                    double h, double a) {
  const ConditionedCov cc = condition_superposition(spec, state);
  if (!(h > 0.0 && h <= cc.horizon))
    throw std::domain_error("h must satisfy 0 < h <= big_delta - u");
  return netinput_cdf(cc.big_theta, cc.big_t_u, cc.rho_ux, h, a);
}

double pinned_transient_cdf(double big_theta, double w, double z, double v,
                            double h, double q) {
  if (!(big_theta > 0.0)) throw std::domain_error("big_theta must be > 0");
  if (!(w > 0.0)) throw std::domain_error("w must be > 0");
  if (!(h > 0.0 && h < w))
    throw std::domain_error("h must satisfy 0 < h < w (h = w is the endpoint law)");
  if (!(v >= 0.0) || !(q >= 0.0)) throw std::domain_error("v, q must be >= 0");
  const double s = std::sqrt(2.0 * h * (big_theta - big_theta * h / w));
  const double a = ((v - q) + (z * h) / w) / s;
  const double b = ((q + v) - ((2.0 * q - z) * h) / w) / s;
  const double g = -2.0 * q * (q - z) / (w * big_theta);
  return 0.5 * (std::erfc(a) - exp_mul_erfc(g, b));
}

double pinned_transient_cdf(const PinnedQueueQuery& query) {
  const ConditionedCov cc = condition_superposition(query.spec, query.state);
  return pinned_transient_cdf(cc.big_theta, query.w, query.z, query.state.v,
                              query.h, query.q);
}

double pinned_netinput_limit_cdf(double big_theta, double w, double z, double h,
                                 double a) {
  if (!(big_theta > 0.0)) throw std::domain_error("big_theta must be > 0");
  if (!(w > 0.0) || !(h > 0.0 && h < w))
    throw std::domain_error("need 0 < h < w");
  const double s = std::sqrt(2.0 * h * (big_theta - big_theta * h / w));
  return 0.5 * std::erfc(-(a - z * h / w) / s);
}

double endpoint_cdf(double big_theta, double w, double z, double v, double q) {
  if (!(big_theta > 0.0) || !(w > 0.0))
    throw std::domain_error("big_theta and w must be > 0");
  if (!(v >= 0.0)) throw std::domain_error("v must be >= 0");
  if (q < v + z || q < 0.0) return 0.0;
  return -std::expm1(-2.0 * q * (q - z) / (w * big_theta));
}

double endpoint_density(double big_theta, double w, double z, double v,
                        double q) {
  if (!(big_theta > 0.0) || !(w > 0.0))
    throw std::domain_error("big_theta and w must be > 0");
  if (!(v >= 0.0)) throw std::domain_error("v must be >= 0");
  if (q <= v + z || q <= 0.0) return 0.0;  // atom handled separately
  return std::exp(-2.0 * q * (q - z) / (w * big_theta)) * (4.0 * q - 2.0 * z) /
         (w * big_theta);
}

double endpoint_atom_mass(double big_theta, double w, double z, double v) {
  if (!(big_theta > 0.0) || !(w > 0.0))
    throw std::domain_error("big_theta and w must be > 0");
  if (!(v >= 0.0)) throw std::domain_error("v must be >= 0");
  if (v + z < 0.0) return 0.0;  // law is continuous, support starts at 0
  return -std::expm1(-2.0 * v * (v + z) / (w * big_theta));
}

double endpoint_mean(double big_theta, double w, double z, double v) {
  const double lower = std::max(0.0, v + z);
  (void)endpoint_cdf(big_theta, w, z, v, lower);  // domain checks
  auto tail = [&](double q) {
    return std::exp(-2.0 * q * (q - z) / (w * big_theta));
  };
  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          tail, lower, std::numeric_limits<double>::infinity(), 12, 1e-12,
          &err);
  return lower + integral;
}

double endpoint_mean_reference_w1(double big_theta, double v, double z) {
  const double t = big_theta;
  return z + v +
         std::sqrt(2.0 * std::numbers::pi * t) *
             (std::erf((2.0 * std::numbers::sqrt2 * v + std::numbers::sqrt2 * z) /
                       (2.0 * std::sqrt(t))) -
              1.0) *
             std::exp(z / (2.0 * t)) / 4.0;
}

double posterior_increment_density(double big_theta, double big_t_u, double rho,
                                   double v, double w, double q, double z) {
  const double marginal =
      queue_transient_density(big_theta, big_t_u, rho, v, w, q);
  if (!(marginal > 1e-300))
    throw std::domain_error(
        "q is outside the support of the queue density (marginal vanishes)");
  if (z >= q - v) return 0.0;  // above the atom the increment is impossible
  const double f1 = endpoint_density(big_theta, w, z, v, q);
  const double prior = netinput_density(big_theta, big_t_u, rho, w, z);
  return f1 * prior / marginal;
}

PosteriorAtom posterior_increment_atom(double big_theta, double big_t_u,
                                       double rho, double v, double w,
                                       double q) {
  const double marginal =
      queue_transient_density(big_theta, big_t_u, rho, v, w, q);
  if (!(marginal > 1e-300))
    throw std::domain_error(
        "q is outside the support of the queue density (marginal vanishes)");
  const double z0 = q - v;
  // P(no boundary contact | z = q - v) = 1 - exp(-2 v q / (w Theta)).
  const double contact_free = -std::expm1(-2.0 * v * q / (w * big_theta));
  const double prior = netinput_density(big_theta, big_t_u, rho, w, z0);
  return PosteriorAtom{z0, prior * contact_free / marginal};
}

double posterior_increment_density(const SuperpositionSpec& spec,
                                   const ConditionedState& state, double w,
                                   double q, double z) {
  const ConditionedCov cc = condition_superposition(spec, state);
  if (!(w > 0.0 && w <= cc.horizon))
    throw std::domain_error("w must satisfy 0 < w <= big_delta - u");
  return posterior_increment_density(cc.big_theta, cc.big_t_u, cc.rho_ux,
                                     state.v, w, q, z);
}

PosteriorAtom posterior_increment_atom(const SuperpositionSpec& spec,
                                       const ConditionedState& state, double w,
                                       double q) {
  const ConditionedCov cc = condition_superposition(spec, state);
  if (!(w > 0.0 && w <= cc.horizon))
    throw std::domain_error("w must satisfy 0 < w <= big_delta - u");
  return posterior_increment_atom(cc.big_theta, cc.big_t_u, cc.rho_ux, state.v,
                                  w, q);
}

}  // namespace brownray
