#pragma once

#include "brownray/process.hpp"

// Closed-form transient and limiting distributions for the regulated queue
// Q(t) = Q(0) + Z(t) + L(t) driven by a superposed Brownian-ray net input
// Z(t) = rho*t + X(t), with L the minimal nondecreasing process keeping
// Q >= 0. Raw overloads take the covariance rates (big_theta, big_t_u) and
// the conditioned drift directly; typed overloads assemble them from a
// SuperpositionSpec and a ConditionedState.

namespace brownray {

// Conditioned transient query: distribution of Q(u+h) given Q(u) = v and
// the component states x at time u, evaluated at level q.
struct QueueQuery {
  QueueQuery(SuperpositionSpec spec, ConditionedState state, double h, double q);

  SuperpositionSpec spec;
  ConditionedState state;
  double h;
  double q;
};

// Transient query additionally pinned on the net-input increment z over the
// window [u, u+w]; requires 0 < h < w (h = w is the endpoint law).
struct PinnedQueueQuery {
  PinnedQueueQuery(SuperpositionSpec spec, ConditionedState state, double w,
                   double z, double h, double q);

  SuperpositionSpec spec;
  ConditionedState state;
  double w;
  double z;
  double h;
  double q;
};

// P(Q(u+h) <= q | Q(u)=v, X(u)=x). Four-term reflection formula
//
//   F = 1/2 * (1 - e^G - erf(A) + e^G erf(B)),
//   G = -2q(T_u q - Theta rho)/Theta^2,
//   A = (-q + v + rho h)/sqrt(2h(Theta - T_u h)),
//   B = (Theta(q+v) - (2 T_u q - Theta rho)h) / (Theta sqrt(2h(Theta - T_u h))),
//
// with the leading 1/2 spanning all four terms (the only reading with
// F(0) = 0 that also reduces to the regulated-Brownian-motion law at
// T_u = 0). e^G erf(B) is evaluated in complementary form so the product
// stays finite where the mathematics is finite.
double queue_transient_cdf(double big_theta, double big_t_u, double rho,
                           double v, double h, double q);
double transient_cdf(const QueueQuery& query);

// d/dq of the transient law. Closed form (see queue.cpp for the derivative
// worked out term by term); cross-checked against central differences in
// the tests.
double queue_transient_density(double big_theta, double big_t_u, double rho,
                               double v, double h, double q);
double transient_density(const QueueQuery& query);

// Unconditional law of Q(t) from Q(0) = v: the transient law at u=0, x=0.
double unconditional_cdf(const SuperpositionSpec& spec, double v, double t,
                         double q);

// Stationary law of the regulated Brownian bridge (the t -> Theta/T limit):
// F(q) = 1 - exp(-2q(Tq - Theta rho)/Theta^2). No artificial clamping; the
// formula is a proper CDF on q >= v + rho*Theta/T (all q >= 0 when v = 0
// and rho <= 0).
double rbb_stationary_cdf(double big_theta, double big_t, double rho, double q);

// Transient law of regulated Brownian motion; equals the general law at
// T_u = 0.
double rbm_transient_cdf(double big_theta, double rho, double v, double t,
                         double q);

// Conditioned net-input law (the large-v limit of the queue):
// V(h) ~ Normal(rho_ux*h, h(Theta - T_u h)).
double netinput_cdf(double big_theta, double big_t_u, double rho, double h,
                    double a);
double netinput_density(double big_theta, double big_t_u, double rho, double h,
                        double a);
double netinput_mean(const SuperpositionSpec& spec, const ConditionedState& state,
                     double h);
double netinput_var(const SuperpositionSpec& spec, const ConditionedState& state,
                    double h);
double netinput_cdf(const SuperpositionSpec& spec, const ConditionedState& state,
                    double h, double a);

// Pinned transient law: distribution of Q(u+h) additionally conditioned on
// Z(u+w) - Z(u) = z, for 0 < h < w. Depends on neither rho nor x; it is the
// four-term law with T_u -> Theta/w and rho -> z/w.
double pinned_transient_cdf(double big_theta, double w, double z, double v,
                            double h, double q);
double pinned_transient_cdf(const PinnedQueueQuery& query);

// Large-v limit of the pinned law in centered form (level v + a): a normal
// step that converges to a point mass at a = z as h -> w.
double pinned_netinput_limit_cdf(double big_theta, double w, double z, double h,
                                 double a);

// Endpoint law (h -> w): P(Q(u+w) <= q | z, v) = 1 - exp(-2q(q-z)/(w Theta))
// for q >= v + z, and 0 below. Right-continuous, with an atom of mass
// endpoint_atom_mass at q = max(0, v + z).
double endpoint_cdf(double big_theta, double w, double z, double v, double q);
double endpoint_density(double big_theta, double w, double z, double v, double q);
double endpoint_atom_mass(double big_theta, double w, double z, double v);

// Mean of the endpoint law by numerical integration of the tail
// 1 - F(q) = min(1, exp(-2q(q-z)/(w Theta))) above the atom.
double endpoint_mean(double big_theta, double w, double z, double v);

// The printed closed-form endpoint mean specialized at w = 1, reported for
// comparison only (it does not integrate the endpoint law; see the verify
// report).
double endpoint_mean_reference_w1(double big_theta, double v, double z);

// Posterior law of the net-input increment z over [u, u+w] given the queue
// levels at both ends (Q(u) = v, Q(u+w) = q): Bayes assembly
//
//   posterior(z) = endpoint_density(q | z) * netinput_density(z) / marginal(q)
//
// on z < q - v, plus an atom at z = q - v (the no-boundary-contact event)
// of mass netinput_density(q-v) * exp-factor / marginal(q). The marginal is
// the transient density at h = w.
double posterior_increment_density(double big_theta, double big_t_u, double rho,
                                   double v, double w, double q, double z);

struct PosteriorAtom {
  double location;  // z = q - v
  double mass;
};

PosteriorAtom posterior_increment_atom(double big_theta, double big_t_u,
                                       double rho, double v, double w, double q);

double posterior_increment_density(const SuperpositionSpec& spec,
                                   const ConditionedState& state, double w,
                                   double q, double z);
PosteriorAtom posterior_increment_atom(const SuperpositionSpec& spec,
                                       const ConditionedState& state, double w,
                                       double q);

}  // namespace brownray
