#include "brownray/options.hpp"

#include <cmath>
#include <stdexcept>

#include "brownray/special.hpp"

namespace brownray {

GbrSpec::GbrSpec(double s0_, double rho_, RayParams ray_)
    : s0(s0_), rho(rho_), ray(ray_) {
  if (!(s0 > 0.0)) throw std::invalid_argument("s0 must be > 0");
  if (!std::isfinite(rho)) throw std::invalid_argument("rho must be finite");
}

OptionContract::OptionContract(double strike_, double rate_, double maturity_,
                               double spot_)
    : strike(strike_), rate(rate_), maturity(maturity_), spot(spot_) {
  if (!(strike > 0.0)) throw std::invalid_argument("strike must be > 0");
  if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
  if (!(maturity >= 0.0)) throw std::invalid_argument("maturity must be >= 0");
  if (!(spot > 0.0)) throw std::invalid_argument("spot must be > 0");
}

double call_payoff(double terminal_price, double strike) {
  if (!(strike > 0.0)) throw std::invalid_argument("strike must be > 0");
  return std::max(terminal_price - strike, 0.0);
}

namespace {

double d1(double spot, double strike, double rate, double h, double theta1) {
  return (std::log(spot / strike) + (rate + theta1 / 2.0) * h) /
         std::sqrt(theta1 * h);
}

void check_bsm(double spot, double strike, double rate, double h,
               double theta1) {
  if (!(spot > 0.0) || !(strike > 0.0) || !(rate > 0.0) || !(theta1 > 0.0))
    throw std::invalid_argument("spot, strike, rate, theta1 must be > 0");
  if (!(h >= 0.0)) throw std::invalid_argument("h must be >= 0");
}

}  // namespace

double bsm_call_price(double spot, double strike, double rate, double h,
                      double theta1) {
  check_bsm(spot, strike, rate, h, theta1);
  if (h == 0.0) return call_payoff(spot, strike);
  const double x1 = d1(spot, strike, rate, h, theta1);
  const double x2 = x1 - std::sqrt(theta1 * h);
  return spot * normal_cdf(x1) - strike * std::exp(-rate * h) * normal_cdf(x2);
}

double bsm_call_delta(double spot, double strike, double rate, double h,
                      double theta1) {
  check_bsm(spot, strike, rate, h, theta1);
  if (h == 0.0) return spot > strike ? 1.0 : 0.0;
  return normal_cdf(d1(spot, strike, rate, h, theta1));
}

double bsm_call_price(const OptionContract& c, double theta1) {
  return bsm_call_price(c.spot, c.strike, c.rate, c.maturity, theta1);
}

double bsm_call_delta(const OptionContract& c, double theta1) {
  return bsm_call_delta(c.spot, c.strike, c.rate, c.maturity, theta1);
}

double theta_from_variance_rate(double r_uu, double u, double tau) {
  if (!(u > 0.0)) throw std::invalid_argument("u must be > 0");
  return r_uu / u + u * tau;
}

double theta_from_horizon_cov(double r_uu, double r_u_uh, double u,
                              double big_h) {
  if (!(u > 0.0) || !(big_h > 0.0))
    throw std::invalid_argument("u and H must be > 0");
  return ((u + big_h) * r_uu / u - r_u_uh) / big_h;
}

double conditioned_spot(const GbrSpec& spec, double u, double x1) {
  if (!(u >= 0.0 && u < spec.ray.big_delta))
    throw std::invalid_argument("u must be in [0, big_delta)");
  return spec.s0 * std::exp(spec.rho * u + x1);
}

double gbr_call_price(const GbrSpec& spec, double u, double x1,
                      const OptionContract& contract) {
  if (!(contract.maturity <= spec.ray.big_delta - u))
    throw std::invalid_argument("maturity exceeds the remaining horizon");
  (void)x1;  // the price depends on the history only through the spot
  return bsm_call_price(contract, spec.theta());
}

namespace {

// Log-price increment paths rho_ux1*h + X_{u;x1}(h) on the given grid,
// via the conditioned-ray sampler with a single component.
SamplePathBatch log_increment_paths(const GbrSpec& spec, double u, double x1,
                                    const TimeGrid& grid, std::size_t n_paths,
                                    std::uint64_t seed,
                                    const SampleOptions& options) {
  const SuperpositionSpec net({RayComponent{1.0, spec.ray}}, spec.rho);
  const ConditionedState state(u, {x1}, 0.0);
  return sample_conditioned_net_input(net, state, grid, n_paths, seed, options);
}

}  // namespace

std::vector<double> gbr_terminal_prices(const GbrSpec& spec, double u, double x1,
                                        double big_h, std::size_t n_paths,
                                        std::uint64_t seed,
                                        const SampleOptions& options) {
  if (!(big_h > 0.0 && big_h <= spec.ray.big_delta - u))
    throw std::invalid_argument("H must satisfy 0 < H <= big_delta - u");
  const double spot = conditioned_spot(spec, u, x1);
  const TimeGrid grid({big_h});
  const SamplePathBatch batch =
      log_increment_paths(spec, u, x1, grid, n_paths, seed, options);
  std::vector<double> prices(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p)
    prices[p] = spot * std::exp(batch.values(static_cast<Eigen::Index>(p), 0));
  return prices;
}

HedgeReport hedge_replicate(const GbrSpec& spec, double u, double x1,
                            const OptionContract& contract, int n_steps,
                            std::size_t n_paths, std::uint64_t seed,
                            const SampleOptions& options) {
  if (n_steps < 2) throw std::invalid_argument("n_steps must be >= 2");
  if (n_paths == 0) throw std::invalid_argument("n_paths must be >= 1");
  const double big_h = contract.maturity;
  if (!(big_h > 0.0 && big_h <= spec.ray.big_delta - u))
    throw std::invalid_argument("maturity must satisfy 0 < H <= big_delta - u");

  const double theta = spec.theta();
  const double dt = big_h / n_steps;
  const TimeGrid grid = TimeGrid::uniform(big_h, static_cast<std::size_t>(n_steps));
  const SamplePathBatch batch =
      log_increment_paths(spec, u, x1, grid, n_paths, seed, options);
  const double spot = contract.spot;
  const double growth = std::exp(contract.rate * dt);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t p = 0; p < n_paths; ++p) {
    double portfolio = bsm_call_price(contract, theta);
    double price = spot;
    for (int j = 0; j < n_steps; ++j) {
      const double remaining = big_h - j * dt;
      const double shares =
          bsm_call_delta(price, contract.strike, contract.rate, remaining, theta);
      const double bond = portfolio - shares * price;
      price = spot * std::exp(batch.values(static_cast<Eigen::Index>(p), j));
      // Self-financing step: the portfolio changes only through the asset
      // and the bond.
      portfolio = shares * price + bond * growth;
    }
    const double err = portfolio - call_payoff(price, contract.strike);
    sum += err;
    sum_sq += err * err;
  }

  const double n = static_cast<double>(n_paths);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return HedgeReport{n_steps, std::sqrt(sum_sq / n), mean,
                     std::sqrt(var / n)};
}

}  // namespace brownray
