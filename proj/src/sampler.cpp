#include "brownray/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace brownray {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

// Factorization plan: packed lower-triangular Cholesky factor over the
// stochastic grid points plus a scatter map for deterministic ones.
struct FactorPlan {
  std::vector<double> chol;  // row-major packed lower triangle, n_eff rows
  std::vector<std::ptrdiff_t> scatter;  // grid idx -> factor idx, -1 = deterministic
  std::size_t n_eff = 0;
};

// y = L z for the packed lower-triangular factor. The four-lane accumulation
// fixes the floating-point reduction tree per output element, so results do
// not depend on how paths are batched.
void apply_lower_packed(const std::vector<double>& chol, std::size_t n,
                        const double* z, double* y) {
  const double* row = chol.data();
  for (std::size_t j = 0; j < n; ++j, row += j) {
    double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0;
    const std::size_t len = j + 1;
    const std::size_t m = len & ~std::size_t{3};
    std::size_t k = 0;
    for (; k < m; k += 4) {
      a0 += row[k] * z[k];
      a1 += row[k + 1] * z[k + 1];
      a2 += row[k + 2] * z[k + 2];
      a3 += row[k + 3] * z[k + 3];
    }
    double tail = 0.0;
    for (; k < len; ++k) tail += row[k] * z[k];
    y[j] = ((a0 + a1) + (a2 + a3)) + tail;
  }
}

FactorPlan make_plan(const TimeGrid& grid, const CovKernel& kernel) {
  const std::size_t n = grid.size();
  FactorPlan plan;
  plan.scatter.assign(n, -1);
  std::vector<std::size_t> eff;
  eff.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double var = kernel(grid.points[i], grid.points[i]);
    if (var < 0.0)
      fail("covariance not positive at t=" + std::to_string(grid.points[i]) +
           " (variance " + std::to_string(var) + "); grid beyond validity");
    if (var == 0.0) continue;  // deterministic point, value = mean
    plan.scatter[i] = static_cast<std::ptrdiff_t>(eff.size());
    eff.push_back(i);
  }
  plan.n_eff = eff.size();
  if (plan.n_eff == 0) return plan;

  Eigen::MatrixXd gram(plan.n_eff, plan.n_eff);
  for (std::size_t a = 0; a < plan.n_eff; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      const double v = kernel(grid.points[eff[a]], grid.points[eff[b]]);
      gram(a, b) = v;
      gram(b, a) = v;
    }

  // Jitter escalation: near-pinned grids are numerically semidefinite.
  const double trace = gram.trace();
  const double jitters[] = {0.0, 1e-12 * trace, 1e-10 * trace};
  for (double jitter : jitters) {
    Eigen::MatrixXd shifted = gram;
    if (jitter > 0.0) shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) {
      Eigen::MatrixXd lower = llt.matrixL();
      plan.chol.resize(plan.n_eff * (plan.n_eff + 1) / 2);
      double* out = plan.chol.data();
      for (std::size_t j = 0; j < plan.n_eff; ++j)
        for (std::size_t k = 0; k <= j; ++k) *out++ = lower(j, k);
      return plan;
    }
  }
  fail("gram matrix not positive definite up to jitter 1e-10*trace; last grid time t=" +
       std::to_string(grid.horizon()));
}

SamplePathBatch run_plan(const TimeGrid& grid, const FactorPlan& plan,
                         const std::vector<double>& mean, std::size_t n_paths,
                         std::uint64_t seed, const SampleOptions& options,
                         bool drift_applied) {
  const std::size_t n = grid.size();
  if (!mean.empty() && mean.size() != n)
    fail("mean vector size does not match the grid");

  SamplePathBatch batch{grid, RowMatrixXd(n_paths, n), seed, drift_applied};

  auto worker = [&](std::size_t first, std::size_t last) {
    std::vector<double> z(plan.n_eff);
    std::vector<double> y(plan.n_eff);
    for (std::size_t p = first; p < last; ++p) {
      PathRng rng(seed, options.path_offset + p);
      for (std::size_t k = 0; k < plan.n_eff; ++k) z[k] = rng.normal();
      apply_lower_packed(plan.chol, plan.n_eff, z.data(), y.data());
      double* row = batch.values.row(static_cast<Eigen::Index>(p)).data();
      for (std::size_t i = 0; i < n; ++i) {
        const std::ptrdiff_t s = plan.scatter[i];
        double v = (s >= 0) ? y[static_cast<std::size_t>(s)] : 0.0;
        if (!mean.empty()) v += mean[i];
        row[i] = v;
      }
    }
  };

  const int threads = std::max(1, options.threads);
  if (threads == 1 || n_paths < 2) {
    worker(0, n_paths);
  } else {
    std::vector<std::thread> pool;
    const std::size_t per = (n_paths + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::size_t first = per * static_cast<std::size_t>(t);
      if (first >= n_paths) break;
      pool.emplace_back(worker, first, std::min(n_paths, first + per));
    }
    for (auto& th : pool) th.join();
  }
  return batch;
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> points_) : points(std::move(points_)) {
  if (points.empty()) throw std::invalid_argument("time grid must be nonempty");
  double prev = 0.0;
  for (double t : points) {
    if (!(t > prev))
      throw std::invalid_argument(
          "time grid must be strictly increasing and start after 0");
    prev = t;
  }
}

TimeGrid TimeGrid::uniform(double to, std::size_t n) {
  if (!(to > 0.0) || n == 0)
    throw std::invalid_argument("uniform grid needs to > 0 and n >= 1");
  std::vector<double> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    pts[i] = to * static_cast<double>(i + 1) / static_cast<double>(n);
  pts.back() = to;
  return TimeGrid(std::move(pts));
}

PathRng::PathRng(std::uint64_t master_seed, std::uint64_t path_index) {
  const std::uint64_t a = splitmix64(master_seed);
  engine_.seed(splitmix64(a ^ splitmix64(path_index)));
}

SamplePathBatch sample_gaussian(const TimeGrid& grid, const CovKernel& kernel,
                                const std::vector<double>& mean,
                                std::size_t n_paths, std::uint64_t seed,
                                const SampleOptions& options) {
  const FactorPlan plan = make_plan(grid, kernel);
  return run_plan(grid, plan, mean, n_paths, seed, options, !mean.empty());
}

SamplePathBatch sample_ray(const RayParams& params, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t seed,
                           const SampleOptions& options) {
  if (grid.horizon() > params.big_delta)
    throw std::invalid_argument("grid exceeds the ray horizon big_delta");
  auto kernel = [params](double s, double t) { return ray_cov(params, s, t); };
  return sample_gaussian(grid, kernel, {}, n_paths, seed, options);
}

SamplePathBatch sample_ray(const SuperposedCov& cov, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t seed,
                           const SampleOptions& options) {
  auto kernel = [cov](double s, double t) { return superposed_cov(cov, s, t); };
  return sample_gaussian(grid, kernel, {}, n_paths, seed, options);
}

SamplePathBatch sample_conditioned_net_input(const SuperpositionSpec& spec,
                                             const ConditionedState& state,
                                             const TimeGrid& grid,
                                             std::size_t n_paths,
                                             std::uint64_t seed,
                                             const SampleOptions& options) {
  const ConditionedCov cc = condition_superposition(spec, state);
  if (grid.horizon() > cc.horizon)
    throw std::invalid_argument("grid exceeds the remaining horizon big_delta - u");
  auto kernel = [cc](double s, double t) {
    return superposed_cov(SuperposedCov(cc.big_theta, cc.big_t_u), s, t);
  };
  std::vector<double> mean(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    mean[i] = cc.rho_ux * grid.points[i];
  return sample_gaussian(grid, kernel, mean, n_paths, seed, options);
}

SamplePathBatch sample_pinned(const SuperpositionSpec& spec,
                              const ConditionedState& state, double w, double z,
                              const TimeGrid& grid, std::size_t n_paths,
                              std::uint64_t seed, const SampleOptions& options) {
  const ConditionedCov cc = condition_superposition(spec, state);
  if (!(w > 0.0) || w > cc.horizon)
    throw std::invalid_argument("pinned window must satisfy 0 < w <= big_delta - u");
  if (grid.horizon() > w)
    throw std::invalid_argument("grid exceeds the pinned window w");
  const double big_theta = cc.big_theta;
  auto kernel = [big_theta, w](double s, double t) {
    return pinned_bridge_cov(big_theta, w, s, t);
  };
  std::vector<double> mean(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    mean[i] = (z / w) * grid.points[i];
  return sample_gaussian(grid, kernel, mean, n_paths, seed, options);
}

EmbeddedSpec::EmbeddedSpec(EmbeddedKind kind_, double motion_rate_,
                           std::vector<PeriodicBridge> bridges_, double window_)
    : kind(kind_),
      motion_rate(motion_rate_),
      bridges(std::move(bridges_)),
      window(window_) {
  if (!(window > 0.0)) throw std::invalid_argument("window must be > 0");
  if (motion_rate < 0.0) throw std::invalid_argument("motion_rate must be >= 0");
  const std::size_t nb = bridges.size();
  switch (kind) {
    case EmbeddedKind::periodic_bridge:
      if (nb != 1 || motion_rate != 0.0)
        throw std::invalid_argument(
            "periodic_bridge takes exactly one bridge and no motion part");
      break;
    case EmbeddedKind::motion_plus_periodic_bridge:
      if (nb != 1)
        throw std::invalid_argument(
            "motion_plus_periodic_bridge takes exactly one bridge");
      break;
    case EmbeddedKind::motion_plus_multi_bridges:
      if (nb < 2)
        throw std::invalid_argument(
            "motion_plus_multi_bridges takes at least two bridges");
      break;
  }
  for (std::size_t i = 0; i < nb; ++i) {
    if (!(bridges[i].phi > 0.0) || !(bridges[i].period > 0.0))
      throw std::invalid_argument("bridge phi and period must be > 0");
    if (!(bridges[i].period > window))
      throw std::invalid_argument("bridge period must exceed the window");
    for (std::size_t j = 0; j < i; ++j)
      if (bridges[j].period == bridges[i].period)
        throw std::invalid_argument("bridge periods must be distinct");
  }
}

SuperposedCov EmbeddedSpec::matched_cov() const {
  double big_theta = motion_rate;
  double big_t = 0.0;
  for (const auto& b : bridges) {
    big_theta += b.phi / b.period;
    big_t += b.phi / (b.period * b.period);
  }
  return SuperposedCov(big_theta, big_t);
}

RayParams EmbeddedSpec::matched_ray() const {
  const SuperposedCov c = matched_cov();
  if (c.big_t == 0.0)
    throw std::domain_error("pure motion has no finite matched ray");
  return RayParams(c.big_theta * c.big_theta / c.big_t, c.big_theta / c.big_t,
                   window);
}

SamplePathBatch sample_embedded(const EmbeddedSpec& spec, const TimeGrid& grid,
                                std::size_t n_paths, std::uint64_t seed,
                                const SampleOptions& options) {
  auto kernel = [&spec](double s, double t) {
    double c = spec.motion_rate * std::min(s, t);
    for (const auto& b : spec.bridges) {
      const double rs = std::fmod(s, b.period);
      const double rt = std::fmod(t, b.period);
      const double lo = std::min(rs, rt);
      const double hi = std::max(rs, rt);
      c += b.phi * (lo / b.period) * (1.0 - hi / b.period);
    }
    return c;
  };

  if (spec.motion_rate > 0.0)
    return sample_gaussian(grid, kernel, {}, n_paths, seed, options);

  // Pure periodic case: grid points whose residues coincide exactly are the
  // same random variable. Sample one representative per residue class and
  // scatter, so the Gram stays nonsingular.
  const auto& b0 = spec.bridges.front();
  std::map<double, std::size_t> residue_rep;  // residue -> representative grid idx
  std::vector<std::ptrdiff_t> rep_of(grid.size());
  std::vector<double> rep_times;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = std::fmod(grid.points[i], b0.period);
    auto [it, inserted] = residue_rep.try_emplace(r, rep_times.size());
    if (inserted) rep_times.push_back(grid.points[i]);
    rep_of[i] = static_cast<std::ptrdiff_t>(it->second);
  }
  if (rep_times.size() == grid.size())
    return sample_gaussian(grid, kernel, {}, n_paths, seed, options);

  const TimeGrid rep_grid(rep_times);
  SamplePathBatch rep = sample_gaussian(rep_grid, kernel, {}, n_paths, seed, options);
  SamplePathBatch batch{grid, RowMatrixXd(n_paths, grid.size()), seed, false};
  for (Eigen::Index p = 0; p < batch.values.rows(); ++p)
    for (std::size_t i = 0; i < grid.size(); ++i)
      batch.values(p, static_cast<Eigen::Index>(i)) = rep.values(p, rep_of[i]);
  return batch;
}

RegulatedPath reflect(std::span<const double> net_input, double v) {
  if (v < 0.0) throw std::invalid_argument("initial level v must be >= 0");
  RegulatedPath out;
  out.q.resize(net_input.size());
  out.l.resize(net_input.size());
  double running_min = 0.0;  // infimum over [0, h] includes V(0) = 0
  for (std::size_t i = 0; i < net_input.size(); ++i) {
    running_min = std::min(running_min, net_input[i]);
    const double floor = std::min(0.0, v + running_min);
    out.q[i] = v + net_input[i] - floor;
    out.l[i] = -floor;
  }
  return out;
}

RegulatedBatch reflect_batch(const SamplePathBatch& batch, double v) {
  RegulatedBatch out{RowMatrixXd(batch.values.rows(), batch.values.cols()),
                     RowMatrixXd(batch.values.rows(), batch.values.cols())};
  const std::size_t n = static_cast<std::size_t>(batch.values.cols());
  for (Eigen::Index p = 0; p < batch.values.rows(); ++p) {
    const RegulatedPath rp = reflect({batch.values.row(p).data(), n}, v);
    for (std::size_t i = 0; i < n; ++i) {
      out.q(p, static_cast<Eigen::Index>(i)) = rp.q[i];
      out.l(p, static_cast<Eigen::Index>(i)) = rp.l[i];
    }
  }
  return out;
}

}  // namespace brownray
