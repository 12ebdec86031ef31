#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "brownray/process.hpp"

// Exact Gaussian path sampling on finite grids. Paths are drawn through a
// symmetric (lower-triangular) factorization of the covariance Gram matrix
// with diagonal jitter escalation, so near-pinned grids that are only
// numerically semidefinite still factor. Randomness is keyed per
// (master seed, path index) and the triangular transform accumulates in a
// fixed order per path, which makes batches bitwise reproducible no matter
// how generation is chunked or threaded.

namespace brownray {

using RowMatrixXd =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Strictly increasing sample times, all > 0 (the process value at 0 is the
// known constant, so grids exclude it).
struct TimeGrid {
  explicit TimeGrid(std::vector<double> points);
  static TimeGrid uniform(double to, std::size_t n);

  std::vector<double> points;

  double horizon() const { return points.back(); }
  std::size_t size() const { return points.size(); }
};

struct SampleOptions {
  std::uint64_t path_offset = 0;  // absolute index of the first path
  int threads = 1;
};

struct SamplePathBatch {
  TimeGrid grid;
  RowMatrixXd values;  // n_paths x n_points, row = one path
  std::uint64_t seed = 0;
  bool drift_applied = false;
};

// Deterministic per-path stream: path i draws from a generator keyed by
// (master_seed, i), independently of batch size or thread layout.
class PathRng {
 public:
  PathRng(std::uint64_t master_seed, std::uint64_t path_index);
  double normal() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

using CovKernel = std::function<double(double, double)>;

// Generic engine: draws from the zero-mean Gaussian with Gram matrix
// kernel(t_i, t_j), then adds mean (empty = zero). Grid points whose kernel
// variance is exactly zero are deterministic and bypass the factorization.
// Throws std::runtime_error naming the offending time when the kernel is
// invalid on the grid.
SamplePathBatch sample_gaussian(const TimeGrid& grid, const CovKernel& kernel,
                                const std::vector<double>& mean,
                                std::size_t n_paths, std::uint64_t seed,
                                const SampleOptions& options = {});

SamplePathBatch sample_ray(const RayParams& params, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t seed,
                           const SampleOptions& options = {});
SamplePathBatch sample_ray(const SuperposedCov& cov, const TimeGrid& grid,
                           std::size_t n_paths, std::uint64_t seed,
                           const SampleOptions& options = {});

// Conditioned net input V(h) = rho_ux*h + X(h) with covariance
// s*(big_theta - big_t_u*t) on [0, big_delta - u].
SamplePathBatch sample_conditioned_net_input(const SuperpositionSpec& spec,
                                             const ConditionedState& state,
                                             const TimeGrid& grid,
                                             std::size_t n_paths,
                                             std::uint64_t seed,
                                             const SampleOptions& options = {});

// Net input pinned to increment z over the window [0, w]: bridge covariance
// s*big_theta*(1 - t/w) plus the linear interpolant (z/w)*h. Paths hit z at
// h = w exactly; the law does not depend on rho or on the state values.
SamplePathBatch sample_pinned(const SuperpositionSpec& spec,
                              const ConditionedState& state, double w, double z,
                              const TimeGrid& grid, std::size_t n_paths,
                              std::uint64_t seed,
                              const SampleOptions& options = {});

// Stationary-increment generators on the half line. Any increment window of
// length <= window has the law of the matched ray; nothing is claimed for
// longer windows.
enum class EmbeddedKind {
  periodic_bridge,
  motion_plus_periodic_bridge,
  motion_plus_multi_bridges,
};

struct PeriodicBridge {
  double phi;
  double period;  // the delta of the underlying bridge
};

struct EmbeddedSpec {
  EmbeddedSpec(EmbeddedKind kind, double motion_rate,
               std::vector<PeriodicBridge> bridges, double window);

  EmbeddedKind kind;
  double motion_rate;  // variance rate of the independent motion part
  std::vector<PeriodicBridge> bridges;
  double window;  // max increment-window length with the matched-ray law

  SuperposedCov matched_cov() const;
  RayParams matched_ray() const;
};

SamplePathBatch sample_embedded(const EmbeddedSpec& spec, const TimeGrid& grid,
                                std::size_t n_paths, std::uint64_t seed,
                                const SampleOptions& options = {});

// One-sided reflection at zero of v + V over the grid (running-infimum
// formula per grid point, with V(0) = 0 included in the infimum):
//   q_j = v + V_j - min(0, v + min_{i<=j} V_i),   l_j = q_j - v - V_j.
struct RegulatedPath {
  std::vector<double> q;
  std::vector<double> l;
};

RegulatedPath reflect(std::span<const double> net_input, double v);

struct RegulatedBatch {
  RowMatrixXd q;
  RowMatrixXd l;
};

RegulatedBatch reflect_batch(const SamplePathBatch& batch, double v);

}  // namespace brownray
