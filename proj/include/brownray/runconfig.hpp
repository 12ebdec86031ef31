#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "brownray/process.hpp"
#include "brownray/sampler.hpp"

// Scenario configuration for the command-line tool: one self-describing JSON
// document per run. Parsing validates against the same invariants as the
// underlying types, and parse -> serialize -> parse is the identity.

namespace brownray {

struct ComponentConfig {
  double weight = 1.0;
  double phi = 1.0;
  double delta = 1.0;
};

struct SuperpositionConfig {
  std::vector<ComponentConfig> components;
  double big_delta = 1.0;
  double rho = 0.0;

  SuperpositionSpec build() const;
};

struct StateConfig {
  double u = 0.0;
  std::vector<double> x;
  double v = 0.0;

  ConditionedState build(std::size_t n_components) const;
};

struct QueueConfig {
  double h = 1.0;
};

struct PinnedConfig {
  double w = 1.0;
  double z = 0.0;
  double h = 0.5;
};

struct RbmConfig {
  double theta = 1.0;
  double rho = 0.0;
  double v = 0.0;
  double t = 1.0;
};

struct RbbConfig {
  double theta = 1.0;
  double t_rate = 1.0;
  double rho = 0.0;
};

struct OptionConfig {
  double spot = 100.0;
  double strike = 100.0;
  double rate = 0.05;
  double maturity = 1.0;
  double theta = 0.04;
};

struct BridgeConfig {
  double phi = 1.0;
  double period = 2.0;
};

struct EmbeddedConfig {
  std::string kind = "periodic_bridge";
  double motion_rate = 0.0;
  std::vector<BridgeConfig> bridges;
  double window = 1.0;

  EmbeddedSpec build() const;
};

struct SweepConfig {
  double from = 0.0;
  double to = 1.0;
  int points = 100;
};

struct GridConfig {
  int points = 100;
  double to = 1.0;

  TimeGrid build() const;
};

struct McConfig {
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct RunConfig {
  std::string kind;  // ray | queue | pinned-queue | rbm | rbb | option | embedded
  std::optional<SuperpositionConfig> superposition;
  std::optional<StateConfig> state;
  std::optional<QueueConfig> queue;
  std::optional<PinnedConfig> pinned;
  std::optional<RbmConfig> rbm;
  std::optional<RbbConfig> rbb;
  std::optional<OptionConfig> option;
  std::optional<EmbeddedConfig> embedded;
  std::optional<SweepConfig> sweep;
  std::optional<GridConfig> grid;
  std::optional<McConfig> mc;
};

// Throws std::invalid_argument naming the violated invariant or missing
// field on malformed input.
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);
nlohmann::json serialize_config(const RunConfig& config);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace brownray
