#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "brownray/options.hpp"
#include "brownray/process.hpp"
#include "brownray/queue.hpp"
#include "brownray/runconfig.hpp"
#include "brownray/sampler.hpp"
#include "brownray/verify.hpp"

namespace {

using namespace brownray;

// Exit codes: 0 success, 1 verification failure, 2 usage/config error.
constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kUsageError = 2;

std::string fmt_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

[[noreturn]] void config_error(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  std::exit(kUsageError);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // '\n' line endings everywhere
  if (!out) config_error("cannot open output file '" + path + "'");
  return out;
}

template <typename T>
const T& need(const std::optional<T>& block, const char* name) {
  if (!block) config_error(std::string("config is missing the '") + name + "' block");
  return *block;
}

// ---------------------------------------------------------------------------
// eval: sweep one abscissa through a closed form, emit (abscissa, value) CSV.
// ---------------------------------------------------------------------------

int run_eval(const RunConfig& cfg, const std::string& out_path) {
  const SweepConfig& sweep = need(cfg.sweep, "sweep");
  std::vector<double> xs(static_cast<std::size_t>(sweep.points));
  for (int i = 0; i < sweep.points; ++i)
    xs[static_cast<std::size_t>(i)] =
        sweep.points == 1
            ? sweep.from
            : sweep.from + (sweep.to - sweep.from) * i / (sweep.points - 1);

  std::string abscissa;
  std::string formula;
  std::function<double(double)> f;

  if (cfg.kind == "rbb") {
    const RbbConfig& r = need(cfg.rbb, "rbb");
    abscissa = "q";
    formula = "rbb_stationary_cdf";
    f = [r](double q) { return rbb_stationary_cdf(r.theta, r.t_rate, r.rho, q); };
  } else if (cfg.kind == "rbm") {
    const RbmConfig& r = need(cfg.rbm, "rbm");
    abscissa = "q";
    formula = "rbm_transient_cdf";
    f = [r](double q) { return rbm_transient_cdf(r.theta, r.rho, r.v, r.t, q); };
  } else if (cfg.kind == "queue") {
    const SuperpositionSpec spec = need(cfg.superposition, "superposition").build();
    const ConditionedState state =
        cfg.state.value_or(StateConfig{}).build(spec.components.size());
    const double h = need(cfg.queue, "queue").h;
    abscissa = "q";
    formula = "queue_transient_cdf";
    f = [spec, state, h](double q) {
      return transient_cdf(QueueQuery(spec, state, h, q));
    };
  } else if (cfg.kind == "pinned-queue") {
    const SuperpositionSpec spec = need(cfg.superposition, "superposition").build();
    const ConditionedState state =
        cfg.state.value_or(StateConfig{}).build(spec.components.size());
    const PinnedConfig& p = need(cfg.pinned, "pinned");
    abscissa = "q";
    formula = "pinned_queue_cdf";
    f = [spec, state, p](double q) {
      return pinned_transient_cdf(
          PinnedQueueQuery(spec, state, p.w, p.z, p.h, q));
    };
  } else if (cfg.kind == "option") {
    const OptionConfig& o = need(cfg.option, "option");
    abscissa = "spot";
    formula = "bsm_call_price";
    f = [o](double spot) {
      return bsm_call_price(spot, o.strike, o.rate, o.maturity, o.theta);
    };
  } else if (cfg.kind == "ray") {
    const SuperposedCov cov =
        superpose(need(cfg.superposition, "superposition").build());
    abscissa = "t";
    formula = "ray_variance";
    f = [cov](double t) { return superposed_cov(cov, t, t); };
  } else {
    config_error("eval does not support kind '" + cfg.kind + "'");
  }

  std::ofstream out = open_output(out_path);
  out << abscissa << "," << formula << "\n";
  for (double x : xs) out << fmt_full(x) << "," << fmt_full(f(x)) << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate: draw paths, emit per-grid-point summaries or full paths.
// ---------------------------------------------------------------------------

void write_summary(std::ofstream& out, const TimeGrid& grid,
                   const RowMatrixXd& values, const char* prefix, bool header) {
  const double n = static_cast<double>(values.rows());
  if (header) out << "t," << prefix << "_mean," << prefix << "_variance\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto col = values.col(static_cast<Eigen::Index>(i));
    const double mean = col.sum() / n;
    const double var = (col.array() - mean).square().sum() / n;
    out << fmt_full(grid.points[i]) << "," << fmt_full(mean) << ","
        << fmt_full(var) << "\n";
  }
}

int run_simulate(const RunConfig& cfg, const std::string& out_path,
                 bool full_paths) {
  const GridConfig& gc = need(cfg.grid, "grid");
  const McConfig& mc = need(cfg.mc, "mc");
  const TimeGrid grid = gc.build();
  SampleOptions opt;
  opt.threads = mc.threads;

  std::ofstream out = open_output(out_path);

  if (cfg.kind == "ray" || cfg.kind == "embedded") {
    SamplePathBatch batch =
        cfg.kind == "ray"
            ? sample_ray(superpose(need(cfg.superposition, "superposition").build()),
                         grid, mc.n_paths, mc.seed, opt)
            : sample_embedded(need(cfg.embedded, "embedded").build(), grid,
                              mc.n_paths, mc.seed, opt);
    if (full_paths) {
      out << "path,t,value\n";
      for (Eigen::Index p = 0; p < batch.values.rows(); ++p)
        for (std::size_t i = 0; i < grid.size(); ++i)
          out << p << "," << fmt_full(grid.points[i]) << ","
              << fmt_full(batch.values(p, static_cast<Eigen::Index>(i))) << "\n";
    } else {
      write_summary(out, grid, batch.values, "value", true);
    }
    return kOk;
  }

  if (cfg.kind == "queue" || cfg.kind == "pinned-queue") {
    const SuperpositionSpec spec = need(cfg.superposition, "superposition").build();
    const ConditionedState state =
        cfg.state.value_or(StateConfig{}).build(spec.components.size());
    SamplePathBatch batch =
        cfg.kind == "queue"
            ? sample_conditioned_net_input(spec, state, grid, mc.n_paths,
                                           mc.seed, opt)
            : [&] {
                const PinnedConfig& p = need(cfg.pinned, "pinned");
                return sample_pinned(spec, state, p.w, p.z, grid, mc.n_paths,
                                     mc.seed, opt);
              }();
    const RegulatedBatch reg = reflect_batch(batch, state.v);
    if (full_paths) {
      out << "path,t,net_input,q,l\n";
      for (Eigen::Index p = 0; p < batch.values.rows(); ++p)
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const auto col = static_cast<Eigen::Index>(i);
          out << p << "," << fmt_full(grid.points[i]) << ","
              << fmt_full(batch.values(p, col)) << "," << fmt_full(reg.q(p, col))
              << "," << fmt_full(reg.l(p, col)) << "\n";
        }
    } else {
      const double n = static_cast<double>(batch.values.rows());
      out << "t,net_mean,net_variance,q_mean,q_variance,l_mean\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        const double net_mean = batch.values.col(col).sum() / n;
        const double net_var =
            (batch.values.col(col).array() - net_mean).square().sum() / n;
        const double q_mean = reg.q.col(col).sum() / n;
        const double q_var = (reg.q.col(col).array() - q_mean).square().sum() / n;
        const double l_mean = reg.l.col(col).sum() / n;
        out << fmt_full(grid.points[i]) << "," << fmt_full(net_mean) << ","
            << fmt_full(net_var) << "," << fmt_full(q_mean) << ","
            << fmt_full(q_var) << "," << fmt_full(l_mean) << "\n";
      }
    }
    return kOk;
  }

  config_error("simulate does not support kind '" + cfg.kind + "'");
}

// ---------------------------------------------------------------------------
// verify: run a named acceptance suite and report per-check results.
// ---------------------------------------------------------------------------

int run_verify(const std::string& suite, std::size_t paths, std::uint64_t seed,
               const std::string& seed_origin, int threads) {
  if (!verify::known_suite(suite)) {
    std::cerr << "error: unknown suite '" << suite << "' (expected one of:";
    for (const auto& s : verify::suite_names()) std::cerr << " " << s;
    std::cerr << ")\n";
    return kUsageError;
  }

  verify::VerifyOptions opts;
  opts.paths = paths;
  opts.seed = seed;
  opts.threads = threads;
  opts.seed_origin = seed_origin;
  std::error_code ec;
  const auto self = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (!ec) opts.cli_path = self.string();

  std::cout << "brownray verify: suite=" << suite << " paths=" << paths
            << " seed=" << seed << " (" << seed_origin << ") threads=" << threads
            << "\n";
  const auto results = verify::run_suite(suite, opts);
  std::size_t counted = 0, passed = 0;
  for (const auto& r : results) {
    const char* tag = r.informational ? "INFO" : (r.passed ? "PASS" : "FAIL");
    std::cout << "[" << tag << "] " << r.name << "  statistic=" << r.statistic
              << " threshold=" << r.threshold << "\n        " << r.note << "\n";
    if (!r.informational) {
      ++counted;
      if (r.passed) ++passed;
    }
  }
  std::cout << "RESULT: " << (passed == counted ? "PASS" : "FAIL") << " ("
            << passed << "/" << counted << " checks)\n";
  return passed == counted ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Brownian-ray process toolkit: closed forms, simulation, verification"};
  app.require_subcommand(1);

  std::string config_path, out_path, suite;
  bool full_paths = false;
  std::size_t paths = 100000;
  int threads = 2;

  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a closed form over a sweep");
  eval_cmd->add_option("--config", config_path, "JSON scenario config")->required();
  eval_cmd->add_option("--out", out_path, "output CSV path")->required();

  CLI::App* sim_cmd = app.add_subcommand("simulate", "sample paths and summarize");
  sim_cmd->add_option("--config", config_path, "JSON scenario config")->required();
  sim_cmd->add_option("--out", out_path, "output CSV path")->required();
  sim_cmd->add_flag("--full-paths", full_paths, "emit every path instead of summaries");

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run a verification suite (formula vs simulation)");
  verify_cmd->add_option("--suite", suite, "core | queue | pinned | options | all")
      ->required();
  verify_cmd->add_option("--paths", paths, "Monte Carlo path budget");
  CLI::Option* seed_opt = verify_cmd->add_option("--seed", "master seed");
  verify_cmd->add_option("--threads", threads, "sampler threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (app.got_subcommand(eval_cmd))
      return run_eval(load_config(config_path), out_path);
    if (app.got_subcommand(sim_cmd))
      return run_simulate(load_config(config_path), out_path, full_paths);
    if (app.got_subcommand(verify_cmd)) {
      std::uint64_t seed = 20240817;
      std::string seed_origin = "default";
      if (seed_opt->count() > 0) {
        seed = static_cast<std::uint64_t>(std::stoull(seed_opt->as<std::string>()));
        seed_origin = "flag";
      } else if (const char* env = std::getenv("BROWNRAY_SEED")) {
        seed = static_cast<std::uint64_t>(std::stoull(env));
        seed_origin = "env BROWNRAY_SEED";
      }
      return run_verify(suite, paths, seed, seed_origin, threads);
    }
  } catch (const std::invalid_argument& e) {
    config_error(e.what());
  } catch (const std::domain_error& e) {
    config_error(e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kVerifyFailed;
  }
  return kUsageError;
}
