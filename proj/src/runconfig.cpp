#include "brownray/runconfig.hpp"

#include <fstream>
#include <stdexcept>

namespace brownray {

using nlohmann::json;

namespace {

void expect_object(const json& j, const char* what) {
  if (!j.is_object())
    throw std::invalid_argument(std::string(what) + " must be a JSON object");
}

template <typename T>
T get_required(const json& j, const char* key, const char* scope) {
  if (!j.contains(key))
    throw std::invalid_argument(std::string(scope) + " is missing field '" +
                                key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw std::invalid_argument(std::string(scope) + " field '" + key +
                                "' has the wrong type");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

}  // namespace

SuperpositionSpec SuperpositionConfig::build() const {
  std::vector<RayComponent> parts;
  parts.reserve(components.size());
  for (const auto& c : components)
    parts.push_back(RayComponent{c.weight, RayParams(c.phi, c.delta, big_delta)});
  return SuperpositionSpec(std::move(parts), rho);
}

ConditionedState StateConfig::build(std::size_t n_components) const {
  std::vector<double> xs = x;
  if (xs.empty()) xs.assign(n_components, 0.0);
  return ConditionedState(u, std::move(xs), v);
}

EmbeddedSpec EmbeddedConfig::build() const {
  EmbeddedKind k;
  if (kind == "periodic_bridge") {
    k = EmbeddedKind::periodic_bridge;
  } else if (kind == "motion_plus_periodic_bridge") {
    k = EmbeddedKind::motion_plus_periodic_bridge;
  } else if (kind == "motion_plus_multi_bridges") {
    k = EmbeddedKind::motion_plus_multi_bridges;
  } else {
    throw std::invalid_argument("unknown embedded kind '" + kind + "'");
  }
  std::vector<PeriodicBridge> bs;
  bs.reserve(bridges.size());
  for (const auto& b : bridges) bs.push_back(PeriodicBridge{b.phi, b.period});
  return EmbeddedSpec(k, motion_rate, std::move(bs), window);
}

TimeGrid GridConfig::build() const {
  if (points < 1) throw std::invalid_argument("grid.points must be >= 1");
  return TimeGrid::uniform(to, static_cast<std::size_t>(points));
}

RunConfig parse_config(const json& j) {
  expect_object(j, "config");
  RunConfig cfg;
  cfg.kind = get_required<std::string>(j, "kind", "config");

  if (j.contains("superposition")) {
    const json& s = j.at("superposition");
    expect_object(s, "superposition");
    SuperpositionConfig sc;
    sc.big_delta = get_required<double>(s, "big_delta", "superposition");
    sc.rho = get_or<double>(s, "rho", 0.0);
    if (!s.contains("components") || !s.at("components").is_array() ||
        s.at("components").empty())
      throw std::invalid_argument(
          "superposition needs a nonempty 'components' array");
    for (const json& c : s.at("components")) {
      ComponentConfig cc;
      cc.weight = get_or<double>(c, "weight", 1.0);
      cc.phi = get_required<double>(c, "phi", "component");
      cc.delta = get_required<double>(c, "delta", "component");
      sc.components.push_back(cc);
    }
    sc.build();  // validate invariants (phi > 0, delta >= big_delta, ...)
    cfg.superposition = sc;
  }

  if (j.contains("state")) {
    const json& s = j.at("state");
    expect_object(s, "state");
    StateConfig st;
    st.u = get_or<double>(s, "u", 0.0);
    st.v = get_or<double>(s, "v", 0.0);
    st.x = get_or<std::vector<double>>(s, "x", {});
    cfg.state = st;
  }

  if (j.contains("queue")) {
    QueueConfig qc;
    qc.h = get_required<double>(j.at("queue"), "h", "queue");
    cfg.queue = qc;
  }

  if (j.contains("pinned")) {
    const json& p = j.at("pinned");
    PinnedConfig pc;
    pc.w = get_required<double>(p, "w", "pinned");
    pc.z = get_required<double>(p, "z", "pinned");
    pc.h = get_or<double>(p, "h", pc.w / 2.0);
    cfg.pinned = pc;
  }

  if (j.contains("rbm")) {
    const json& r = j.at("rbm");
    RbmConfig rc;
    rc.theta = get_required<double>(r, "theta", "rbm");
    rc.rho = get_or<double>(r, "rho", 0.0);
    rc.v = get_or<double>(r, "v", 0.0);
    rc.t = get_required<double>(r, "t", "rbm");
    cfg.rbm = rc;
  }

  if (j.contains("rbb")) {
    const json& r = j.at("rbb");
    RbbConfig rc;
    rc.theta = get_required<double>(r, "theta", "rbb");
    rc.t_rate = get_required<double>(r, "t_rate", "rbb");
    rc.rho = get_or<double>(r, "rho", 0.0);
    cfg.rbb = rc;
  }

  if (j.contains("option")) {
    const json& o = j.at("option");
    OptionConfig oc;
    oc.spot = get_required<double>(o, "spot", "option");
    oc.strike = get_required<double>(o, "strike", "option");
    oc.rate = get_required<double>(o, "rate", "option");
    oc.maturity = get_required<double>(o, "maturity", "option");
    oc.theta = get_required<double>(o, "theta", "option");
    cfg.option = oc;
  }

  if (j.contains("embedded")) {
    const json& e = j.at("embedded");
    EmbeddedConfig ec;
    ec.kind = get_required<std::string>(e, "kind", "embedded");
    ec.motion_rate = get_or<double>(e, "motion_rate", 0.0);
    ec.window = get_required<double>(e, "window", "embedded");
    if (e.contains("bridges"))
      for (const json& b : e.at("bridges")) {
        BridgeConfig bc;
        bc.phi = get_required<double>(b, "phi", "bridge");
        bc.period = get_required<double>(b, "period", "bridge");
        ec.bridges.push_back(bc);
      }
    ec.build();  // validate
    cfg.embedded = ec;
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    SweepConfig sw;
    sw.from = get_required<double>(s, "from", "sweep");
    sw.to = get_required<double>(s, "to", "sweep");
    sw.points = get_required<int>(s, "points", "sweep");
    if (sw.points < 1) throw std::invalid_argument("sweep.points must be >= 1");
    if (!(sw.to >= sw.from))
      throw std::invalid_argument("sweep.to must be >= sweep.from");
    cfg.sweep = sw;
  }

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    GridConfig gc;
    gc.points = get_required<int>(g, "points", "grid");
    gc.to = get_required<double>(g, "to", "grid");
    gc.build();  // validate
    cfg.grid = gc;
  }

  if (j.contains("mc")) {
    const json& m = j.at("mc");
    McConfig mc;
    mc.n_paths = get_required<std::uint64_t>(m, "n_paths", "mc");
    mc.seed = get_required<std::uint64_t>(m, "seed", "mc");
    mc.threads = get_or<int>(m, "threads", 1);
    if (mc.n_paths == 0) throw std::invalid_argument("mc.n_paths must be >= 1");
    if (mc.threads < 1) throw std::invalid_argument("mc.threads must be >= 1");
    cfg.mc = mc;
  }

  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("config is not valid JSON: " +
                                std::string(e.what()));
  }
  return parse_config(j);
}

json serialize_config(const RunConfig& cfg) {
  json j;
  j["kind"] = cfg.kind;
  if (cfg.superposition) {
    json s;
    s["big_delta"] = cfg.superposition->big_delta;
    s["rho"] = cfg.superposition->rho;
    s["components"] = json::array();
    for (const auto& c : cfg.superposition->components)
      s["components"].push_back(
          {{"weight", c.weight}, {"phi", c.phi}, {"delta", c.delta}});
    j["superposition"] = s;
  }
  if (cfg.state)
    j["state"] = {{"u", cfg.state->u}, {"x", cfg.state->x}, {"v", cfg.state->v}};
  if (cfg.queue) j["queue"] = {{"h", cfg.queue->h}};
  if (cfg.pinned)
    j["pinned"] = {{"w", cfg.pinned->w}, {"z", cfg.pinned->z}, {"h", cfg.pinned->h}};
  if (cfg.rbm)
    j["rbm"] = {{"theta", cfg.rbm->theta},
                {"rho", cfg.rbm->rho},
                {"v", cfg.rbm->v},
                {"t", cfg.rbm->t}};
  if (cfg.rbb)
    j["rbb"] = {{"theta", cfg.rbb->theta},
                {"t_rate", cfg.rbb->t_rate},
                {"rho", cfg.rbb->rho}};
  if (cfg.option)
    j["option"] = {{"spot", cfg.option->spot},
                   {"strike", cfg.option->strike},
                   {"rate", cfg.option->rate},
                   {"maturity", cfg.option->maturity},
                   {"theta", cfg.option->theta}};
  if (cfg.embedded) {
    json e;
    e["kind"] = cfg.embedded->kind;
    e["motion_rate"] = cfg.embedded->motion_rate;
    e["window"] = cfg.embedded->window;
    e["bridges"] = json::array();
    for (const auto& b : cfg.embedded->bridges)
      e["bridges"].push_back({{"phi", b.phi}, {"period", b.period}});
    j["embedded"] = e;
  }
  if (cfg.sweep)
    j["sweep"] = {{"from", cfg.sweep->from},
                  {"to", cfg.sweep->to},
                  {"points", cfg.sweep->points}};
  if (cfg.grid)
    j["grid"] = {{"points", cfg.grid->points}, {"to", cfg.grid->to}};
  if (cfg.mc)
    j["mc"] = {{"n_paths", cfg.mc->n_paths},
               {"seed", cfg.mc->seed},
               {"threads", cfg.mc->threads}};
  return j;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

}  // namespace brownray
