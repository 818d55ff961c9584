#include "celltrack/config.hpp"

#include <set>

#include "celltrack/errors.hpp"
#include "celltrack/io.hpp"

namespace celltrack {

using nlohmann::json;

namespace {

/// Reads optional keys of one object and rejects anything it was not asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ParseError(path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ParseError(path_ + "." + key + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string child(const char* key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [k, _] : j_.items())
      if (!seen_.count(k)) throw ParseError(path_ + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

SystemModel read_model(const json& j) {
  Section s(j, "model");
  SystemModel m = SystemModel::cell_default();

  double w_cv = 1.0, w_fd = 0.0, sigma_v = 1.0, sigma_s = 9.0;
  if (const auto* p = s.sub("motion")) {
    Section t(*p, s.child("motion"));
    t.get("w_cv", w_cv);
    t.get("w_fd", w_fd);
    t.get("sigma_v", sigma_v);
    t.get("sigma_s", sigma_s);
    t.finish();
  }
  m.motion = MotionModel::cell(w_cv, w_fd, sigma_v, sigma_s);

  double ms = 9.0, theta = 0.0, eps = 90.0, dist = 10.0;
  int comps = 1;
  bool from_vel = true;
  if (const auto* p = s.sub("mitosis")) {
    Section t(*p, s.child("mitosis"));
    t.get("sigma_s", ms);
    t.get("components", comps);
    t.get("theta_hat_deg", theta);
    t.get("epsilon_deg", eps);
    t.get("distance", dist);
    t.get("bearing_from_velocity", from_vel);
    t.finish();
  }
  if (comps < 1) throw ParseError("model.mitosis.components must be at least 1");
  m.mitosis = MitosisModel::cell(ms, comps, theta, eps, dist, from_vel);

  double p_sp = 0.03;
  std::array<double, 3> rn{0.01, 0.98, 0.01}, rm{0.01, 0.09, 0.9};
  if (const auto* p = s.sub("modes")) {
    Section t(*p, s.child("modes"));
    t.get("p_sp", p_sp);
    t.get("rho_normal", rn);
    t.get("rho_mitotic", rm);
    t.finish();
  }
  try {
    m.modes = ModeModel::memoryless(p_sp, {rn, rm});
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("model.modes: ") + e.what());
  }

  double sigma_eps = 2.0, gate = 25.0, midpoint = 0.5, slope = 10.0;
  std::string app = "beta-features";
  if (const auto* p = s.sub("sensor")) {
    Section t(*p, s.child("sensor"));
    t.get("sigma_eps", sigma_eps);
    t.get("gate", gate);
    t.get("appearance", app);
    t.get("midpoint", midpoint);
    t.get("slope", slope);
    t.finish();
  }
  m.sensor = SensorModel::cell(sigma_eps);
  m.sensor.gate = gate > 0.0 ? gate : std::numeric_limits<double>::infinity();
  m.sensor.appearance.kind = AppearanceModel::parse_kind(app);
  m.sensor.appearance.midpoint = midpoint;
  m.sensor.appearance.slope = slope;

  if (const auto* p = s.sub("clutter")) {
    Section t(*p, s.child("clutter"));
    t.get("unknown", m.clutter.unknown);
    t.get("rate", m.clutter.rate);
    t.get("birth", m.clutter.birth);
    t.get("survival", m.clutter.survival);
    t.get("detection", m.clutter.detection);
    t.finish();
  }

  if (const auto* p = s.sub("detection")) {
    Section t(*p, s.child("detection"));
    t.get("unknown", m.unknown_detection);
    t.get("probability", m.detection_probability);
    t.get("beta_inflation", m.beta_inflation);
    t.finish();
  }

  if (const auto* p = s.sub("birth")) {
    Section t(*p, s.child("birth"));
    auto& c = m.birth.adaptive_cfg;
    double mode_normal = c.mode.p_normal;
    t.get("adaptive", m.birth.adaptive);
    t.get("r_base", c.r_base);
    t.get("r_max", c.r_max);
    t.get("edge_boost", c.edge_boost);
    t.get("edge_width", c.edge_width);
    t.get("position_sigma", c.position_sigma);
    t.get("velocity_sigma", c.velocity_sigma);
    t.get("association_threshold", c.association_threshold);
    t.get("mode_normal", mode_normal);
    t.get("detection_s", c.detection.s);
    t.get("detection_t", c.detection.t);
    t.finish();
    c.mode = {mode_normal, 1.0 - mode_normal};
  }

  double width = 1000.0, height = 1000.0;
  if (const auto* p = s.sub("image")) {
    Section t(*p, s.child("image"));
    t.get("width", width);
    t.get("height", height);
    t.finish();
  }
  m.bounds = ImageBounds{0.0, 0.0, width, height, 2};

  if (const auto* p = s.sub("reduction")) {
    Section t(*p, s.child("reduction"));
    t.get("prune", m.reduction.prune_threshold);
    t.get("merge", m.reduction.merge_distance);
    t.get("max_components", m.reduction.max_components);
    t.finish();
  }
  s.finish();
  return m;
}

FilterConfig read_filter(const json& j) {
  Section s(j, "filter");
  FilterConfig f;
  std::string variant = "pa";
  bool parallel = true;
  s.get("variant", variant);
  s.get("gibbs_samples", f.gibbs_samples);
  s.get("max_hypotheses", f.max_hypotheses);
  s.get("weight_floor", f.weight_floor);
  s.get("enumerate", f.enumerate);
  s.get("enumerate_limit", f.enumerate_limit);
  s.get("max_joint_dims", f.max_joint_dims);
  s.get("parallel", parallel);
  s.finish();
  f.variant = parse_variant(variant);
  f.execution = parallel ? Execution::Parallel : Execution::Serial;
  return f;
}

ScenarioConfig read_simulator(const json& j, ScenarioKind& kind) {
  Section s(j, "simulator");
  ScenarioConfig c = ScenarioConfig::migration();
  std::string scenario = "random", app = "beta-features";
  s.get("scenario", scenario);
  s.get("initial_cells", c.initial_cells);
  s.get("frames", c.frames);
  s.get("width", c.width);
  s.get("height", c.height);
  s.get("birth_rate", c.birth_rate);
  s.get("death_prob", c.death_prob);
  s.get("mitosis_prob", c.mitosis_prob);
  s.get("w_directed", c.w_directed);
  s.get("w_diffusion", c.w_diffusion);
  s.get("sigma_diffusion", c.sigma_diffusion);
  s.get("sigma_accel", c.sigma_accel);
  s.get("initial_speed", c.initial_speed);
  s.get("margin", c.margin);
  s.get("daughter_distance", c.daughter_distance);
  s.get("daughter_noise", c.daughter_noise);
  s.get("max_cells", c.max_cells);
  s.get("detection_probability", c.detection_probability);
  s.get("clutter_rate", c.clutter_rate);
  s.get("sigma_eps", c.sigma_eps);
  s.get("appearance", app);
  s.finish();
  c.appearance = AppearanceModel::parse_kind(app);
  if (scenario == "random")
    kind = ScenarioKind::Random;
  else if (scenario == "fixed12")
    kind = ScenarioKind::Fixed12;
  else if (scenario == "fixed6")
    kind = ScenarioKind::Fixed6;
  else
    throw ParseError("simulator.scenario: expected random, fixed12 or fixed6");
  return c;
}

MetricsConfig read_metrics(const json& j) {
  Section s(j, "metrics");
  MetricsConfig m;
  s.get("ospa_p", m.ospa_p);
  s.get("ospa_c", m.ospa_c);
  s.get("ospa2_window", m.ospa2_window);
  s.get("tra_radius", m.tra_radius);
  s.finish();
  return m;
}

}  // namespace

void RunConfig::apply_seed(std::uint64_t s) {
  seed = s;
  filter.seed = s;
  simulator.seed = s;
}

void RunConfig::validate() const {
  try {
    model.validate();
    filter.validate();
    simulator.validate();
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("invalid configuration: ") + e.what());
  }
  if (!(metrics.ospa_p >= 1.0) || !(metrics.ospa_c > 0.0) || metrics.ospa2_window < 1 || !(metrics.tra_radius > 0.0))
    throw ParseError("invalid configuration: metric parameters out of range");
}

RunConfig config_from_json(const json& j) {
  Section s(j, "config");
  RunConfig c;
  if (const auto* p = s.sub("model")) c.model = read_model(*p);
  if (const auto* p = s.sub("filter")) c.filter = read_filter(*p);
  if (const auto* p = s.sub("simulator")) c.simulator = read_simulator(*p, c.scenario);
  if (const auto* p = s.sub("metrics")) c.metrics = read_metrics(*p);
  std::uint64_t seed = 1;
  s.get("seed", seed);
  s.finish();
  c.apply_seed(seed);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json(path)); }

}  // namespace celltrack
