#include "celltrack/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "celltrack/errors.hpp"
#include "celltrack/hashing.hpp"

namespace celltrack {

void ScenarioConfig::validate() const {
  auto prob = [](double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument(std::string(what) + " must lie in [0, 1]");
  };
  prob(death_prob, "death_prob");
  prob(mitosis_prob, "mitosis_prob");
  prob(w_directed, "w_directed");
  prob(w_diffusion, "w_diffusion");
  prob(detection_probability, "detection_probability");
  if (std::abs(w_directed + w_diffusion - 1.0) > 1e-9) throw InvalidArgument("motion weights must sum to 1");
  if (initial_cells < 0 || frames < 0) throw InvalidArgument("cell and frame counts must be non-negative");
  if (!(width > 0.0) || !(height > 0.0)) throw InvalidArgument("image size must be positive");
  if (birth_rate < 0.0 || clutter_rate < 0.0) throw InvalidArgument("Poisson rates must be non-negative");
  if (sigma_diffusion < 0.0 || sigma_accel < 0.0 || sigma_eps < 0.0 || daughter_noise < 0.0)
    throw InvalidArgument("noise levels must be non-negative");
  if (2.0 * margin >= std::min(width, height)) throw InvalidArgument("margin leaves no room inside the image");
}

ScenarioConfig ScenarioConfig::migration() { return ScenarioConfig{}; }

namespace {

using Rng = std::mt19937_64;

struct Cell {
  Label label;
  Eigen::Vector2d pos;
  Eigen::Vector2d vel;
  bool mitotic = false;
};

double beta_sample(Rng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
  const double x = ga(rng), y = gb(rng);
  return x + y > 0.0 ? x / (x + y) : 0.5;
}

Eigen::Vector2d uniform_inside(Rng& rng, const ScenarioConfig& cfg) {
  std::uniform_real_distribution<double> ux(cfg.margin, cfg.width - cfg.margin), uy(cfg.margin, cfg.height - cfg.margin);
  const double x = ux(rng);
  return {x, uy(rng)};
}

Cell new_cell(Rng& rng, const Label& l, const ScenarioConfig& cfg) {
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
  const auto p = uniform_inside(rng, cfg);
  const double a = ang(rng);
  return {l, p, cfg.initial_speed * Eigen::Vector2d(std::cos(a), std::sin(a)), false};
}

bool inside(const Eigen::Vector2d& p, const ScenarioConfig& cfg) {
  return p.x() >= 0.0 && p.x() <= cfg.width && p.y() >= 0.0 && p.y() <= cfg.height;
}

void move(Rng& rng, Cell& c, const ScenarioConfig& cfg) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (u(rng) < cfg.w_directed) {
    const Eigen::Vector2d a(cfg.sigma_accel * n01(rng), cfg.sigma_accel * n01(rng));
    c.pos += c.vel + 0.5 * a;
    c.vel += a;
  } else {
    const double dx = cfg.sigma_diffusion * n01(rng);
    c.pos += Eigen::Vector2d(dx, cfg.sigma_diffusion * n01(rng));
  }
}

std::vector<Cell> divide(Rng& rng, const Cell& c, int time, const ScenarioConfig& cfg) {
  std::normal_distribution<double> n01(0.0, 1.0);
  const double bearing = (c.vel.squaredNorm() > 0.0 ? std::atan2(c.vel.y(), c.vel.x()) : 0.0) + std::numbers::pi / 2;
  const Eigen::Vector2d d0 = cfg.daughter_distance * Eigen::Vector2d(std::cos(bearing), std::sin(bearing));
  std::vector<Cell> kids;
  for (int q = 0; q < 2; ++q) {
    const double ex = cfg.daughter_noise * n01(rng);
    const Eigen::Vector2d noise(ex, cfg.daughter_noise * n01(rng));
    kids.push_back({Label::spawned(c.label, time, 2, q + 1),
                    c.pos + c.vel + (q == 0 ? d0 : Eigen::Vector2d(-d0)) + noise, c.vel, false});
  }
  return kids;
}

void record(GroundTruth& g, const std::vector<Cell>& alive, int k) {
  for (const auto& c : alive) {
    g.tracks.add(c.label, k, Vec(c.pos));
    g.modes[c.label][k] = c.mitotic ? 1 : 0;
  }
}

}  // namespace

GroundTruth generate_truth(const ScenarioConfig& cfg) {
  cfg.validate();
  GroundTruth g;
  g.frames = cfg.frames;
  if (cfg.frames == 0) return g;
  Rng rng(derive_seed(cfg.seed, 1));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::poisson_distribution<int> births(cfg.birth_rate);
  std::vector<Cell> alive;
  for (int i = 0; i < cfg.initial_cells; ++i) alive.push_back(new_cell(rng, Label::birth(0, i), cfg));
  record(g, alive, 0);
  for (int k = 1; k < cfg.frames; ++k) {
    std::vector<Cell> next;
    int pending = 0;
    for (const auto& c : alive) pending += c.mitotic ? 1 : 0;
    for (const auto& c : alive) {
      if (c.mitotic) {
        for (auto& d : divide(rng, c, k, cfg))
          if (inside(d.pos, cfg)) next.push_back(std::move(d));
        continue;
      }
      if (u(rng) < cfg.death_prob) continue;
      Cell m = c;
      move(rng, m, cfg);
      if (!inside(m.pos, cfg)) continue;
      const bool room = cfg.max_cells <= 0 || static_cast<int>(alive.size()) + pending < cfg.max_cells;
      if (u(rng) < cfg.mitosis_prob && room) {
        m.mitotic = true;
        ++pending;
      }
      next.push_back(std::move(m));
    }
    const int nb = births(rng);
    for (int i = 0; i < nb; ++i) next.push_back(new_cell(rng, Label::birth(k, i), cfg));
    alive = std::move(next);
    record(g, alive, k);
  }
  return g;
}

GroundTruth scheduled_truth(const ScheduledScenario& sc, const ScenarioConfig& cfg) {
  cfg.validate();
  if (sc.first_division < 1 || sc.spacing < 1 || sc.initial < 1 || sc.divisions < 0)
    throw InvalidArgument("invalid division schedule");
  GroundTruth g;
  g.frames = sc.frames;
  if (sc.frames == 0) return g;
  Rng rng(derive_seed(cfg.seed, 3));
  std::vector<Cell> alive;
  for (int i = 0; i < sc.initial; ++i) alive.push_back(new_cell(rng, Label::birth(0, i), cfg));
  auto divides_at = [&](int k) {
    if (k < sc.first_division) return false;
    const int r = k - sc.first_division;
    return r % sc.spacing == 0 && r / sc.spacing < sc.divisions;
  };
  // A cell turns mitotic one frame before its division.
  auto flag = [&](int k) {
    if (!divides_at(k + 1)) return;
    std::vector<std::size_t> idle;
    for (std::size_t i = 0; i < alive.size(); ++i)
      if (!alive[i].mitotic) idle.push_back(i);
    if (idle.empty()) return;
    std::uniform_int_distribution<std::size_t> pick(0, idle.size() - 1);
    alive[idle[pick(rng)]].mitotic = true;
  };
  flag(0);
  record(g, alive, 0);
  for (int k = 1; k < sc.frames; ++k) {
    std::vector<Cell> next;
    for (const auto& c : alive) {
      if (c.mitotic) {
        for (auto& d : divide(rng, c, k, cfg))
          if (inside(d.pos, cfg)) next.push_back(std::move(d));
        continue;
      }
      Cell m = c;
      move(rng, m, cfg);
      if (inside(m.pos, cfg)) next.push_back(std::move(m));
    }
    alive = std::move(next);
    flag(k);
    record(g, alive, k);
  }
  return g;
}

std::vector<DetectionFrame> generate_detections(const GroundTruth& truth, const ScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, 2));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::poisson_distribution<int> clutter(cfg.clutter_rate);
  auto features = [&](int kind) -> Vec {
    // kind: 0 normal, 1 mitotic, 2 clutter
    switch (cfg.appearance) {
      case AppearanceModel::Kind::None:
        return Vec();
      case AppearanceModel::Kind::BetaFeatures: {
        static constexpr double ab[3][4] = {{0.9, 0.1, 0.2, 0.1}, {0.2, 0.1, 0.9, 0.1}, {0.4, 0.1, 0.1, 0.1}};
        Vec f(2);
        f(0) = beta_sample(rng, ab[kind][0], ab[kind][1]);
        f(1) = beta_sample(rng, ab[kind][2], ab[kind][3]);
        return f;
      }
      case AppearanceModel::Kind::IntensityThreshold: {
        static constexpr double ab[3][2] = {{2.0, 5.0}, {5.0, 2.0}, {2.0, 2.0}};
        Vec f(1);
        f(0) = beta_sample(rng, ab[kind][0], ab[kind][1]);
        return f;
      }
    }
    return Vec();
  };
  std::vector<DetectionFrame> out;
  for (int k = 0; k < truth.frames; ++k) {
    DetectionFrame f;
    f.frame = k;
    for (const auto& [l, p] : truth.tracks.at(k)) {
      if (u(rng) >= cfg.detection_probability) continue;
      Vec z = p;
      for (Eigen::Index i = 0; i < z.size(); ++i) z(i) += cfg.sigma_eps * n01(rng);
      const auto mit = truth.modes.find(l);
      int mode = 0;
      if (mit != truth.modes.end()) {
        const auto it = mit->second.find(k);
        if (it != mit->second.end()) mode = it->second;
      }
      f.detections.push_back({std::move(z), features(mode)});
    }
    const int nc = clutter(rng);
    for (int i = 0; i < nc; ++i) {
      Vec z(2);
      z(0) = u(rng) * cfg.width;
      z(1) = u(rng) * cfg.height;
      f.detections.push_back({std::move(z), features(2)});
    }
    std::shuffle(f.detections.begin(), f.detections.end(), rng);
    out.push_back(std::move(f));
  }
  return out;
}

namespace {

ScenarioConfig simulated_detection_config(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.initial_cells = 0;
  cfg.birth_rate = 0.0;
  cfg.death_prob = 0.0;
  cfg.mitosis_prob = 0.0;
  cfg.w_directed = 1.0;
  cfg.w_diffusion = 0.0;
  cfg.sigma_accel = 0.1;
  cfg.margin = 300.0;
  cfg.detection_probability = 0.9;
  cfg.clutter_rate = 30.0;
  cfg.sigma_eps = 2.0;
  cfg.seed = seed;
  return cfg;
}

std::pair<GroundTruth, std::vector<DetectionFrame>> scheduled(std::uint64_t seed, const ScheduledScenario& sc) {
  auto cfg = simulated_detection_config(seed);
  cfg.frames = sc.frames;
  auto truth = scheduled_truth(sc, cfg);
  auto dets = generate_detections(truth, cfg);
  return {std::move(truth), std::move(dets)};
}

}  // namespace

std::pair<GroundTruth, std::vector<DetectionFrame>> fixed_scenario_12cells(std::uint64_t seed) {
  return scheduled(seed, {4, 8, 100, 12, 10});
}

std::pair<GroundTruth, std::vector<DetectionFrame>> fixed_scenario_6cells(std::uint64_t seed) {
  return scheduled(seed, {2, 4, 100, 12, 20});
}

}  // namespace celltrack
