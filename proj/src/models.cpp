#include "celltrack/models.hpp"

#include "celltrack/errors.hpp"

namespace celltrack {

SystemModel SystemModel::cell_default() {
  SystemModel m;
  m.state_dim = 4;
  m.position_dims = 2;
  m.motion = MotionModel::cell(1.0, 0.0, 1.0, 9.0);
  m.mitosis = MitosisModel::cell(9.0, 1, 0.0, 90.0, 10.0, true);
  m.modes = ModeModel::memoryless(0.03, {{{0.01, 0.98, 0.01}, {0.01, 0.09, 0.9}}});
  m.sensor = SensorModel::cell(2.0);
  m.clutter.rate = 30.0;
  m.bounds = ImageBounds{0.0, 0.0, 1000.0, 1000.0, 2};
  m.detection_probability = 0.9;
  return m;
}

BetaDensity SystemModel::birth_detection() const {
  return unknown_detection ? birth.adaptive_cfg.detection : BetaDensity::point(detection_probability);
}

BirthModel SystemModel::births_at(int time, const DetectionFrame* prev, const std::vector<double>& prev_assoc) const {
  BirthModel bm;
  for (const auto& s : birth.statics) {
    BirthEntry e{Label::birth(time, s.index), s.r, s.density};
    if (!unknown_detection) e.density.detection = BetaDensity::point(detection_probability);
    bm.entries.push_back(std::move(e));
  }
  if (birth.adaptive && prev != nullptr) {
    auto ab = adaptive_birth(*prev, prev_assoc, time, bounds, birth.adaptive_cfg, state_dim, position_dims);
    const int offset = static_cast<int>(birth.statics.size());
    for (auto& e : ab.entries) {
      // Keep adaptive indices clear of static ones.
      e.label = Label::birth(time, e.label.birth_index() + offset);
      e.density.detection = birth_detection();
      bm.entries.push_back(std::move(e));
    }
  }
  return bm;
}

void SystemModel::validate() const {
  if (state_dim < 1 || position_dims < 1 || position_dims > state_dim)
    throw InvalidArgument("invalid state or position dimension");
  for (const auto& c : motion.components)
    if (c.F.rows() != state_dim || c.F.cols() != state_dim || c.Q.rows() != state_dim)
      throw InvalidArgument("motion model dimension mismatch");
  if (mitosis.F.rows() != state_dim || mitosis.Q.rows() != state_dim)
    throw InvalidArgument("mitosis model dimension mismatch");
  if (sensor.H.cols() != state_dim || sensor.R.rows() != sensor.H.rows())
    throw InvalidArgument("sensor model dimension mismatch");
  if (detection_probability < 0.0 || detection_probability > 1.0)
    throw InvalidArgument("detection probability outside [0,1]");
  if (!clutter.unknown && !(clutter.rate > 0.0)) throw InvalidArgument("clutter rate must be positive");
  if (!(bounds.area() > 0.0)) throw InvalidArgument("image bounds have no area");
  modes.validate();
}

}  // namespace celltrack
