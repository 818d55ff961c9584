#include "celltrack/dynamics.hpp"

#include <cmath>
#include <numbers>

#include "celltrack/errors.hpp"
#include "celltrack/measurement.hpp"

namespace celltrack {

namespace {

double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

MotionModel MotionModel::cell(double w_cv, double w_fd, double sigma_v, double sigma_s) {
  if (w_cv < 0.0 || w_fd < 0.0 || std::abs(w_cv + w_fd - 1.0) > 1e-12)
    throw InvalidArgument("motion mixture weights must be non-negative and sum to 1");
  const Mat I2 = Mat::Identity(2, 2);
  MotionModel m;
  if (w_cv > 0.0) {
    AffineGaussianModel cv;
    cv.weight = w_cv;
    cv.F = Mat::Identity(4, 4);
    cv.F.block(0, 2, 2, 2) = I2;
    cv.offset = Vec::Zero(4);
    cv.Q = Mat::Zero(4, 4);
    const double v2 = sigma_v * sigma_v;
    cv.Q.block(0, 0, 2, 2) = 0.25 * v2 * I2;
    cv.Q.block(0, 2, 2, 2) = 0.5 * v2 * I2;
    cv.Q.block(2, 0, 2, 2) = 0.5 * v2 * I2;
    cv.Q.block(2, 2, 2, 2) = v2 * I2;
    m.components.push_back(std::move(cv));
  }
  if (w_fd > 0.0) {
    AffineGaussianModel fd;
    fd.weight = w_fd;
    fd.F = Mat::Zero(4, 4);
    fd.F.block(0, 0, 2, 2) = I2;
    fd.offset = Vec::Zero(4);
    fd.Q = sigma_s * fd.F;
    m.components.push_back(std::move(fd));
  }
  return m;
}

MitosisModel MitosisModel::cell(double sigma_s, int components, double theta_hat_deg, double epsilon_deg,
                                double distance, bool bearing_from_velocity) {
  if (components < 1) throw InvalidArgument("mitosis model needs at least one component");
  if (!(distance > 0.0)) throw InvalidArgument("daughter offset must be positive");
  MitosisModel m;
  m.F = Mat::Zero(4, 4);
  m.F.block(0, 0, 2, 2) = Mat::Identity(2, 2);
  m.Q = sigma_s * m.F;
  m.components = components;
  m.theta_hat_deg = theta_hat_deg;
  m.epsilon_deg = epsilon_deg;
  m.distance = distance;
  m.bearing_from_velocity = bearing_from_velocity;
  m.position_dims = 2;
  return m;
}

Vec MitosisModel::offset(double theta_deg) const {
  Vec d = Vec::Zero(F.rows());
  const double th = deg2rad(theta_deg);
  d(0) = distance * std::cos(th);
  if (position_dims >= 2 && d.size() >= 2) d(1) = distance * std::sin(th);
  return d;
}

double MitosisModel::parent_bearing_deg(const Vec& parent_mean) const {
  if (!bearing_from_velocity || position_dims < 2 || parent_mean.size() < 2 * position_dims) return theta_hat_deg;
  const double vx = parent_mean(position_dims), vy = parent_mean(position_dims + 1);
  if (vx == 0.0 && vy == 0.0) return theta_hat_deg;
  return std::atan2(vy, vx) * 180.0 / std::numbers::pi;
}

std::vector<AffineGaussianModel> mitosis_models(const MitosisModel& mit, const GaussianMixture& parent) {
  const int d = static_cast<int>(mit.F.rows());
  if (parent.dim() != mit.F.cols()) throw InvalidArgument("mitosis model and parent state dimensions differ");
  const double bearing = mit.parent_bearing_deg(parent.mean());
  std::vector<AffineGaussianModel> out;
  out.reserve(static_cast<std::size_t>(mit.components));
  for (int n = 1; n <= mit.components; ++n) {
    AffineGaussianModel m;
    m.weight = 1.0 / mit.components;
    m.F = Mat::Zero(2 * d, d);
    m.F.topRows(d) = mit.F;
    m.F.bottomRows(d) = mit.F;
    const Vec d0 = mit.offset(bearing + mit.epsilon_deg * n);
    m.offset = Vec(2 * d);
    m.offset << d0, -d0;
    m.Q = Mat::Zero(2 * d, 2 * d);
    m.Q.topLeftCorner(d, d) = mit.Q;
    m.Q.bottomRightCorner(d, d) = mit.Q;
    out.push_back(std::move(m));
  }
  return out;
}

ModeModel ModeModel::memoryless(double p_sp, std::array<std::array<double, 3>, 2> rho) {
  ModeModel mm;
  mm.rho = rho;
  for (int j = 0; j < 2; ++j) {
    mm.survive[j] = {1.0 - p_sp, p_sp};
    mm.daughter[j] = {1.0 - p_sp, p_sp};
  }
  mm.validate();
  return mm;
}

void ModeModel::validate() const {
  for (int j = 0; j < 2; ++j) {
    double s = 0.0;
    for (double r : rho[j]) {
      if (r < 0.0) throw InvalidArgument("negative generation probability");
      s += r;
    }
    if (std::abs(s - 1.0) > 1e-9) throw InvalidArgument("generation probabilities must sum to 1");
    for (const auto* row : {&survive[j], &daughter[j]})
      if ((*row)[0] < 0.0 || (*row)[1] < 0.0 || std::abs((*row)[0] + (*row)[1] - 1.0) > 1e-9)
        throw InvalidArgument("mode transition rows must be probability vectors");
  }
}

std::array<double, 3> generation_cardinality(const CategoricalMode& mode, const ModeModel& mm) {
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) out[c] = mode[0] * mm.rho[0][c] + mode[1] * mm.rho[1][c];
  return out;
}

namespace {

CategoricalMode conditioned_mode(const CategoricalMode& mode, const ModeModel& mm, int c,
                                 const std::array<std::array<double, 2>, 2>& trans) {
  double a = 0.0, b = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double w = mode[j] * mm.rho[j][c];
    a += w * trans[j][0];
    b += w * trans[j][1];
  }
  if (a + b > 0.0) return CategoricalMode::from_unnormalized(a, b);
  // The event has zero probability; fall back to the unconditioned law.
  return CategoricalMode::from_unnormalized(mode[0] * trans[0][0] + mode[1] * trans[1][0],
                                            mode[0] * trans[0][1] + mode[1] * trans[1][1]);
}

}  // namespace

CategoricalMode survival_mode(const CategoricalMode& mode, const ModeModel& mm) {
  return conditioned_mode(mode, mm, 1, mm.survive);
}

CategoricalMode daughter_mode(const CategoricalMode& mode, const ModeModel& mm) {
  return conditioned_mode(mode, mm, 2, mm.daughter);
}

HybridDensity survival_predict(const HybridDensity& d, const MotionModel& motion, const ModeModel& mm,
                               double beta_inflation, const ReductionConfig& red) {
  HybridDensity out;
  out.kinematics = gm_predict(d.kinematics, motion.components, red);
  out.mode = survival_mode(d.mode, mm);
  out.detection = beta_detection_predict(d.detection, beta_inflation);
  return out;
}

SpawnPrediction spawn_predict_joint(const HybridDensity& d, const Label& parent, int next_time,
                                    const MitosisModel& mit, const ModeModel& mm, const ReductionConfig& red) {
  SpawnPrediction out;
  out.joint.labels = generated_label_set(parent, 2, next_time);
  out.joint.dim_per_label = static_cast<int>(mit.F.rows());
  out.joint.mixture = gm_predict(d.kinematics, mitosis_models(mit, d.kinematics), red);
  out.daughter_mode = daughter_mode(d.mode, mm);
  out.daughter_detection = d.detection;
  return out;
}

double lmb_birth_log_weight(const BirthModel& bm, const std::set<Label>& born) {
  double lw = 0.0;
  std::size_t matched = 0;
  for (const auto& e : bm.entries) {
    if (born.count(e.label)) {
      lw += std::log(e.r);
      ++matched;
    } else {
      lw += std::log1p(-e.r);
    }
  }
  return matched == born.size() ? lw : kNegInf;
}

double lmb_birth_weight(const BirthModel& bm, const std::set<Label>& born) {
  return std::exp(lmb_birth_log_weight(bm, born));
}

bool ImageBounds::contains(const Vec& pos) const {
  if (pos(0) < x_min || pos(0) > x_max) return false;
  if (dims >= 2 && (pos(1) < y_min || pos(1) > y_max)) return false;
  return true;
}

double ImageBounds::distance_to_edge(const Vec& pos) const {
  double d = std::min(pos(0) - x_min, x_max - pos(0));
  if (dims >= 2) d = std::min({d, pos(1) - y_min, y_max - pos(1)});
  return std::max(0.0, d);
}

double edge_boost(const Vec& pos, const ImageBounds& bounds, const AdaptiveBirthConfig& cfg) {
  if (!(cfg.edge_width > 0.0)) return 1.0;
  const double d = bounds.distance_to_edge(pos);
  if (d >= cfg.edge_width) return 1.0;
  return cfg.edge_boost + (1.0 - cfg.edge_boost) * d / cfg.edge_width;
}

BirthModel adaptive_birth(const DetectionFrame& prev, const std::vector<double>& association_prob, int time,
                          const ImageBounds& bounds, const AdaptiveBirthConfig& cfg, int state_dim,
                          int position_dims) {
  BirthModel bm;
  for (std::size_t i = 0; i < prev.detections.size(); ++i) {
    const double a = i < association_prob.size() ? association_prob[i] : 0.0;
    if (a >= cfg.association_threshold) continue;
    const auto& z = prev.detections[i].position;
    Vec mean = Vec::Zero(state_dim);
    mean.head(position_dims) = z.head(position_dims);
    Mat cov = Mat::Zero(state_dim, state_dim);
    for (int k = 0; k < state_dim; ++k)
      cov(k, k) = k < position_dims ? cfg.position_sigma * cfg.position_sigma
                                    : cfg.velocity_sigma * cfg.velocity_sigma;
    BirthEntry e{Label::birth(time, static_cast<int>(i)),
                 std::min(cfg.r_max, cfg.r_base * edge_boost(z, bounds, cfg)),
                 {GaussianMixture::single(mean, cov), cfg.mode, cfg.detection}};
    bm.entries.push_back(std::move(e));
  }
  return bm;
}

}  // namespace celltrack
