#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "celltrack/labels.hpp"

namespace celltrack {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct GaussianComponent {
  double weight = 1.0;
  Vec mean;
  Mat cov;
};

struct GaussianMixture {
  std::vector<GaussianComponent> components;

  static GaussianMixture single(Vec mean, Mat cov);

  bool empty() const { return components.empty(); }
  std::size_t size() const { return components.size(); }
  int dim() const;
  double total_weight() const;
  void normalize();
  Vec mean() const;
  /// Moment-matched covariance of the whole mixture.
  Mat covariance() const;
  double density(const Vec& x) const;
};

/// x+ = F x + offset + w, w ~ N(0, Q); `weight` is the model's mixing weight.
struct AffineGaussianModel {
  double weight = 1.0;
  Mat F;
  Vec offset;
  Mat Q;
};

struct ReductionConfig {
  double prune_threshold = 1e-5;
  double merge_distance = 0.1;
  int max_components = 20;

  static ReductionConfig none();
};

/// Symmetrize, then floor eigenvalues at 1e-12. Throws NumericalError when the
/// matrix is materially indefinite (min eigenvalue below -1e-9 relative).
void sanitize_covariance(Mat& P);

double log_gaussian(const Vec& x, const Vec& mean, const Mat& cov);

/// Prune, merge by Mahalanobis distance and cap. The total weight is preserved.
GaussianMixture reduce(const GaussianMixture& gm, const ReductionConfig& cfg);

GaussianMixture gm_predict(const GaussianMixture& gm, const std::vector<AffineGaussianModel>& models,
                           const ReductionConfig& cfg = {});

struct GmUpdate {
  double log_likelihood = kNegInf;
  GaussianMixture posterior;
};

/// Kalman update of every component against z. The posterior is normalized.
GmUpdate gm_update(const GaussianMixture& gm, const Mat& H, const Mat& R, const Vec& z,
                   const ReductionConfig& cfg = {});

/// Log of the predictive density of z without forming the posterior.
double gm_log_likelihood(const GaussianMixture& gm, const Mat& H, const Mat& R, const Vec& z);

/// Smallest squared Mahalanobis distance of z to the predicted measurement over components.
double gm_min_mahalanobis2(const GaussianMixture& gm, const Mat& H, const Mat& R, const Vec& z);

struct CategoricalMode {
  double p_normal = 1.0;
  double p_mitotic = 0.0;

  double operator[](int m) const { return m == 0 ? p_normal : p_mitotic; }
  /// 0 = normal, 1 = mitotic. Ties go to normal.
  int map_mode() const { return p_mitotic > p_normal ? 1 : 0; }
  static CategoricalMode from_unnormalized(double a, double b);
};

/// Beta density over the detection probability. `fixed` in [0,1] turns it into a
/// point mass (known detection probability) that updates leave untouched.
struct BetaDensity {
  double s = 1.0;
  double t = 1.0;
  double fixed = -1.0;

  static BetaDensity point(double p);
  bool is_fixed() const { return fixed >= 0.0; }
  double mean() const;
  double variance() const;
};

struct BetaUpdate {
  double factor;
  BetaDensity posterior;
};

/// Moment-matched prediction: mean preserved, variance scaled by `inflation`.
BetaDensity beta_detection_predict(const BetaDensity& b, double inflation);
BetaUpdate beta_update_detected(const BetaDensity& b);
BetaUpdate beta_update_missed(const BetaDensity& b);

struct HybridDensity {
  GaussianMixture kinematics;
  CategoricalMode mode;
  BetaDensity detection;
};

/// Mixture over the stacked state of several labels, `dim_per_label` rows each,
/// in the order of `labels`.
struct JointGaussianMixture {
  std::vector<Label> labels;
  int dim_per_label = 0;
  GaussianMixture mixture;

  int index_of(const Label& l) const;
};

GaussianMixture gm_marginalize(const JointGaussianMixture& j, const Label& keep);

}  // namespace celltrack
