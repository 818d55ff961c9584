#include "celltrack/densities.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "celltrack/errors.hpp"

namespace celltrack {

namespace {

constexpr double kEigFloor = 1e-12;
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double logsumexp(const std::vector<double>& v) {
  double m = kNegInf;
  for (double x : v) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

GaussianMixture GaussianMixture::single(Vec mean, Mat cov) {
  GaussianMixture gm;
  gm.components.push_back({1.0, std::move(mean), std::move(cov)});
  return gm;
}

int GaussianMixture::dim() const {
  return components.empty() ? 0 : static_cast<int>(components.front().mean.size());
}

double GaussianMixture::total_weight() const {
  double w = 0.0;
  for (const auto& c : components) w += c.weight;
  return w;
}

void GaussianMixture::normalize() {
  const double w = total_weight();
  if (!(w > 0.0)) throw NumericalError("cannot normalize a mixture with zero total weight");
  for (auto& c : components) c.weight /= w;
}

Vec GaussianMixture::mean() const {
  Vec m = Vec::Zero(dim());
  const double w = total_weight();
  for (const auto& c : components) m += c.weight * c.mean;
  return w > 0.0 ? Vec(m / w) : m;
}

Mat GaussianMixture::covariance() const {
  const Vec m = mean();
  Mat P = Mat::Zero(dim(), dim());
  const double w = total_weight();
  for (const auto& c : components) {
    const Vec d = c.mean - m;
    P += c.weight * (c.cov + d * d.transpose());
  }
  return w > 0.0 ? Mat(P / w) : P;
}

double GaussianMixture::density(const Vec& x) const {
  double v = 0.0;
  for (const auto& c : components) v += c.weight * std::exp(log_gaussian(x, c.mean, c.cov));
  return v;
}

ReductionConfig ReductionConfig::none() { return {0.0, 0.0, std::numeric_limits<int>::max()}; }

void sanitize_covariance(Mat& P) {
  P = 0.5 * (P + P.transpose());
  Eigen::LLT<Mat> llt(P);
  if (llt.info() == Eigen::Success) {
    // Cheap path: positive definite. Still enforce the floor on the diagonal scale.
    bool ok = true;
    for (Eigen::Index i = 0; i < P.rows(); ++i)
      if (llt.matrixLLT()(i, i) * llt.matrixLLT()(i, i) < kEigFloor) ok = false;
    if (ok) return;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(P);
  Vec ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.minCoeff() < -1e-9 * scale)
    throw NumericalError("covariance is not positive semi-definite (min eigenvalue " +
                         std::to_string(ev.minCoeff()) + ")");
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::max(ev(i), kEigFloor);
  P = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  P = 0.5 * (P + P.transpose());
}

double log_gaussian(const Vec& x, const Vec& mean, const Mat& cov) {
  Eigen::LLT<Mat> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("singular covariance in Gaussian evaluation");
  const Vec d = x - mean;
  const Vec y = llt.matrixL().solve(d);
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) logdet += std::log(llt.matrixLLT()(i, i));
  return -0.5 * (static_cast<double>(x.size()) * kLog2Pi + y.squaredNorm()) - logdet;
}

GaussianMixture reduce(const GaussianMixture& gm, const ReductionConfig& cfg) {
  if (gm.components.size() <= 1) return gm;
  const double total = gm.total_weight();
  if (!(total > 0.0)) return gm;

  std::vector<std::size_t> alive;
  for (std::size_t i = 0; i < gm.components.size(); ++i)
    if (gm.components[i].weight / total >= cfg.prune_threshold) alive.push_back(i);
  if (alive.empty()) {
    // Keep the heaviest rather than returning nothing.
    std::size_t best = 0;
    for (std::size_t i = 1; i < gm.components.size(); ++i)
      if (gm.components[i].weight > gm.components[best].weight) best = i;
    alive.push_back(best);
  }

  GaussianMixture out;
  if (cfg.merge_distance > 0.0) {
    const double thr2 = cfg.merge_distance * cfg.merge_distance;
    std::vector<bool> used(gm.components.size(), false);
    while (true) {
      std::size_t j = gm.components.size();
      for (std::size_t i : alive)
        if (!used[i] && (j == gm.components.size() || gm.components[i].weight > gm.components[j].weight)) j = i;
      if (j == gm.components.size()) break;
      const auto& cj = gm.components[j];
      Eigen::LDLT<Mat> ldlt(cj.cov);
      std::vector<std::size_t> group;
      for (std::size_t i : alive) {
        if (used[i]) continue;
        const Vec d = gm.components[i].mean - cj.mean;
        if (i == j || d.dot(ldlt.solve(d)) < thr2) group.push_back(i);
      }
      GaussianComponent m{0.0, Vec::Zero(cj.mean.size()), Mat::Zero(cj.cov.rows(), cj.cov.cols())};
      for (std::size_t i : group) {
        used[i] = true;
        m.weight += gm.components[i].weight;
        m.mean += gm.components[i].weight * gm.components[i].mean;
      }
      m.mean /= m.weight;
      for (std::size_t i : group) {
        const Vec d = gm.components[i].mean - m.mean;
        m.cov += gm.components[i].weight * (gm.components[i].cov + d * d.transpose());
      }
      m.cov /= m.weight;
      if (group.size() > 1) sanitize_covariance(m.cov);
      out.components.push_back(std::move(m));
    }
  } else {
    for (std::size_t i : alive) out.components.push_back(gm.components[i]);
  }

  if (cfg.max_components > 0 && out.components.size() > static_cast<std::size_t>(cfg.max_components)) {
    std::stable_sort(out.components.begin(), out.components.end(),
                     [](const auto& a, const auto& b) { return a.weight > b.weight; });
    out.components.resize(static_cast<std::size_t>(cfg.max_components));
  }
  const double kept = out.total_weight();
  for (auto& c : out.components) c.weight *= total / kept;
  return out;
}

GaussianMixture gm_predict(const GaussianMixture& gm, const std::vector<AffineGaussianModel>& models,
                           const ReductionConfig& cfg) {
  GaussianMixture out;
  out.components.reserve(gm.size() * models.size());
  for (const auto& c : gm.components) {
    for (const auto& m : models) {
      if (m.F.cols() != c.mean.size()) throw InvalidArgument("gm_predict: model and state dimensions differ");
      GaussianComponent p;
      p.weight = c.weight * m.weight;
      p.mean = m.F * c.mean;
      if (m.offset.size() > 0) p.mean += m.offset;
      p.cov = m.F * c.cov * m.F.transpose() + m.Q;
      sanitize_covariance(p.cov);
      out.components.push_back(std::move(p));
    }
  }
  return reduce(out, cfg);
}

GmUpdate gm_update(const GaussianMixture& gm, const Mat& H, const Mat& R, const Vec& z,
                   const ReductionConfig& cfg) {
  GmUpdate res;
  std::vector<double> logw;
  logw.reserve(gm.size());
  res.posterior.components.reserve(gm.size());
  for (const auto& c : gm.components) {
    const Vec eta = H * c.mean;
    const Mat PHt = c.cov * H.transpose();
    Mat S = H * PHt + R;
    S = 0.5 * (S + S.transpose());
    Eigen::LLT<Mat> llt(S);
    if (llt.info() != Eigen::Success) throw NumericalError("singular innovation covariance");
    const Vec nu = z - eta;
    const Vec y = llt.matrixL().solve(nu);
    double logdet = 0.0;
    for (Eigen::Index i = 0; i < S.rows(); ++i) logdet += std::log(llt.matrixLLT()(i, i));
    const double ll = -0.5 * (static_cast<double>(z.size()) * kLog2Pi + y.squaredNorm()) - logdet;
    logw.push_back((c.weight > 0.0 ? std::log(c.weight) : kNegInf) + ll);

    const Mat K = llt.solve(PHt.transpose()).transpose();
    GaussianComponent p;
    p.mean = c.mean + K * nu;
    // Joseph form keeps the result symmetric PSD.
    const Mat IKH = Mat::Identity(c.cov.rows(), c.cov.cols()) - K * H;
    p.cov = IKH * c.cov * IKH.transpose() + K * R * K.transpose();
    sanitize_covariance(p.cov);
    res.posterior.components.push_back(std::move(p));
  }
  res.log_likelihood = logsumexp(logw);
  if (res.log_likelihood == kNegInf) {
    for (auto& c : res.posterior.components) c.weight = 1.0 / static_cast<double>(gm.size());
    return res;
  }
  for (std::size_t i = 0; i < logw.size(); ++i)
    res.posterior.components[i].weight = std::exp(logw[i] - res.log_likelihood);
  res.posterior = reduce(res.posterior, cfg);
  return res;
}

double gm_log_likelihood(const GaussianMixture& gm, const Mat& H, const Mat& R, const Vec& z) {
  std::vector<double> logw;
  logw.reserve(gm.size());
  for (const auto& c : gm.components) {
    const Mat S = H * c.cov * H.transpose() + R;
    logw.push_back((c.weight > 0.0 ? std::log(c.weight) : kNegInf) + log_gaussian(z, H * c.mean, S));
  }
  return logsumexp(logw);
}

double gm_min_mahalanobis2(const GaussianMixture& gm, const Mat& H, const Mat& R, const Vec& z) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : gm.components) {
    const Mat S = H * c.cov * H.transpose() + R;
    const Vec nu = z - H * c.mean;
    best = std::min(best, nu.dot(S.ldlt().solve(nu)));
  }
  return best;
}

CategoricalMode CategoricalMode::from_unnormalized(double a, double b) {
  const double s = a + b;
  if (!(s > 0.0) || !std::isfinite(s)) throw NumericalError("mode distribution has no mass");
  return {a / s, b / s};
}

BetaDensity BetaDensity::point(double p) {
  if (p < 0.0 || p > 1.0) throw InvalidArgument("detection probability outside [0,1]");
  BetaDensity b;
  b.fixed = p;
  return b;
}

double BetaDensity::mean() const { return is_fixed() ? fixed : s / (s + t); }

double BetaDensity::variance() const {
  if (is_fixed()) return 0.0;
  const double n = s + t;
  return s * t / (n * n * (n + 1.0));
}

BetaDensity beta_detection_predict(const BetaDensity& b, double inflation) {
  if (b.is_fixed() || inflation == 1.0) return b;
  const double m = b.mean();
  const double v = b.variance() * inflation;
  const double n = m * (1.0 - m) / v - 1.0;
  if (!(n > 1e-6)) return b;
  BetaDensity out;
  out.s = m * n;
  out.t = (1.0 - m) * n;
  return out;
}

BetaUpdate beta_update_detected(const BetaDensity& b) {
  if (b.is_fixed()) return {b.fixed, b};
  BetaDensity p = b;
  p.s += 1.0;
  return {b.s / (b.s + b.t), p};
}

BetaUpdate beta_update_missed(const BetaDensity& b) {
  if (b.is_fixed()) return {1.0 - b.fixed, b};
  BetaDensity p = b;
  p.t += 1.0;
  return {b.t / (b.s + b.t), p};
}

int JointGaussianMixture::index_of(const Label& l) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == l) return static_cast<int>(i);
  return -1;
}

GaussianMixture gm_marginalize(const JointGaussianMixture& j, const Label& keep) {
  const int idx = j.index_of(keep);
  if (idx < 0) throw InvalidArgument("label " + keep.to_string() + " is not part of the joint density");
  if (j.labels.size() == 1) return j.mixture;
  const int d = j.dim_per_label;
  GaussianMixture out;
  out.components.reserve(j.mixture.size());
  for (const auto& c : j.mixture.components)
    out.components.push_back({c.weight, c.mean.segment(idx * d, d), c.cov.block(idx * d, idx * d, d, d)});
  return out;
}

}  // namespace celltrack
