#include "celltrack/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "celltrack/errors.hpp"

namespace celltrack {

HybridDensity ObjectBlock::marginal(std::size_t i) const {
  return {gm_marginalize(kinematics, kinematics.labels.at(i)), modes.at(i), detections.at(i)};
}

BlockPtr make_single_block(const Label& l, HybridDensity d, std::uint64_t id) {
  auto b = std::make_shared<ObjectBlock>();
  b->kinematics.labels = {l};
  b->kinematics.dim_per_label = d.kinematics.dim();
  b->kinematics.mixture = std::move(d.kinematics);
  b->modes = {d.mode};
  b->detections = {d.detection};
  b->id = id;
  return b;
}

bool Hypothesis::contains(const Label& l) const { return std::binary_search(labels.begin(), labels.end(), l); }

std::pair<int, int> Hypothesis::locate(const Label& l) const {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const int i = blocks[b]->kinematics.index_of(l);
    if (i >= 0) return {static_cast<int>(b), i};
  }
  return {-1, -1};
}

HybridDensity Hypothesis::marginal(const Label& l) const {
  const auto [b, i] = locate(l);
  if (b < 0) throw InvalidArgument("label " + l.to_string() + " is not in the hypothesis");
  return blocks[static_cast<std::size_t>(b)]->marginal(static_cast<std::size_t>(i));
}

bool Hypothesis::is_glmb() const {
  return std::all_of(blocks.begin(), blocks.end(), [](const BlockPtr& b) { return b->size() == 1; });
}

void Hypothesis::refresh_labels() {
  labels.clear();
  for (const auto& b : blocks) labels.insert(labels.end(), b->labels().begin(), b->labels().end());
  std::sort(labels.begin(), labels.end());
}

MultiObjectDensity MultiObjectDensity::empty(int frame) {
  MultiObjectDensity d;
  d.frame = frame;
  d.hypotheses.push_back(Hypothesis{});
  return d;
}

bool MultiObjectDensity::is_glmb() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(), [](const Hypothesis& h) { return h.is_glmb(); });
}

void normalize(MultiObjectDensity& d) {
  double m = kNegInf;
  for (const auto& h : d.hypotheses) m = std::max(m, h.log_weight);
  if (m == kNegInf || std::isnan(m))
    throw DegenerateDensityError("all hypothesis weights are zero at frame " + std::to_string(d.frame), d.frame);
  double s = 0.0;
  for (const auto& h : d.hypotheses) s += std::exp(h.log_weight - m);
  const double lz = m + std::log(s);
  for (auto& h : d.hypotheses) h.log_weight -= lz;
}

void truncate(MultiObjectDensity& d, std::size_t cap, double floor) {
  if (cap < 1) throw InvalidArgument("truncation cap must be at least 1");
  normalize(d);
  auto& hs = d.hypotheses;
  // Heaviest first; ties by label set for a deterministic choice.
  std::stable_sort(hs.begin(), hs.end(), [](const Hypothesis& a, const Hypothesis& b) {
    if (a.log_weight != b.log_weight) return a.log_weight > b.log_weight;
    return a.labels < b.labels;
  });
  const double lfloor = floor > 0.0 ? std::log(floor) : kNegInf;
  std::size_t keep = 0;
  while (keep < hs.size() && keep < cap && (keep == 0 || hs[keep].log_weight >= lfloor)) ++keep;
  hs.resize(keep);
  normalize(d);
}

std::vector<double> cardinality_distribution(const MultiObjectDensity& d) {
  std::vector<double> p;
  for (const auto& h : d.hypotheses) {
    if (p.size() <= h.labels.size()) p.resize(h.labels.size() + 1, 0.0);
    p[h.labels.size()] += std::exp(h.log_weight);
  }
  if (p.empty()) p.push_back(0.0);
  return p;
}

double label_existence(const MultiObjectDensity& d, const Label& l) {
  double p = 0.0;
  for (const auto& h : d.hypotheses)
    if (h.contains(l)) p += std::exp(h.log_weight);
  return p;
}

std::map<Label, double> existence_map(const MultiObjectDensity& d) {
  std::map<Label, double> out;
  for (const auto& h : d.hypotheses) {
    const double w = std::exp(h.log_weight);
    for (const auto& l : h.labels) out[l] += w;
  }
  return out;
}

double intensity(const MultiObjectDensity& d, const Label& l, const Vec& x) {
  double v = 0.0;
  for (const auto& h : d.hypotheses) {
    if (!h.contains(l)) continue;
    v += std::exp(h.log_weight) * h.marginal(l).kinematics.density(x);
  }
  return v;
}

GaussianMixture intensity_mixture(const MultiObjectDensity& d, const Label& l) {
  GaussianMixture out;
  for (const auto& h : d.hypotheses) {
    if (!h.contains(l)) continue;
    const double w = std::exp(h.log_weight);
    for (auto c : h.marginal(l).kinematics.components) {
      c.weight *= w;
      out.components.push_back(std::move(c));
    }
  }
  return out;
}

SpawnStatistics spawning_and_division_counts(const MultiObjectDensity& d) {
  SpawnStatistics s;
  auto add = [](std::vector<double>& v, std::size_t n, double w) {
    if (v.size() <= n) v.resize(n + 1, 0.0);
    v[n] += w;
  };
  for (const auto& h : d.hypotheses) {
    std::size_t spawned = 0;
    std::set<Label> parents;
    for (const auto& l : h.labels) {
      if (l.is_birth() || l.time() != d.frame) continue;
      ++spawned;
      parents.insert(*l.parent());
    }
    const double w = std::exp(h.log_weight);
    add(s.spawnings, spawned, w);
    add(s.divisions, parents.size(), w);
  }
  if (s.spawnings.empty()) s.spawnings = {0.0};
  if (s.divisions.empty()) s.divisions = {0.0};
  return s;
}

Estimate extract_estimate(const MultiObjectDensity& d) {
  Estimate e;
  if (d.hypotheses.empty()) return e;
  const auto card = cardinality_distribution(d);
  std::size_t n_star = 0;
  for (std::size_t n = 1; n < card.size(); ++n)
    if (card[n] > card[n_star]) n_star = n;
  const Hypothesis* best = nullptr;
  for (const auto& h : d.hypotheses) {
    if (h.labels.size() != n_star) continue;
    if (best == nullptr || h.log_weight > best->log_weight ||
        (h.log_weight == best->log_weight && h.labels < best->labels))
      best = &h;
  }
  e.cardinality = static_cast<int>(n_star);
  if (best == nullptr) return e;
  std::set<Label> ls;
  for (const auto& l : best->labels) {
    const auto m = best->marginal(l);
    e.objects.push_back({l, m.kinematics.mean(), m.mode.map_mode(), m.detection.mean()});
    ls.insert(l);
  }
  e.lineage = build_lineage_forest(ls);
  return e;
}

}  // namespace celltrack
