#include "celltrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "celltrack/errors.hpp"
#include "celltrack/hungarian.hpp"

namespace celltrack {

double ospa_from_distances(const Mat& dist, double p, double c) {
  if (!(p >= 1.0) || !(c > 0.0)) throw InvalidArgument("OSPA needs p >= 1 and c > 0");
  const auto n = dist.rows(), m = dist.cols();
  if (n == 0 && m == 0) return 0.0;
  if (n == 0 || m == 0) return c;
  Mat cost(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) cost(i, j) = std::pow(std::min(dist(i, j), c), p);
  const auto a = hungarian(cost);
  const auto nmax = std::max(n, m), nmin = std::min(n, m);
  const double total = a.cost + std::pow(c, p) * static_cast<double>(nmax - nmin);
  return std::min(c, std::pow(total / static_cast<double>(nmax), 1.0 / p));
}

double ospa(const std::vector<Vec>& X, const std::vector<Vec>& Y, double p, double c) {
  Mat d(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(Y.size()));
  for (std::size_t i = 0; i < X.size(); ++i)
    for (std::size_t j = 0; j < Y.size(); ++j)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (X[i] - Y[j]).norm();
  return ospa_from_distances(d, p, c);
}

namespace {

std::optional<std::pair<int, int>> joint_range(const TrackSet& a, const TrackSet& b) {
  auto ra = a.frame_range(), rb = b.frame_range();
  if (!ra) return rb;
  if (!rb) return ra;
  return std::make_pair(std::min(ra->first, rb->first), std::max(ra->second, rb->second));
}

using Series = std::map<int, Vec>;

std::vector<const Series*> segments_in(const TrackSet& ts, int lo, int hi) {
  std::vector<const Series*> out;
  for (const auto& [l, s] : ts.tracks) {
    const auto it = s.lower_bound(lo);
    if (it != s.end() && it->first <= hi) out.push_back(&s);
  }
  return out;
}

double segment_distance(const Series& a, const Series& b, int lo, int hi, double p, double c) {
  double sum = 0.0;
  int count = 0;
  for (int t = lo; t <= hi; ++t) {
    const auto ia = a.find(t), ib = b.find(t);
    const bool ha = ia != a.end(), hb = ib != b.end();
    if (!ha && !hb) continue;
    const double d = (ha && hb) ? std::min(c, (ia->second - ib->second).norm()) : c;
    sum += std::pow(d, p);
    ++count;
  }
  return count == 0 ? c : std::pow(sum / count, 1.0 / p);
}

}  // namespace

std::vector<FrameValue> ospa_per_frame(const TrackSet& est, const TrackSet& truth, double p, double c) {
  std::vector<FrameValue> out;
  const auto r = joint_range(est, truth);
  if (!r) return out;
  for (int k = r->first; k <= r->second; ++k) out.push_back({k, ospa(est.points_at(k), truth.points_at(k), p, c)});
  return out;
}

std::vector<FrameValue> ospa2(const TrackSet& est, const TrackSet& truth, int window, double p, double c) {
  if (window < 1) throw InvalidArgument("OSPA(2) window must be at least 1");
  std::vector<FrameValue> out;
  const auto r = joint_range(est, truth);
  if (!r) return out;
  for (int k = r->first; k <= r->second; ++k) {
    const int lo = k - window + 1;
    const auto X = segments_in(est, lo, k), Y = segments_in(truth, lo, k);
    Mat d(static_cast<Eigen::Index>(X.size()), static_cast<Eigen::Index>(Y.size()));
    for (std::size_t i = 0; i < X.size(); ++i)
      for (std::size_t j = 0; j < Y.size(); ++j)
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = segment_distance(*X[i], *Y[j], lo, k, p, c);
    out.push_back({k, ospa_from_distances(d, p, c)});
  }
  return out;
}

namespace {

using Node = std::pair<Label, int>;

/// Edges of a track graph with their kind: false = continuation, true = division.
std::map<std::pair<Node, Node>, bool> graph_edges(const TrackSet& ts) {
  std::map<std::pair<Node, Node>, bool> e;
  for (const auto& [l, s] : ts.tracks) {
    for (auto it = s.begin(); it != s.end(); ++it) {
      const auto nx = std::next(it);
      if (nx != s.end()) e[{{l, it->first}, {l, nx->first}}] = false;
    }
    if (s.empty() || l.is_birth()) continue;
    const auto par = ts.tracks.find(*l.parent());
    if (par == ts.tracks.end()) continue;
    const int first = s.begin()->first;
    const auto pit = par->second.lower_bound(first);
    if (pit == par->second.begin()) continue;
    e[{{par->first, std::prev(pit)->first}, {l, first}}] = true;
  }
  return e;
}

std::size_t node_count(const TrackSet& ts) {
  std::size_t n = 0;
  for (const auto& [l, s] : ts.tracks) n += s.size();
  return n;
}

}  // namespace

TraResult tra_score(const TrackSet& est, const TrackSet& truth, double radius, const TraWeights& w) {
  TraResult r;
  const auto truth_edges = graph_edges(truth);
  const auto est_edges = graph_edges(est);
  const std::size_t vt = node_count(truth), ve = node_count(est);
  r.aogm_empty = w.fn_node * static_cast<double>(vt) + w.fn_edge * static_cast<double>(truth_edges.size());

  std::map<Node, Node> match;  // est node -> truth node
  if (const auto range = joint_range(est, truth)) {
    for (int k = range->first; k <= range->second; ++k) {
      const auto A = est.at(k), B = truth.at(k);
      if (A.empty() || B.empty()) continue;
      const double big = radius * 10.0 * static_cast<double>(A.size() + B.size() + 1);
      Mat cost(static_cast<Eigen::Index>(A.size()), static_cast<Eigen::Index>(B.size()));
      for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < B.size(); ++j) {
          const double d = (A[i].second - B[j].second).norm();
          cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = d <= radius ? d : big;
        }
      const auto a = hungarian(cost);
      for (std::size_t i = 0; i < A.size(); ++i) {
        const int j = a.row_to_col[i];
        if (j < 0 || cost(static_cast<Eigen::Index>(i), j) > radius) continue;
        match.insert_or_assign(Node{A[i].first, k}, Node{B[static_cast<std::size_t>(j)].first, k});
      }
    }
  }
  r.fp_nodes = static_cast<int>(ve - match.size());
  r.fn_nodes = static_cast<int>(vt - match.size());

  std::set<std::pair<Node, Node>> covered;
  for (const auto& [edge, division] : est_edges) {
    const auto a = match.find(edge.first), b = match.find(edge.second);
    if (a == match.end() || b == match.end()) continue;  // removed with its node
    const auto key = std::make_pair(a->second, b->second);
    const auto t = truth_edges.find(key);
    if (t == truth_edges.end()) {
      ++r.fp_edges;
      continue;
    }
    covered.insert(key);
    if (t->second != division) ++r.semantic_edges;
  }
  r.fn_edges = static_cast<int>(truth_edges.size() - covered.size());
  r.aogm = w.fn_node * r.fn_nodes + w.fp_node * r.fp_nodes + w.split_node * r.split_nodes + w.fn_edge * r.fn_edges +
           w.fp_edge * r.fp_edges + w.semantic_edge * r.semantic_edges;
  if (r.aogm_empty <= 0.0)
    r.score = ve == 0 ? 1.0 : 0.0;
  else
    r.score = 1.0 - std::min(1.0, r.aogm / r.aogm_empty);
  return r;
}

std::vector<FrameValue> division_counts(const TrackSet& tracks, int first, int last) {
  std::map<int, std::set<Label>> parents;
  for (const auto& [l, s] : tracks.tracks)
    if (!l.is_birth()) parents[l.time()].insert(*l.parent());
  std::vector<FrameValue> out;
  for (int k = first; k <= last; ++k) {
    const auto it = parents.find(k);
    out.push_back({k, it == parents.end() ? 0.0 : static_cast<double>(it->second.size())});
  }
  return out;
}

MitoticError mitotic_event_error(const TrackSet& est, const TrackSet& truth) {
  MitoticError e;
  const auto r = joint_range(est, truth);
  if (!r) return e;
  const auto a = division_counts(est, r->first, r->second), b = division_counts(truth, r->first, r->second);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    e.per_frame.push_back({a[i].frame, a[i].value - b[i].value});
    s += std::abs(a[i].value - b[i].value);
  }
  e.mean_abs = a.empty() ? 0.0 : s / static_cast<double>(a.size());
  return e;
}

std::vector<FrameValue> cardinality_error(const TrackSet& est, const TrackSet& truth) {
  std::vector<FrameValue> out;
  const auto r = joint_range(est, truth);
  if (!r) return out;
  for (int k = r->first; k <= r->second; ++k)
    out.push_back({k, static_cast<double>(est.at(k).size()) - static_cast<double>(truth.at(k).size())});
  return out;
}

}  // namespace celltrack
