#include "celltrack/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "celltrack/errors.hpp"
#include "celltrack/hashing.hpp"

namespace celltrack {

int candidate_count(int M) { return (M + 1) * (M + 1) + M + 2; }

Triplet candidate_at(int M, int k) {
  if (k < 0 || k >= candidate_count(M)) throw InvalidArgument("candidate index out of range");
  if (k <= M + 1) return {-1, -1, k - 1};
  const int r = k - (M + 2);
  return {r / (M + 1), r % (M + 1), -1};
}

int candidate_index(int M, const Triplet& t) {
  if (t[0] < 0) return t[2] + 1;
  return M + 2 + t[0] * (M + 1) + t[1];
}

std::uint64_t ExtendedAssociationMap::hash() const {
  std::uint64_t h = rows.size();
  for (const auto& r : rows)
    for (int v : r) h = hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
  return h;
}

double CostRow::log_cost(int candidate) const {
  const auto it = std::lower_bound(candidates.begin(), candidates.end(), candidate);
  if (it == candidates.end() || *it != candidate) return kNegInf;
  return log_lambda[static_cast<std::size_t>(it - candidates.begin())];
}

namespace {

bool row_in_domain(const Triplet& t, int M, bool birth) {
  if (t[0] < 0) {
    return t[1] == -1 && t[2] >= -1 && t[2] <= M;
  }
  if (birth) return false;
  if (t[2] != -1 || t[1] < 0 || t[0] > M || t[1] > M) return false;
  return t[0] != t[1] || t[0] == 0;
}

/// Positive entries of a triplet, at most three.
int positives(const Triplet& t, int out[3]) {
  int n = 0;
  for (int v : t)
    if (v > 0) out[n++] = v;
  return n;
}

}  // namespace

bool is_valid_gamma(const ExtendedAssociationMap& g, int M, const std::vector<bool>& birth_rows) {
  if (g.rows.size() != birth_rows.size()) return false;
  std::vector<char> used(static_cast<std::size_t>(M + 1), 0);
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    if (!row_in_domain(g.rows[i], M, birth_rows[i])) return false;
    int pos[3];
    const int n = positives(g.rows[i], pos);
    for (int k = 0; k < n; ++k) {
      if (used[static_cast<std::size_t>(pos[k])]) return false;
      used[static_cast<std::size_t>(pos[k])] = 1;
    }
  }
  return true;
}

bool is_valid_gamma(const CostTable& ct, const ExtendedAssociationMap& g) {
  std::vector<bool> b;
  b.reserve(ct.rows.size());
  for (const auto& r : ct.rows) b.push_back(r.birth);
  return is_valid_gamma(g, ct.M, b);
}

double gamma_log_weight(const CostTable& ct, const ExtendedAssociationMap& g) {
  if (!is_valid_gamma(ct, g)) return kNegInf;
  double lw = ct.log_weight;
  for (std::size_t i = 0; i < g.rows.size(); ++i) lw += ct.rows[i].log_cost(candidate_index(ct.M, g.rows[i]));
  return lw;
}

double gamma_weight(const CostTable& ct, const ExtendedAssociationMap& g) { return std::exp(gamma_log_weight(ct, g)); }

HypothesisKeys gamma_to_hypothesis_keys(const ExtendedAssociationMap& g, const std::vector<Label>& row_labels,
                                        const std::vector<bool>& birth_rows, int next_time) {
  if (g.rows.size() != row_labels.size() || g.rows.size() != birth_rows.size())
    throw InvalidArgument("gamma and row descriptions differ in length");
  HypothesisKeys k;
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    const auto& t = g.rows[i];
    if (t[0] >= 0) {
      const auto kids = generated_label_set(row_labels[i], 2, next_time);
      for (int q = 0; q < 2; ++q) {
        k.labels.insert(kids[static_cast<std::size_t>(q)]);
        k.assoc[kids[static_cast<std::size_t>(q)]] = t[static_cast<std::size_t>(q)];
      }
    } else if (t[2] >= 0) {
      k.labels.insert(row_labels[i]);
      k.assoc[row_labels[i]] = t[2];
    }
  }
  return k;
}

ExtendedAssociationMap hypothesis_keys_to_gamma(const HypothesisKeys& keys, const std::vector<Label>& row_labels,
                                                const std::vector<bool>& birth_rows, int next_time) {
  ExtendedAssociationMap g;
  g.rows.reserve(row_labels.size());
  for (std::size_t i = 0; i < row_labels.size(); ++i) {
    Triplet t = kDeath;
    if (keys.labels.count(row_labels[i])) {
      t[2] = keys.assoc.at(row_labels[i]);
    } else if (!birth_rows[i]) {
      const auto kids = generated_label_set(row_labels[i], 2, next_time);
      if (keys.labels.count(kids[0]) || keys.labels.count(kids[1])) {
        t = {keys.assoc.at(kids[0]), keys.assoc.at(kids[1]), -1};
      }
    }
    g.rows.push_back(t);
  }
  return g;
}

ExtendedAssociationMap default_gamma(const CostTable& ct) {
  ExtendedAssociationMap g;
  g.rows.reserve(ct.rows.size());
  for (const auto& r : ct.rows) g.rows.push_back(r.birth ? kDeath : Triplet{-1, -1, 0});
  return g;
}

namespace {

/// Precomputed linear-domain row weights and the triplets they stand for.
struct SamplerRow {
  std::vector<Triplet> trip;
  std::vector<double> lin;
};

std::vector<SamplerRow> sampler_rows(const CostTable& ct) {
  std::vector<SamplerRow> rows(ct.rows.size());
  for (std::size_t i = 0; i < ct.rows.size(); ++i) {
    const auto& cr = ct.rows[i];
    double m = kNegInf;
    for (double l : cr.log_lambda) m = std::max(m, l);
    for (std::size_t k = 0; k < cr.candidates.size(); ++k) {
      rows[i].trip.push_back(candidate_at(ct.M, cr.candidates[k]));
      rows[i].lin.push_back(m == kNegInf ? 0.0 : std::exp(cr.log_lambda[k] - m));
    }
  }
  return rows;
}

void add_usage(std::vector<int>& usage, const Triplet& t, int delta) {
  for (int v : t)
    if (v > 0) usage[static_cast<std::size_t>(v)] += delta;
}

bool conflicts(const std::vector<int>& usage, const Triplet& t) {
  for (int v : t)
    if (v > 0 && usage[static_cast<std::size_t>(v)] > 0) return true;
  return false;
}

template <class Visit>
void run_chain(const CostTable& ct, const ExtendedAssociationMap& init, std::size_t T, std::uint64_t seed,
               Visit&& visit) {
  if (init.rows.size() != ct.rows.size()) throw InvalidArgument("initial map has the wrong number of rows");
  if (!is_valid_gamma(ct, init)) throw InvalidArgument("initial map is not a valid extended association map");
  if (T == 0) return;
  const auto rows = sampler_rows(ct);
  std::vector<int> usage(static_cast<std::size_t>(ct.M + 1), 0);
  ExtendedAssociationMap cur = init;
  for (const auto& t : cur.rows) add_usage(usage, t, +1);
  visit(cur);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> w;
  for (std::size_t it = 1; it < T; ++it) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      add_usage(usage, cur.rows[i], -1);
      w.assign(row.lin.size(), 0.0);
      double total = 0.0;
      for (std::size_t k = 0; k < row.lin.size(); ++k) {
        if (row.lin[k] > 0.0 && !conflicts(usage, row.trip[k])) w[k] = row.lin[k];
        total += w[k];
      }
      if (total > 0.0) {
        double u = unif(rng) * total;
        std::size_t pick = 0;
        for (; pick + 1 < w.size(); ++pick) {
          if (u < w[pick]) break;
          u -= w[pick];
        }
        while (w[pick] == 0.0) --pick;  // guard rounding at the tail
        cur.rows[i] = row.trip[pick];
      }
      add_usage(usage, cur.rows[i], +1);
    }
    visit(cur);
  }
}

}  // namespace

std::vector<ExtendedAssociationMap> gibbs_sample(const CostTable& ct, const ExtendedAssociationMap& init,
                                                 std::size_t T, std::uint64_t seed) {
  std::vector<ExtendedAssociationMap> out;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
  run_chain(ct, init, T, seed, [&](const ExtendedAssociationMap& g) {
    auto& bucket = seen[g.hash()];
    for (std::size_t idx : bucket)
      if (out[idx] == g) return;
    bucket.push_back(out.size());
    out.push_back(g);
  });
  return out;
}

std::vector<ExtendedAssociationMap> gibbs_chain(const CostTable& ct, const ExtendedAssociationMap& init,
                                                std::size_t T, std::uint64_t seed) {
  std::vector<ExtendedAssociationMap> out;
  out.reserve(T);
  run_chain(ct, init, T, seed, [&](const ExtendedAssociationMap& g) { out.push_back(g); });
  return out;
}

std::vector<ExtendedAssociationMap> enumerate_gamma(const CostTable& ct, std::size_t limit) {
  std::vector<ExtendedAssociationMap> out;
  ExtendedAssociationMap cur;
  cur.rows.assign(ct.rows.size(), kDeath);
  std::vector<int> usage(static_cast<std::size_t>(ct.M + 1), 0);
  std::vector<std::vector<Triplet>> trips(ct.rows.size());
  for (std::size_t i = 0; i < ct.rows.size(); ++i)
    for (int c : ct.rows[i].candidates) trips[i].push_back(candidate_at(ct.M, c));

  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == ct.rows.size()) {
      if (out.size() >= limit) throw CapacityError("association enumeration exceeds " + std::to_string(limit));
      out.push_back(cur);
      return;
    }
    for (const auto& t : trips[i]) {
      if (conflicts(usage, t)) continue;
      cur.rows[i] = t;
      add_usage(usage, t, +1);
      self(self, i + 1);
      add_usage(usage, t, -1);
    }
  };
  rec(rec, 0);
  return out;
}

std::vector<ExtendedAssociationMap> enumerate_gamma(int P, int M, const std::vector<bool>& birth_rows) {
  if (P < 0 || M < 0 || P > 4 || M > 3) throw CapacityError("enumeration guard: needs P <= 4 and M <= 3");
  if (static_cast<int>(birth_rows.size()) != P) throw InvalidArgument("birth_rows must have P entries");
  std::vector<ExtendedAssociationMap> out;
  const int K = candidate_count(M);
  std::vector<int> idx(static_cast<std::size_t>(P), 0);
  // Odometer over the full candidate product, filtered by membership.
  while (true) {
    ExtendedAssociationMap g;
    for (int i = 0; i < P; ++i) g.rows.push_back(candidate_at(M, idx[static_cast<std::size_t>(i)]));
    if (is_valid_gamma(g, M, birth_rows)) out.push_back(std::move(g));
    int i = P - 1;
    while (i >= 0 && ++idx[static_cast<std::size_t>(i)] == K) idx[static_cast<std::size_t>(i--)] = 0;
    if (i < 0) break;
  }
  return out;
}

double gibbs_transition_probability(const CostTable& ct, const ExtendedAssociationMap& from,
                                    const ExtendedAssociationMap& to) {
  const auto rows = sampler_rows(ct);
  ExtendedAssociationMap cur = from;
  std::vector<int> usage(static_cast<std::size_t>(ct.M + 1), 0);
  for (const auto& t : cur.rows) add_usage(usage, t, +1);
  double p = 1.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    add_usage(usage, cur.rows[i], -1);
    double total = 0.0, target = 0.0;
    for (std::size_t k = 0; k < rows[i].lin.size(); ++k) {
      if (rows[i].lin[k] <= 0.0 || conflicts(usage, rows[i].trip[k])) continue;
      total += rows[i].lin[k];
      if (rows[i].trip[k] == to.rows[i]) target = rows[i].lin[k];
    }
    if (total > 0.0)
      p *= target / total;
    else if (to.rows[i] != cur.rows[i])
      return 0.0;
    cur.rows[i] = to.rows[i];
    add_usage(usage, cur.rows[i], +1);
  }
  return p;
}

}  // namespace celltrack
