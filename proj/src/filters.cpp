#include "celltrack/filters.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <unordered_map>

#include "celltrack/assignment.hpp"
#include "celltrack/costs.hpp"
#include "celltrack/errors.hpp"
#include "celltrack/hashing.hpp"
#include "celltrack/log.hpp"

namespace celltrack {

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::PA:
      return "pa";
    case Variant::UA:
      return "ua";
    case Variant::EF:
      return "ef";
  }
  return "pa";
}

Variant parse_variant(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "pa") return Variant::PA;
  if (s == "ua") return Variant::UA;
  if (s == "ef") return Variant::EF;
  throw ParseError("unknown filter variant '" + name + "' (expected pa, ua or ef)");
}

void FilterConfig::validate() const {
  if (gibbs_samples < 1) throw InvalidArgument("gibbs_samples must be at least 1");
  if (max_hypotheses < 1) throw InvalidArgument("max_hypotheses must be at least 1");
  if (weight_floor < 0.0 || weight_floor >= 1.0) throw InvalidArgument("weight_floor must lie in [0, 1)");
  if (max_joint_dims < 1) throw InvalidArgument("max_joint_dims must be positive");
  if (enumerate_limit < 1) throw InvalidArgument("enumerate_limit must be positive");
}

FilterState FilterState::initial(const SystemModel& model, int first_frame) {
  FilterState s;
  s.density = MultiObjectDensity::empty(first_frame - 1);
  const auto& cm = model.clutter;
  if (cm.unknown && cm.survival < 1.0) s.bank.generators = cm.birth / (1.0 - cm.survival);
  return s;
}

namespace {

/// Run f(i) for i in [0, n), optionally on the OpenMP pool. Exceptions are
/// rethrown after the loop, first index first.
template <class F>
void for_each_index(std::size_t n, bool parallel, F&& f) {
  std::vector<std::exception_ptr> errs(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long i = 0; i < count; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      errs[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
}

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

struct Child {
  double log_weight = kNegInf;
  std::vector<BlockPtr> blocks;
  std::vector<std::pair<Label, int>> assignments;
  std::vector<int> used;  // 1-based measurement indices
};

/// Child of a GLMB hypothesis built from per-row plans.
Child row_child(double log_weight, const std::vector<const RowPlan*>& plans, const ExtendedAssociationMap& g, int M,
                bool joint) {
  Child c;
  c.log_weight = log_weight;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& p = *plans[i];
    const auto& t = g.rows[i];
    const int cand = candidate_index(M, t);
    const auto it = std::lower_bound(p.candidates.begin(), p.candidates.end(), cand);
    if (it == p.candidates.end() || *it != cand) {
      c.log_weight = kNegInf;
      return c;
    }
    const auto k = static_cast<std::size_t>(it - p.candidates.begin());
    c.log_weight += joint ? p.log_joint[k] : p.log_pa[k];
    const auto& post = joint ? p.post_joint[k] : p.post_pa[k];
    if (is_division(t)) {
      for (int q = 0; q < 2; ++q) {
        c.blocks.push_back(post[static_cast<std::size_t>(q)]);
        c.assignments.emplace_back(post[static_cast<std::size_t>(q)]->labels()[0], t[static_cast<std::size_t>(q)]);
        if (t[static_cast<std::size_t>(q)] > 0) c.used.push_back(t[static_cast<std::size_t>(q)]);
      }
    } else if (is_survival(t)) {
      c.blocks.push_back(post[0]);
      c.assignments.emplace_back(p.label, t[2]);
      if (t[2] > 0) c.used.push_back(t[2]);
    }
  }
  return c;
}

struct BlockOutcome {
  double log_weight = 0.0;
  BlockPtr block;
  std::vector<std::pair<Label, int>> assignments;
};

/// Exact prediction and update of one joint block under per-label events.
BlockOutcome ef_block_update(const ObjectBlock& b, const std::vector<Triplet>& ev, const StepContext& ctx,
                             int max_dims) {
  const auto& m = *ctx.model;
  const auto& Z = ctx.frame->detections;
  const int D = b.kinematics.dim_per_label;
  BlockOutcome out;
  std::vector<std::vector<AffineGaussianModel>> per(b.size());
  std::vector<int> out_rows(b.size(), 0);
  std::vector<Label> labels;
  std::vector<CategoricalMode> modes;
  std::vector<BetaDensity> dets;
  std::vector<std::pair<int, const Detection*>> detected;

  auto emit = [&](const Label& l, const CategoricalMode& mode, const BetaDensity& det, int j) {
    const Detection* z = j > 0 ? &Z[static_cast<std::size_t>(j - 1)] : nullptr;
    out.log_weight += log_nonkinematic(j, z, mode, det, m.sensor, ctx.log_kappa);
    CategoricalMode mp = mode;
    BetaDensity dp;
    if (z) {
      log_appearance_factor(*z, mode, m.sensor.appearance, &mp);
      dp = beta_update_detected(det).posterior;
      detected.emplace_back(static_cast<int>(labels.size()), z);
    } else {
      dp = beta_update_missed(det).posterior;
    }
    labels.push_back(l);
    modes.push_back(mp);
    dets.push_back(dp);
    out.assignments.emplace_back(l, j);
  };

  for (std::size_t i = 0; i < b.size(); ++i) {
    const Label& l = b.labels()[i];
    const auto rho = generation_cardinality(b.modes[i], m.modes);
    const auto& t = ev[i];
    if (is_death(t)) {
      out.log_weight += rho[0] > 0.0 ? std::log(rho[0]) : kNegInf;
      AffineGaussianModel drop;
      drop.F = Mat::Zero(0, D);
      drop.offset = Vec::Zero(0);
      drop.Q = Mat::Zero(0, 0);
      per[i] = {drop};
    } else if (is_survival(t)) {
      out.log_weight += rho[1] > 0.0 ? std::log(rho[1]) : kNegInf;
      emit(l, survival_mode(b.modes[i], m.modes), beta_detection_predict(b.detections[i], m.beta_inflation), t[2]);
      per[i] = m.motion.components;
      out_rows[i] = D;
    } else {
      out.log_weight += rho[2] > 0.0 ? std::log(rho[2]) : kNegInf;
      const auto kids = generated_label_set(l, 2, ctx.time);
      const auto dm = daughter_mode(b.modes[i], m.modes);
      emit(kids[0], dm, b.detections[i], t[0]);
      emit(kids[1], dm, b.detections[i], t[1]);
      per[i] = mitosis_models(m.mitosis, gm_marginalize(b.kinematics, l));
      out_rows[i] = 2 * D;
    }
  }
  if (out.log_weight == kNegInf || labels.empty()) return out;
  const int out_dim = static_cast<int>(labels.size()) * D;
  if (out_dim > max_dims)
    throw CapacityError("joint block needs " + std::to_string(out_dim) + " state dimensions, limit is " +
                        std::to_string(max_dims));

  // Cartesian product of the per-label transition models.
  const int in_dim = static_cast<int>(b.size()) * D;
  std::vector<AffineGaussianModel> combos;
  std::vector<std::size_t> pick(b.size(), 0);
  while (true) {
    AffineGaussianModel c;
    c.F = Mat::Zero(out_dim, in_dim);
    c.offset = Vec::Zero(out_dim);
    c.Q = Mat::Zero(out_dim, out_dim);
    int r = 0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto& a = per[i][pick[i]];
      c.weight *= a.weight;
      if (out_rows[i] == 0) continue;
      c.F.block(r, static_cast<int>(i) * D, out_rows[i], D) = a.F;
      if (a.offset.size() > 0) c.offset.segment(r, out_rows[i]) = a.offset;
      c.Q.block(r, r, out_rows[i], out_rows[i]) = a.Q;
      r += out_rows[i];
    }
    combos.push_back(std::move(c));
    std::size_t i = 0;
    while (i < b.size() && ++pick[i] == per[i].size()) pick[i++] = 0;
    if (i == b.size()) break;
  }
  const auto pred = gm_predict(b.kinematics.mixture, combos, m.reduction);
  auto ju = joint_kinematic_update(pred, D, detected, m.sensor, m.reduction);
  out.log_weight += ju.log_likelihood;
  auto blk = std::make_shared<ObjectBlock>();
  blk->kinematics = {std::move(labels), D, std::move(ju.posterior)};
  blk->modes = std::move(modes);
  blk->detections = std::move(dets);
  std::uint64_t sig = 0;
  for (const auto& t : ev)
    for (int v : t) sig = hash_combine(sig, static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
  blk->id = derive_seed(b.id, sig, static_cast<std::uint64_t>(ctx.time));
  out.block = std::move(blk);
  return out;
}

struct StepInputs {
  const StepContext* ctx;
  const FilterConfig* cfg;
  const std::unordered_map<std::uint64_t, std::size_t>* where;
  const std::vector<RowPlanPtr>* plans;
  const std::vector<RowPlanPtr>* birth_plans;
  double log_norm;
};

std::uint64_t row_key(const ObjectBlock& b, std::size_t i) { return hash_combine(b.id, static_cast<std::uint64_t>(i)); }

std::vector<Child> expand(const Hypothesis& h, std::size_t hi, const StepInputs& in) {
  const auto& ctx = *in.ctx;
  const auto& cfg = *in.cfg;
  const int M = static_cast<int>(ctx.frame->detections.size());
  std::vector<const RowPlan*> plans;
  plans.reserve(h.labels.size() + in.birth_plans->size());
  for (const auto& l : h.labels) {
    const auto [b, i] = h.locate(l);
    const auto key = row_key(*h.blocks[static_cast<std::size_t>(b)], static_cast<std::size_t>(i));
    plans.push_back((*in.plans)[in.where->at(key)].get());
  }
  for (const auto& p : *in.birth_plans) plans.push_back(p.get());

  CostTable ct;
  ct.M = M;
  ct.log_weight = h.log_weight;
  for (const auto* p : plans) ct.rows.push_back(to_cost_row(*p, false));

  std::vector<ExtendedAssociationMap> gammas;
  if (cfg.enumerate) {
    gammas = enumerate_gamma(ct, cfg.enumerate_limit);
  } else {
    const double share = std::exp(h.log_weight - in.log_norm);
    const auto T = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(static_cast<double>(cfg.gibbs_samples) * share - 1e-12)));
    gammas = gibbs_sample(ct, default_gamma(ct), T,
                          derive_seed(cfg.seed, static_cast<std::uint64_t>(ctx.time), static_cast<std::uint64_t>(hi)));
  }

  std::vector<Child> out;
  out.reserve(gammas.size());
  if (cfg.variant != Variant::EF) {
    for (const auto& g : gammas) {
      auto c = row_child(h.log_weight, plans, g, M, cfg.variant == Variant::UA);
      if (c.log_weight != kNegInf) out.push_back(std::move(c));
    }
    return out;
  }

  // Exact reweighting over joint blocks. Row i of the table is h.labels[i].
  std::vector<std::vector<std::size_t>> block_rows(h.blocks.size());
  for (std::size_t b = 0; b < h.blocks.size(); ++b)
    for (const auto& l : h.blocks[b]->labels()) {
      const auto it = std::lower_bound(h.labels.begin(), h.labels.end(), l);
      block_rows[b].push_back(static_cast<std::size_t>(it - h.labels.begin()));
    }
  std::map<std::pair<std::size_t, std::vector<Triplet>>, BlockOutcome> memo;
  const std::size_t P = h.labels.size();
  for (const auto& g : gammas) {
    Child c;
    c.log_weight = h.log_weight;
    for (std::size_t b = 0; b < h.blocks.size() && c.log_weight != kNegInf; ++b) {
      std::vector<Triplet> ev;
      for (auto r : block_rows[b]) ev.push_back(g.rows[r]);
      auto key = std::make_pair(b, ev);
      auto it = memo.find(key);
      if (it == memo.end())
        it = memo.emplace(std::move(key), ef_block_update(*h.blocks[b], ev, ctx, cfg.max_joint_dims)).first;
      const auto& o = it->second;
      c.log_weight += o.log_weight;
      if (o.block) c.blocks.push_back(o.block);
      for (const auto& a : o.assignments) {
        c.assignments.push_back(a);
        if (a.second > 0) c.used.push_back(a.second);
      }
    }
    if (c.log_weight == kNegInf) continue;
    // Birth rows keep their single-object form.
    std::vector<const RowPlan*> bp(plans.begin() + static_cast<std::ptrdiff_t>(P), plans.end());
    ExtendedAssociationMap gb;
    gb.rows.assign(g.rows.begin() + static_cast<std::ptrdiff_t>(P), g.rows.end());
    auto births = row_child(0.0, bp, gb, M, false);
    if (births.log_weight == kNegInf) continue;
    c.log_weight += births.log_weight;
    c.blocks.insert(c.blocks.end(), births.blocks.begin(), births.blocks.end());
    c.assignments.insert(c.assignments.end(), births.assignments.begin(), births.assignments.end());
    c.used.insert(c.used.end(), births.used.begin(), births.used.end());
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

FilterState filter_step(const FilterState& state, const DetectionFrame& frame, const SystemModel& model,
                        const FilterConfig& cfg, StepDiagnostics* diag) {
  cfg.validate();
  const int t = frame.frame;
  if (t <= state.density.frame)
    throw InvalidArgument("frame " + std::to_string(t) + " does not follow frame " +
                          std::to_string(state.density.frame));
  const int M = static_cast<int>(frame.detections.size());
  const bool par = cfg.execution == Execution::Parallel;

  ClutterBank bank = state.bank;
  double clutter_mass = model.clutter.rate;
  if (model.clutter.unknown) {
    bank = state.bank.predict(model.clutter);
    clutter_mass = std::max(bank.expected_detections(model.clutter), 1e-3);
  }
  const StepContext ctx{&model, &frame, t, uniform_log_kappa(clutter_mass, model.bounds),
                        cfg.variant == Variant::UA};
  const auto births = model.births_at(t, state.prev_frame ? &*state.prev_frame : nullptr, state.prev_assoc);

  // One row plan per distinct prior object, shared by all hypotheses holding it.
  struct RowSource {
    std::uint64_t key;
    const ObjectBlock* block;
    std::size_t index;
  };
  std::vector<RowSource> sources;
  std::unordered_map<std::uint64_t, std::size_t> where;
  const auto& hs = state.density.hypotheses;
  for (const auto& h : hs)
    for (const auto& b : h.blocks)
      for (std::size_t i = 0; i < b->size(); ++i) {
        const auto key = row_key(*b, i);
        if (where.emplace(key, sources.size()).second) sources.push_back({key, b.get(), i});
      }
  std::vector<RowPlanPtr> plans(sources.size());
  for_each_index(sources.size(), par, [&](std::size_t u) {
    const auto& s = sources[u];
    plans[u] = plan_prior_row(s.block->labels()[s.index], s.block->marginal(s.index), s.key, ctx);
  });
  std::vector<RowPlanPtr> birth_plans(births.entries.size());
  for_each_index(births.entries.size(), par,
                 [&](std::size_t u) { birth_plans[u] = plan_birth_row(births.entries[u], ctx); });

  double log_norm = kNegInf;
  for (const auto& h : hs) log_norm = log_add(log_norm, h.log_weight);
  const StepInputs in{&ctx, &cfg, &where, &plans, &birth_plans, log_norm};
  std::vector<std::vector<Child>> children(hs.size());
  for_each_index(hs.size(), par, [&](std::size_t hi) { children[hi] = expand(hs[hi], hi, in); });

  // Merge children holding the same posterior blocks; the first keeps its history.
  MultiObjectDensity out;
  out.frame = t;
  std::vector<std::vector<std::uint64_t>> keys;
  std::vector<std::vector<int>> used;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> index;
  std::size_t n_children = 0;
  for (std::size_t hi = 0; hi < hs.size(); ++hi) {
    for (auto& c : children[hi]) {
      ++n_children;
      std::vector<std::uint64_t> ids;
      ids.reserve(c.blocks.size());
      for (const auto& b : c.blocks) ids.push_back(b->id);
      std::sort(ids.begin(), ids.end());
      std::uint64_t hk = ids.size();
      for (auto id : ids) hk = hash_combine(hk, id);
      auto& bucket = index[hk];
      bool merged = false;
      for (auto k : bucket) {
        if (keys[k] != ids) continue;
        out.hypotheses[k].log_weight = log_add(out.hypotheses[k].log_weight, c.log_weight);
        merged = true;
        break;
      }
      if (merged) continue;
      bucket.push_back(out.hypotheses.size());
      Hypothesis nh;
      nh.log_weight = c.log_weight;
      nh.blocks = std::move(c.blocks);
      nh.refresh_labels();
      nh.history_id = hk;
      auto step = std::make_shared<AssociationStep>();
      step->frame = t;
      step->assignments = std::move(c.assignments);
      step->prev = hs[hi].history;
      nh.history = std::move(step);
      out.hypotheses.push_back(std::move(nh));
      keys.push_back(std::move(ids));
      used.push_back(std::move(c.used));
    }
  }
  children.clear();
  normalize(out);

  std::vector<double> target(static_cast<std::size_t>(M), 0.0);
  for (std::size_t k = 0; k < out.hypotheses.size(); ++k) {
    const double w = std::exp(out.hypotheses[k].log_weight);
    for (int j : used[k]) target[static_cast<std::size_t>(j - 1)] += w;
  }
  for (auto& p : target) p = std::min(p, 1.0);

  if (diag) {
    diag->children = n_children;
    diag->target_prob = target;
    diag->clutter_intensity_mass = clutter_mass;
    if (diag->keep_pre_truncation) diag->pre_truncation = out;
  }
  truncate(out, cfg.max_hypotheses, cfg.weight_floor);
  if (model.clutter.unknown) bank = bank.update(model.clutter, target);

  FilterState next;
  next.density = std::move(out);
  next.bank = bank;
  next.prev_frame = frame;
  next.prev_assoc = std::move(target);
  return next;
}

namespace {

MultiObjectDensity density_step(const MultiObjectDensity& d, const DetectionFrame& frame, const SystemModel& model,
                                const FilterConfig& cfg, Variant v) {
  auto s = FilterState::initial(model, d.frame + 1);
  s.density = d;
  FilterConfig c = cfg;
  c.variant = v;
  return filter_step(s, frame, model, c).density;
}

}  // namespace

MultiObjectDensity pa_step(const MultiObjectDensity& d, const DetectionFrame& frame, const SystemModel& model,
                           const FilterConfig& cfg) {
  if (!d.is_glmb()) throw InvalidArgument("pa_step needs a density with single-object blocks");
  return density_step(d, frame, model, cfg, Variant::PA);
}

MultiObjectDensity ua_step(const MultiObjectDensity& d, const DetectionFrame& frame, const SystemModel& model,
                           const FilterConfig& cfg) {
  if (!d.is_glmb()) throw InvalidArgument("ua_step needs a density with single-object blocks");
  return density_step(d, frame, model, cfg, Variant::UA);
}

MultiObjectDensity ef_step(const MultiObjectDensity& d, const DetectionFrame& frame, const SystemModel& model,
                           const FilterConfig& cfg) {
  return density_step(d, frame, model, cfg, Variant::EF);
}

RunResult run_sequence(const std::vector<DetectionFrame>& frames, const SystemModel& model, const FilterConfig& cfg) {
  RunResult r;
  if (frames.empty()) return r;
  model.validate();
  auto state = FilterState::initial(model, frames.front().frame);
  for (const auto& f : frames) {
    const auto t0 = std::chrono::steady_clock::now();
    state = filter_step(state, f, model, cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    FrameSummary s;
    s.frame = f.frame;
    s.estimate = extract_estimate(state.density);
    s.cardinality = cardinality_distribution(state.density);
    double m1 = 0.0, m2 = 0.0;
    for (std::size_t n = 0; n < s.cardinality.size(); ++n) {
      m1 += static_cast<double>(n) * s.cardinality[n];
      m2 += static_cast<double>(n * n) * s.cardinality[n];
    }
    s.cardinality_mean = m1;
    s.cardinality_std = std::sqrt(std::max(0.0, m2 - m1 * m1));
    s.spawn = spawning_and_division_counts(state.density);
    s.clutter_estimate = model.clutter.unknown ? state.bank.estimated_clutter(model.clutter) : model.clutter.rate;
    double pd = 0.0, mass = 0.0;
    for (const auto& h : state.density.hypotheses) {
      const double w = std::exp(h.log_weight);
      for (const auto& b : h.blocks)
        for (const auto& d : b->detections) {
          pd += w * d.mean();
          mass += w;
        }
    }
    s.mean_detection = mass > 0.0 ? pd / mass : std::nan("");
    s.hypotheses = state.density.hypotheses.size();
    s.seconds = secs;
    for (const auto& o : s.estimate.objects) r.tracks.add(o.label, f.frame, o.mean.head(model.position_dims));
    log_event(LogLevel::Info, "frame",
              {{"frame", f.frame},
               {"detections", f.detections.size()},
               {"hypotheses", s.hypotheses},
               {"cardinality_mean", s.cardinality_mean},
               {"seconds", secs}});
    r.frames.push_back(std::move(s));
  }
  return r;
}

}  // namespace celltrack
