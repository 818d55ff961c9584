#include "celltrack/costs.hpp"

#include <cmath>
#include <limits>

#include "celltrack/errors.hpp"
#include "celltrack/hashing.hpp"

namespace celltrack {

namespace {

double safe_log(double x) { return x > 0.0 ? std::log(x) : kNegInf; }

bool gated_out(const GaussianMixture& kin, const Detection& z, const SensorModel& sm) {
  if (!std::isfinite(sm.gate)) return false;
  return gm_min_mahalanobis2(kin, sm.H, sm.R, z.position) >= sm.gate;
}

struct Option {
  int j;
  PsiResult psi;
};

std::vector<Option> options_for(const HybridDensity& hd, const StepContext& ctx) {
  const auto& m = *ctx.model;
  const auto& Z = ctx.frame->detections;
  std::vector<Option> out;
  for (int j = 0; j <= static_cast<int>(Z.size()); ++j) {
    const Detection* z = j > 0 ? &Z[static_cast<std::size_t>(j - 1)] : nullptr;
    if (z && gated_out(hd.kinematics, *z, m.sensor)) continue;
    auto ps = psi(j, z, hd, m.sensor, ctx.log_kappa, m.reduction);
    if (ps.log_value == kNegInf) continue;
    out.push_back({j, std::move(ps)});
  }
  return out;
}

}  // namespace

double log_nonkinematic(int j, const Detection* z, const CategoricalMode& mode, const BetaDensity& det,
                        const SensorModel& sm, double log_kappa) {
  if (j == 0) return safe_log(beta_update_missed(det).factor);
  return safe_log(beta_update_detected(det).factor) + log_appearance_factor(*z, mode, sm.appearance) - log_kappa;
}

double uniform_log_kappa(double expected_clutter, const ImageBounds& bounds) {
  return std::log(expected_clutter / bounds.area());
}

JointKinUpdate joint_kinematic_update(const GaussianMixture& joint, int dim_per_label,
                                      const std::vector<std::pair<int, const Detection*>>& detected,
                                      const SensorModel& sm, const ReductionConfig& red) {
  if (detected.empty()) return {0.0, joint};
  const int zd = static_cast<int>(sm.H.rows());
  const int m = static_cast<int>(detected.size());
  Mat H = Mat::Zero(m * zd, joint.dim());
  Mat R = Mat::Zero(m * zd, m * zd);
  Vec z(m * zd);
  for (int k = 0; k < m; ++k) {
    const auto [slot, det] = detected[static_cast<std::size_t>(k)];
    H.block(k * zd, slot * dim_per_label, zd, dim_per_label) = sm.H;
    R.block(k * zd, k * zd, zd, zd) = sm.R;
    z.segment(k * zd, zd) = det->position;
  }
  auto up = gm_update(joint, H, R, z, red);
  return {up.log_likelihood, std::move(up.posterior)};
}

RowPlanPtr plan_prior_row(const Label& label, const HybridDensity& hd, std::uint64_t key, const StepContext& ctx) {
  const auto& m = *ctx.model;
  const auto& Z = ctx.frame->detections;
  const int M = static_cast<int>(Z.size());
  auto plan = std::make_shared<RowPlan>(RowPlan{label, false, {}, {}, {}, {}, {}});
  auto push = [&](int cand, double lpa, double lj, std::array<BlockPtr, 2> ppa, std::array<BlockPtr, 2> pj) {
    plan->candidates.push_back(cand);
    plan->log_pa.push_back(lpa);
    plan->log_joint.push_back(lj);
    plan->post_pa.push_back(std::move(ppa));
    plan->post_joint.push_back(std::move(pj));
  };
  auto block_id = [&](int cand, int q, int variant) {
    return derive_seed(key, static_cast<std::uint64_t>(cand) * 4 + static_cast<std::uint64_t>(q),
                       static_cast<std::uint64_t>(ctx.time) * 2 + static_cast<std::uint64_t>(variant));
  };

  const auto rho = generation_cardinality(hd.mode, m.modes);
  if (rho[0] > 0.0) push(0, std::log(rho[0]), std::log(rho[0]), {}, {});

  if (rho[1] > 0.0) {
    const auto sp = survival_predict(hd, m.motion, m.modes, m.beta_inflation, m.reduction);
    for (auto& o : options_for(sp, ctx)) {
      const int cand = o.j + 1;
      auto b = make_single_block(label, std::move(o.psi.posterior), block_id(cand, 0, 0));
      const double l = std::log(rho[1]) + o.psi.log_value;
      push(cand, l, l, {b, nullptr}, {b, nullptr});
    }
  }

  if (rho[2] > 0.0) {
    const auto spn = spawn_predict_joint(hd, label, ctx.time, m.mitosis, m.modes, m.reduction);
    const auto& kids = spn.joint.labels;
    std::array<HybridDensity, 2> dq;
    std::array<std::vector<Option>, 2> opts;
    for (int q = 0; q < 2; ++q) {
      dq[q] = {gm_marginalize(spn.joint, kids[static_cast<std::size_t>(q)]), spn.daughter_mode,
               spn.daughter_detection};
      opts[q] = options_for(dq[q], ctx);
    }
    for (const auto& o1 : opts[0]) {
      for (const auto& o2 : opts[1]) {
        if (o1.j == o2.j && o1.j > 0) continue;
        const int cand = M + 2 + o1.j * (M + 1) + o2.j;
        const double lpa = std::log(rho[2]) + o1.psi.log_value + o2.psi.log_value;
        std::array<BlockPtr, 2> ppa{make_single_block(kids[0], o1.psi.posterior, block_id(cand, 0, 0)),
                                    make_single_block(kids[1], o2.psi.posterior, block_id(cand, 1, 0))};
        if (!ctx.need_joint || (o1.j == 0 && o2.j == 0)) {
          push(cand, lpa, lpa, ppa, ppa);
          continue;
        }
        std::vector<std::pair<int, const Detection*>> det;
        if (o1.j > 0) det.push_back({0, &Z[static_cast<std::size_t>(o1.j - 1)]});
        if (o2.j > 0) det.push_back({1, &Z[static_cast<std::size_t>(o2.j - 1)]});
        auto ju = joint_kinematic_update(spn.joint.mixture, spn.joint.dim_per_label, det, m.sensor, m.reduction);
        double lj = lpa;
        if (o1.j > 0 && o2.j > 0) {
          lj = std::log(rho[2]) + ju.log_likelihood +
               log_nonkinematic(o1.j, det[0].second, dq[0].mode, dq[0].detection, m.sensor, ctx.log_kappa) +
               log_nonkinematic(o2.j, det[1].second, dq[1].mode, dq[1].detection, m.sensor, ctx.log_kappa);
        }
        JointGaussianMixture post{kids, spn.joint.dim_per_label, std::move(ju.posterior)};
        HybridDensity h1{gm_marginalize(post, kids[0]), o1.psi.posterior.mode, o1.psi.posterior.detection};
        HybridDensity h2{gm_marginalize(post, kids[1]), o2.psi.posterior.mode, o2.psi.posterior.detection};
        push(cand, lpa, lj, ppa,
             {make_single_block(kids[0], std::move(h1), block_id(cand, 0, 1)),
              make_single_block(kids[1], std::move(h2), block_id(cand, 1, 1))});
      }
    }
  }
  return plan;
}

RowPlanPtr plan_birth_row(const BirthEntry& entry, const StepContext& ctx) {
  auto plan = std::make_shared<RowPlan>(RowPlan{entry.label, true, {}, {}, {}, {}, {}});
  if (entry.r < 1.0) {
    const double l = std::log1p(-entry.r);
    plan->candidates.push_back(0);
    plan->log_pa.push_back(l);
    plan->log_joint.push_back(l);
    plan->post_pa.push_back({});
    plan->post_joint.push_back({});
  }
  if (entry.r > 0.0) {
    for (auto& o : options_for(entry.density, ctx)) {
      const int cand = o.j + 1;
      const double l = std::log(entry.r) + o.psi.log_value;
      auto b = make_single_block(entry.label, std::move(o.psi.posterior),
                                 derive_seed(entry.label.hash(), static_cast<std::uint64_t>(cand),
                                             static_cast<std::uint64_t>(ctx.time)));
      plan->candidates.push_back(cand);
      plan->log_pa.push_back(l);
      plan->log_joint.push_back(l);
      plan->post_pa.push_back({b, nullptr});
      plan->post_joint.push_back({b, nullptr});
    }
  }
  return plan;
}

CostRow to_cost_row(const RowPlan& plan, bool joint) {
  return {plan.label, plan.birth, plan.candidates, joint ? plan.log_joint : plan.log_pa};
}

CostTable build_cost_table(const Hypothesis& h, const BirthModel& births, const StepContext& ctx, bool joint) {
  CostTable ct;
  ct.M = static_cast<int>(ctx.frame->detections.size());
  ct.log_weight = h.log_weight;
  for (const auto& l : h.labels) {
    const auto [b, i] = h.locate(l);
    const auto& blk = *h.blocks[static_cast<std::size_t>(b)];
    const auto plan = plan_prior_row(l, blk.marginal(static_cast<std::size_t>(i)),
                                     hash_combine(blk.id, static_cast<std::uint64_t>(i)), ctx);
    ct.rows.push_back(to_cost_row(*plan, joint));
  }
  for (const auto& e : births.entries) ct.rows.push_back(to_cost_row(*plan_birth_row(e, ctx), joint));
  return ct;
}

}  // namespace celltrack
