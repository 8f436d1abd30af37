#include "cinescript/reward.hpp"

#include <cmath>

#include "cinescript/errors.hpp"

namespace cine {

namespace {

void require_unit_range(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))  // also rejects NaN
    throw Error(ErrorCode::RangeError,
                std::string(name) + " must lie in [0, 1]");
}

}  // namespace

StructuralReward structural_reward(const VerificationReport& report,
                                   const FormatReport& format) {
  StructuralReward out;
  if (format.is_valid) {
    out.components.format_compliance = 1.0;
  } else {
    double checked = static_cast<double>(format.fields_checked);
    double broken = static_cast<double>(format.missing_fields.size() +
                                        format.malformed_entries.size());
    out.components.format_compliance =
        checked > 0.0 ? std::max(0.0, (checked - broken) / checked) : 0.0;
  }
  out.components.dialogue_completeness = report.results[0].pass_fraction;
  out.components.scene_and_character_consistency =
      (report.results[1].pass_fraction + report.results[2].pass_fraction) / 2.0;
  out.components.physical_rationality = report.results[3].pass_fraction;
  out.r_structure = out.components.mean();
  return out;
}

double hybrid_reward(double r_structure, double r_human, double alpha) {
  require_unit_range(r_structure, "r_structure");
  require_unit_range(r_human, "r_human");
  require_unit_range(alpha, "alpha");
  return alpha * r_structure + (1.0 - alpha) * r_human;
}

RewardBreakdown reward_breakdown(const VerificationReport& report,
                                 const FormatReport& format, double r_human,
                                 double alpha) {
  StructuralReward s = structural_reward(report, format);
  RewardBreakdown out;
  out.components = s.components;
  out.r_structure = s.r_structure;
  out.r_human = r_human;
  out.alpha = alpha;
  out.r_total = hybrid_reward(s.r_structure, r_human, alpha);
  return out;
}

GroupAdvantages group_advantages(std::span<const double> rewards,
                                 double epsilon) {
  if (rewards.size() < 2)
    throw Error(ErrorCode::DegenerateGroup,
                "need at least 2 rewards, got " +
                    std::to_string(rewards.size()));
  if (!(epsilon >= 0.0))
    throw Error(ErrorCode::RangeError, "epsilon must be non-negative");

  GroupAdvantages out;
  out.rewards.assign(rewards.begin(), rewards.end());
  out.epsilon = epsilon;

  const double k = static_cast<double>(rewards.size());
  double sum = 0.0;
  for (double r : rewards) sum += r;
  out.mean = sum / k;

  double sq = 0.0;
  for (double r : rewards) sq += (r - out.mean) * (r - out.mean);
  out.stddev = std::sqrt(sq / k);

  double denom = out.stddev + epsilon;
  out.advantages.reserve(rewards.size());
  for (double r : rewards)
    // A constant group with epsilon = 0 has no scale; its advantages are 0.
    out.advantages.push_back(denom > 0.0 ? (r - out.mean) / denom : 0.0);
  return out;
}

double grpo_objective(const GrpoTerms& terms) {
  if (terms.advantages.size() != terms.sequence_logprobs.size())
    throw Error(ErrorCode::LengthMismatch,
                "advantages and sequence_logprobs differ in length");
  if (terms.advantages.empty())
    throw Error(ErrorCode::DegenerateGroup, "empty group");
  if (!(terms.kl_estimate >= 0.0))
    throw Error(ErrorCode::RangeError, "kl_estimate must be non-negative");

  double sum = 0.0;
  for (size_t i = 0; i < terms.advantages.size(); ++i)
    sum += terms.advantages[i] * terms.sequence_logprobs[i];
  return sum / static_cast<double>(terms.advantages.size()) -
         terms.beta * terms.kl_estimate;
}

double sft_loss(std::span<const double> token_logprobs) {
  double sum = 0.0;
  for (double lp : token_logprobs) {
    if (lp > 0.0)
      throw Error(ErrorCode::RangeError,
                  "log-probabilities must be <= 0, got " + std::to_string(lp));
    sum += lp;
  }
  return 0.0 - sum;  // keeps the all-zero case at +0.0
}

Json reward_breakdown_json(const RewardBreakdown& b) {
  Json components = Json::object();
  components["format_compliance"] = b.components.format_compliance;
  components["dialogue_completeness"] = b.components.dialogue_completeness;
  components["scene_and_character_consistency"] =
      b.components.scene_and_character_consistency;
  components["physical_rationality"] = b.components.physical_rationality;
  Json out = Json::object();
  out["components"] = std::move(components);
  out["r_structure"] = b.r_structure;
  out["r_human"] = b.r_human;
  out["alpha"] = b.alpha;
  out["r_total"] = b.r_total;
  return out;
}

Json group_advantages_json(const GroupAdvantages& g) {
  Json out = Json::object();
  out["rewards"] = g.rewards;
  out["mean"] = g.mean;
  out["std"] = g.stddev;
  out["epsilon"] = g.epsilon;
  out["advantages"] = g.advantages;
  return out;
}

}  // namespace cine
