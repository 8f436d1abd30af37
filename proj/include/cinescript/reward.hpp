#pragma once

#include <span>
#include <vector>

#include "cinescript/json.hpp"
#include "cinescript/script.hpp"
#include "cinescript/verify.hpp"

namespace cine {

// The four normalized structural components, in fixed report order.
struct StructuralComponents {
  double format_compliance = 0.0;
  double dialogue_completeness = 0.0;
  double scene_and_character_consistency = 0.0;  // mean of the two checks
  double physical_rationality = 0.0;

  double mean() const {
    return (format_compliance + dialogue_completeness +
            scene_and_character_consistency + physical_rationality) /
           4.0;
  }
};

struct StructuralReward {
  double r_structure = 0.0;  // unweighted mean of components
  StructuralComponents components;
};

// Structural score from the verification report plus format validity.
// format_compliance is 1 for a valid document, else the fraction of intact
// field slots.
StructuralReward structural_reward(const VerificationReport& report,
                                   const FormatReport& format);

// r_total = alpha * r_structure + (1 - alpha) * r_human.  All inputs must
// lie in [0, 1].
double hybrid_reward(double r_structure, double r_human, double alpha);

struct RewardBreakdown {
  StructuralComponents components;
  double r_structure = 0.0;
  double r_human = 0.0;
  double alpha = 0.0;
  double r_total = 0.0;
};

RewardBreakdown reward_breakdown(const VerificationReport& report,
                                 const FormatReport& format, double r_human,
                                 double alpha);

struct GroupAdvantages {
  std::vector<double> rewards;
  double mean = 0.0;
  double stddev = 0.0;  // population (divide by K)
  double epsilon = 0.0;
  std::vector<double> advantages;  // (r_k - mean) / (stddev + epsilon)
};

// Group-normalized advantages over K >= 2 rewards.  epsilon >= 0; the zero
// value exists for scale-covariance checks, and a fully degenerate
// denominator (constant rewards, epsilon = 0) yields all-zero advantages.
GroupAdvantages group_advantages(std::span<const double> rewards,
                                 double epsilon = 1e-8);

struct GrpoTerms {
  std::vector<double> advantages;
  std::vector<double> sequence_logprobs;
  double kl_estimate = 0.0;
  double beta = 0.04;
};

// (1/K) sum A_k * logprob_k - beta * kl_estimate.
double grpo_objective(const GrpoTerms& terms);

// -sum of per-token log-probabilities (each <= 0).
double sft_loss(std::span<const double> token_logprobs);

Json reward_breakdown_json(const RewardBreakdown& breakdown);
Json group_advantages_json(const GroupAdvantages& group);

}  // namespace cine
