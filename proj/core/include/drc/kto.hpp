#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "drc/corpus.hpp"

namespace drc::kto {

struct KtoConfig {
  double beta = 0.1;
  double lambda_desired = 1.7;
  double lambda_undesired = 1.0;
  double lambda_y = 1.0;

  void validate() const;
};

struct KtoExample {
  double policy_logprob = 0.0;  // log pi_theta(y|x), summed over tokens
  double ref_logprob = 0.0;     // log pi_ref(y|x)
  Label label = Label::kDesired;
};

double sigmoid(double x) noexcept;

/// log(pi_theta / pi_ref) = policy_logprob - ref_logprob.
double reward(const KtoExample& example) noexcept;

/// KL reference point from rewards on mismatched prompt/completion pairs:
/// max(0, mean).
double kl_reference_point(std::span<const double> mismatched_rewards);

/// desired:   lambda_D * sigmoid(beta * (r - z0))
/// undesired: lambda_U * sigmoid(beta * (z0 - r))
double kto_value(double r, double z0, Label label, const KtoConfig& cfg);

/// Mean of (lambda_y - v) over the batch.
double kto_loss(std::span<const KtoExample> batch, double z0,
                const KtoConfig& cfg);

struct LambdaCheck {
  double ratio = 0.0;
  bool ok = false;
  /// lambda_desired values satisfying the constraint for the given counts.
  std::pair<double, double> lambda_desired_range;
};

/// ratio = lambda_D * n_D / (lambda_U * n_U), ok iff 1 <= ratio <= 4/3.
LambdaCheck check_lambda_constraint(const KtoConfig& cfg, std::size_t n_desired,
                                    std::size_t n_undesired);

/// Line-delimited {"policy_logprob","ref_logprob","label"}.
std::vector<KtoExample> load_examples(const std::filesystem::path& path);

}  // namespace drc::kto
