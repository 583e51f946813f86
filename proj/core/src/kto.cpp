#include "drc/kto.hpp"

#include <cmath>

#include "drc/error.hpp"

namespace drc::kto {

void KtoConfig::validate() const {
  if (!(beta > 0) || !(lambda_desired > 0) || !(lambda_undesired > 0) ||
      !(lambda_y > 0)) {
    throw ConfigError("KTO beta and lambdas must all be positive");
  }
}

double sigmoid(double x) noexcept {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double reward(const KtoExample& example) noexcept {
  return example.policy_logprob - example.ref_logprob;
}

double kl_reference_point(std::span<const double> mismatched_rewards) {
  if (mismatched_rewards.empty()) {
    throw PreconditionError("KL reference point needs at least one reward");
  }
  double sum = 0.0;
  for (double r : mismatched_rewards) sum += r;
  return std::max(0.0, sum / static_cast<double>(mismatched_rewards.size()));
}

double kto_value(double r, double z0, Label label, const KtoConfig& cfg) {
  if (label == Label::kDesired) {
    return cfg.lambda_desired * sigmoid(cfg.beta * (r - z0));
  }
  return cfg.lambda_undesired * sigmoid(cfg.beta * (z0 - r));
}

double kto_loss(std::span<const KtoExample> batch, double z0,
                const KtoConfig& cfg) {
  if (batch.empty()) throw PreconditionError("KTO loss of an empty batch");
  double sum = 0.0;
  for (const auto& ex : batch) {
    sum += cfg.lambda_y - kto_value(reward(ex), z0, ex.label, cfg);
  }
  return sum / static_cast<double>(batch.size());
}

LambdaCheck check_lambda_constraint(const KtoConfig& cfg, std::size_t n_desired,
                                    std::size_t n_undesired) {
  if (n_desired == 0 || n_undesired == 0) {
    throw PreconditionError("lambda constraint needs both classes present");
  }
  const double nd = static_cast<double>(n_desired);
  const double nu = static_cast<double>(n_undesired);
  LambdaCheck out;
  out.ratio = cfg.lambda_desired * nd / (cfg.lambda_undesired * nu);
  out.ok = out.ratio >= 1.0 && out.ratio <= 4.0 / 3.0;
  const double base = cfg.lambda_undesired * nu / nd;
  out.lambda_desired_range = {base, base * 4.0 / 3.0};
  return out;
}

std::vector<KtoExample> load_examples(const std::filesystem::path& path) {
  std::vector<KtoExample> out;
  jsonl::read_file(path, [&](const Json& record, std::size_t line) {
    KtoExample ex;
    ex.policy_logprob = jsonl::require_number(record, "policy_logprob", line);
    ex.ref_logprob = jsonl::require_number(record, "ref_logprob", line);
    const auto& raw = jsonl::require_string(record, "label", line);
    auto label = parse_label(raw);
    if (!label) throw InputError("unknown label `" + raw + "`", line);
    ex.label = *label;
    if (!std::isfinite(ex.policy_logprob) || !std::isfinite(ex.ref_logprob)) {
      throw InputError("logprobs must be finite", line);
    }
    out.push_back(ex);
  });
  return out;
}

}  // namespace drc::kto
