#include "drc/reference_model.hpp"

#include <cmath>
#include <unordered_map>

#include "drc/error.hpp"

namespace drc {
namespace {

std::uint8_t byte_at(std::string_view s, std::size_t i) {
  return static_cast<std::uint8_t>(s[i]);
}

// Counts observed in the text being scored, layered over the seed counts.
class ContextCounts {
 public:
  void add(std::uint8_t from, std::uint8_t to) {
    ++transitions_[static_cast<std::uint16_t>(from << 8 | to)];
    ++contexts_[from];
  }
  std::uint32_t transitions(std::uint8_t from, std::uint8_t to) const {
    auto it = transitions_.find(static_cast<std::uint16_t>(from << 8 | to));
    return it == transitions_.end() ? 0 : it->second;
  }
  std::uint32_t contexts(std::uint8_t from) const { return contexts_[from]; }

 private:
  std::unordered_map<std::uint16_t, std::uint32_t> transitions_;
  std::array<std::uint32_t, BigramModel::kAlphabet> contexts_{};
};

}  // namespace

BigramModel::BigramModel(std::string_view seed)
    : transitions_(kAlphabet * kAlphabet, 0) {
  if (seed.size() < 2) {
    throw PreconditionError("reference model seed needs at least 2 bytes");
  }
  for (std::size_t i = 1; i < seed.size(); ++i) {
    ++transitions_[index(byte_at(seed, i - 1), byte_at(seed, i))];
    ++contexts_[byte_at(seed, i - 1)];
  }
}

double BigramModel::probability(std::uint8_t context,
                                std::uint8_t next) const noexcept {
  return (static_cast<double>(transitions_[index(context, next)]) + 1.0) /
         (static_cast<double>(contexts_[context]) + kAlphabet);
}

std::vector<double> BigramModel::completion_logprobs(
    std::string_view prompt, std::string_view completion, bool adapt) const {
  std::string full;
  full.reserve(prompt.size() + completion.size());
  full.append(prompt).append(completion);

  std::vector<double> out;
  out.reserve(completion.size());
  ContextCounts seen;
  if (prompt.empty() && !completion.empty()) {
    out.push_back(-std::log(static_cast<double>(kAlphabet)));
  }
  for (std::size_t i = 1; i < full.size(); ++i) {
    const std::uint8_t from = byte_at(full, i - 1);
    const std::uint8_t to = byte_at(full, i);
    if (i >= prompt.size()) {
      const double num = static_cast<double>(transitions_[index(from, to)]) +
                         seen.transitions(from, to) + 1.0;
      const double den = static_cast<double>(contexts_[from]) +
                         seen.contexts(from) + kAlphabet;
      out.push_back(std::log(num / den));
    }
    if (adapt) seen.add(from, to);
  }
  return out;
}

std::string BigramModel::generate(std::string_view prompt,
                                  std::size_t max_tokens, bool adapt) const {
  if (prompt.empty()) throw PreconditionError("generate needs a prompt");
  ContextCounts seen;
  if (adapt) {
    for (std::size_t i = 1; i < prompt.size(); ++i) {
      seen.add(byte_at(prompt, i - 1), byte_at(prompt, i));
    }
  }
  std::string out;
  std::uint8_t last = byte_at(prompt, prompt.size() - 1);
  for (std::size_t step = 0; step < max_tokens; ++step) {
    std::uint8_t best = 0;
    std::uint64_t best_count = 0;
    for (std::size_t b = 0; b < kAlphabet; ++b) {
      const auto next = static_cast<std::uint8_t>(b);
      const std::uint64_t count =
          std::uint64_t{transitions_[index(last, next)]} +
          seen.transitions(last, next);
      if (count > best_count) {
        best_count = count;
        best = next;
      }
    }
    out.push_back(static_cast<char>(best));
    if (adapt) seen.add(last, best);
    last = best;
  }
  return out;
}

}  // namespace drc
