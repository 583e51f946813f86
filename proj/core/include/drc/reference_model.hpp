#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace drc {

/// Byte-level bigram language model with add-one smoothing over 256 symbols:
///
///   P(b | a) = (count(a->b) + 1) / (count(a as context) + 256)
///
/// With context adaptation enabled, transitions already seen in the text
/// being scored (prompt plus earlier completion bytes) are added to the seed
/// counts before each prediction, so the model conditions on the full prefix
/// rather than just the previous byte. Immutable after construction.
class BigramModel {
 public:
  static constexpr std::size_t kAlphabet = 256;

  /// Throws PreconditionError when the seed has fewer than 2 bytes.
  explicit BigramModel(std::string_view seed);

  /// Seed-only conditional probability P(next | context).
  double probability(std::uint8_t context, std::uint8_t next) const noexcept;

  std::uint32_t transition_count(std::uint8_t from,
                                 std::uint8_t to) const noexcept {
    return transitions_[index(from, to)];
  }
  std::uint32_t context_count(std::uint8_t from) const noexcept {
    return contexts_[from];
  }

  /// Natural-log probability of each completion byte given everything before
  /// it. A first byte with no preceding context scores ln(1/256).
  std::vector<double> completion_logprobs(std::string_view prompt,
                                          std::string_view completion,
                                          bool adapt) const;

  /// Greedy decoding: argmax next byte, ties to the lowest byte value.
  std::string generate(std::string_view prompt, std::size_t max_tokens,
                       bool adapt) const;

 private:
  static constexpr std::size_t index(std::uint8_t from,
                                     std::uint8_t to) noexcept {
    return std::size_t{from} * kAlphabet + to;
  }

  std::vector<std::uint32_t> transitions_;
  std::array<std::uint32_t, kAlphabet> contexts_{};
};

}  // namespace drc
