#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace drc::templates {

/// Code-refinement prompt used for conditional perplexity. With no comment
/// the comment line is omitted entirely.
std::string render_refine_prompt(std::string_view code,
                                 std::optional<std::string_view> comment);

/// First line of the review-generation frame (the SFT "instruction").
std::string_view review_instruction() noexcept;
/// Full review-generation prompt with the hunk filled in.
std::string render_review_prompt(std::string_view hunk);

/// Zero-shot True/False judge prompt.
std::string render_judge_prompt(std::string_view original_code,
                                std::string_view modified_code,
                                std::string_view review_comment);

}  // namespace drc::templates
