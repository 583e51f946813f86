#include "drc/templates.hpp"

#include "drc/error.hpp"
#include "drc/text.hpp"

namespace drc::templates {

std::string render_refine_prompt(std::string_view code,
                                 std::optional<std::string_view> comment) {
  if (code.empty()) throw PreconditionError("refine prompt needs code");
  std::string out =
      "Refine the given code based on the provided code review comment.\n";
  if (comment) {
    out += "The comment is: '";
    out += *comment;
    out += "'\n";
  }
  out += "The code is: '";
  out += code;
  out += "'";
  return out;
}

std::string_view review_instruction() noexcept {
  return "Review the given code and provide a constructive code review "
         "comment.";
}

std::string render_review_prompt(std::string_view hunk) {
  std::string out(review_instruction());
  out += "\nThe code/(diff hunk) is: '";
  out += hunk;
  out += " '";
  return out;
}

std::string render_judge_prompt(std::string_view original_code,
                                std::string_view modified_code,
                                std::string_view review_comment) {
  std::string out =
      "Your task is to determine whether the changes in the given original "
      "code and the modified code pertain to the provided review comment. If "
      "they pertain, output True; if they do not pertain, output False. Only "
      "provide True or False, without any additional content.\n";
  out += "```original code\n";
  out += original_code;
  out += "\n```\n```modified code\n";
  out += modified_code;
  out += "\n```\n```review comment\n";
  out += review_comment;
  out += "\n```\n";
  return out;
}

}  // namespace drc::templates
