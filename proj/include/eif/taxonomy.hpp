#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace eif {

// The eight task categories.
enum class TaskCategory {
  classification,
  information_extraction,
  text_generation,
  dialogue_system,
  reasoning_logic,
  language_style,
  evaluation_verification,
  programming,
};

inline constexpr std::array<TaskCategory, 8> kAllTaskCategories = {
    TaskCategory::classification,         TaskCategory::information_extraction,
    TaskCategory::text_generation,        TaskCategory::dialogue_system,
    TaskCategory::reasoning_logic,        TaskCategory::language_style,
    TaskCategory::evaluation_verification, TaskCategory::programming,
};

inline std::string_view to_string(TaskCategory c) {
  switch (c) {
    case TaskCategory::classification: return "classification";
    case TaskCategory::information_extraction: return "information_extraction";
    case TaskCategory::text_generation: return "text_generation";
    case TaskCategory::dialogue_system: return "dialogue_system";
    case TaskCategory::reasoning_logic: return "reasoning_logic";
    case TaskCategory::language_style: return "language_style";
    case TaskCategory::evaluation_verification: return "evaluation_verification";
    case TaskCategory::programming: return "programming";
  }
  return "";
}

inline std::optional<TaskCategory> parse_task_category(std::string_view s) {
  for (TaskCategory c : kAllTaskCategories) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

// The 24 constraint dimensions, grouped under four parent types.
enum class ConstraintType {
  // content
  theme,
  exclusion,
  inclusion,
  value,
  privacy,
  numerical,
  // situation
  role_playing,
  target_audience,
  prior_condition,
  nlp_background,
  markdown_background,
  table_background,
  text_background,
  // style
  tone_style,
  emotion,
  linguistic_characteristics,
  multilingual,
  // format
  output_format,
  text_pattern,
  grammar_structure,
  citation,
  numbering_list,
  hierarchical_structure,
  template_,  // "template" is a keyword
};

enum class ConstraintGroup { content, situation, style, format };

inline constexpr std::array<ConstraintType, 24> kAllConstraintTypes = {
    ConstraintType::theme,
    ConstraintType::exclusion,
    ConstraintType::inclusion,
    ConstraintType::value,
    ConstraintType::privacy,
    ConstraintType::numerical,
    ConstraintType::role_playing,
    ConstraintType::target_audience,
    ConstraintType::prior_condition,
    ConstraintType::nlp_background,
    ConstraintType::markdown_background,
    ConstraintType::table_background,
    ConstraintType::text_background,
    ConstraintType::tone_style,
    ConstraintType::emotion,
    ConstraintType::linguistic_characteristics,
    ConstraintType::multilingual,
    ConstraintType::output_format,
    ConstraintType::text_pattern,
    ConstraintType::grammar_structure,
    ConstraintType::citation,
    ConstraintType::numbering_list,
    ConstraintType::hierarchical_structure,
    ConstraintType::template_,
};

inline std::string_view to_string(ConstraintType t) {
  switch (t) {
    case ConstraintType::theme: return "theme";
    case ConstraintType::exclusion: return "exclusion";
    case ConstraintType::inclusion: return "inclusion";
    case ConstraintType::value: return "value";
    case ConstraintType::privacy: return "privacy";
    case ConstraintType::numerical: return "numerical";
    case ConstraintType::role_playing: return "role_playing";
    case ConstraintType::target_audience: return "target_audience";
    case ConstraintType::prior_condition: return "prior_condition";
    case ConstraintType::nlp_background: return "nlp_background";
    case ConstraintType::markdown_background: return "markdown_background";
    case ConstraintType::table_background: return "table_background";
    case ConstraintType::text_background: return "text_background";
    case ConstraintType::tone_style: return "tone_style";
    case ConstraintType::emotion: return "emotion";
    case ConstraintType::linguistic_characteristics: return "linguistic_characteristics";
    case ConstraintType::multilingual: return "multilingual";
    case ConstraintType::output_format: return "output_format";
    case ConstraintType::text_pattern: return "text_pattern";
    case ConstraintType::grammar_structure: return "grammar_structure";
    case ConstraintType::citation: return "citation";
    case ConstraintType::numbering_list: return "numbering_list";
    case ConstraintType::hierarchical_structure: return "hierarchical_structure";
    case ConstraintType::template_: return "template";
  }
  return "";
}

inline std::optional<ConstraintType> parse_constraint_type(std::string_view s) {
  for (ConstraintType t : kAllConstraintTypes) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

inline ConstraintGroup group_of(ConstraintType t) {
  switch (t) {
    case ConstraintType::theme:
    case ConstraintType::exclusion:
    case ConstraintType::inclusion:
    case ConstraintType::value:
    case ConstraintType::privacy:
    case ConstraintType::numerical:
      return ConstraintGroup::content;
    case ConstraintType::role_playing:
    case ConstraintType::target_audience:
    case ConstraintType::prior_condition:
    case ConstraintType::nlp_background:
    case ConstraintType::markdown_background:
    case ConstraintType::table_background:
    case ConstraintType::text_background:
      return ConstraintGroup::situation;
    case ConstraintType::tone_style:
    case ConstraintType::emotion:
    case ConstraintType::linguistic_characteristics:
    case ConstraintType::multilingual:
      return ConstraintGroup::style;
    default:
      return ConstraintGroup::format;
  }
}

inline std::string_view to_string(ConstraintGroup g) {
  switch (g) {
    case ConstraintGroup::content: return "content";
    case ConstraintGroup::situation: return "situation";
    case ConstraintGroup::style: return "style";
    case ConstraintGroup::format: return "format";
  }
  return "";
}

}  // namespace eif
