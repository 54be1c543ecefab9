#pragma once

#include <cctype>
#include <regex>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "eif/errors.hpp"

namespace eif {

// Deterministic constraint checkers. A "word" is a maximal run of
// non-whitespace; a "numbered item" is a line whose first non-blank
// characters are digits followed by a '.'.

struct MaxWords {
  int limit = 0;
};
struct MinWords {
  int limit = 0;
};
struct MustInclude {
  std::string substring;
};
struct MustExclude {
  std::string substring;
};
struct RegexMatch {
  std::string pattern;
};
struct NumberedItems {
  int count = 0;
};
struct EndsWith {
  std::string suffix;
};
struct StartsWith {
  std::string prefix;
};
struct CharLengthBetween {
  int lo = 0;
  int hi = 0;
};

using RuleSpec = std::variant<MaxWords, MinWords, MustInclude, MustExclude,
                              RegexMatch, NumberedItems, EndsWith, StartsWith,
                              CharLengthBetween>;

inline int count_words(std::string_view text) {
  int words = 0;
  bool in_word = false;
  for (unsigned char c : text) {
    bool space = std::isspace(c) != 0;
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  return words;
}

inline int count_numbered_items(std::string_view text) {
  int items = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos
                                                       : eol - pos);
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t digits = i;
    while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
    if (digits > i && digits < line.size() && line[digits] == '.') ++items;
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return items;
}

// 0/1 verdict; total over any answer text. regex verdicts match anywhere
// in the answer.
inline int check_rule(const RuleSpec& rule, std::string_view answer) {
  struct Visitor {
    std::string_view text;
    int operator()(const MaxWords& r) const { return count_words(text) <= r.limit ? 1 : 0; }
    int operator()(const MinWords& r) const { return count_words(text) >= r.limit ? 1 : 0; }
    int operator()(const MustInclude& r) const {
      return text.find(r.substring) != std::string_view::npos ? 1 : 0;
    }
    int operator()(const MustExclude& r) const {
      return text.find(r.substring) == std::string_view::npos ? 1 : 0;
    }
    int operator()(const RegexMatch& r) const {
      std::regex re(r.pattern);
      return std::regex_search(text.begin(), text.end(), re) ? 1 : 0;
    }
    int operator()(const NumberedItems& r) const {
      return count_numbered_items(text) == r.count ? 1 : 0;
    }
    int operator()(const EndsWith& r) const {
      return text.size() >= r.suffix.size() &&
                     text.substr(text.size() - r.suffix.size()) == r.suffix
                 ? 1
                 : 0;
    }
    int operator()(const StartsWith& r) const {
      return text.substr(0, r.prefix.size()) == r.prefix ? 1 : 0;
    }
    int operator()(const CharLengthBetween& r) const {
      auto n = static_cast<long long>(text.size());
      return n >= r.lo && n <= r.hi ? 1 : 0;
    }
  };
  return std::visit(Visitor{answer}, rule);
}

inline nlohmann::json rule_to_json(const RuleSpec& rule) {
  using nlohmann::json;
  struct Visitor {
    json operator()(const MaxWords& r) const { return {{"kind", "max_words"}, {"limit", r.limit}}; }
    json operator()(const MinWords& r) const { return {{"kind", "min_words"}, {"limit", r.limit}}; }
    json operator()(const MustInclude& r) const {
      return {{"kind", "must_include"}, {"substring", r.substring}};
    }
    json operator()(const MustExclude& r) const {
      return {{"kind", "must_exclude"}, {"substring", r.substring}};
    }
    json operator()(const RegexMatch& r) const {
      return {{"kind", "regex_match"}, {"pattern", r.pattern}};
    }
    json operator()(const NumberedItems& r) const {
      return {{"kind", "numbered_items"}, {"count", r.count}};
    }
    json operator()(const EndsWith& r) const { return {{"kind", "ends_with"}, {"suffix", r.suffix}}; }
    json operator()(const StartsWith& r) const {
      return {{"kind", "starts_with"}, {"prefix", r.prefix}};
    }
    json operator()(const CharLengthBetween& r) const {
      return {{"kind", "char_length_between"}, {"lo", r.lo}, {"hi", r.hi}};
    }
  };
  return std::visit(Visitor{}, rule);
}

// Throws SchemaError on unknown kinds, missing parameters, or parameters
// violating the rule invariants (negative counts, lo > hi, bad regex).
inline RuleSpec rule_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw SchemaError("rule checker must be an object with a \"kind\" string");
  }
  const std::string kind = j["kind"].get<std::string>();
  auto require_int = [&](const char* field) -> int {
    if (!j.contains(field) || !j[field].is_number_integer()) {
      throw SchemaError("rule \"" + kind + "\" requires integer field \"" + field + "\"");
    }
    return j[field].get<int>();
  };
  auto require_str = [&](const char* field) -> std::string {
    if (!j.contains(field) || !j[field].is_string()) {
      throw SchemaError("rule \"" + kind + "\" requires string field \"" + field + "\"");
    }
    return j[field].get<std::string>();
  };

  if (kind == "max_words") {
    int limit = require_int("limit");
    if (limit < 0) throw SchemaError("max_words limit must be >= 0");
    return MaxWords{limit};
  }
  if (kind == "min_words") {
    int limit = require_int("limit");
    if (limit < 0) throw SchemaError("min_words limit must be >= 0");
    return MinWords{limit};
  }
  if (kind == "must_include") return MustInclude{require_str("substring")};
  if (kind == "must_exclude") return MustExclude{require_str("substring")};
  if (kind == "regex_match") {
    std::string pattern = require_str("pattern");
    try {
      std::regex re(pattern);
    } catch (const std::regex_error&) {
      throw SchemaError("regex_match pattern does not compile: " + pattern);
    }
    return RegexMatch{pattern};
  }
  if (kind == "numbered_items") {
    int count = require_int("count");
    if (count < 0) throw SchemaError("numbered_items count must be >= 0");
    return NumberedItems{count};
  }
  if (kind == "ends_with") return EndsWith{require_str("suffix")};
  if (kind == "starts_with") return StartsWith{require_str("prefix")};
  if (kind == "char_length_between") {
    int lo = require_int("lo");
    int hi = require_int("hi");
    if (lo > hi) throw SchemaError("char_length_between requires lo <= hi");
    return CharLengthBetween{lo, hi};
  }
  throw SchemaError("unknown rule kind \"" + kind + "\"");
}

}  // namespace eif
