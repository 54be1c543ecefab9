#pragma once

#include <cctype>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "eif/errors.hpp"

namespace eif {

// Wire format, bit-exact. A response is a sequence of blocks
//
//   start_sub_instruction_x
//   start_think ... end_think
//   start_answer ... end_answer
//   end_sub_instruction_x
//
// with x = 0,1,2,... consecutive, each marker a whitespace-delimited token.
// Marker strings occurring inside think/answer bodies are treated as
// markers; there is no escaping.

inline constexpr std::string_view kStartThink = "start_think";
inline constexpr std::string_view kEndThink = "end_think";
inline constexpr std::string_view kStartAnswer = "start_answer";
inline constexpr std::string_view kEndAnswer = "end_answer";
inline constexpr std::string_view kStartSubPrefix = "start_sub_instruction_";
inline constexpr std::string_view kEndSubPrefix = "end_sub_instruction_";

inline std::string start_sub_marker(int index) {
  return std::string(kStartSubPrefix) + std::to_string(index);
}
inline std::string end_sub_marker(int index) {
  return std::string(kEndSubPrefix) + std::to_string(index);
}

namespace detail {
// base-10, no leading zeros, at most 9 digits
inline std::optional<int> parse_marker_index(std::string_view digits) {
  if (digits.empty() || digits.size() > 9) return std::nullopt;
  if (digits.size() > 1 && digits.front() == '0') return std::nullopt;
  int value = 0;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}
}  // namespace detail

inline std::optional<int> parse_sub_start(std::string_view token) {
  if (!token.starts_with(kStartSubPrefix)) return std::nullopt;
  return detail::parse_marker_index(token.substr(kStartSubPrefix.size()));
}

inline std::optional<int> parse_sub_end(std::string_view token) {
  if (!token.starts_with(kEndSubPrefix)) return std::nullopt;
  return detail::parse_marker_index(token.substr(kEndSubPrefix.size()));
}

inline bool is_structural_marker(std::string_view token) {
  return token == kStartThink || token == kEndThink || token == kStartAnswer ||
         token == kEndAnswer || parse_sub_start(token).has_value() ||
         parse_sub_end(token).has_value();
}

enum class FormatErrorKind {
  missing_marker,
  bad_order,
  duplicate_index,
  nonconsecutive_index,
  nested_block,
};

inline std::string_view to_string(FormatErrorKind k) {
  switch (k) {
    case FormatErrorKind::missing_marker: return "missing_marker";
    case FormatErrorKind::bad_order: return "bad_order";
    case FormatErrorKind::duplicate_index: return "duplicate_index";
    case FormatErrorKind::nonconsecutive_index: return "nonconsecutive_index";
    case FormatErrorKind::nested_block: return "nested_block";
  }
  return "";
}

class FormatError : public Error {
 public:
  FormatError(FormatErrorKind kind, std::size_t position)
      : Error(std::string(to_string(kind)) + " at offset " + std::to_string(position)),
        kind_(kind),
        position_(position) {}
  FormatErrorKind kind() const { return kind_; }
  std::size_t position() const { return position_; }

 private:
  FormatErrorKind kind_;
  std::size_t position_;
};

struct Segment {
  int instruction_index = 0;
  std::string think;
  std::string answer;

  bool operator==(const Segment&) const = default;
};

struct SegmentedResponse {
  std::vector<Segment> segments;
  std::string raw;
};

namespace detail {

struct RawToken {
  std::string_view text;
  std::size_t pos;  // byte offset of the token's first character
};

inline std::vector<RawToken> tokenize(std::string_view text) {
  std::vector<RawToken> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    tokens.push_back({text.substr(start, i - start), start});
  }
  return tokens;
}

inline std::string trim_copy(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace detail

// Strict parse of the full response text. Throws FormatError on the first
// violation; requires at least one block and only whitespace outside blocks.
inline SegmentedResponse parse_response(std::string_view text) {
  using detail::RawToken;
  const std::vector<RawToken> toks = detail::tokenize(text);

  enum class State { top, expect_think, think_body, expect_answer, answer_body, expect_close };
  State state = State::top;
  int next_index = 0;
  Segment current;
  std::size_t body_start = 0;  // offset just past the opening body marker

  SegmentedResponse resp;
  resp.raw = std::string(text);

  auto fail = [](FormatErrorKind kind, std::size_t pos) -> void { throw FormatError(kind, pos); };

  for (const RawToken& tok : toks) {
    const auto sub_start = parse_sub_start(tok.text);
    const auto sub_end = parse_sub_end(tok.text);
    switch (state) {
      case State::top: {
        if (sub_start) {
          if (*sub_start == next_index) {
            current = Segment{next_index, "", ""};
            state = State::expect_think;
          } else if (*sub_start < next_index) {
            fail(FormatErrorKind::duplicate_index, tok.pos);
          } else {
            fail(FormatErrorKind::nonconsecutive_index, tok.pos);
          }
        } else if (is_structural_marker(tok.text)) {
          fail(FormatErrorKind::bad_order, tok.pos);
        } else {
          fail(FormatErrorKind::missing_marker, tok.pos);
        }
        break;
      }
      case State::expect_think: {
        if (tok.text == kStartThink) {
          body_start = tok.pos + tok.text.size();
          state = State::think_body;
        } else if (sub_start || sub_end) {
          fail(sub_start ? FormatErrorKind::nested_block : FormatErrorKind::bad_order, tok.pos);
        } else if (is_structural_marker(tok.text)) {
          fail(FormatErrorKind::bad_order, tok.pos);
        } else {
          fail(FormatErrorKind::missing_marker, tok.pos);
        }
        break;
      }
      case State::think_body: {
        if (tok.text == kEndThink) {
          current.think = detail::trim_copy(text.substr(body_start, tok.pos - body_start));
          state = State::expect_answer;
        } else if (sub_start) {
          fail(FormatErrorKind::nested_block, tok.pos);
        } else if (is_structural_marker(tok.text)) {
          fail(FormatErrorKind::missing_marker, tok.pos);  // end_think is missing
        }
        break;
      }
      case State::expect_answer: {
        if (tok.text == kStartAnswer) {
          body_start = tok.pos + tok.text.size();
          state = State::answer_body;
        } else if (sub_start) {
          fail(FormatErrorKind::nested_block, tok.pos);
        } else if (is_structural_marker(tok.text)) {
          fail(FormatErrorKind::bad_order, tok.pos);
        } else {
          fail(FormatErrorKind::missing_marker, tok.pos);
        }
        break;
      }
      case State::answer_body: {
        if (tok.text == kEndAnswer) {
          current.answer = detail::trim_copy(text.substr(body_start, tok.pos - body_start));
          state = State::expect_close;
        } else if (sub_start) {
          fail(FormatErrorKind::nested_block, tok.pos);
        } else if (is_structural_marker(tok.text)) {
          fail(FormatErrorKind::missing_marker, tok.pos);  // end_answer is missing
        }
        break;
      }
      case State::expect_close: {
        if (sub_end && *sub_end == current.instruction_index) {
          resp.segments.push_back(current);
          ++next_index;
          state = State::top;
        } else if (sub_start) {
          fail(FormatErrorKind::nested_block, tok.pos);
        } else if (is_structural_marker(tok.text)) {
          fail(sub_end ? FormatErrorKind::missing_marker : FormatErrorKind::bad_order, tok.pos);
        } else {
          fail(FormatErrorKind::missing_marker, tok.pos);
        }
        break;
      }
    }
  }

  if (state != State::top || resp.segments.empty()) {
    throw FormatError(FormatErrorKind::missing_marker, text.size());
  }
  return resp;
}

// r^f: 1 iff parse_response succeeds
inline int format_reward(std::string_view text) {
  try {
    parse_response(text);
    return 1;
  } catch (const FormatError&) {
    return 0;
  }
}

// Serialize segments back through the response template.
inline std::string render_response(std::span<const Segment> segments) {
  std::string out;
  for (const Segment& seg : segments) {
    out += start_sub_marker(seg.instruction_index);
    out += '\n';
    out += kStartThink;
    out += '\n';
    if (!seg.think.empty()) {
      out += seg.think;
      out += '\n';
    }
    out += kEndThink;
    out += '\n';
    out += kStartAnswer;
    out += '\n';
    if (!seg.answer.empty()) {
      out += seg.answer;
      out += '\n';
    }
    out += kEndAnswer;
    out += '\n';
    out += end_sub_marker(seg.instruction_index);
    out += '\n';
  }
  return out;
}

// Per-token instruction attribution I^i_t over a token stream. Every token
// from a block's opening marker through its closing marker (inclusive) gets
// that block's index; tokens outside blocks get nullopt. On the first
// structural violation the remaining tokens are left unattributed.
inline std::vector<std::optional<int>> attribute_tokens(std::span<const std::string> tokens) {
  std::vector<std::optional<int>> labels(tokens.size());
  int expected = 0;
  int open = -1;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    const auto sub_start = parse_sub_start(tok);
    const auto sub_end = parse_sub_end(tok);
    if (open >= 0) {
      if (sub_start) break;  // nested block
      if (sub_end) {
        if (*sub_end != open) break;  // mismatched close
        labels[i] = open;
        expected = open + 1;
        open = -1;
        continue;
      }
      labels[i] = open;
    } else {
      if (sub_end) break;  // close without open
      if (sub_start) {
        if (*sub_start != expected) break;  // out-of-order block
        open = *sub_start;
        labels[i] = open;
        continue;
      }
      // non-block token between blocks: unattributed
    }
  }
  return labels;
}

}  // namespace eif
