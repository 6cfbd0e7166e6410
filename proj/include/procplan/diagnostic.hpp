#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procplan/model.hpp"

namespace procplan {

enum class Severity { kError, kWarning };

std::string_view to_string(Severity severity);

// Stable diagnostic codes. This set is closed; tools and the service key
// their behavior on these strings.
namespace codes {
// lexing
inline constexpr std::string_view kLexChar = "LEX_CHAR";
inline constexpr std::string_view kLexString = "LEX_STRING";
inline constexpr std::string_view kLexNumber = "LEX_NUMBER";
inline constexpr std::string_view kLexDate = "LEX_DATE";
// parsing
inline constexpr std::string_view kParseExpected = "PARSE_EXPECTED";
inline constexpr std::string_view kParseEof = "PARSE_EOF";
// resolution
inline constexpr std::string_view kDanglingRef = "DANGLING_REF";
inline constexpr std::string_view kDupMilestone = "DUP_MILESTONE";
// validation
inline constexpr std::string_view kTimeOrder = "TIME_ORDER";
inline constexpr std::string_view kPosBounds = "POS_BOUNDS";
inline constexpr std::string_view kDupScope = "DUP_SCOPE";
inline constexpr std::string_view kDupResp = "DUP_RESP";
inline constexpr std::string_view kUnknownLayer = "UNKNOWN_LAYER";
inline constexpr std::string_view kNoResponsible = "NO_RESPONSIBLE";
inline constexpr std::string_view kTimelineRange = "TIMELINE_RANGE";
}  // namespace codes

std::span<const std::string_view> all_codes();

struct Diagnostic {
  Severity severity = Severity::kError;
  std::string code;
  std::optional<SourceLoc> loc;
  std::optional<NodeId> node;
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

Diagnostic make_error(std::string_view code, std::string message);
Diagnostic make_warning(std::string_view code, std::string message);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

}  // namespace procplan
