#include "procplan/diagnostic.hpp"

#include <algorithm>
#include <array>

namespace procplan {

std::string_view to_string(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

std::span<const std::string_view> all_codes() {
  static constexpr std::array kCodes = {
      codes::kLexChar,      codes::kLexString,    codes::kLexNumber,     codes::kLexDate,
      codes::kParseExpected, codes::kParseEof,    codes::kDanglingRef,   codes::kDupMilestone,
      codes::kTimeOrder,    codes::kPosBounds,    codes::kDupScope,      codes::kDupResp,
      codes::kUnknownLayer, codes::kNoResponsible, codes::kTimelineRange,
  };
  return kCodes;
}

Diagnostic make_error(std::string_view code, std::string message) {
  return Diagnostic{Severity::kError, std::string(code), std::nullopt, std::nullopt,
                    std::move(message)};
}

Diagnostic make_warning(std::string_view code, std::string message) {
  return Diagnostic{Severity::kWarning, std::string(code), std::nullopt, std::nullopt,
                    std::move(message)};
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

}  // namespace procplan
