#pragma once

#include <string_view>
#include <vector>

#include "procplan/diagnostic.hpp"
#include "procplan/resolve.hpp"

namespace procplan {

// Semantic checks on a resolved model. Returns every violation, ordered by
// document position; an empty list means the model is valid.
//
//   TIMELINE_RANGE  weeks timeline shorter than 1, or calendar end <= start
//   TIME_ORDER      span start not before span end
//   POS_BOUNDS      position or span endpoint outside [0, timeline bound]
//   DUP_SCOPE       (layer, scope) pair declared twice
//   DUP_RESP        one scope references the same milestone twice
//   UNKNOWN_LAYER   scope names an undeclared layer
//   NO_RESPONSIBLE  (warning) milestone without any 'resp' responsibility
std::vector<Diagnostic> validate(const ResolvedModel& resolved);

// parse -> resolve -> validate. Later phases only run when the earlier ones
// produced no errors.
std::vector<Diagnostic> validate_text(std::string_view text);

}  // namespace procplan
