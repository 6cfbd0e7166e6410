#pragma once

// Textual format of process descriptions:
//
//   File      := "process" Header Layer* Milestone* Scope* "end"
//   Header    := "name" STRING "version" STRING "timeline" Timeline
//   Timeline  := "weeks" NUMBER | "calendar" DATE DATE
//   Layer     := "layer" IDENT "description" STRING
//   Milestone := "milestone" IDENT "position" NUMBER ["span" NUMBER NUMBER]
//                ["result" Result*] "description" STRING
//   Result    := "artifact" IDENT "description" STRING
//   Scope     := "scope" IDENT "layer" IDENT "description" STRING Resp*
//   Resp      := "responsibility" ("resp" | "cont" | "noti") "asmilestone" STRING
//
// IDENT is a letter followed by letters, digits or '_' and may not be a
// keyword. STRING is double-quoted with \" and \\ escapes and may not span
// lines. NUMBER is a run of decimal digits, DATE is YYYY-MM-DD. Comments run
// from // to the end of the line.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "procplan/diagnostic.hpp"
#include "procplan/model.hpp"

namespace procplan {

enum class TokenKind { kKeyword, kIdentifier, kString, kNumber, kDate, kEndOfFile };

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind = TokenKind::kEndOfFile;
  // Keyword or identifier spelling, decoded string contents, digits, or date.
  std::string text;
  int line = 1;
  int column = 1;
};

bool is_keyword(std::string_view word);
// True if `name` can be printed as an IDENT.
bool is_identifier(std::string_view name);
// True if `text` can be printed as a STRING: valid UTF-8 without line breaks.
bool is_printable_string(std::string_view text);

struct TokenizeResult {
  std::vector<Token> tokens;  // always terminated by kEndOfFile
  std::vector<Diagnostic> diagnostics;
};

TokenizeResult tokenize(std::string_view text);

struct ParseResult {
  std::optional<ProcessModel> model;  // present iff no error diagnostics
  std::vector<Diagnostic> diagnostics;
};

ParseResult parse(std::string_view text);

// Canonical text. Precondition: every name is an identifier and every
// string is printable; models from parse() and from the command engine
// satisfy this.
std::string print(const ProcessModel& model);

}  // namespace procplan
