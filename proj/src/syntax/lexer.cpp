#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <limits>

#include "procplan/syntax.hpp"

namespace procplan {

namespace {

constexpr std::string_view kKeywords[] = {
    "process",  "end",         "name",     "version", "timeline",       "weeks", "calendar",
    "layer",    "description", "milestone", "position", "span",         "result", "artifact",
    "scope",    "responsibility", "resp",  "cont",     "noti",           "asmilestone",
};

bool is_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Length of the UTF-8 sequence starting at text[i], or 0 if malformed.
std::size_t utf8_length(std::string_view text, std::size_t i) {
  auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  unsigned char lead = byte(i);
  std::size_t len = 0;
  std::uint32_t cp = 0;
  if (lead < 0x80) return 1;
  if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    return 0;
  }
  if (i + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    if ((byte(i + k) & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (byte(i + k) & 0x3F);
  }
  // Reject overlong forms, surrogates and out-of-range code points.
  static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  TokenizeResult run() {
    while (true) {
      skip_trivia();
      if (at_end()) break;
      lex_one();
    }
    result_.tokens.push_back(Token{TokenKind::kEndOfFile, "", line_, column_});
    return std::move(result_);
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char current() const { return text_[pos_]; }
  char lookahead(std::size_t n) const {
    return pos_ + n < text_.size() ? text_[pos_ + n] : '\0';
  }

  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && !at_end(); ++k) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
      ++pos_;
    }
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = current();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && lookahead(1) == '/') {
        while (!at_end() && current() != '\n') advance();
      } else {
        break;
      }
    }
  }

  void error(std::string_view code, std::string message, int line, int column) {
    Diagnostic d = make_error(code, std::move(message));
    d.loc = SourceLoc{line, column};
    result_.diagnostics.push_back(std::move(d));
  }

  void push(TokenKind kind, std::string text, int line, int column) {
    result_.tokens.push_back(Token{kind, std::move(text), line, column});
  }

  void lex_one() {
    char c = current();
    if (is_letter(c)) return lex_word();
    if (is_digit(c)) return lex_number_or_date();
    if (c == '"') return lex_string();

    int line = line_, column = column_;
    std::size_t len = utf8_length(text_, pos_);
    if (len == 0) {
      error(codes::kLexChar, "invalid UTF-8 byte", line, column);
      advance();
      return;
    }
    error(codes::kLexChar, "unexpected character '" + std::string(text_.substr(pos_, len)) + "'",
          line, column);
    advance(len);
  }

  void lex_word() {
    int line = line_, column = column_;
    std::size_t start = pos_;
    while (!at_end() && (is_letter(current()) || is_digit(current()) || current() == '_')) {
      advance();
    }
    std::string word(text_.substr(start, pos_ - start));
    TokenKind kind = is_keyword(word) ? TokenKind::kKeyword : TokenKind::kIdentifier;
    push(kind, std::move(word), line, column);
  }

  void lex_number_or_date() {
    int line = line_, column = column_;
    std::size_t start = pos_;
    while (!at_end() && is_digit(current())) advance();
    std::string_view digits = text_.substr(start, pos_ - start);

    if (digits.size() == 4 && !at_end() && current() == '-') {
      return lex_date_tail(start, line, column);
    }

    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{}) {
      error(codes::kLexNumber, "number '" + std::string(digits) + "' is out of range", line,
            column);
      return;
    }
    push(TokenKind::kNumber, std::to_string(value), line, column);
  }

  // Called with the year consumed and positioned at the first '-'.
  void lex_date_tail(std::size_t start, int line, int column) {
    auto digits_at = [&](std::size_t offset, std::size_t count) {
      for (std::size_t k = 0; k < count; ++k) {
        if (!is_digit(lookahead(offset + k))) return false;
      }
      return true;
    };
    // pos_ is at "-MM-DD"
    bool shaped = lookahead(0) == '-' && digits_at(1, 2) && lookahead(3) == '-' && digits_at(4, 2);
    if (!shaped) {
      advance();  // consume '-' so lexing makes progress
      error(codes::kLexDate, "malformed date, expected YYYY-MM-DD", line, column);
      return;
    }
    advance(6);
    std::string text(text_.substr(start, pos_ - start));
    int year = std::stoi(text.substr(0, 4));
    unsigned month = static_cast<unsigned>(std::stoi(text.substr(5, 2)));
    unsigned day = static_cast<unsigned>(std::stoi(text.substr(8, 2)));
    std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                    std::chrono::day{day}};
    if (!ymd.ok()) {
      error(codes::kLexDate, "'" + text + "' is not a calendar date", line, column);
      return;
    }
    push(TokenKind::kDate, std::move(text), line, column);
  }

  void lex_string() {
    int line = line_, column = column_;
    advance();  // opening quote
    std::string value;
    bool ok = true;
    while (true) {
      if (at_end() || current() == '\n' || current() == '\r') {
        error(codes::kLexString, "unterminated string", line, column);
        return;
      }
      char c = current();
      if (c == '"') {
        advance();
        break;
      }
      if (c == '\\') {
        char next = lookahead(1);
        if (next == '"' || next == '\\') {
          value.push_back(next);
          advance(2);
          continue;
        }
        if (ok) {
          error(codes::kLexString, "unknown escape sequence in string", line_, column_);
          ok = false;
        }
        advance();
        continue;
      }
      std::size_t len = utf8_length(text_, pos_);
      if (len == 0) {
        if (ok) {
          error(codes::kLexString, "invalid UTF-8 in string", line_, column_);
          ok = false;
        }
        advance();
        continue;
      }
      value.append(text_.substr(pos_, len));
      advance(len);
    }
    if (ok) push(TokenKind::kString, std::move(value), line, column);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  TokenizeResult result_;
};

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::kKeyword: return "keyword";
    case TokenKind::kIdentifier: return "identifier";
    case TokenKind::kString: return "string";
    case TokenKind::kNumber: return "number";
    case TokenKind::kDate: return "date";
    case TokenKind::kEndOfFile: return "end of file";
  }
  return "token";
}

bool is_keyword(std::string_view word) {
  return std::ranges::find(kKeywords, word) != std::end(kKeywords);
}

bool is_identifier(std::string_view name) {
  if (name.empty() || !is_letter(name.front())) return false;
  bool chars_ok = std::all_of(name.begin(), name.end(),
                              [](char c) { return is_letter(c) || is_digit(c) || c == '_'; });
  return chars_ok && !is_keyword(name);
}

bool is_printable_string(std::string_view text) {
  for (std::size_t i = 0; i < text.size();) {
    if (text[i] == '\n' || text[i] == '\r') return false;
    std::size_t len = utf8_length(text, i);
    if (len == 0) return false;
    i += len;
  }
  return true;
}

TokenizeResult tokenize(std::string_view text) { return Lexer(text).run(); }

}  // namespace procplan
