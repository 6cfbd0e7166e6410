#include <algorithm>
#include <charconv>
#include <chrono>
#include <initializer_list>

#include "procplan/syntax.hpp"

namespace procplan {

namespace {

// Thrown after an error has been recorded; caught at declaration level where
// the parser resynchronizes.
struct Panic {};

std::string describe(const Token& token) {
  switch (token.kind) {
    case TokenKind::kEndOfFile: return "end of file";
    case TokenKind::kString: return "string \"" + token.text + "\"";
    case TokenKind::kKeyword: return "keyword '" + token.text + "'";
    default: return std::string(to_string(token.kind)) + " '" + token.text + "'";
  }
}

std::chrono::year_month_day parse_date(const std::string& text) {
  return {std::chrono::year{std::stoi(text.substr(0, 4))},
          std::chrono::month{static_cast<unsigned>(std::stoi(text.substr(5, 2)))},
          std::chrono::day{static_cast<unsigned>(std::stoi(text.substr(8, 2)))}};
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  ProcessModel parse_file(std::vector<Diagnostic>& out) {
    parse_process_keyword();
    if (!stopped_) {
      try {
        parse_header();
      } catch (const Panic&) {
        synchronize();
      }
    }
    parse_declarations();
    if (peek().kind != TokenKind::kEndOfFile && !stopped_) {
      error_at(peek(), codes::kParseExpected,
               "expected end of input after 'end', found " + describe(peek()));
    }
    out = std::move(diagnostics_);
    return std::move(model_);
  }

 private:
  enum class Section { kLayers, kMilestones, kScopes };

  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() {
    const Token& token = tokens_[pos_];
    if (token.kind != TokenKind::kEndOfFile) ++pos_;
    return token;
  }

  bool at_keyword(std::string_view word) const {
    return peek().kind == TokenKind::kKeyword && peek().text == word;
  }

  bool first_on_line(std::size_t index) const {
    return index == 0 || tokens_[index - 1].line != tokens_[index].line;
  }

  void error_at(const Token& token, std::string_view code, std::string message) {
    Diagnostic d = make_error(code, std::move(message));
    d.loc = SourceLoc{token.line, token.column};
    diagnostics_.push_back(std::move(d));
  }

  [[noreturn]] void fail_expected(std::string what) {
    const Token& token = peek();
    if (token.kind == TokenKind::kEndOfFile) {
      error_at(token, codes::kParseEof, "unexpected end of file, expected " + what);
      stopped_ = true;
    } else {
      error_at(token, codes::kParseExpected, "expected " + what + ", found " + describe(token));
    }
    throw Panic{};
  }

  const Token& expect_keyword(std::string_view word) {
    if (!at_keyword(word)) fail_expected("'" + std::string(word) + "'");
    return take();
  }

  const Token& expect(TokenKind kind, std::string_view after) {
    if (peek().kind != kind) {
      fail_expected(std::string(to_string(kind)) + " after '" + std::string(after) + "'");
    }
    return take();
  }

  Position expect_number(std::string_view after) {
    const Token& token = expect(TokenKind::kNumber, after);
    Position value = 0;
    std::from_chars(token.text.data(), token.text.data() + token.text.size(), value);
    return value;
  }

  // Skip to the next token that can begin a top-level declaration. A 'layer'
  // keyword only counts when it starts a line, since scopes also use it.
  void synchronize() {
    while (true) {
      const Token& token = peek();
      if (token.kind == TokenKind::kEndOfFile) return;
      if (token.kind == TokenKind::kKeyword &&
          (token.text == "milestone" || token.text == "scope" || token.text == "end" ||
           (token.text == "layer" && first_on_line(pos_)))) {
        return;
      }
      take();
    }
  }

  void parse_process_keyword() {
    if (at_keyword("process")) {
      take();
      return;
    }
    const Token& token = peek();
    if (token.kind == TokenKind::kEndOfFile) {
      error_at(token, codes::kParseEof, "unexpected end of file, expected 'process'");
      stopped_ = true;
      return;
    }
    error_at(token, codes::kParseExpected, "expected 'process', found " + describe(token));
    if (!at_keyword("name")) take();
  }

  void parse_header() {
    ProcessHeader& header = model_.header();
    expect_keyword("name");
    const Token& name = expect(TokenKind::kString, "name");
    if (name.text.empty()) {
      error_at(name, codes::kParseExpected, "process name must not be empty");
    }
    header.name = name.text;
    expect_keyword("version");
    header.version = expect(TokenKind::kString, "version").text;
    const Token& timeline = expect_keyword("timeline");
    model_.set_timeline_origin({timeline.line, timeline.column});
    if (at_keyword("weeks")) {
      take();
      header.timeline = WeeksTimeline{expect_number("weeks")};
    } else if (at_keyword("calendar")) {
      take();
      auto start = parse_date(expect(TokenKind::kDate, "calendar").text);
      auto end = parse_date(expect(TokenKind::kDate, "calendar").text);
      header.timeline = CalendarTimeline{start, end};
    } else {
      fail_expected("'weeks' or 'calendar'");
    }
  }

  void parse_declarations() {
    Section section = Section::kLayers;
    while (!stopped_) {
      const Token& token = peek();
      if (token.kind == TokenKind::kEndOfFile) {
        error_at(token, codes::kParseEof, "unexpected end of file, expected 'end'");
        return;
      }
      if (token.kind != TokenKind::kKeyword) {
        error_at(token, codes::kParseExpected,
                 "expected 'layer', 'milestone', 'scope' or 'end', found " + describe(token));
        take();
        synchronize();
        continue;
      }
      try {
        if (token.text == "end") {
          take();
          return;
        } else if (token.text == "layer") {
          check_order(section, Section::kLayers, "layer");
          parse_layer();
        } else if (token.text == "milestone") {
          check_order(section, Section::kMilestones, "milestone");
          section = std::max(section, Section::kMilestones);
          parse_milestone();
        } else if (token.text == "scope") {
          section = Section::kScopes;
          parse_scope();
        } else {
          error_at(token, codes::kParseExpected,
                   "expected 'layer', 'milestone', 'scope' or 'end', found " + describe(token));
          take();
          synchronize();
        }
      } catch (const Panic&) {
        synchronize();
      }
    }
  }

  // Declarations must appear in layer, milestone, scope order. An
  // out-of-order declaration is reported but still parsed.
  void check_order(Section current, Section wanted, std::string_view what) {
    if (current > wanted) {
      error_at(peek(), codes::kParseExpected,
               std::string(what) + " declarations must precede " +
                   (current == Section::kScopes ? "scopes" : "milestones"));
    }
  }

  void parse_layer() {
    const Token& kw = take();
    SourceLoc loc{kw.line, kw.column};
    LayerDecl decl;
    decl.name = expect(TokenKind::kIdentifier, "layer").text;
    expect_keyword("description");
    decl.description = expect(TokenKind::kString, "description").text;
    model_.set_origin(model_.insert_layer(decl), loc);
  }

  void parse_milestone() {
    const Token& kw = take();
    SourceLoc loc{kw.line, kw.column};
    MilestoneDecl decl;
    decl.name = expect(TokenKind::kIdentifier, "milestone").text;
    expect_keyword("position");
    decl.position = expect_number("position");
    if (at_keyword("span")) {
      take();
      Position start = expect_number("span");
      Position end = expect_number("span");
      decl.span = Span{start, end};
    }
    std::vector<SourceLoc> result_locs;
    bool has_result_list = at_keyword("result");
    if (has_result_list) {
      take();
      while (at_keyword("artifact")) {
        const Token& artifact = take();
        result_locs.push_back({artifact.line, artifact.column});
        ResultDecl result;
        result.name = expect(TokenKind::kIdentifier, "artifact").text;
        expect_keyword("description");
        result.description = expect(TokenKind::kString, "description").text;
        decl.results.push_back(std::move(result));
      }
    }
    if (!at_keyword("description")) {
      fail_expected(has_result_list ? "'artifact' or 'description'"
                                    : "'span', 'result' or 'description'");
    }
    take();
    decl.description = expect(TokenKind::kString, "description").text;

    NodeId id = model_.insert_milestone(decl);
    model_.set_origin(id, loc);
    const auto& results = model_.get<Milestone>(id).results;
    for (std::size_t i = 0; i < results.size(); ++i) model_.set_origin(results[i], result_locs[i]);
  }

  void parse_scope() {
    const Token& kw = take();
    SourceLoc loc{kw.line, kw.column};
    ScopeDecl decl;
    decl.name = expect(TokenKind::kIdentifier, "scope").text;
    expect_keyword("layer");
    decl.layer_name = expect(TokenKind::kIdentifier, "layer").text;
    expect_keyword("description");
    decl.description = expect(TokenKind::kString, "description").text;

    std::vector<SourceLoc> resp_locs;
    while (at_keyword("responsibility")) {
      const Token& resp = take();
      resp_locs.push_back({resp.line, resp.column});
      std::optional<ResponsibilityKind> kind;
      if (peek().kind == TokenKind::kKeyword) kind = kind_from_keyword(peek().text);
      if (!kind) fail_expected("'resp', 'cont' or 'noti'");
      take();
      expect_keyword("asmilestone");
      decl.responsibilities.push_back({*kind, expect(TokenKind::kString, "asmilestone").text});
    }

    NodeId id = model_.insert_scope(decl);
    model_.set_origin(id, loc);
    const auto& resps = model_.get<Scope>(id).responsibilities;
    for (std::size_t i = 0; i < resps.size(); ++i) model_.set_origin(resps[i], resp_locs[i]);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  bool stopped_ = false;
  ProcessModel model_;
  std::vector<Diagnostic> diagnostics_;
};

}  // namespace

ParseResult parse(std::string_view text) {
  TokenizeResult lexed = tokenize(text);
  ParseResult result;
  result.diagnostics = std::move(lexed.diagnostics);

  std::vector<Diagnostic> syntax;
  ProcessModel model = Parser(std::move(lexed.tokens)).parse_file(syntax);
  result.diagnostics.insert(result.diagnostics.end(), syntax.begin(), syntax.end());
  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(),
                   [](const Diagnostic& a, const Diagnostic& b) {
                     return std::pair(a.loc->line, a.loc->column) <
                            std::pair(b.loc->line, b.loc->column);
                   });

  if (!has_errors(result.diagnostics)) result.model = std::move(model);
  return result;
}

}  // namespace procplan
