#include <chrono>
#include <cstdio>
#include <string>
#include <variant>

#include "procplan/syntax.hpp"

namespace procplan {

namespace {

void append_string(std::string& out, std::string_view text) {
  out.push_back('"');
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
}

std::string format_date(const std::chrono::year_month_day& date) {
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buffer;
}

class Printer {
 public:
  explicit Printer(const ProcessModel& model) : model_(model) {}

  std::string run() {
    out_ = "process\n";
    print_header(model_.header());
    for (const auto& layer : model_.layers()) print_layer(layer);
    for (const auto& milestone : model_.milestones()) print_milestone(milestone);
    for (const auto& scope : model_.scopes()) print_scope(scope);
    out_ += "end\n";
    return std::move(out_);
  }

 private:
  void indent(int level) { out_.append(static_cast<std::size_t>(level) * 2, ' '); }

  void line_with_string(int level, std::string_view keyword, std::string_view value) {
    indent(level);
    out_ += keyword;
    out_ += ' ';
    append_string(out_, value);
    out_ += '\n';
  }

  void print_header(const ProcessHeader& header) {
    line_with_string(1, "name", header.name);
    line_with_string(1, "version", header.version);
    indent(1);
    out_ += "timeline ";
    if (const auto* weeks = std::get_if<WeeksTimeline>(&header.timeline)) {
      out_ += "weeks " + std::to_string(weeks->length_weeks);
    } else {
      const auto& cal = std::get<CalendarTimeline>(header.timeline);
      out_ += "calendar " + format_date(cal.start_date) + " " + format_date(cal.end_date);
    }
    out_ += '\n';
  }

  void print_layer(const Layer& layer) {
    indent(1);
    out_ += "layer " + layer.name + " description ";
    append_string(out_, layer.description);
    out_ += '\n';
  }

  void print_milestone(const Milestone& milestone) {
    indent(1);
    out_ += "milestone " + milestone.name + " position " + std::to_string(milestone.position);
    if (milestone.span) {
      out_ += " span " + std::to_string(milestone.span->start) + " " +
              std::to_string(milestone.span->end);
    }
    out_ += '\n';
    if (!milestone.results.empty()) {
      indent(2);
      out_ += "result\n";
      for (const auto& result : model_.results(milestone)) {
        indent(3);
        out_ += "artifact " + result.name + " description ";
        append_string(out_, result.description);
        out_ += '\n';
      }
    }
    line_with_string(2, "description", milestone.description);
  }

  void print_scope(const Scope& scope) {
    indent(1);
    out_ += "scope " + scope.name + " layer " + scope.layer_name + "\n";
    line_with_string(2, "description", scope.description);
    for (const auto& resp : model_.responsibilities(scope)) {
      indent(2);
      out_ += "responsibility ";
      out_ += keyword(resp.kind);
      out_ += " asmilestone ";
      append_string(out_, resp.as_milestone);
      out_ += '\n';
    }
  }

  const ProcessModel& model_;
  std::string out_;
};

}  // namespace

std::string print(const ProcessModel& model) { return Printer(model).run(); }

}  // namespace procplan
