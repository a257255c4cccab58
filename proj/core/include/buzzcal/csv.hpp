#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace buzzcal {

// Shortest round-trip decimal; identical bytes on every run.
std::string format_double(double v);
std::string format_optional(const std::optional<double>& v);

// Quotes fields containing separators, quotes or newlines.
std::string csv_field(std::string_view s);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((write(fields, first), first = false), ...);
    out_ << '\n';
  }

 private:
  void sep(bool first) {
    if (!first) out_ << ',';
  }
  void write(std::string_view s, bool first) {
    sep(first);
    out_ << csv_field(s);
  }
  void write(const std::string& s, bool first) { write(std::string_view(s), first); }
  void write(const char* s, bool first) { write(std::string_view(s), first); }
  void write(double v, bool first) {
    sep(first);
    out_ << format_double(v);
  }
  void write(const std::optional<double>& v, bool first) {
    sep(first);
    out_ << format_optional(v);
  }
  void write(int v, bool first) {
    sep(first);
    out_ << v;
  }
  void write(std::size_t v, bool first) {
    sep(first);
    out_ << v;
  }
  void write(bool v, bool first) {
    sep(first);
    out_ << (v ? "true" : "false");
  }

  std::ostream& out_;
};

}  // namespace buzzcal
