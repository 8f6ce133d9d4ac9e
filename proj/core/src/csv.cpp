#include "nlslab/csv.hpp"

#include <cstdio>
#include <ostream>

namespace nlslab::csv {

std::string format(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string format(long long value) { return std::to_string(value); }
std::string format(int value) { return std::to_string(value); }
std::string format(bool value) { return value ? "1" : "0"; }

Writer& Writer::comment(std::string_view text) {
  *os_ << "# " << text << '\n';
  return *this;
}

Writer& Writer::header(const std::vector<std::string>& columns) {
  bool first = true;
  for (const auto& c : columns) emit(c, first);
  end_row();
  return *this;
}

void Writer::emit(const std::string& cell, bool& first) {
  if (!first) *os_ << ',';
  *os_ << cell;
  first = false;
}

void Writer::end_row() { *os_ << '\n'; }

}  // namespace nlslab::csv
