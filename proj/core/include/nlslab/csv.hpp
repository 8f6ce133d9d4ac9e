#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace nlslab::csv {

/// Shortest-safe text for a double: 17 significant digits, round-trips exactly.
std::string format(double value);
std::string format(long long value);
std::string format(int value);
std::string format(bool value);

/// Writes comma separated rows; each row is flushed with '\n'.
class Writer {
public:
  explicit Writer(std::ostream& os) : os_(&os) {}

  Writer& comment(std::string_view text);
  Writer& header(const std::vector<std::string>& columns);

  template <typename... Ts>
  Writer& row(const Ts&... values) {
    bool first = true;
    ((emit(format(values), first)), ...);
    end_row();
    return *this;
  }

private:
  void emit(const std::string& cell, bool& first);
  void end_row();

  std::ostream* os_;
};

}  // namespace nlslab::csv
