#include "nlslab/log.hpp"

#include <iostream>
#include <mutex>
#include <string>

namespace nlslab::log {
namespace {

std::mutex& guard() {
  static std::mutex m;
  return m;
}

Sink& current() {
  static Sink sink;
  return sink;
}

}  // namespace

void warn(std::string_view message) {
  std::lock_guard lock(guard());
  if (current()) current()(message);
  else std::cerr << "warning: " << message << '\n';
}

Sink set_sink(Sink sink) {
  std::lock_guard lock(guard());
  Sink previous = std::move(current());
  current() = std::move(sink);
  return previous;
}

}  // namespace nlslab::log
