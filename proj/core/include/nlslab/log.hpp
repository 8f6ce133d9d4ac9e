#pragma once

#include <functional>
#include <string_view>

namespace nlslab::log {

using Sink = std::function<void(std::string_view)>;

/// Reports a recoverable anomaly. Goes to stderr unless a sink is installed.
void warn(std::string_view message);

/// Replaces the warning sink; an empty function restores stderr. Returns the
/// previous sink.
Sink set_sink(Sink sink);

}  // namespace nlslab::log
