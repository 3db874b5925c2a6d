#pragma once

#include <functional>
#include <string_view>

namespace foilforge {

using LogSink = std::function<void(std::string_view)>;

/// Replaces the process-wide note sink (default: standard error). Returns the previous sink.
LogSink set_log_sink(LogSink sink);

void log_note(std::string_view message);

} // namespace foilforge
