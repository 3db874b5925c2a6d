#include "foilforge/log.hpp"

#include <iostream>
#include <mutex>

namespace foilforge {
namespace {

std::mutex sink_mutex;

LogSink& sink_slot() {
    static LogSink sink = [](std::string_view message) { std::cerr << message << '\n'; };
    return sink;
}

} // namespace

LogSink set_log_sink(LogSink sink) {
    std::lock_guard lock(sink_mutex);
    LogSink previous = std::move(sink_slot());
    sink_slot() = std::move(sink);
    return previous;
}

void log_note(std::string_view message) {
    std::lock_guard lock(sink_mutex);
    if (sink_slot()) {
        sink_slot()(message);
    }
}

} // namespace foilforge
