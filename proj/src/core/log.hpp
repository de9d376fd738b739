#pragma once

#include <functional>
#include <string_view>

namespace spa {

using LogSink = std::function<void(std::string_view)>;

/// Replaces the process-wide progress sink (stderr by default). An empty
/// function silences logging.
void set_log_sink(LogSink sink);
void log_message(std::string_view message);

}  // namespace spa
