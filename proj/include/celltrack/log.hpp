#pragma once

#include <nlohmann/json.hpp>
#include <string>

namespace celltrack {

enum class LogLevel { Off = 0, Error = 1, Info = 2, Debug = 3 };

/// Level from RFS_LOG (off, error, info, debug). Defaults to error.
LogLevel log_level();
void set_log_level(LogLevel level);

/// One JSON object per line on stderr: {"level":..., "event":..., ...fields}.
void log_event(LogLevel level, const std::string& event, nlohmann::json fields = nlohmann::json::object());

}  // namespace celltrack
