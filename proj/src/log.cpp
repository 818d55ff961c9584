#include "celltrack/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace celltrack {

namespace {

LogLevel from_env() {
  const char* v = std::getenv("RFS_LOG");
  if (v == nullptr) return LogLevel::Error;
  const std::string s(v);
  if (s == "off") return LogLevel::Off;
  if (s == "info") return LogLevel::Info;
  if (s == "debug") return LogLevel::Debug;
  return LogLevel::Error;
}

std::atomic<int>& level_slot() {
  static std::atomic<int> lvl{static_cast<int>(from_env())};
  return lvl;
}

const char* level_name(LogLevel l) {
  switch (l) {
    case LogLevel::Error:
      return "error";
    case LogLevel::Info:
      return "info";
    case LogLevel::Debug:
      return "debug";
    default:
      return "off";
  }
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_slot().load()); }

void set_log_level(LogLevel level) { level_slot().store(static_cast<int>(level)); }

void log_event(LogLevel level, const std::string& event, nlohmann::json fields) {
  if (level == LogLevel::Off || static_cast<int>(level) > level_slot().load()) return;
  nlohmann::json j = {{"level", level_name(level)}, {"event", event}};
  if (fields.is_object()) j.update(fields);
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << j.dump() << '\n';
}

}  // namespace celltrack
