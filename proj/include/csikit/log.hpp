#pragma once

#include <string>

namespace csikit::log {

enum class Level { quiet = 0, info = 1, debug = 2 };

void set_level(Level level);
Level level();

/// Parses "quiet" / "info" / "debug" (anything else -> info).
Level parse_level(const std::string& name);

void info(const std::string& message);
void debug(const std::string& message);

}  // namespace csikit::log
