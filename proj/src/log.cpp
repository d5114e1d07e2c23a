#include "csikit/log.hpp"

#include <cstdio>

namespace csikit::log {
namespace {
Level g_level = Level::quiet;
}

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

Level parse_level(const std::string& name) {
  if (name == "quiet") return Level::quiet;
  if (name == "debug") return Level::debug;
  return Level::info;
}

void info(const std::string& message) {
  if (g_level >= Level::info) std::fprintf(stderr, "[csikit] %s\n", message.c_str());
}

void debug(const std::string& message) {
  if (g_level >= Level::debug) std::fprintf(stderr, "[csikit] %s\n", message.c_str());
}

}  // namespace csikit::log
