#pragma once

#include <cstdarg>

namespace mkv::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

// Current level, initialized once from the HOOKEAN_MKV_LOG environment
// variable (error|warn|info|debug). Default: warn.
Level level();

void write(Level lv, const char* fmt, ...);

inline void error(const char* fmt, ...);
inline void warn(const char* fmt, ...);
inline void info(const char* fmt, ...);
inline void debug(const char* fmt, ...);

void vwrite(Level lv, const char* fmt, std::va_list args);

inline void error(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    vwrite(Level::error, fmt, args);
    va_end(args);
}

inline void warn(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    vwrite(Level::warn, fmt, args);
    va_end(args);
}

inline void info(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    vwrite(Level::info, fmt, args);
    va_end(args);
}

inline void debug(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    vwrite(Level::debug, fmt, args);
    va_end(args);
}

}  // namespace mkv::log
