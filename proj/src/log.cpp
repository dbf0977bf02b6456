#include "mkv/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace mkv::log {

static Level parse_env() {
    const char* e = std::getenv("HOOKEAN_MKV_LOG");
    if (!e) return Level::warn;
    if (std::strcmp(e, "error") == 0) return Level::error;
    if (std::strcmp(e, "warn") == 0) return Level::warn;
    if (std::strcmp(e, "info") == 0) return Level::info;
    if (std::strcmp(e, "debug") == 0) return Level::debug;
    return Level::warn;
}

Level level() {
    static Level lv = parse_env();
    return lv;
}

void vwrite(Level lv, const char* fmt, std::va_list args) {
    if (static_cast<int>(lv) > static_cast<int>(level())) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::fprintf(stderr, "[mkv:%s] ", names[static_cast<int>(lv)]);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
}

void write(Level lv, const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    vwrite(lv, fmt, args);
    va_end(args);
}

}  // namespace mkv::log
