#include <atomic>
#include <cstdlib>
#include <string>

#include "mexp/errors.hpp"
#include "mexp/simd.hpp"

namespace mexp::simd {

#ifndef MEXP_HAVE_AVX2
namespace detail {
const KernelTable* avx2_table() { return nullptr; }
}  // namespace detail
#endif

namespace {

bool cpu_has_avx2() {
#if defined(MEXP_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Level initial_level() {
    if (const char* env = std::getenv("MEXP_SIMD")) {
        if (auto level = parse_level(env); level && supported(*level)) return *level;
    }
    return supported(Level::avx2) ? Level::avx2 : Level::scalar;
}

std::atomic<Level>& selected() {
    static std::atomic<Level> level{initial_level()};
    return level;
}

}  // namespace

std::string_view to_string(Level level) {
    switch (level) {
    case Level::scalar: return "scalar";
    case Level::avx2: return "avx2";
    }
    return "scalar";
}

std::optional<Level> parse_level(std::string_view text) {
    if (text == "scalar") return Level::scalar;
    if (text == "avx2") return Level::avx2;
    return std::nullopt;
}

bool supported(Level level) {
    switch (level) {
    case Level::scalar: return true;
    case Level::avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    }
    return false;
}

std::vector<Level> supported_levels() {
    std::vector<Level> out{Level::scalar};
    if (supported(Level::avx2)) out.push_back(Level::avx2);
    return out;
}

const KernelTable& table(Level level) {
    if (!supported(level))
        throw ConfigError("SIMD level '" + std::string(to_string(level)) + "' not supported on this CPU");
    if (level == Level::avx2) return *detail::avx2_table();
    return detail::scalar_table();
}

const KernelTable& active() { return table(selected().load()); }

Level active_level() { return selected().load(); }

void set_active_level(Level level) {
    if (!supported(level))
        throw ConfigError("SIMD level '" + std::string(to_string(level)) + "' not supported on this CPU");
    selected().store(level);
}

}  // namespace mexp::simd
