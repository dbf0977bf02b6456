#include "mkv/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "mkv/log.hpp"

namespace mkv::kernels {

const Ops* avx2_ops_table();
const Ops* neon_ops_table();

bool cpu_supports_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* avx2_ops() { return cpu_supports_avx2() ? avx2_ops_table() : nullptr; }

const Ops* neon_ops() {
#if defined(__aarch64__)
    return neon_ops_table();
#else
    return nullptr;
#endif
}

namespace {

std::atomic<const Ops*> g_active{nullptr};

const Ops* resolve(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &scalar_ops();
        case Backend::avx2:
            if (const Ops* t = avx2_ops()) return t;
            log::warn("avx2 backend requested but unavailable; using scalar");
            return &scalar_ops();
        case Backend::neon:
            if (const Ops* t = neon_ops()) return t;
            log::warn("neon backend requested but unavailable; using scalar");
            return &scalar_ops();
        case Backend::auto_select:
        default:
            if (const Ops* t = avx2_ops()) return t;
            if (const Ops* t = neon_ops()) return t;
            return &scalar_ops();
    }
}

Backend backend_from_env() {
    const char* e = std::getenv("HOOKEAN_MKV_SIMD");
    if (!e || std::strcmp(e, "auto") == 0) return Backend::auto_select;
    if (std::strcmp(e, "scalar") == 0) return Backend::scalar;
    if (std::strcmp(e, "avx2") == 0) return Backend::avx2;
    if (std::strcmp(e, "neon") == 0) return Backend::neon;
    log::warn("unrecognized HOOKEAN_MKV_SIMD=%s; using auto", e);
    return Backend::auto_select;
}

}  // namespace

const Ops& ops() {
    const Ops* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        t = resolve(backend_from_env());
        g_active.store(t, std::memory_order_release);
        log::info("kernel backend: %s", t->name);
    }
    return *t;
}

void force_backend(Backend b) {
    g_active.store(resolve(b), std::memory_order_release);
}

}  // namespace mkv::kernels
