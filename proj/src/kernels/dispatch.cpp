#include <atomic>

#include "varbounds/kernels.hpp"

namespace varbounds::kernels {

bool avx2_available() {
#if defined(VARBOUNDS_HAVE_AVX2)
    static const bool ok = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return ok;
#else
    return false;
#endif
}

namespace {
std::atomic<Backend>& current() {
    static std::atomic<Backend> b{avx2_available() ? Backend::Avx2 : Backend::Scalar};
    return b;
}
}  // namespace

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_available()) return;
    current().store(b, std::memory_order_relaxed);
}

const KernelTable& table(Backend b) {
#if defined(VARBOUNDS_HAVE_AVX2)
    if (b == Backend::Avx2 && avx2_available()) return detail::avx2_table;
#else
    (void)b;
#endif
    return detail::scalar_table;
}

const KernelTable& active() { return table(active_backend()); }

const char* to_string(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

}  // namespace varbounds::kernels
