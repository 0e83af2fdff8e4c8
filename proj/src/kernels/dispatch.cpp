#include "morphcloud/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace morphcloud::kernels {

#if defined(MORPHCLOUD_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
#define MORPHCLOUD_AVX2_AVAILABLE 1
const Ops& avx2_ops();
#endif
#if defined(__ARM_NEON) || defined(__ARM_NEON__)
#define MORPHCLOUD_NEON_AVAILABLE 1
const Ops& neon_ops();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(MORPHCLOUD_AVX2_AVAILABLE)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

const Ops* best_ops() {
#if defined(MORPHCLOUD_AVX2_AVAILABLE)
    if (cpu_has_avx2()) return &avx2_ops();
#endif
#if defined(MORPHCLOUD_NEON_AVAILABLE)
    return &neon_ops();
#endif
    return &scalar_ops();
}

const Ops* by_name(const char* name) {
    if (std::strcmp(name, "scalar") == 0) return &scalar_ops();
#if defined(MORPHCLOUD_AVX2_AVAILABLE)
    if (std::strcmp(name, "avx2") == 0 && cpu_has_avx2()) return &avx2_ops();
#endif
#if defined(MORPHCLOUD_NEON_AVAILABLE)
    if (std::strcmp(name, "neon") == 0) return &neon_ops();
#endif
    return nullptr;
}

const Ops* select_initial() {
    if (const char* env = std::getenv("MORPHCLOUD_KERNELS")) {
        if (const Ops* o = by_name(env)) return o;
    }
    return best_ops();
}

const Ops*& current() {
    static const Ops* sel = select_initial();
    return sel;
}

} // namespace

const Ops& ops() { return *current(); }

std::vector<const Ops*> available_ops() {
    std::vector<const Ops*> all;
    all.push_back(&scalar_ops());
#if defined(MORPHCLOUD_AVX2_AVAILABLE)
    if (cpu_has_avx2()) all.push_back(&avx2_ops());
#endif
#if defined(MORPHCLOUD_NEON_AVAILABLE)
    all.push_back(&neon_ops());
#endif
    return all;
}

bool force_impl(const char* name) {
    if (name == nullptr) {
        current() = best_ops();
        return true;
    }
    if (const Ops* o = by_name(name)) {
        current() = o;
        return true;
    }
    return false;
}

} // namespace morphcloud::kernels
