#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace morphcloud::kernels {

// Hot inner loops, scalar reference first, SIMD variants selected at runtime.
// Every variant must be bit-identical to the scalar reference (the build disables
// fp contraction and variants avoid FMA), which the kernel equivalence tests assert.
//
//  xform_f64       dst[i] = src[i] * scale + offset              (vertex transforms)
//  blend_f32       dst[i] = a[i] * alpha + b[i] * (1 - alpha)    (depth blending)
//  blend_round_u8  dst[i] = floor(a*alpha + b*(1-alpha) + 0.5)   (color blending)
//  hamming256      out[j] = popcount(q ^ db[j]) over 256 bits    (descriptor matching)
//  masked_accum    acc[i] += mask[i] ? v[i] : 0                  (view averaging)
struct Ops {
    const char* name;
    void (*xform_f64)(double* dst, const double* src, size_t n, double scale, double offset);
    void (*blend_f32)(float* dst, const float* a, const float* b, size_t n, float alpha);
    void (*blend_round_u8)(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n,
                           float alpha);
    void (*hamming256)(const uint8_t* q, const uint8_t* db, size_t count, uint16_t* out);
    void (*masked_accum_f32)(double* acc, const float* v, const uint8_t* mask, size_t n);
};

// Active implementation. Chosen once: MORPHCLOUD_KERNELS env var (scalar/avx2/neon)
// wins if usable, otherwise the best variant the CPU supports.
const Ops& ops();

const Ops& scalar_ops();

// Every implementation usable on this machine (always includes scalar).
std::vector<const Ops*> available_ops();

// Test hook: force a specific implementation by name; nullptr restores auto-detection.
// Returns false if the name is unknown or unsupported here.
bool force_impl(const char* name);

} // namespace morphcloud::kernels
