#include "morphcloud/kernels.hpp"

#include <cmath>
#include <cstring>

// Reference kernels. These define the exact arithmetic (operation order, rounding)
// that every SIMD variant must reproduce bit-for-bit.

namespace morphcloud::kernels {
namespace {

void xform_f64_scalar(double* dst, const double* src, size_t n, double scale, double offset) {
    for (size_t i = 0; i < n; ++i) dst[i] = src[i] * scale + offset;
}

void blend_f32_scalar(float* dst, const float* a, const float* b, size_t n, float alpha) {
    const float beta = 1.0f - alpha;
    for (size_t i = 0; i < n; ++i) dst[i] = a[i] * alpha + b[i] * beta;
}

void blend_round_u8_scalar(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n,
                           float alpha) {
    const float beta = 1.0f - alpha;
    for (size_t i = 0; i < n; ++i) {
        // half-up rounding; result stays in [0,255] because alpha is in [0,1]
        float v = static_cast<float>(a[i]) * alpha + static_cast<float>(b[i]) * beta;
        dst[i] = static_cast<uint8_t>(static_cast<int>(v + 0.5f));
    }
}

void hamming256_scalar(const uint8_t* q, const uint8_t* db, size_t count, uint16_t* out) {
    uint64_t qw[4];
    std::memcpy(qw, q, 32);
    for (size_t j = 0; j < count; ++j) {
        uint64_t dw[4];
        std::memcpy(dw, db + j * 32, 32);
        int d = __builtin_popcountll(qw[0] ^ dw[0]) + __builtin_popcountll(qw[1] ^ dw[1]) +
                __builtin_popcountll(qw[2] ^ dw[2]) + __builtin_popcountll(qw[3] ^ dw[3]);
        out[j] = static_cast<uint16_t>(d);
    }
}

void masked_accum_f32_scalar(double* acc, const float* v, const uint8_t* mask, size_t n) {
    for (size_t i = 0; i < n; ++i)
        acc[i] += mask[i] ? static_cast<double>(v[i]) : 0.0;
}

} // namespace

const Ops& scalar_ops() {
    static const Ops ops = {
        "scalar",
        xform_f64_scalar,
        blend_f32_scalar,
        blend_round_u8_scalar,
        hamming256_scalar,
        masked_accum_f32_scalar,
    };
    return ops;
}

} // namespace morphcloud::kernels
