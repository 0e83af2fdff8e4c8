#include "morphcloud/kernels.hpp"

#if defined(__ARM_NEON) || defined(__ARM_NEON__)

#include <arm_neon.h>

// NEON variants, kept structurally parallel to the scalar reference: separate
// multiply and add (no fused vmla), truncating float->int conversion.

namespace morphcloud::kernels {
namespace {

#if defined(__aarch64__)
void xform_f64_neon(double* dst, const double* src, size_t n, double scale, double offset) {
    const float64x2_t vs = vdupq_n_f64(scale);
    const float64x2_t vo = vdupq_n_f64(offset);
    size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(src + i);
        v = vaddq_f64(vmulq_f64(v, vs), vo);
        vst1q_f64(dst + i, v);
    }
    for (; i < n; ++i) dst[i] = src[i] * scale + offset;
}
#else
void xform_f64_neon(double* dst, const double* src, size_t n, double scale, double offset) {
    for (size_t i = 0; i < n; ++i) dst[i] = src[i] * scale + offset;
}
#endif

void blend_f32_neon(float* dst, const float* a, const float* b, size_t n, float alpha) {
    const float beta = 1.0f - alpha;
    const float32x4_t va = vdupq_n_f32(alpha);
    const float32x4_t vb = vdupq_n_f32(beta);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t xa = vmulq_f32(vld1q_f32(a + i), va);
        float32x4_t xb = vmulq_f32(vld1q_f32(b + i), vb);
        vst1q_f32(dst + i, vaddq_f32(xa, xb));
    }
    for (; i < n; ++i) dst[i] = a[i] * alpha + b[i] * beta;
}

void blend_round_u8_neon(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n,
                         float alpha) {
    const float beta = 1.0f - alpha;
    const float32x4_t va = vdupq_n_f32(alpha);
    const float32x4_t vb = vdupq_n_f32(beta);
    const float32x4_t half = vdupq_n_f32(0.5f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        uint8x8_t a8 = vld1_u8(a + i);
        uint8x8_t b8 = vld1_u8(b + i);
        uint16x8_t a16 = vmovl_u8(a8);
        uint16x8_t b16 = vmovl_u8(b8);
        float32x4_t falo = vcvtq_f32_u32(vmovl_u16(vget_low_u16(a16)));
        float32x4_t fahi = vcvtq_f32_u32(vmovl_u16(vget_high_u16(a16)));
        float32x4_t fblo = vcvtq_f32_u32(vmovl_u16(vget_low_u16(b16)));
        float32x4_t fbhi = vcvtq_f32_u32(vmovl_u16(vget_high_u16(b16)));
        float32x4_t lo = vaddq_f32(vaddq_f32(vmulq_f32(falo, va), vmulq_f32(fblo, vb)), half);
        float32x4_t hi = vaddq_f32(vaddq_f32(vmulq_f32(fahi, va), vmulq_f32(fbhi, vb)), half);
        uint32x4_t rlo = vcvtq_u32_f32(lo); // truncation == floor, operand >= 0.5
        uint32x4_t rhi = vcvtq_u32_f32(hi);
        uint16x8_t r16 = vcombine_u16(vmovn_u32(rlo), vmovn_u32(rhi));
        vst1_u8(dst + i, vmovn_u16(r16));
    }
    for (; i < n; ++i) {
        float v = static_cast<float>(a[i]) * alpha + static_cast<float>(b[i]) * beta;
        dst[i] = static_cast<uint8_t>(static_cast<int>(v + 0.5f));
    }
}

void hamming256_neon(const uint8_t* q, const uint8_t* db, size_t count, uint16_t* out) {
    const uint8x16_t q0 = vld1q_u8(q);
    const uint8x16_t q1 = vld1q_u8(q + 16);
    for (size_t j = 0; j < count; ++j) {
        uint8x16_t x0 = veorq_u8(q0, vld1q_u8(db + j * 32));
        uint8x16_t x1 = veorq_u8(q1, vld1q_u8(db + j * 32 + 16));
        uint8x16_t c = vaddq_u8(vcntq_u8(x0), vcntq_u8(x1)); // per-byte sums <= 16
        uint16x8_t s16 = vpaddlq_u8(c);
        uint32x4_t s32 = vpaddlq_u16(s16);
        uint64x2_t s64 = vpaddlq_u32(s32);
        out[j] = static_cast<uint16_t>(vgetq_lane_u64(s64, 0) + vgetq_lane_u64(s64, 1));
    }
}

void masked_accum_f32_neon(double* acc, const float* v, const uint8_t* mask, size_t n) {
    for (size_t i = 0; i < n; ++i)
        acc[i] += mask[i] ? static_cast<double>(v[i]) : 0.0;
}

} // namespace

const Ops& neon_ops() {
    static const Ops ops = {
        "neon",
        xform_f64_neon,
        blend_f32_neon,
        blend_round_u8_neon,
        hamming256_neon,
        masked_accum_f32_neon,
    };
    return ops;
}

} // namespace morphcloud::kernels

#endif // __ARM_NEON
