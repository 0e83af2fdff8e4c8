#include "morphcloud/kernels.hpp"

#if defined(__AVX2__)

#include <immintrin.h>

#include <cstring>

// AVX2 variants. Multiplies and adds are kept as separate instructions (no FMA) so
// results match the scalar reference bit-for-bit; tails fall back to the identical
// scalar expressions.

namespace morphcloud::kernels {
namespace {

void xform_f64_avx2(double* dst, const double* src, size_t n, double scale, double offset) {
    const __m256d vs = _mm256_set1_pd(scale);
    const __m256d vo = _mm256_set1_pd(offset);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(src + i);
        v = _mm256_add_pd(_mm256_mul_pd(v, vs), vo);
        _mm256_storeu_pd(dst + i, v);
    }
    for (; i < n; ++i) dst[i] = src[i] * scale + offset;
}

void blend_f32_avx2(float* dst, const float* a, const float* b, size_t n, float alpha) {
    const float beta = 1.0f - alpha;
    const __m256 va = _mm256_set1_ps(alpha);
    const __m256 vb = _mm256_set1_ps(beta);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 xa = _mm256_mul_ps(_mm256_loadu_ps(a + i), va);
        __m256 xb = _mm256_mul_ps(_mm256_loadu_ps(b + i), vb);
        _mm256_storeu_ps(dst + i, _mm256_add_ps(xa, xb));
    }
    for (; i < n; ++i) dst[i] = a[i] * alpha + b[i] * beta;
}

void blend_round_u8_avx2(uint8_t* dst, const uint8_t* a, const uint8_t* b, size_t n,
                         float alpha) {
    const float beta = 1.0f - alpha;
    const __m256 va = _mm256_set1_ps(alpha);
    const __m256 vb = _mm256_set1_ps(beta);
    const __m256 half = _mm256_set1_ps(0.5f);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m128i a8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(a + i));
        __m128i b8 = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(b + i));
        __m256 fa = _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(a8));
        __m256 fb = _mm256_cvtepi32_ps(_mm256_cvtepu8_epi32(b8));
        __m256 v = _mm256_add_ps(_mm256_mul_ps(fa, va), _mm256_mul_ps(fb, vb));
        v = _mm256_add_ps(v, half);
        __m256i r = _mm256_cvttps_epi32(v); // truncation == floor, v >= 0.5
        __m128i lo = _mm256_castsi256_si128(r);
        __m128i hi = _mm256_extracti128_si256(r, 1);
        __m128i p16 = _mm_packus_epi32(lo, hi);
        __m128i p8 = _mm_packus_epi16(p16, p16);
        _mm_storel_epi64(reinterpret_cast<__m128i*>(dst + i), p8);
    }
    for (; i < n; ++i) {
        float v = static_cast<float>(a[i]) * alpha + static_cast<float>(b[i]) * beta;
        dst[i] = static_cast<uint8_t>(static_cast<int>(v + 0.5f));
    }
}

void hamming256_avx2(const uint8_t* q, const uint8_t* db, size_t count, uint16_t* out) {
    const __m256i qv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(q));
    const __m256i nib = _mm256_set1_epi8(0x0f);
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    for (size_t j = 0; j < count; ++j) {
        __m256i dv = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(db + j * 32));
        __m256i x = _mm256_xor_si256(qv, dv);
        __m256i lo = _mm256_shuffle_epi8(lut, _mm256_and_si256(x, nib));
        __m256i hi = _mm256_shuffle_epi8(lut, _mm256_and_si256(_mm256_srli_epi16(x, 4), nib));
        __m256i cnt = _mm256_sad_epu8(_mm256_add_epi8(lo, hi), _mm256_setzero_si256());
        __m128i s = _mm_add_epi64(_mm256_castsi256_si128(cnt),
                                  _mm256_extracti128_si256(cnt, 1));
        s = _mm_add_epi64(s, _mm_unpackhi_epi64(s, s));
        out[j] = static_cast<uint16_t>(_mm_cvtsi128_si64(s));
    }
}

void masked_accum_f32_avx2(double* acc, const float* v, const uint8_t* mask, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        uint32_t m4;
        std::memcpy(&m4, mask + i, 4);
        __m128i m8 = _mm_cvtsi32_si128(static_cast<int>(m4));
        __m128i zero8 = _mm_cmpeq_epi8(m8, _mm_setzero_si128()); // 0xff where mask == 0
        __m256d kill = _mm256_castsi256_pd(_mm256_cvtepi8_epi64(zero8));
        __m256d val = _mm256_cvtps_pd(_mm_loadu_ps(v + i));
        val = _mm256_andnot_pd(kill, val); // +0.0 where masked out
        __m256d a = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(a, val));
    }
    for (; i < n; ++i) acc[i] += mask[i] ? static_cast<double>(v[i]) : 0.0;
}

} // namespace

const Ops& avx2_ops() {
    static const Ops ops = {
        "avx2",
        xform_f64_avx2,
        blend_f32_avx2,
        blend_round_u8_avx2,
        hamming256_avx2,
        masked_accum_f32_avx2,
    };
    return ops;
}

} // namespace morphcloud::kernels

#endif // __AVX2__
