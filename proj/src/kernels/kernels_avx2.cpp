// AVX2 variants of the kernels in kernels_scalar.cpp. Compiled with -mavx2 and
// only reached after a runtime CPU check. No FMA: each lane must round exactly
// like the scalar reference.

#include <immintrin.h>

#include "scalar_ops.hpp"

namespace mexp::simd::detail {
namespace {

inline __m256d negate(__m256d x) { return _mm256_xor_pd(x, _mm256_set1_pd(-0.0)); }

double primal(const PrimalStep& s) {
    const __m256d lt = _mm256_set1_pd(s.lambda_theta);
    const __m256d neg_lt = _mm256_set1_pd(-s.lambda_theta);
    const __m256d theta = _mm256_set1_pd(s.theta);
    const __m256d grad_zero = _mm256_set1_pd(kGradIsZero);
    __m256d acc = _mm256_setzero_pd();

    std::size_t i = 0;
    for (; i + 4 <= s.n; i += 4) {
        const __m256d gx = _mm256_loadu_pd(s.grad_x + i);
        const __m256d gy = _mm256_loadu_pd(s.grad_y + i);
        const __m256d g2 = _mm256_loadu_pd(s.grad_sq + i);
        const __m256d u1 = _mm256_loadu_pd(s.u1 + i);
        const __m256d u2 = _mm256_loadu_pd(s.u2 + i);

        const __m256d rho = _mm256_add_pd(
            _mm256_add_pd(_mm256_loadu_pd(s.rho_c + i), _mm256_mul_pd(gx, u1)), _mm256_mul_pd(gy, u2));
        const __m256d lt_grad = _mm256_mul_pd(lt, g2);
        const __m256d below = _mm256_cmp_pd(rho, negate(lt_grad), _CMP_LT_OQ);
        const __m256d above = _mm256_cmp_pd(rho, lt_grad, _CMP_GT_OQ);
        const __m256d usable = _mm256_cmp_pd(g2, grad_zero, _CMP_GE_OQ);

        const __m256d fi = _mm256_div_pd(negate(rho), g2);
        __m256d d1 = _mm256_and_pd(usable, _mm256_mul_pd(fi, gx));
        __m256d d2 = _mm256_and_pd(usable, _mm256_mul_pd(fi, gy));
        d1 = _mm256_blendv_pd(d1, _mm256_mul_pd(lt, gx), below);
        d2 = _mm256_blendv_pd(d2, _mm256_mul_pd(lt, gy), below);
        d1 = _mm256_blendv_pd(d1, _mm256_mul_pd(neg_lt, gx), above);
        d2 = _mm256_blendv_pd(d2, _mm256_mul_pd(neg_lt, gy), above);

        const __m256d n1 = _mm256_add_pd(_mm256_add_pd(u1, d1),
                                         _mm256_mul_pd(theta, _mm256_loadu_pd(s.div_p1 + i)));
        const __m256d n2 = _mm256_add_pd(_mm256_add_pd(u2, d2),
                                         _mm256_mul_pd(theta, _mm256_loadu_pd(s.div_p2 + i)));
        _mm256_storeu_pd(s.u1 + i, n1);
        _mm256_storeu_pd(s.u2 + i, n2);
        const __m256d e1 = _mm256_sub_pd(n1, u1);
        const __m256d e2 = _mm256_sub_pd(n2, u2);
        acc = _mm256_add_pd(acc, _mm256_add_pd(_mm256_mul_pd(e1, e1), _mm256_mul_pd(e2, e2)));
    }

    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (; i < s.n; ++i) lanes[i & 3] += primal_element(s, i);
    return combine_lanes(lanes);
}

void dual(const DualStep& s) {
    const __m256d t = _mm256_set1_pd(s.tau_over_theta);
    const __m256d one = _mm256_set1_pd(1.0);
    const int w = s.width;
    for (int y = 0; y < s.height; ++y) {
        int x = 0;
        if (y < s.height - 1) {
            for (; x + 4 <= w - 1; x += 4) {
                const std::size_t i = static_cast<std::size_t>(y) * w + x;
                const __m256d u1 = _mm256_loadu_pd(s.u1 + i);
                const __m256d u2 = _mm256_loadu_pd(s.u2 + i);
                const __m256d u1x = _mm256_sub_pd(_mm256_loadu_pd(s.u1 + i + 1), u1);
                const __m256d u1y = _mm256_sub_pd(_mm256_loadu_pd(s.u1 + i + w), u1);
                const __m256d u2x = _mm256_sub_pd(_mm256_loadu_pd(s.u2 + i + 1), u2);
                const __m256d u2y = _mm256_sub_pd(_mm256_loadu_pd(s.u2 + i + w), u2);
                const __m256d ng1 = _mm256_add_pd(
                    one, _mm256_mul_pd(t, _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(u1x, u1x),
                                                                       _mm256_mul_pd(u1y, u1y)))));
                const __m256d ng2 = _mm256_add_pd(
                    one, _mm256_mul_pd(t, _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(u2x, u2x),
                                                                       _mm256_mul_pd(u2y, u2y)))));
                _mm256_storeu_pd(s.p11 + i, _mm256_div_pd(
                    _mm256_add_pd(_mm256_loadu_pd(s.p11 + i), _mm256_mul_pd(t, u1x)), ng1));
                _mm256_storeu_pd(s.p12 + i, _mm256_div_pd(
                    _mm256_add_pd(_mm256_loadu_pd(s.p12 + i), _mm256_mul_pd(t, u1y)), ng1));
                _mm256_storeu_pd(s.p21 + i, _mm256_div_pd(
                    _mm256_add_pd(_mm256_loadu_pd(s.p21 + i), _mm256_mul_pd(t, u2x)), ng2));
                _mm256_storeu_pd(s.p22 + i, _mm256_div_pd(
                    _mm256_add_pd(_mm256_loadu_pd(s.p22 + i), _mm256_mul_pd(t, u2y)), ng2));
            }
        }
        for (; x < w; ++x) dual_element(s, x, y);
    }
}

void divergence(int width, int height, const double* px, const double* py, double* out) {
    for (int y = 0; y < height; ++y) {
        const bool interior_row = y > 0 && y < height - 1;
        int x = 0;
        if (interior_row && width > 2) {
            out[static_cast<std::size_t>(y) * width] = divergence_element(width, height, px, py, 0, y);
            x = 1;
            for (; x + 4 <= width - 1; x += 4) {
                const std::size_t i = static_cast<std::size_t>(y) * width + x;
                const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(px + i), _mm256_loadu_pd(px + i - 1));
                const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(py + i), _mm256_loadu_pd(py + i - width));
                _mm256_storeu_pd(out + i, _mm256_add_pd(dx, dy));
            }
        }
        for (; x < width; ++x)
            out[static_cast<std::size_t>(y) * width + x] = divergence_element(width, height, px, py, x, y);
    }
}

void magnitude(std::size_t n, const double* a, const double* b, double* out) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        _mm256_storeu_pd(out + i,
                         _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(va, va), _mm256_mul_pd(vb, vb))));
    }
    for (; i < n; ++i) out[i] = magnitude_element(a[i], b[i]);
}

void strain_norm(std::size_t n, const double* ux, const double* uy, const double* vx,
                 const double* vy, double* out) {
    const __m256d half = _mm256_set1_pd(0.5);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(ux + i);
        const __m256d d = _mm256_loadu_pd(vy + i);
        const __m256d shear = _mm256_mul_pd(half, _mm256_add_pd(_mm256_loadu_pd(uy + i),
                                                                _mm256_loadu_pd(vx + i)));
        const __m256d sq_shear = _mm256_mul_pd(shear, shear);
        __m256d sum = _mm256_add_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(d, d));
        sum = _mm256_add_pd(_mm256_add_pd(sum, sq_shear), sq_shear);
        _mm256_storeu_pd(out + i, _mm256_sqrt_pd(sum));
    }
    for (; i < n; ++i) out[i] = strain_element(ux[i], uy[i], vx[i], vy[i]);
}

}  // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{Level::avx2, primal, dual, divergence, magnitude, strain_norm};
    return &table;
}

}  // namespace mexp::simd::detail
