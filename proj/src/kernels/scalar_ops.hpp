#pragma once

// Per-element bodies shared by the scalar reference and the scalar tails of
// the SIMD variants, so both paths round identically.

#include <cmath>
#include <cstddef>

#include "mexp/simd.hpp"

namespace mexp::simd::detail {

constexpr double kGradIsZero = 1e-10;

inline double primal_element(const PrimalStep& s, std::size_t i) {
    const double gx = s.grad_x[i];
    const double gy = s.grad_y[i];
    const double g2 = s.grad_sq[i];
    const double u1 = s.u1[i];
    const double u2 = s.u2[i];
    const double lt = s.lambda_theta;
    const double rho = s.rho_c[i] + gx * u1 + gy * u2;
    const double lt_grad = lt * g2;

    double d1 = 0.0;
    double d2 = 0.0;
    if (rho < -lt_grad) {
        d1 = lt * gx;
        d2 = lt * gy;
    } else if (rho > lt_grad) {
        d1 = -lt * gx;
        d2 = -lt * gy;
    } else if (g2 >= kGradIsZero) {
        const double fi = -rho / g2;
        d1 = fi * gx;
        d2 = fi * gy;
    }
    const double n1 = (u1 + d1) + s.theta * s.div_p1[i];
    const double n2 = (u2 + d2) + s.theta * s.div_p2[i];
    s.u1[i] = n1;
    s.u2[i] = n2;
    const double e1 = n1 - u1;
    const double e2 = n2 - u2;
    return e1 * e1 + e2 * e2;
}

inline void dual_element(const DualStep& s, int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * s.width + x;
    const bool has_right = x < s.width - 1;
    const bool has_down = y < s.height - 1;
    const double u1x = has_right ? s.u1[i + 1] - s.u1[i] : 0.0;
    const double u1y = has_down ? s.u1[i + s.width] - s.u1[i] : 0.0;
    const double u2x = has_right ? s.u2[i + 1] - s.u2[i] : 0.0;
    const double u2y = has_down ? s.u2[i + s.width] - s.u2[i] : 0.0;
    const double t = s.tau_over_theta;
    const double ng1 = 1.0 + t * std::sqrt(u1x * u1x + u1y * u1y);
    const double ng2 = 1.0 + t * std::sqrt(u2x * u2x + u2y * u2y);
    s.p11[i] = (s.p11[i] + t * u1x) / ng1;
    s.p12[i] = (s.p12[i] + t * u1y) / ng1;
    s.p21[i] = (s.p21[i] + t * u2x) / ng2;
    s.p22[i] = (s.p22[i] + t * u2y) / ng2;
}

inline double divergence_element(int width, int height, const double* px, const double* py,
                                 int x, int y) {
    const std::size_t i = static_cast<std::size_t>(y) * width + x;
    const double ax = x < width - 1 ? px[i] : 0.0;
    const double bx = x > 0 ? px[i - 1] : 0.0;
    const double ay = y < height - 1 ? py[i] : 0.0;
    const double by = y > 0 ? py[i - width] : 0.0;
    return (ax - bx) + (ay - by);
}

inline double magnitude_element(double a, double b) { return std::sqrt(a * a + b * b); }

inline double strain_element(double ux, double uy, double vx, double vy) {
    const double exy = 0.5 * (uy + vx);
    return std::sqrt(((ux * ux + vy * vy) + exy * exy) + exy * exy);
}

inline double combine_lanes(const double acc[4]) { return (acc[0] + acc[1]) + (acc[2] + acc[3]); }

}  // namespace mexp::simd::detail
