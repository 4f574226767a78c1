#include "scalar_ops.hpp"

namespace mexp::simd::detail {
namespace {

double primal(const PrimalStep& s) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < s.n; ++i) acc[i & 3] += primal_element(s, i);
    return combine_lanes(acc);
}

void dual(const DualStep& s) {
    for (int y = 0; y < s.height; ++y)
        for (int x = 0; x < s.width; ++x) dual_element(s, x, y);
}

void divergence(int width, int height, const double* px, const double* py, double* out) {
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            out[static_cast<std::size_t>(y) * width + x] = divergence_element(width, height, px, py, x, y);
}

void magnitude(std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = magnitude_element(a[i], b[i]);
}

void strain_norm(std::size_t n, const double* ux, const double* uy, const double* vx,
                 const double* vy, double* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = strain_element(ux[i], uy[i], vx[i], vy[i]);
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{Level::scalar, primal, dual, divergence, magnitude, strain_norm};
    return table;
}

}  // namespace mexp::simd::detail
