#pragma once

// Runtime-dispatched arithmetic kernels for the dense inner loops of the flow
// solver and the kinematics stage. Every SIMD variant performs the same
// floating-point operations in the same order as the scalar reference, so the
// variants agree bit-for-bit (reductions use four interleaved accumulators in
// both paths). Build flags disable FP contraction for the same reason.

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace mexp::simd {

enum class Level { scalar, avx2 };

std::string_view to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

/// One primal step of the TV-L1 scheme over n pixels:
/// threshold the linearized residual, then u = v + theta * div(p).
/// Returns the sum of squared changes of (u1, u2).
struct PrimalStep {
    std::size_t n = 0;
    const double* grad_x = nullptr;   // warped target gradient
    const double* grad_y = nullptr;
    const double* grad_sq = nullptr;  // grad_x^2 + grad_y^2
    const double* rho_c = nullptr;    // constant part of the linearized residual
    const double* div_p1 = nullptr;
    const double* div_p2 = nullptr;
    double* u1 = nullptr;
    double* u2 = nullptr;
    double lambda_theta = 0.0;
    double theta = 0.0;
};

/// Dual step: forward gradient of u1/u2 and the projected update of p.
struct DualStep {
    int width = 0;
    int height = 0;
    const double* u1 = nullptr;
    const double* u2 = nullptr;
    double* p11 = nullptr;
    double* p12 = nullptr;
    double* p21 = nullptr;
    double* p22 = nullptr;
    double tau_over_theta = 0.0;
};

struct KernelTable {
    Level level;
    double (*tvl1_primal)(const PrimalStep& step);
    void (*tvl1_dual)(const DualStep& step);
    /// Discrete divergence, the negative adjoint of the forward gradient.
    void (*divergence)(int width, int height, const double* px, const double* py, double* out);
    /// out = sqrt(a^2 + b^2)
    void (*magnitude)(std::size_t n, const double* a, const double* b, double* out);
    /// out = sqrt(exx^2 + eyy^2 + exy^2 + eyx^2) from the four flow derivatives.
    void (*strain_norm)(std::size_t n, const double* ux, const double* uy, const double* vx,
                        const double* vy, double* out);
};

bool supported(Level level);
std::vector<Level> supported_levels();

/// Table for a specific level; throws ConfigError if the CPU lacks it.
const KernelTable& table(Level level);

/// Table currently selected: the best supported level unless overridden by
/// set_active_level() or the MEXP_SIMD environment variable (scalar|avx2).
const KernelTable& active();
Level active_level();
void set_active_level(Level level);

/// Restores the previous selection on scope exit.
class ScopedLevel {
public:
    explicit ScopedLevel(Level level) : previous_(active_level()) { set_active_level(level); }
    ~ScopedLevel() { set_active_level(previous_); }
    ScopedLevel(const ScopedLevel&) = delete;
    ScopedLevel& operator=(const ScopedLevel&) = delete;

private:
    Level previous_;
};

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
}  // namespace detail

}  // namespace mexp::simd
