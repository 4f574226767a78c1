#pragma once

#include <vector>

#include "mexp/core.hpp"

namespace mexp {

/// Parameters of the duality-based TV-L1 solver. Defaults follow the
/// reference implementation of the method; see README for the intensity
/// scale they assume.
struct TvL1Params {
    double lambda = 0.15;    // data-attachment weight
    double theta = 0.3;      // coupling between u and the auxiliary field v
    double tau = 0.25;       // dual time step
    int n_scales = 5;        // requested pyramid levels (clamped, see below)
    double zoom = 0.5;       // downsampling factor between levels
    int n_warps = 5;         // warps per level
    int n_iters = 300;       // maximum primal-dual iterations per warp
    double stop_eps = 0.01;  // stop when the RMS flow update drops below this

    void validate() const;
};

/// Smallest pyramid level allowed, in pixels on the short side.
inline constexpr int kMinPyramidSide = 16;

/// Number of levels actually used for an image of the given size.
int effective_scales(int width, int height, const TvL1Params& params);

/// Optional diagnostics of a solve.
struct TvL1Trace {
    int scales_used = 0;
    /// Iterations run per warp, coarsest level first.
    std::vector<int> iterations;
    /// TV-L1 energy (linearised data term) after each iteration of the last
    /// warp at the finest level, before median filtering.
    std::vector<double> final_warp_energy;
};

/// Dense flow from `reference` to `target`: target(x + u, y + v) ~ reference(x, y).
FlowField estimate_tvl1(const Frame& reference, const Frame& target,
                        const TvL1Params& params = {}, TvL1Trace* trace = nullptr);

/// output(x, y) = frame sampled bilinearly at (x + u, y + v), clamped to the border.
Frame warp_bilinear(const Frame& frame, const FlowField& flow);

}  // namespace mexp
