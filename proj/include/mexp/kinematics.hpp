#pragma once

#include "mexp/core.hpp"

namespace mexp {

struct PolarFields {
    ScalarField magnitude;    // rho >= 0
    ScalarField orientation;  // theta in (-pi, pi], 0 where rho == 0
};

/// Magnitude and four-quadrant orientation of every flow vector.
PolarFields polar_decompose(const FlowField& flow);

/// Per-pixel optical strain magnitude
/// |e| = sqrt(exx^2 + eyy^2 + exy^2 + eyx^2), exy = eyx = (du/dy + dv/dx) / 2.
/// Central differences inside, one-sided differences on the border.
ScalarField strain_magnitude(const FlowField& flow);

struct Kinematics {
    ScalarField magnitude;
    ScalarField orientation;
    ScalarField strain;
};

Kinematics compute_kinematics(const FlowField& flow);

}  // namespace mexp
