#pragma once

#include <cmath>

#include "voltcheb/errors.hpp"

namespace voltcheb {

/// The box [0,X] x [0,Y] x [0,Z].
struct Box3 {
    double x = 1.0;
    double y = 1.0;
    double z = 1.0;

    [[nodiscard]] bool is_unit() const noexcept { return x == 1.0 && y == 1.0 && z == 1.0; }
    [[nodiscard]] bool contains(double px, double py, double pz) const noexcept {
        return px >= 0.0 && px <= x && py >= 0.0 && py <= y && pz >= 0.0 && pz <= z;
    }

    friend bool operator==(const Box3&, const Box3&) = default;
};

/// Throws ProblemError unless every extent is positive and finite.
inline void validate_box(const Box3& box) {
    for (double extent : {box.x, box.y, box.z}) {
        if (!(extent > 0.0) || !std::isfinite(extent)) {
            throw ProblemError("domain extents must be positive and finite");
        }
    }
}

}  // namespace voltcheb
