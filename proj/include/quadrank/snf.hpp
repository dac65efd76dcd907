#pragma once

#include "quadrank/numtheory.hpp"

#include <vector>

namespace quadrank {

using IntMatrix = std::vector<std::vector<i128>>;

/// U * A * V = diag(d_0, ..., d_{n-1}) with d_i | d_{i+1}, d_i >= 0.
/// Row transforms are not kept; V and V^-1 are.
struct SmithForm {
    std::vector<i128> diagonal;
    IntMatrix V;
    IntMatrix V_inverse;
};

/// A must be square and nonsingular.
SmithForm smith_normal_form(IntMatrix A);

}  // namespace quadrank
