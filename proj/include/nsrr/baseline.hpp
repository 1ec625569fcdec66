#pragma once

#include <vector>

#include "nsrr/chain.hpp"

namespace nsrr {

/// Rigid transform minimizing || R * backward + T * e^T - forward ||_F^2:
/// rotation from the SVD of the centered cross-covariance, translation
/// aligning the centroids.
RigidTransform2 pairwise_register(const PointSet2& forward,
                                  const PointSet2& backward);

/// Sequential pairwise baseline: section 1 is the reference and each
/// subsequent section composes its pairwise solution onto the accumulated
/// frame. With noisy correspondences the error accumulates along the chain,
/// so the final transform is generally NOT the identity — the returned
/// sequence deliberately skips the fixed-endpoint contract.
std::vector<RigidTransform2> sequential_solve(const SectionChain& chain);

}  // namespace nsrr
