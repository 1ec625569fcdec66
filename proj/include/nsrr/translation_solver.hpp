#pragma once

#include <span>
#include <vector>

#include "nsrr/chain.hpp"

namespace nsrr {

/// Per-pair residual columns R_i * forward_k - R_{i+1} * backward_k,
/// evaluated on the original (uncentered) landmark sets.
struct ResidualBlock {
  PointSet2 residuals;

  int count() const { return residuals.count(); }
};

std::vector<ResidualBlock> residual_blocks(const SectionChain& chain,
                                           std::span<const Mat2> rotations);

/// Per-pair translation differences delta_i = T_i - T_{i+1}. Feasible
/// solutions sum to zero so the endpoints can both stay pinned.
struct TranslationDeltas {
  std::vector<Vec2> deltas;
};

/// Closed-form minimizer of sum_i || Z_i + delta_i * e^T ||_F^2 subject to
/// sum_i delta_i = 0.
TranslationDeltas solve_deltas(std::span<const ResidualBlock> blocks);

/// T_1 = 0 and T_{i+1} = T_i - delta_i; a zero-sum input telescopes back to
/// T_n = 0. Throws DataError when the input deltas do not sum to zero.
std::vector<Vec2> accumulate_translations(const TranslationDeltas& deltas);

}  // namespace nsrr
