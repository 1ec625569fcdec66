#include "nsrr/baseline.hpp"

#include <string>

#include "nsrr/errors.hpp"
#include "nsrr/rotation_solver.hpp"

namespace nsrr {

RigidTransform2 pairwise_register(const PointSet2& forward,
                                  const PointSet2& backward) {
  if (forward.count() != backward.count()) {
    throw DataError("pairwise_register: count mismatch (" +
                    std::to_string(forward.count()) + " vs " +
                    std::to_string(backward.count()) + ")");
  }
  if (forward.count() < 1) {
    throw DataError("pairwise_register: empty point sets");
  }
  const CentralizedSet f = centralize(forward);
  const CentralizedSet b = centralize(backward);
  const Mat2 rotation =
      pairwise_factor(cross_covariance(b.centered, f.centered)).base;
  return {rotation, f.centroid - rotation * b.centroid};
}

std::vector<RigidTransform2> sequential_solve(const SectionChain& chain) {
  const ChainValidation validation = validate_chain(chain);
  if (!validation.ok()) {
    throw DataError("sequential_solve: invalid chain: " + validation.summary());
  }

  std::vector<RigidTransform2> frames(static_cast<std::size_t>(chain.n_sections));
  frames[0] = RigidTransform2::identity();
  for (std::size_t k = 0; k < chain.pairs.size(); ++k) {
    const RigidTransform2 pairwise =
        pairwise_register(chain.pairs[k].forward, chain.pairs[k].backward);
    frames[k + 1].rotation = frames[k].rotation * pairwise.rotation;
    frames[k + 1].translation =
        frames[k].rotation * pairwise.translation + frames[k].translation;
  }
  return frames;
}

}  // namespace nsrr
