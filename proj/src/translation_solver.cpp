#include "nsrr/translation_solver.hpp"

#include <string>

#include "nsrr/errors.hpp"

namespace nsrr {

std::vector<ResidualBlock> residual_blocks(const SectionChain& chain,
                                           std::span<const Mat2> rotations) {
  if (rotations.size() != static_cast<std::size_t>(chain.n_sections) ||
      chain.pairs.size() + 1 != rotations.size()) {
    throw DataError("residual_blocks: got " + std::to_string(rotations.size()) +
                    " rotations for " + std::to_string(chain.n_sections) +
                    " sections with " + std::to_string(chain.pairs.size()) +
                    " pairs");
  }
  for (const Mat2& r : rotations) {
    if (!is_rotation(r)) {
      throw DataError("residual_blocks: invalid rotation matrix");
    }
  }
  std::vector<ResidualBlock> blocks;
  blocks.reserve(chain.pairs.size());
  for (std::size_t k = 0; k < chain.pairs.size(); ++k) {
    blocks.push_back({PointSet2(rotations[k] * chain.pairs[k].forward.data() -
                                rotations[k + 1] *
                                    chain.pairs[k].backward.data())});
  }
  return blocks;
}

TranslationDeltas solve_deltas(std::span<const ResidualBlock> blocks) {
  const std::size_t count = blocks.size();

  std::vector<Vec2> column_sums(count);
  std::vector<double> inv_counts(count);
  double inv_count_total = 0.0;
  Vec2 weighted_total = Vec2::Zero();
  for (std::size_t k = 0; k < count; ++k) {
    if (blocks[k].count() < 1) {
      throw DataError("solve_deltas: block " + std::to_string(k + 1) +
                      " is empty");
    }
    column_sums[k] = blocks[k].residuals.data().rowwise().sum();
    inv_counts[k] = 1.0 / static_cast<double>(blocks[k].count());
    inv_count_total += inv_counts[k];
    weighted_total += inv_counts[k] * column_sums[k];
  }

  TranslationDeltas result;
  result.deltas.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    result.deltas[k] = -inv_counts[k] * column_sums[k] +
                       (inv_counts[k] / inv_count_total) * weighted_total;
  }
  return result;
}

std::vector<Vec2> accumulate_translations(const TranslationDeltas& deltas) {
  Vec2 sum = Vec2::Zero();
  for (const Vec2& d : deltas.deltas) {
    sum += d;
  }
  if (sum.cwiseAbs().maxCoeff() > 1e-9) {
    throw DataError("accumulate_translations: deltas sum to (" +
                    std::to_string(sum.x()) + ", " + std::to_string(sum.y()) +
                    "), expected zero");
  }
  std::vector<Vec2> translations;
  translations.reserve(deltas.deltas.size() + 1);
  translations.push_back(Vec2::Zero());
  for (const Vec2& d : deltas.deltas) {
    translations.push_back(translations.back() - d);
  }
  return translations;
}

}  // namespace nsrr
