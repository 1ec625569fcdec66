#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsrr/chain.hpp"
#include "nsrr/pipeline.hpp"

namespace nsrr {

/// Multiplicative coordinate noise: each observed coordinate c is perturbed
/// by zero-mean Gaussian noise with standard deviation ratio * |c|,
/// independently per component.
struct NoiseSpec {
  double ratio = 0.0;
  std::uint64_t seed = 0;
};

struct TransformMagnitudes {
  double max_rotation = kPi / 4.0;      // uniform in [-max, max]
  double max_translation_frac = 0.1;    // fraction of the shape diameter
};

/// Synthetic chain with known ground truth. Section i observes the shared
/// landmark set of each adjacent overlap under its own rigid transform
/// (plus noise); the first and last transforms are identity / zero.
struct GroundTruthChain {
  SectionChain chain;
  std::vector<RigidTransform2> true_transforms;  // length n
  std::vector<PointSet2> shared_sets;            // length n-1, undeformed
  std::uint64_t seed = 0;
};

/// Closed fish-shaped outline sampled from a parametric curve; the stock
/// base shape for benchmark runs.
PointSet2 fish_outline(int count, double scale = 100.0);

/// Diagonal of the axis-aligned bounding box.
double shape_diameter(const PointSet2& points);
double chain_diameter(const SectionChain& chain);

GroundTruthChain generate(int sections, int points_per_overlap,
                          const PointSet2& base_shape,
                          const TransformMagnitudes& magnitudes,
                          const NoiseSpec& noise);

/// Mean squared distance between registered landmark positions and the
/// noise-free shared-set positions, over both members of every pair.
double mse(const Registration& reg, const GroundTruthChain& truth);

/// Mean distance between the two registered positions of each
/// correspondence, over all pairs and points.
double epe(const SectionChain& chain,
           std::span<const RigidTransform2> transforms);
inline double epe(const SectionChain& chain, const Registration& reg) {
  return epe(chain, std::span<const RigidTransform2>(reg.transforms));
}

/// Mean distance between registered landmark positions and the noise-free
/// shared-set positions (the unsquared companion of mse, usable with
/// unconstrained transform sequences).
double epe_to_truth(std::span<const RigidTransform2> transforms,
                    const GroundTruthChain& truth);

struct SweepSettings {
  int sections = 8;
  int overlap = 30;       // points per correspondence pair
  int shape_points = 256; // samples of the base outline
  double shape_scale = 100.0;
  TransformMagnitudes magnitudes;
  std::uint64_t master_seed = 0;
};

struct SweepRow {
  double noise_ratio = 0.0;
  double mean_mse = 0.0;
  double std_mse = 0.0;
  double mean_mse_unregistered = 0.0;
};

/// For each ratio, averages the solver's mse over `trials` seeded chains.
/// Trial seeds derive from (master seed, ratio index, trial index), so the
/// sweep is reproducible regardless of evaluation order.
std::vector<SweepRow> noise_sweep(std::span<const double> ratios, int trials,
                                  const SweepSettings& settings);

}  // namespace nsrr
