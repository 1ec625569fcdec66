#include "nsrr/synthetic.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "nsrr/errors.hpp"
#include "nsrr/rng.hpp"

namespace nsrr {

PointSet2 fish_outline(int count, double scale) {
  if (count < 1) {
    throw DataError("fish_outline: need at least one point");
  }
  // Classic fish curve: x = cos t - sin^2 t / sqrt(2), y = cos t * sin t.
  Eigen::Matrix2Xd pts(2, count);
  for (int k = 0; k < count; ++k) {
    const double t = 2.0 * kPi * static_cast<double>(k) / count;
    const double s = std::sin(t);
    const double c = std::cos(t);
    pts(0, k) = scale * (c - s * s / std::numbers::sqrt2);
    pts(1, k) = scale * (c * s);
  }
  return PointSet2(std::move(pts));
}

double shape_diameter(const PointSet2& points) {
  if (points.count() == 0) {
    return 0.0;
  }
  const Vec2 lo = points.data().rowwise().minCoeff();
  const Vec2 hi = points.data().rowwise().maxCoeff();
  return (hi - lo).norm();
}

double chain_diameter(const SectionChain& chain) {
  Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
  Vec2 hi = Vec2::Constant(-std::numeric_limits<double>::infinity());
  bool any = false;
  for (const CorrespondencePair& pair : chain.pairs) {
    for (const PointSet2* set : {&pair.forward, &pair.backward}) {
      if (set->count() == 0) {
        continue;
      }
      lo = lo.cwiseMin(Vec2(set->data().rowwise().minCoeff()));
      hi = hi.cwiseMax(Vec2(set->data().rowwise().maxCoeff()));
      any = true;
    }
  }
  return any ? (hi - lo).norm() : 0.0;
}

namespace {

PointSet2 add_noise(const PointSet2& points, double ratio, Rng& rng) {
  Eigen::Matrix2Xd noisy = points.data();
  for (Eigen::Index k = 0; k < noisy.cols(); ++k) {
    for (int row = 0; row < 2; ++row) {
      noisy(row, k) += rng.gaussian() * ratio * std::abs(noisy(row, k));
    }
  }
  return PointSet2(std::move(noisy));
}

}  // namespace

GroundTruthChain generate(int sections, int points_per_overlap,
                          const PointSet2& base_shape,
                          const TransformMagnitudes& magnitudes,
                          const NoiseSpec& noise) {
  if (sections < 2) {
    throw DataError("generate: need at least 2 sections");
  }
  if (points_per_overlap < 1) {
    throw DataError("generate: need at least 1 point per overlap");
  }
  if (base_shape.count() < 1) {
    throw DataError("generate: empty base shape");
  }
  if (!(noise.ratio >= 0.0) || !std::isfinite(noise.ratio)) {
    throw DataError("generate: noise ratio must be finite and >= 0");
  }

  Rng transform_rng(derive_seed(noise.seed, 0x7472616e73ull, 0));
  Rng noise_rng(derive_seed(noise.seed, 0x6e6f697365ull, 1));

  GroundTruthChain truth;
  truth.seed = noise.seed;
  truth.chain.n_sections = sections;

  const double diameter = shape_diameter(base_shape);
  const double max_shift = magnitudes.max_translation_frac * diameter;
  truth.true_transforms.assign(static_cast<std::size_t>(sections),
                               RigidTransform2::identity());
  for (int i = 1; i + 1 < sections; ++i) {
    RigidTransform2& t = truth.true_transforms[static_cast<std::size_t>(i)];
    t.rotation = rot(transform_rng.uniform(-magnitudes.max_rotation,
                                           magnitudes.max_rotation));
    t.translation = Vec2(transform_rng.uniform(-max_shift, max_shift),
                         transform_rng.uniform(-max_shift, max_shift));
  }

  // Each overlap is a cyclic window of the base outline, so neighboring
  // subsets share a stretch of the shape.
  const int total = base_shape.count();
  truth.shared_sets.reserve(static_cast<std::size_t>(sections - 1));
  truth.chain.pairs.reserve(static_cast<std::size_t>(sections - 1));
  for (int i = 0; i + 1 < sections; ++i) {
    const int start = static_cast<int>(
        (static_cast<long long>(i) * total) / (sections - 1));
    Eigen::Matrix2Xd window(2, points_per_overlap);
    for (int k = 0; k < points_per_overlap; ++k) {
      window.col(k) = base_shape.point((start + k) % total);
    }
    truth.shared_sets.emplace_back(std::move(window));

    const RigidTransform2& earlier =
        truth.true_transforms[static_cast<std::size_t>(i)];
    const RigidTransform2& later =
        truth.true_transforms[static_cast<std::size_t>(i) + 1];
    CorrespondencePair pair;
    pair.index = i + 1;
    pair.forward =
        add_noise(apply_transform(earlier, truth.shared_sets.back()),
                  noise.ratio, noise_rng);
    pair.backward =
        add_noise(apply_transform(later, truth.shared_sets.back()),
                  noise.ratio, noise_rng);
    truth.chain.pairs.push_back(std::move(pair));
  }
  return truth;
}

namespace {

void check_truth_arity(std::span<const RigidTransform2> transforms,
                       const GroundTruthChain& truth, const char* where) {
  if (transforms.size() != static_cast<std::size_t>(truth.chain.n_sections) ||
      truth.shared_sets.size() != truth.chain.pairs.size() ||
      truth.chain.pairs.size() + 1 != transforms.size()) {
    throw DataError(std::string(where) + ": arity mismatch");
  }
}

}  // namespace

double mse(const Registration& reg, const GroundTruthChain& truth) {
  check_truth_arity(reg.transforms, truth, "mse");
  double sum = 0.0;
  long long instances = 0;
  for (std::size_t k = 0; k < truth.chain.pairs.size(); ++k) {
    const CorrespondencePair& pair = truth.chain.pairs[k];
    const PointSet2& shared = truth.shared_sets[k];
    if (pair.forward.count() != shared.count() ||
        pair.backward.count() != shared.count()) {
      throw DataError("mse: pair " + std::to_string(pair.index) +
                      " does not match its shared set");
    }
    const PointSet2 f = apply_transform(reg.transforms[k], pair.forward);
    const PointSet2 b = apply_transform(reg.transforms[k + 1], pair.backward);
    sum += (f.data() - shared.data()).colwise().squaredNorm().sum();
    sum += (b.data() - shared.data()).colwise().squaredNorm().sum();
    instances += 2LL * shared.count();
  }
  return sum / static_cast<double>(instances);
}

double epe(const SectionChain& chain,
           std::span<const RigidTransform2> transforms) {
  if (transforms.size() != static_cast<std::size_t>(chain.n_sections) ||
      chain.pairs.size() + 1 != transforms.size()) {
    throw DataError("epe: arity mismatch");
  }
  double sum = 0.0;
  long long instances = 0;
  for (std::size_t k = 0; k < chain.pairs.size(); ++k) {
    const CorrespondencePair& pair = chain.pairs[k];
    const PointSet2 f = apply_transform(transforms[k], pair.forward);
    const PointSet2 b = apply_transform(transforms[k + 1], pair.backward);
    sum += (f.data() - b.data()).colwise().norm().sum();
    instances += pair.forward.count();
  }
  return sum / static_cast<double>(instances);
}

double epe_to_truth(std::span<const RigidTransform2> transforms,
                    const GroundTruthChain& truth) {
  check_truth_arity(transforms, truth, "epe_to_truth");
  double sum = 0.0;
  long long instances = 0;
  for (std::size_t k = 0; k < truth.chain.pairs.size(); ++k) {
    const CorrespondencePair& pair = truth.chain.pairs[k];
    const PointSet2& shared = truth.shared_sets[k];
    const PointSet2 f = apply_transform(transforms[k], pair.forward);
    const PointSet2 b = apply_transform(transforms[k + 1], pair.backward);
    sum += (f.data() - shared.data()).colwise().norm().sum();
    sum += (b.data() - shared.data()).colwise().norm().sum();
    instances += 2LL * shared.count();
  }
  return sum / static_cast<double>(instances);
}

std::vector<SweepRow> noise_sweep(std::span<const double> ratios, int trials,
                                  const SweepSettings& settings) {
  if (trials < 1) {
    throw DataError("noise_sweep: need at least one trial");
  }
  const PointSet2 base =
      fish_outline(settings.shape_points, settings.shape_scale);

  std::vector<SweepRow> rows;
  rows.reserve(ratios.size());
  for (std::size_t ri = 0; ri < ratios.size(); ++ri) {
    if (!(ratios[ri] >= 0.0)) {
      throw DataError("noise_sweep: ratios must be >= 0");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    double sum_unregistered = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
      const NoiseSpec noise{ratios[ri],
                            derive_seed(settings.master_seed, ri,
                                        static_cast<std::uint64_t>(trial))};
      const GroundTruthChain truth =
          generate(settings.sections, settings.overlap, base,
                   settings.magnitudes, noise);
      const double value = mse(nsrr_solve(truth.chain).registration, truth);
      sum += value;
      sum_sq += value * value;
      sum_unregistered +=
          mse(Registration::identity(settings.sections), truth);
    }
    SweepRow row;
    row.noise_ratio = ratios[ri];
    row.mean_mse = sum / trials;
    row.mean_mse_unregistered = sum_unregistered / trials;
    if (trials > 1) {
      const double variance =
          (sum_sq - sum * sum / trials) / (trials - 1);
      row.std_mse = variance > 0.0 ? std::sqrt(variance) : 0.0;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nsrr
