#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "nsrr/so2.hpp"

namespace nsrr {

/// Ordered set of 2D landmarks, stored as the columns of a 2 x m matrix.
/// The point count is fixed at construction.
class PointSet2 {
 public:
  PointSet2() = default;
  explicit PointSet2(Eigen::Matrix2Xd points) : points_(std::move(points)) {}

  static PointSet2 from_points(const std::vector<Vec2>& points);

  int count() const { return static_cast<int>(points_.cols()); }
  const Eigen::Matrix2Xd& data() const { return points_; }
  Vec2 point(int k) const { return points_.col(k); }
  Vec2 centroid() const;
  bool all_finite() const { return points_.allFinite(); }

 private:
  Eigen::Matrix2Xd points_;
};

/// Matched landmarks between sections `index` and `index + 1` (1-based).
/// `forward` lies on section `index`, `backward` on section `index + 1`;
/// column k of one corresponds to column k of the other.
struct CorrespondencePair {
  int index = 0;
  PointSet2 forward;
  PointSet2 backward;
};

/// n serial sections plus the n-1 correspondence pairs between neighbors.
struct SectionChain {
  int n_sections = 0;
  std::vector<CorrespondencePair> pairs;
};

struct RigidTransform2 {
  Mat2 rotation = Mat2::Identity();
  Vec2 translation = Vec2::Zero();

  static RigidTransform2 identity() { return {}; }

  /// Exact (bitwise) identity check, used for the fixed-endpoint contract.
  bool is_exact_identity() const {
    return rotation == Mat2::Identity() && translation == Vec2::Zero();
  }
};

/// One rigid transform per section. Solver output pins the first and last
/// transforms to exact identity / zero.
struct Registration {
  std::vector<RigidTransform2> transforms;

  static Registration identity(int n_sections) {
    Registration reg;
    reg.transforms.assign(static_cast<std::size_t>(n_sections),
                          RigidTransform2::identity());
    return reg;
  }

  int size() const { return static_cast<int>(transforms.size()); }
};

struct ChainIssue {
  std::string code;    // "section_count", "pair_arity", "pair_index",
                       // "count_mismatch", "empty_pair", "nonfinite_coordinate"
  std::string detail;
};

struct ChainValidation {
  std::vector<ChainIssue> issues;

  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

/// Checks every chain invariant and lists all violations. Never throws.
ChainValidation validate_chain(const SectionChain& chain);

/// Sum over pairs of the squared Frobenius residual between the two
/// transformed members. Throws DataError on arity mismatch.
double objective_value(const SectionChain& chain, const Registration& reg);

/// Single pair's contribution to objective_value. `pair_pos` is 0-based.
double pair_objective_term(const SectionChain& chain, const Registration& reg,
                           int pair_pos);

/// Maps every point to R * p + T.
PointSet2 apply_transform(const RigidTransform2& transform,
                          const PointSet2& points);

}  // namespace nsrr
