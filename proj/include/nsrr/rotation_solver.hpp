#pragma once

#include <span>
#include <vector>

#include "nsrr/chain.hpp"
#include "nsrr/so2.hpp"

namespace nsrr {

struct CentralizedSet {
  PointSet2 centered;
  Vec2 centroid;
};

/// Translates a point set so its centroid sits at the origin.
CentralizedSet centralize(const PointSet2& points);

/// 2x2 sum of outer products backward_k * forward_k^T over corresponding
/// columns. Both inputs must be centered and of equal count.
Mat2 cross_covariance(const PointSet2& backward_hat,
                      const PointSet2& forward_hat);

/// SVD factorization of a pair's cross-covariance with the reflection
/// correction applied. `base` is the rotation maximizing tr(W * cross_cov)
/// over rotations W; `weight` is the attained trace value.
struct PairRotationData {
  Mat2 cross_cov = Mat2::Zero();
  Mat2 u = Mat2::Identity();       // left singular vectors, det(u) = +1
  Mat2 sigma = Mat2::Zero();       // diag, non-negative, descending
  Mat2 v = Mat2::Identity();       // right singular vectors
  Mat2 correction = Mat2::Identity();  // diag(1, det(v * u^T))
  Mat2 base = Mat2::Identity();    // v * correction * u^T
  double weight = 0.0;             // tr(correction * sigma) >= 0
};

PairRotationData pairwise_factor(const Mat2& cross_cov);

/// Rotation angle of the left-to-right product of the base rotations: the
/// amount by which the unconstrained pairwise optima fail to close the chain.
Angle defect_angle(std::span<const Mat2> bases);

/// Minimize sum_i -weights[i] * cos(theta_i) subject to
/// sum_i theta_i = -defect (mod 2pi).
struct AngleProblem {
  std::vector<double> weights;  // all >= 0, length n-1
  Angle defect;
};

struct AngleSolution {
  std::vector<double> thetas;  // wrapped to (-pi, pi]
  double objective = 0.0;      // sum_i -weights[i] * cos(theta_i)
};

AngleSolution solve_angles(const AngleProblem& problem);

/// R_1 = I, R_{i+1} = R_i * (rot(theta_i) * base_i). With a feasible angle
/// solution the final product returns to the identity.
std::vector<Mat2> compose_chain(std::span<const Mat2> bases,
                                std::span<const double> thetas);

/// Full rotation stage: centralize, factor every pair, solve the
/// sum-constrained angle problem, compose. The returned sequence has
/// R_1 = R_n = I (the last entry is pinned after the closure check).
std::vector<Mat2> solve_rotations(const SectionChain& chain);

}  // namespace nsrr
