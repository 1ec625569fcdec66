#include "nsrr/rotation_solver.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nsrr/errors.hpp"
#include "nsrr/rng.hpp"

namespace nsrr {

CentralizedSet centralize(const PointSet2& points) {
  const Vec2 centroid = points.centroid();
  return {PointSet2(points.data().colwise() - centroid), centroid};
}

Mat2 cross_covariance(const PointSet2& backward_hat,
                      const PointSet2& forward_hat) {
  if (backward_hat.count() != forward_hat.count()) {
    throw DataError("cross_covariance: count mismatch (" +
                    std::to_string(backward_hat.count()) + " vs " +
                    std::to_string(forward_hat.count()) + ")");
  }
  return backward_hat.data() * forward_hat.data().transpose();
}

PairRotationData pairwise_factor(const Mat2& cross_cov) {
  Eigen::JacobiSVD<Mat2> svd(cross_cov,
                             Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat2 u = svd.matrixU();
  Mat2 v = svd.matrixV();
  const Vec2 singular = svd.singularValues();

  // Canonicalize to det(u) = +1. Negating the second column of u and v
  // together leaves u * sigma * v^T and det(v * u^T) unchanged.
  if (u.determinant() < 0.0) {
    u.col(1) = -u.col(1);
    v.col(1) = -v.col(1);
  }

  const double det_vut = u.determinant() * v.determinant();
  const double sign = det_vut < 0.0 ? -1.0 : 1.0;

  PairRotationData data;
  data.cross_cov = cross_cov;
  data.u = u;
  data.v = v;
  data.sigma = Mat2::Zero();
  data.sigma(0, 0) = singular(0);
  data.sigma(1, 1) = singular(1);
  data.correction = Mat2::Identity();
  data.correction(1, 1) = sign;
  data.base = v * data.correction * u.transpose();
  data.weight = singular(0) + sign * singular(1);  // sigma ordered, so >= 0
  return data;
}

Angle defect_angle(std::span<const Mat2> bases) {
  Mat2 product = Mat2::Identity();
  for (const Mat2& base : bases) {
    if (!is_rotation(base)) {
      throw DataError("defect_angle: element is not a rotation");
    }
    product = product * base;
  }
  return angle_of(product);
}

namespace {

// Objective over the free angles, with the last angle substituted as
// target - sum(free). Periodicity of cos makes the landscape identical for
// every 2*pi shift of the target, so shifted targets act purely as extra
// starting points.
struct ReducedProblem {
  std::span<const double> weights;  // size >= 2
  double target = 0.0;

  std::size_t free_count() const { return weights.size() - 1; }
  double last_weight() const { return weights.back(); }

  double last_angle(std::span<const double> free) const {
    double sum = 0.0;
    for (double phi : free) {
      sum += phi;
    }
    return target - sum;
  }

  double value(std::span<const double> free) const {
    double obj = 0.0;
    for (std::size_t j = 0; j < free.size(); ++j) {
      obj -= weights[j] * std::cos(free[j]);
    }
    obj -= last_weight() * std::cos(last_angle(free));
    return obj;
  }
};

// Damped Newton with gradient fallback. The Hessian is diagonal plus a
// rank-one term, so the Newton step is computed in O(n) via the
// Sherman-Morrison identity.
double minimize_from(const ReducedProblem& problem, std::vector<double>& phi) {
  const std::size_t count = phi.size();
  const double weight_scale = std::max(
      1e-300, *std::max_element(problem.weights.begin(), problem.weights.end()));

  std::vector<double> gradient(count), step(count), candidate(count);
  double value = problem.value(phi);

  for (int iter = 0; iter < 200; ++iter) {
    const double psi = problem.last_angle(phi);
    const double rho = problem.last_weight() * std::cos(psi);
    const double lambda = problem.last_weight() * std::sin(psi);

    double grad_norm = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      gradient[j] = problem.weights[j] * std::sin(phi[j]) - lambda;
      grad_norm = std::max(grad_norm, std::abs(gradient[j]));
    }
    if (grad_norm < 1e-12) {
      break;
    }

    // Modified Newton: clamp diagonal curvature away from zero, then apply
    // Sherman-Morrison for the rank-one part when the denominator is safe.
    const double floor_curv = 1e-8 * weight_scale;
    double inv_diag_sum = 0.0;
    double inv_diag_grad = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      const double d =
          std::max(problem.weights[j] * std::cos(phi[j]), floor_curv);
      step[j] = gradient[j] / d;  // D^-1 g, reused below
      inv_diag_sum += 1.0 / d;
      inv_diag_grad += step[j];
    }
    const double denom = 1.0 + rho * inv_diag_sum;
    bool newton_ok = std::abs(denom) > 1e-12;
    if (newton_ok) {
      const double correction = rho * inv_diag_grad / denom;
      for (std::size_t j = 0; j < count; ++j) {
        const double d =
            std::max(problem.weights[j] * std::cos(phi[j]), floor_curv);
        step[j] = -(step[j] - correction / d);
      }
    } else {
      for (std::size_t j = 0; j < count; ++j) {
        step[j] = -gradient[j];
      }
    }

    // Keep the step a descent direction; otherwise fall back to -gradient.
    double directional = 0.0;
    for (std::size_t j = 0; j < count; ++j) {
      directional += step[j] * gradient[j];
    }
    if (!(directional < 0.0)) {
      for (std::size_t j = 0; j < count; ++j) {
        step[j] = -gradient[j];
      }
    }

    // Step halving until the objective does not increase.
    double t = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 60; ++halving) {
      for (std::size_t j = 0; j < count; ++j) {
        candidate[j] = phi[j] + t * step[j];
      }
      const double candidate_value = problem.value(candidate);
      if (candidate_value <= value) {
        improved = candidate_value < value;
        // Re-wrap the iterate: the objective is 2pi-periodic per
        // coordinate, and large magnitudes (a cheap-curvature step can
        // jump basins) would bleed cancellation error into the final
        // last-angle substitution.
        bool rewrapped = false;
        for (std::size_t j = 0; j < count; ++j) {
          phi[j] = wrap_angle(candidate[j]);
          rewrapped = rewrapped || phi[j] != candidate[j];
        }
        value = rewrapped ? problem.value(phi) : candidate_value;
        break;
      }
      t *= 0.5;
    }
    if (!improved) {
      break;
    }
  }
  return value;
}

}  // namespace

AngleSolution solve_angles(const AngleProblem& problem) {
  const std::vector<double>& weights = problem.weights;
  if (weights.empty()) {
    throw DataError("solve_angles: empty weight vector");
  }
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw DataError("solve_angles: weights must be finite and >= 0");
    }
  }

  const double target = wrap_angle(-problem.defect.radians());
  const std::size_t count = weights.size();

  AngleSolution solution;
  if (count == 1) {
    solution.thetas = {target};
    solution.objective = -weights[0] * std::cos(target);
    return solution;
  }

  const ReducedProblem reduced{std::span<const double>(weights), target};
  const std::size_t free_count = count - 1;

  std::vector<std::vector<double>> starts;
  starts.emplace_back(free_count, 0.0);
  // Uniform splits of each 2*pi-shifted target. The shifts change nothing
  // about the landscape but land the starts in different basins.
  for (int k = -1; k <= 1; ++k) {
    const double shifted = target + 2.0 * kPi * static_cast<double>(k);
    starts.emplace_back(free_count, shifted / static_cast<double>(count));
  }
  Rng rng(0x6e737272616e67ull);  // fixed: identical runs must match bit-exactly
  for (int r = 0; r < 8; ++r) {
    std::vector<double> start(free_count);
    for (double& phi : start) {
      phi = rng.uniform(-kPi, kPi);
    }
    starts.push_back(std::move(start));
  }

  double best_value = std::numeric_limits<double>::infinity();
  std::vector<double> best;
  for (std::vector<double>& start : starts) {
    const double value = minimize_from(reduced, start);
    if (value < best_value) {
      best_value = value;
      best = start;
    }
  }

  solution.thetas.resize(count);
  for (std::size_t j = 0; j < free_count; ++j) {
    solution.thetas[j] = wrap_angle(best[j]);
  }
  solution.thetas[count - 1] = wrap_angle(reduced.last_angle(best));
  solution.objective = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    solution.objective -= weights[j] * std::cos(solution.thetas[j]);
  }
  return solution;
}

std::vector<Mat2> compose_chain(std::span<const Mat2> bases,
                                std::span<const double> thetas) {
  if (bases.size() != thetas.size()) {
    throw DataError("compose_chain: " + std::to_string(bases.size()) +
                    " bases vs " + std::to_string(thetas.size()) + " angles");
  }
  std::vector<Mat2> rotations;
  rotations.reserve(bases.size() + 1);
  rotations.push_back(Mat2::Identity());
  for (std::size_t k = 0; k < bases.size(); ++k) {
    if (!is_rotation(bases[k])) {
      throw DataError("compose_chain: base " + std::to_string(k + 1) +
                      " is not a rotation");
    }
    const Mat2 relative = rot(thetas[k]) * bases[k];
    rotations.push_back(rotations.back() * relative);
  }
  return rotations;
}

std::vector<Mat2> solve_rotations(const SectionChain& chain) {
  const ChainValidation validation = validate_chain(chain);
  if (!validation.ok()) {
    throw DataError("solve_rotations: invalid chain: " + validation.summary());
  }

  const std::size_t pair_count = chain.pairs.size();
  std::vector<Mat2> bases(pair_count);
  AngleProblem problem;
  problem.weights.resize(pair_count);
  for (std::size_t k = 0; k < pair_count; ++k) {
    const CentralizedSet forward = centralize(chain.pairs[k].forward);
    const CentralizedSet backward = centralize(chain.pairs[k].backward);
    const PairRotationData data =
        pairwise_factor(cross_covariance(backward.centered, forward.centered));
    bases[k] = data.base;
    problem.weights[k] = data.weight;
  }
  problem.defect = defect_angle(bases);

  const AngleSolution angles = solve_angles(problem);
  std::vector<Mat2> rotations = compose_chain(bases, angles.thetas);

  const double closure =
      (rotations.back() - Mat2::Identity()).cwiseAbs().maxCoeff();
  if (closure > 1e-9) {
    throw NumericalError("solve_rotations: chain does not close (deviation " +
                         std::to_string(closure) + ")");
  }
  rotations.back() = Mat2::Identity();
  return rotations;
}

}  // namespace nsrr
