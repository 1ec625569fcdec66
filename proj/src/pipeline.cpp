#include "nsrr/pipeline.hpp"

#include <chrono>
#include <string>

#include "nsrr/errors.hpp"
#include "nsrr/translation_solver.hpp"

namespace nsrr {

SolveResult nsrr_solve(const SectionChain& chain) {
  const auto start = std::chrono::steady_clock::now();

  const ChainValidation validation = validate_chain(chain);
  if (!validation.ok()) {
    throw DataError("nsrr_solve: invalid chain: " + validation.summary());
  }

  SolveResult result;
  result.report.objective_before =
      objective_value(chain, Registration::identity(chain.n_sections));

  // Rotation stage. solve_rotations re-derives the per-pair factors; redo
  // the angle bookkeeping here so the report can carry the solution.
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
  result.report.angle_solution = solve_angles(problem);

  std::vector<Mat2> rotations =
      compose_chain(bases, result.report.angle_solution.thetas);
  const double closure =
      (rotations.back() - Mat2::Identity()).cwiseAbs().maxCoeff();
  if (closure > 1e-9) {
    throw NumericalError("nsrr_solve: rotation chain does not close (deviation " +
                         std::to_string(closure) + ")");
  }
  rotations.back() = Mat2::Identity();

  // Translation stage.
  const std::vector<ResidualBlock> blocks = residual_blocks(chain, rotations);
  const TranslationDeltas deltas = solve_deltas(blocks);
  std::vector<Vec2> translations = accumulate_translations(deltas);
  const double drift = translations.back().cwiseAbs().maxCoeff();
  if (drift > 1e-9) {
    throw NumericalError("nsrr_solve: translation chain does not close (drift " +
                         std::to_string(drift) + ")");
  }
  translations.back() = Vec2::Zero();

  result.registration.transforms.resize(chain.n_sections);
  for (int i = 0; i < chain.n_sections; ++i) {
    result.registration.transforms[static_cast<std::size_t>(i)] = {
        rotations[static_cast<std::size_t>(i)],
        translations[static_cast<std::size_t>(i)]};
  }

  result.report.per_pair_residuals.resize(pair_count);
  double total = 0.0;
  for (std::size_t k = 0; k < pair_count; ++k) {
    result.report.per_pair_residuals[k] =
        pair_objective_term(chain, result.registration, static_cast<int>(k));
    total += result.report.per_pair_residuals[k];
  }
  result.report.objective_after = total;

  result.report.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return result;
}

}  // namespace nsrr
