#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsrr/baseline.hpp"
#include "nsrr/errors.hpp"
#include "nsrr/io.hpp"
#include "nsrr/pipeline.hpp"
#include "nsrr/synthetic.hpp"

namespace {

std::vector<double> parse_ratio_range(const std::string& range) {
  // "a:b:step" inclusive; a bare "a" is a single ratio.
  std::vector<double> parts;
  std::size_t begin = 0;
  while (begin <= range.size()) {
    const std::size_t end = range.find(':', begin);
    const std::string token =
        range.substr(begin, end == std::string::npos ? end : end - begin);
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(token, &used));
      if (used != token.size()) {
        throw std::invalid_argument(token);
      }
    } catch (const std::exception&) {
      throw nsrr::DataError("--ratios: cannot parse \"" + token + "\"");
    }
    if (end == std::string::npos) {
      break;
    }
    begin = end + 1;
  }
  if (parts.size() == 1) {
    return parts;
  }
  if (parts.size() != 3) {
    throw nsrr::DataError("--ratios: expected a:b:step");
  }
  const double lo = parts[0];
  const double hi = parts[1];
  const double step = parts[2];
  if (!(step > 0.0) || hi < lo || lo < 0.0) {
    throw nsrr::DataError("--ratios: need 0 <= a <= b and step > 0");
  }
  std::vector<double> ratios;
  for (int k = 0;; ++k) {
    const double value = lo + step * k;
    if (value > hi + step * 0.5) {
      break;
    }
    ratios.push_back(std::min(value, hi));
  }
  return ratios;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous rigid registration of serial-section landmark chains"};
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand(
      "solve", "Register a chain with fixed first/last sections");
  std::string solve_chain, solve_out, solve_report;
  solve->add_option("--chain", solve_chain, "Input chain document")->required();
  solve->add_option("--out", solve_out, "Output transform document")->required();
  solve->add_option("--report", solve_report, "Optional diagnostics JSON");
  solve->callback([&] {
    const nsrr::SectionChain chain = nsrr::read_chain(solve_chain);
    const nsrr::SolveResult result = nsrr::nsrr_solve(chain);
    nsrr::write_transforms(result.registration.transforms, solve_out);
    if (!solve_report.empty()) {
      nsrr::write_solve_report(result.report, chain.n_sections,
                               nsrr::epe(chain, result.registration),
                               solve_report);
    }
  });

  // baseline
  auto* baseline = app.add_subcommand(
      "baseline", "Sequential pairwise registration (no endpoint constraint)");
  std::string baseline_chain, baseline_out, baseline_method = "pairwise";
  baseline->add_option("--chain", baseline_chain, "Input chain document")
      ->required();
  baseline->add_option("--method", baseline_method, "Baseline method")
      ->check(CLI::IsMember({"pairwise"}));
  baseline->add_option("--out", baseline_out, "Output transform document")
      ->required();
  baseline->callback([&] {
    const nsrr::SectionChain chain = nsrr::read_chain(baseline_chain);
    nsrr::write_transforms(nsrr::sequential_solve(chain), baseline_out);
  });

  // synth
  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic chain with known ground truth");
  int synth_sections = 8, synth_points = 256, synth_overlap = 30;
  double synth_noise = 0.0;
  double synth_max_rotation = nsrr::kPi / 4.0, synth_max_translation = 0.1;
  std::uint64_t synth_seed = 0;
  std::string synth_out, synth_truth;
  synth->add_option("--sections", synth_sections, "Number of sections")
      ->check(CLI::Range(2, 1000000));
  synth->add_option("--points", synth_points, "Base outline sample count")
      ->check(CLI::Range(1, 100000000));
  synth->add_option("--overlap", synth_overlap, "Points per correspondence pair")
      ->check(CLI::Range(1, 100000000));
  synth->add_option("--noise", synth_noise, "Noise ratio (sigma / |coordinate|)")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", synth_seed, "Random seed");
  synth->add_option("--max-rotation", synth_max_rotation,
                    "Max |section rotation| in radians");
  synth->add_option("--max-translation-frac", synth_max_translation,
                    "Max |section shift| as a fraction of the shape diameter");
  synth->add_option("--out", synth_out, "Output chain document")->required();
  synth->add_option("--truth", synth_truth,
                    "Output transform document with the ideal registration");
  synth->callback([&] {
    nsrr::TransformMagnitudes magnitudes;
    magnitudes.max_rotation = synth_max_rotation;
    magnitudes.max_translation_frac = synth_max_translation;
    const nsrr::GroundTruthChain truth =
        nsrr::generate(synth_sections, synth_overlap,
                       nsrr::fish_outline(synth_points), magnitudes,
                       {synth_noise, synth_seed});
    nsrr::write_chain(truth.chain, synth_out);
    if (!synth_truth.empty()) {
      // The ideal registration undoes each section's generative transform.
      std::vector<nsrr::RigidTransform2> ideal;
      ideal.reserve(truth.true_transforms.size());
      for (const nsrr::RigidTransform2& t : truth.true_transforms) {
        const nsrr::Mat2 inverse = t.rotation.transpose();
        ideal.push_back({inverse, nsrr::Vec2(-(inverse * t.translation))});
      }
      ideal.front() = nsrr::RigidTransform2::identity();
      ideal.back() = nsrr::RigidTransform2::identity();
      nsrr::write_transforms(ideal, synth_truth);
    }
  });

  // eval
  auto* eval = app.add_subcommand("eval", "Print a registration metric");
  std::string eval_chain, eval_transforms, eval_truth, eval_metric;
  eval->add_option("--chain", eval_chain, "Input chain document")->required();
  eval->add_option("--transforms", eval_transforms, "Transform document")
      ->required();
  eval->add_option("--truth", eval_truth,
                   "Ground-truth transform document (required for mse)");
  eval->add_option("--metric", eval_metric, "Metric to print")
      ->required()
      ->check(CLI::IsMember({"mse", "epe"}));
  eval->callback([&] {
    const nsrr::SectionChain chain = nsrr::read_chain(eval_chain);
    const std::vector<nsrr::RigidTransform2> transforms =
        nsrr::read_transforms(eval_transforms);
    if (transforms.size() != static_cast<std::size_t>(chain.n_sections)) {
      throw nsrr::DataError("eval: transform count does not match the chain");
    }
    double value = 0.0;
    if (eval_metric == "epe") {
      value = nsrr::epe(chain, transforms);
    } else {
      if (eval_truth.empty()) {
        throw CLI::ValidationError("--metric mse requires --truth");
      }
      const std::vector<nsrr::RigidTransform2> truth =
          nsrr::read_transforms(eval_truth);
      if (truth.size() != transforms.size()) {
        throw nsrr::DataError("eval: truth transform count does not match");
      }
      // Mean squared distance between the estimated and the ground-truth
      // placement of every correspondence landmark.
      double sum = 0.0;
      long long instances = 0;
      for (std::size_t k = 0; k < chain.pairs.size(); ++k) {
        const nsrr::CorrespondencePair& pair = chain.pairs[k];
        for (const auto& [set, side] :
             {std::pair{&pair.forward, k}, std::pair{&pair.backward, k + 1}}) {
          const nsrr::PointSet2 estimated =
              nsrr::apply_transform(transforms[side], *set);
          const nsrr::PointSet2 reference =
              nsrr::apply_transform(truth[side], *set);
          sum += (estimated.data() - reference.data())
                     .colwise()
                     .squaredNorm()
                     .sum();
          instances += set->count();
        }
      }
      value = sum / static_cast<double>(instances);
    }
    std::cout << nsrr::format_full_precision(value) << "\n";
  });

  // sweep
  auto* sweep = app.add_subcommand(
      "sweep", "Noise sweep: mean registration MSE per noise ratio");
  std::string sweep_ratios = "0:0.1:0.01", sweep_out;
  int sweep_trials = 20, sweep_sections = 8, sweep_points = 256,
      sweep_overlap = 30;
  std::uint64_t sweep_seed = 0;
  sweep->add_option("--ratios", sweep_ratios, "Noise ratios as a:b:step");
  sweep->add_option("--trials", sweep_trials, "Trials per ratio")
      ->check(CLI::Range(1, 1000000));
  sweep->add_option("--seed", sweep_seed, "Master seed");
  sweep->add_option("--sections", sweep_sections, "Sections per trial chain")
      ->check(CLI::Range(2, 1000000));
  sweep->add_option("--points", sweep_points, "Base outline sample count")
      ->check(CLI::Range(1, 100000000));
  sweep->add_option("--overlap", sweep_overlap, "Points per correspondence pair")
      ->check(CLI::Range(1, 100000000));
  sweep->add_option("--out", sweep_out, "Output CSV")->required();
  sweep->callback([&] {
    nsrr::SweepSettings settings;
    settings.sections = sweep_sections;
    settings.shape_points = sweep_points;
    settings.overlap = sweep_overlap;
    settings.master_seed = sweep_seed;
    const std::vector<double> ratios = parse_ratio_range(sweep_ratios);
    nsrr::write_sweep_csv(nsrr::noise_sweep(ratios, sweep_trials, settings),
                          sweep_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const nsrr::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nsrr::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
