#include <doctest.h>

#include <cmath>
#include <vector>

#include "nsrr/errors.hpp"
#include "nsrr/rotation_solver.hpp"
#include "nsrr/synthetic.hpp"
#include "oracles.hpp"

using namespace nsrr;

namespace {

double max_abs_diff(const Mat2& a, const Mat2& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

Mat2 random_matrix(Rng& rng, double spread = 10.0) {
  Mat2 m;
  m << rng.uniform(-spread, spread), rng.uniform(-spread, spread),
      rng.uniform(-spread, spread), rng.uniform(-spread, spread);
  return m;
}

// Ideal chain: every pair observes a shared set under known section
// rotations/translations, identity at both ends, no noise.
GroundTruthChain ideal_chain(std::uint64_t seed, int sections = 5,
                             int overlap = 12) {
  return generate(sections, overlap, fish_outline(128), TransformMagnitudes{},
                  NoiseSpec{0.0, seed});
}

}  // namespace

TEST_CASE("centralize removes the centroid and keeps the reconstruction") {
  const auto [centered_single, centroid_single] =
      centralize(PointSet2::from_points({{0.0, 0.0}}));
  CHECK(centroid_single == Vec2(0.0, 0.0));
  CHECK(centered_single.point(0) == Vec2(0.0, 0.0));

  const auto [centered, centroid] =
      centralize(PointSet2::from_points({{1.0, 1.0}, {3.0, 3.0}}));
  CHECK(centroid == Vec2(2.0, 2.0));
  CHECK(centered.point(0) == Vec2(-1.0, -1.0));
  CHECK(centered.point(1) == Vec2(1.0, 1.0));

  Rng rng(211);
  const PointSet2 set = test::random_point_set(rng, 100);
  const CentralizedSet result = centralize(set);
  CHECK(result.centered.centroid().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(((result.centered.data().colwise() + result.centroid) - set.data())
            .cwiseAbs()
            .maxCoeff() < 1e-12);
}

TEST_CASE("cross_covariance matches the outer-product sum") {
  const PointSet2 square = PointSet2::from_points(
      {{-1.0, -1.0}, {1.0, -1.0}, {1.0, 1.0}, {-1.0, 1.0}});
  const Mat2 gram = cross_covariance(square, square);
  Mat2 expected = Mat2::Zero();
  for (int k = 0; k < square.count(); ++k) {
    expected += square.point(k) * square.point(k).transpose();
  }
  CHECK(max_abs_diff(gram, expected) < 1e-12);
  CHECK(max_abs_diff(gram, gram.transpose()) < 1e-12);
  CHECK(gram(0, 0) > 0.0);

  // backward = rot(alpha) * forward factors the rotation out of the sum.
  Rng rng(223);
  const PointSet2 forward =
      centralize(test::random_point_set(rng, 17)).centered;
  const double alpha = 0.8;
  const PointSet2 backward = PointSet2(rot(alpha) * forward.data());
  CHECK(max_abs_diff(cross_covariance(backward, forward),
                     rot(alpha) * cross_covariance(forward, forward)) < 1e-10);

  const PointSet2 origin = PointSet2::from_points({{0.0, 0.0}});
  CHECK(max_abs_diff(cross_covariance(origin, origin), Mat2::Zero()) == 0.0);

  CHECK_THROWS_AS(cross_covariance(square, origin), DataError);
}

TEST_CASE("pairwise_factor on pinned inputs") {
  const PairRotationData id = pairwise_factor(Mat2::Identity());
  CHECK(max_abs_diff(id.base, Mat2::Identity()) < 1e-12);
  CHECK(id.weight == doctest::Approx(2.0).epsilon(1e-12));

  const PairRotationData quarter = pairwise_factor(rot(kPi / 2.0));
  CHECK(max_abs_diff(quarter.base, rot(-kPi / 2.0)) < 1e-12);
  CHECK(quarter.weight == doctest::Approx(2.0).epsilon(1e-12));
  double grid_angle = 0.0;
  const double grid_best =
      test::rotation_trace_grid_max(rot(kPi / 2.0), 62832, &grid_angle);
  CHECK((rot(grid_angle) * rot(kPi / 2.0)).trace() ==
        doctest::Approx(grid_best));
  CHECK((quarter.base * rot(kPi / 2.0)).trace() >= grid_best - 1e-6);

  Mat2 indefinite;
  indefinite << 2.0, 0.0, 0.0, -1.0;
  const PairRotationData mixed = pairwise_factor(indefinite);
  CHECK(mixed.correction(1, 1) == -1.0);
  CHECK(max_abs_diff(mixed.base, Mat2::Identity()) < 1e-12);
  CHECK(mixed.weight == doctest::Approx(1.0).epsilon(1e-12));
  // Grid oracle: max of tr(rot(a) * diag(2, -1)) = cos(a) attained at 0.
  CHECK(test::rotation_trace_grid_max(indefinite, 62832) ==
        doctest::Approx(1.0).epsilon(1e-6));

  const PairRotationData zero = pairwise_factor(Mat2::Zero());
  CHECK(max_abs_diff(zero.base, Mat2::Identity()) < 1e-12);
  CHECK(zero.weight == 0.0);
}

TEST_CASE("pairwise_factor invariants on random input") {
  Rng rng(227);
  for (int trial = 0; trial < 500; ++trial) {
    const Mat2 a = random_matrix(rng);
    const PairRotationData data = pairwise_factor(a);
    CHECK(is_orthogonal(data.u));
    CHECK(is_orthogonal(data.v));
    CHECK(data.u.determinant() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(data.sigma(0, 1) == 0.0);
    CHECK(data.sigma(1, 0) == 0.0);
    CHECK(data.sigma(0, 0) >= data.sigma(1, 1));
    CHECK(data.sigma(1, 1) >= 0.0);
    CHECK(is_rotation(data.base));
    CHECK(data.weight >= -1e-12);
    CHECK(max_abs_diff(data.u * data.sigma * data.v.transpose(), a) < 1e-9);
  }
}

TEST_CASE("pairwise_factor base attains the trace maximum") {
  Rng rng(229);
  for (int trial = 0; trial < 25; ++trial) {
    const Mat2 a = random_matrix(rng);
    const PairRotationData data = pairwise_factor(a);
    const double attained = (data.base * a).trace();
    CHECK(attained >= test::rotation_trace_grid_max(a, 10000) - 1e-6);
    // The attained trace equals the weight.
    CHECK(attained == doctest::Approx(data.weight).epsilon(1e-9));
  }
}

TEST_CASE("trace identity: tr(rot(t) * base * A) == weight * cos(t)") {
  Rng rng(233);
  for (int trial = 0; trial < 1000; ++trial) {
    const Mat2 a = random_matrix(rng);
    const double theta = rng.uniform(-kPi, kPi);
    const PairRotationData data = pairwise_factor(a);
    const double lhs = (rot(theta) * data.base * a).trace();
    CHECK(lhs == doctest::Approx(data.weight * std::cos(theta)).epsilon(1e-9));
  }
}

TEST_CASE("defect_angle composes and wraps") {
  const std::vector<Mat2> identities{Mat2::Identity(), Mat2::Identity()};
  CHECK(defect_angle(identities).radians() == 0.0);

  const std::vector<Mat2> sum{rot(kPi / 6.0), rot(2.0 * kPi / 9.0)};
  CHECK(defect_angle(sum).radians() ==
        doctest::Approx(7.0 * kPi / 18.0).epsilon(1e-12));

  const std::vector<Mat2> wrapped{rot(17.0 * kPi / 18.0), rot(kPi / 6.0)};
  CHECK(defect_angle(wrapped).radians() ==
        doctest::Approx(-8.0 * kPi / 9.0).epsilon(1e-12));

  const std::vector<Mat2> bad{rot(0.3), refl(0.2)};
  CHECK_THROWS_AS(defect_angle(bad), DataError);
}

TEST_CASE("solve_angles on pinned problems") {
  SUBCASE("zero defect keeps every angle at zero") {
    const AngleSolution s = solve_angles({{1.0, 1.0, 1.0}, Angle(0.0)});
    for (double theta : s.thetas) {
      CHECK(theta == doctest::Approx(0.0).epsilon(1e-12));
    }
    CHECK(s.objective == doctest::Approx(-3.0).epsilon(1e-12));
  }

  SUBCASE("equal weights split the defect evenly") {
    const AngleSolution s = solve_angles({{1.0, 1.0}, Angle(kPi / 2.0)});
    CHECK(s.thetas[0] == doctest::Approx(-kPi / 4.0).epsilon(1e-9));
    CHECK(s.thetas[1] == doctest::Approx(-kPi / 4.0).epsilon(1e-9));
    CHECK(s.objective <=
          test::angle_grid_min({1.0, 1.0}, -kPi / 2.0, 6284) + 1e-6);
  }

  SUBCASE("asymmetric weights follow the stationarity condition") {
    // With weights (2, 1) and the sum pinned to -pi/2, stationarity gives
    // tan(theta_1) = -1/2.
    const AngleSolution s = solve_angles({{2.0, 1.0}, Angle(kPi / 2.0)});
    CHECK(s.thetas[0] == doctest::Approx(std::atan(-0.5)).epsilon(1e-8));
    CHECK(s.thetas[1] ==
          doctest::Approx(-kPi / 2.0 - std::atan(-0.5)).epsilon(1e-8));
    CHECK(s.thetas[0] == doctest::Approx(-0.4636476).epsilon(1e-6));
    CHECK(s.thetas[1] == doctest::Approx(-1.1071487).epsilon(1e-6));
    CHECK(s.objective <=
          test::angle_grid_min({2.0, 1.0}, -kPi / 2.0, 6284) + 1e-6);
  }

  SUBCASE("single pair takes the whole defect") {
    const AngleSolution s = solve_angles({{3.0}, Angle(1.1)});
    CHECK(s.thetas.size() == 1);
    CHECK(s.thetas[0] == doctest::Approx(-1.1).epsilon(1e-12));
  }

  SUBCASE("empty weights rejected") {
    CHECK_THROWS_AS(solve_angles({{}, Angle(0.0)}), DataError);
  }
}

TEST_CASE("solve_angles satisfies the constraint and stationarity") {
  Rng rng(239);
  for (int trial = 0; trial < 50; ++trial) {
    const int count = 2 + static_cast<int>(rng.uniform01() * 5);
    AngleProblem problem;
    problem.defect = Angle(rng.uniform(-kPi, kPi));
    for (int k = 0; k < count; ++k) {
      problem.weights.push_back(rng.uniform(0.05, 5.0));
    }
    if (trial % 7 == 0) {
      problem.weights[0] = 0.0;  // degenerate pair: its angle is free
    }
    const AngleSolution s = solve_angles(problem);

    double sum = 0.0;
    for (double theta : s.thetas) {
      sum += theta;
    }
    CHECK(std::abs(std::remainder(sum + problem.defect.radians(), 2.0 * kPi)) <
          1e-9);

    // Lagrange condition: w_i sin(theta_i) equal across pairs with w_i > 0.
    double lambda = 0.0;
    bool first = true;
    for (std::size_t k = 0; k < problem.weights.size(); ++k) {
      if (problem.weights[k] <= 0.0) {
        continue;
      }
      const double value = problem.weights[k] * std::sin(s.thetas[k]);
      if (first) {
        lambda = value;
        first = false;
      } else {
        CHECK(value == doctest::Approx(lambda).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("solve_angles objective matches the lattice oracle") {
  Rng rng(241);
  for (int trial = 0; trial < 12; ++trial) {
    const int count = 2 + trial % 3;  // 2, 3, 4
    AngleProblem problem;
    problem.defect = Angle(rng.uniform(-kPi, kPi));
    for (int k = 0; k < count; ++k) {
      problem.weights.push_back(rng.uniform(0.05, 5.0));
    }
    const AngleSolution s = solve_angles(problem);
    const double oracle = test::angle_grid_min(
        problem.weights, wrap_angle(-problem.defect.radians()), 2000);
    CHECK(s.objective <= oracle + 1e-6);
  }
}

TEST_CASE("solve_angles argmin is invariant under weight scaling") {
  Rng rng(251);
  for (int trial = 0; trial < 10; ++trial) {
    AngleProblem problem;
    problem.defect = Angle(rng.uniform(-kPi, kPi));
    for (int k = 0; k < 4; ++k) {
      problem.weights.push_back(rng.uniform(0.1, 3.0));
    }
    AngleProblem scaled = problem;
    const double factor = rng.uniform(0.5, 20.0);
    for (double& w : scaled.weights) {
      w *= factor;
    }
    const AngleSolution a = solve_angles(problem);
    const AngleSolution b = solve_angles(scaled);
    for (std::size_t k = 0; k < a.thetas.size(); ++k) {
      CHECK(b.thetas[k] == doctest::Approx(a.thetas[k]).epsilon(1e-6));
    }
  }
}

TEST_CASE("compose_chain pinned and random cases") {
  const std::vector<Mat2> identity_bases{Mat2::Identity(), Mat2::Identity()};
  const std::vector<double> zero_angles{0.0, 0.0};
  const std::vector<Mat2> identity_chain =
      compose_chain(identity_bases, zero_angles);
  for (const Mat2& r : identity_chain) {
    CHECK(max_abs_diff(r, Mat2::Identity()) == 0.0);
  }

  // Telescoping: W = [rot(0.4), rot(-0.4)] gives R = [I, rot(0.4), I].
  const std::vector<Mat2> bases{rot(0.4), rot(-0.4)};
  const std::vector<double> zeros{0.0, 0.0};
  const std::vector<Mat2> r = compose_chain(bases, zeros);
  CHECK(max_abs_diff(r[0], Mat2::Identity()) == 0.0);
  CHECK(max_abs_diff(r[1], rot(0.4)) < 1e-15);
  CHECK(max_abs_diff(r[2], Mat2::Identity()) < 1e-15);

  CHECK_THROWS_AS(compose_chain(bases, std::vector<double>{0.0}), DataError);
  const std::vector<Mat2> not_rotation{refl(0.1), rot(0.1)};
  CHECK_THROWS_AS(compose_chain(not_rotation, zeros), DataError);

  // Random feasible instance: angles solved for the bases' defect make the
  // full product return to the identity.
  Rng rng(257);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Mat2> random_bases;
    AngleProblem problem;
    for (int k = 0; k < 6; ++k) {
      random_bases.push_back(rot(rng.uniform(-kPi, kPi)));
      problem.weights.push_back(rng.uniform(0.1, 4.0));
    }
    problem.defect = defect_angle(random_bases);
    const AngleSolution solution = solve_angles(problem);
    const std::vector<Mat2> composed =
        compose_chain(random_bases, solution.thetas);
    CHECK(composed.size() == random_bases.size() + 1);
    for (const Mat2& m : composed) {
      CHECK(is_rotation(m));
    }
    CHECK(max_abs_diff(composed.back(), Mat2::Identity()) < 1e-9);
  }
}

TEST_CASE("solve_rotations leaves an aligned chain alone") {
  SectionChain chain;
  chain.n_sections = 4;
  Rng rng(263);
  for (int i = 1; i <= 3; ++i) {
    CorrespondencePair pair;
    pair.index = i;
    pair.forward = test::random_point_set(rng, 9);
    pair.backward = pair.forward;
    chain.pairs.push_back(pair);
  }
  for (const Mat2& r : solve_rotations(chain)) {
    CHECK(max_abs_diff(r, Mat2::Identity()) < 1e-12);
  }
}

TEST_CASE("solve_rotations recovers ground truth on an ideal chain") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    const GroundTruthChain truth = ideal_chain(seed);
    const std::vector<Mat2> rotations = solve_rotations(truth.chain);
    REQUIRE(rotations.size() == truth.true_transforms.size());
    for (std::size_t i = 0; i < rotations.size(); ++i) {
      CHECK(max_abs_diff(rotations[i],
                         truth.true_transforms[i].rotation.transpose()) <
            1e-9);
    }
  }
}

TEST_CASE("solve_rotations reaches the lattice minimum on a noisy 4-chain") {
  GroundTruthChain truth = generate(4, 10, fish_outline(64),
                                    TransformMagnitudes{}, NoiseSpec{0.02, 7});
  const std::vector<Mat2> rotations = solve_rotations(truth.chain);
  const double attained = test::centered_objective(truth.chain, rotations);
  const test::GridSearchN4 grid = test::grid_search_n4(truth.chain, 6284);
  CHECK(attained <= grid.min_centered + 1e-6);
  CHECK(max_abs_diff(rotations.front(), Mat2::Identity()) == 0.0);
  CHECK(max_abs_diff(rotations.back(), Mat2::Identity()) == 0.0);
}
