#include "nsrr/chain.hpp"

#include <cmath>
#include <sstream>

#include "nsrr/errors.hpp"

namespace nsrr {

PointSet2 PointSet2::from_points(const std::vector<Vec2>& points) {
  Eigen::Matrix2Xd m(2, static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    m.col(static_cast<Eigen::Index>(k)) = points[k];
  }
  return PointSet2(std::move(m));
}

Vec2 PointSet2::centroid() const {
  if (points_.cols() == 0) {
    return Vec2::Zero();
  }
  return points_.rowwise().mean();
}

std::string ChainValidation::summary() const {
  std::ostringstream out;
  for (std::size_t k = 0; k < issues.size(); ++k) {
    if (k > 0) {
      out << "; ";
    }
    out << issues[k].code << ": " << issues[k].detail;
  }
  return out.str();
}

namespace {

void check_finite(const PointSet2& set, int pair_index, const char* side,
                  std::vector<ChainIssue>& issues) {
  for (int k = 0; k < set.count(); ++k) {
    const Vec2 p = set.point(k);
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) {
      std::ostringstream detail;
      detail << "pair " << pair_index << " " << side << " point " << (k + 1)
             << ": non-finite coordinate";
      issues.push_back({"nonfinite_coordinate", detail.str()});
    }
  }
}

}  // namespace

ChainValidation validate_chain(const SectionChain& chain) {
  ChainValidation result;
  auto add = [&result](const char* code, const std::string& detail) {
    result.issues.push_back({code, detail});
  };

  if (chain.n_sections < 2) {
    add("section_count",
        "need at least 2 sections, got " + std::to_string(chain.n_sections));
  }
  const std::size_t expected_pairs =
      chain.n_sections >= 1 ? static_cast<std::size_t>(chain.n_sections - 1)
                            : 0;
  if (chain.pairs.size() != expected_pairs) {
    add("pair_arity", "expected " + std::to_string(expected_pairs) +
                          " pairs for " + std::to_string(chain.n_sections) +
                          " sections, got " + std::to_string(chain.pairs.size()));
  }

  for (std::size_t k = 0; k < chain.pairs.size(); ++k) {
    const CorrespondencePair& pair = chain.pairs[k];
    const int expected_index = static_cast<int>(k) + 1;
    if (pair.index != expected_index) {
      add("pair_index", "pair at position " + std::to_string(k + 1) +
                            " has index " + std::to_string(pair.index) +
                            ", expected " + std::to_string(expected_index));
    }
    if (pair.forward.count() != pair.backward.count()) {
      add("count_mismatch",
          "pair " + std::to_string(pair.index) + ": forward has " +
              std::to_string(pair.forward.count()) + " points, backward has " +
              std::to_string(pair.backward.count()));
    }
    if (pair.forward.count() < 1 || pair.backward.count() < 1) {
      add("empty_pair",
          "pair " + std::to_string(pair.index) + " has an empty point set");
    }
    check_finite(pair.forward, pair.index, "forward", result.issues);
    check_finite(pair.backward, pair.index, "backward", result.issues);
  }
  return result;
}

double pair_objective_term(const SectionChain& chain, const Registration& reg,
                           int pair_pos) {
  const CorrespondencePair& pair = chain.pairs[static_cast<std::size_t>(pair_pos)];
  const RigidTransform2& a = reg.transforms[static_cast<std::size_t>(pair_pos)];
  const RigidTransform2& b = reg.transforms[static_cast<std::size_t>(pair_pos) + 1];
  const Eigen::Matrix2Xd residual =
      ((a.rotation * pair.forward.data()).colwise() + a.translation) -
      ((b.rotation * pair.backward.data()).colwise() + b.translation);
  return residual.squaredNorm();
}

double objective_value(const SectionChain& chain, const Registration& reg) {
  if (reg.size() != chain.n_sections) {
    throw DataError("objective_value: registration has " +
                    std::to_string(reg.size()) + " transforms for " +
                    std::to_string(chain.n_sections) + " sections");
  }
  if (chain.pairs.size() + 1 != static_cast<std::size_t>(chain.n_sections)) {
    throw DataError("objective_value: chain has " +
                    std::to_string(chain.pairs.size()) + " pairs for " +
                    std::to_string(chain.n_sections) + " sections");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < chain.pairs.size(); ++k) {
    total += pair_objective_term(chain, reg, static_cast<int>(k));
  }
  return total;
}

PointSet2 apply_transform(const RigidTransform2& transform,
                          const PointSet2& points) {
  return PointSet2(
      (transform.rotation * points.data()).colwise() + transform.translation);
}

}  // namespace nsrr
