#include "nsrr/io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nsrr/errors.hpp"

namespace nsrr {

using json = nlohmann::ordered_json;

namespace {

void write_text_atomically(const std::filesystem::path& path,
                           const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw DataError("cannot open " + tmp.string() + " for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw DataError("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw DataError("failed to move output into place at " + path.string());
  }
}

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    // Covers syntax errors and number overflow (1e999 and friends).
    throw DataError("parse error in " + path.string() + ": " + e.what());
  }
}

void check_version(const json& doc, const std::filesystem::path& path) {
  if (!doc.is_object()) {
    throw DataError(path.string() + ": top-level value must be an object");
  }
  if (!doc.contains("format_version") || !doc["format_version"].is_string()) {
    throw DataError(path.string() + ": missing format_version string");
  }
  const std::string version = doc["format_version"].get<std::string>();
  if (version != kFormatVersion) {
    throw DataError(path.string() + ": unsupported format_version \"" +
                    version + "\" (expected \"" + kFormatVersion + "\")");
  }
}

double number_at(const json& value, const std::string& where) {
  if (!value.is_number()) {
    throw DataError(where + ": expected a number");
  }
  return value.get<double>();
}

PointSet2 point_array_at(const json& value, const std::string& where) {
  if (!value.is_array()) {
    throw DataError(where + ": expected an array of [x, y] points");
  }
  Eigen::Matrix2Xd pts(2, static_cast<Eigen::Index>(value.size()));
  for (std::size_t k = 0; k < value.size(); ++k) {
    const json& p = value[k];
    const std::string point_where = where + "[" + std::to_string(k) + "]";
    if (!p.is_array() || p.size() != 2) {
      throw DataError(point_where + ": expected [x, y]");
    }
    pts(0, static_cast<Eigen::Index>(k)) = number_at(p[0], point_where + "[0]");
    pts(1, static_cast<Eigen::Index>(k)) = number_at(p[1], point_where + "[1]");
  }
  return PointSet2(std::move(pts));
}

json point_set_to_json(const PointSet2& set) {
  json arr = json::array();
  for (int k = 0; k < set.count(); ++k) {
    arr.push_back({set.point(k).x(), set.point(k).y()});
  }
  return arr;
}

Mat2 matrix_at(const json& value, const std::string& where) {
  if (!value.is_array() || value.size() != 2) {
    throw DataError(where + ": expected a 2x2 array");
  }
  Mat2 m;
  for (int r = 0; r < 2; ++r) {
    const json& row = value[static_cast<std::size_t>(r)];
    const std::string row_where = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != 2) {
      throw DataError(row_where + ": expected a row of 2 numbers");
    }
    for (int c = 0; c < 2; ++c) {
      m(r, c) = number_at(row[static_cast<std::size_t>(c)],
                          row_where + "[" + std::to_string(c) + "]");
    }
  }
  return m;
}

}  // namespace

std::string format_full_precision(double value) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << value;
  return out.str();
}

SectionChain read_chain(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  check_version(doc, path);

  if (!doc.contains("n") || !doc["n"].is_number_integer()) {
    throw DataError(path.string() + ": missing integer field \"n\"");
  }
  if (!doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw DataError(path.string() + ": missing array field \"pairs\"");
  }

  SectionChain chain;
  chain.n_sections = doc["n"].get<int>();
  const json& pairs = doc["pairs"];
  chain.pairs.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const json& entry = pairs[k];
    const std::string where = "pairs[" + std::to_string(k) + "]";
    if (!entry.is_object()) {
      throw DataError(where + ": expected an object");
    }
    for (const char* field : {"index", "forward", "backward"}) {
      if (!entry.contains(field)) {
        throw DataError(where + ": missing field \"" + field + "\"");
      }
    }
    if (!entry["index"].is_number_integer()) {
      throw DataError(where + ".index: expected an integer");
    }
    CorrespondencePair pair;
    pair.index = entry["index"].get<int>();
    pair.forward = point_array_at(entry["forward"], where + ".forward");
    pair.backward = point_array_at(entry["backward"], where + ".backward");
    chain.pairs.push_back(std::move(pair));
  }

  const ChainValidation validation = validate_chain(chain);
  if (!validation.ok()) {
    throw DataError(path.string() + ": " + validation.summary());
  }
  return chain;
}

void write_chain(const SectionChain& chain, const std::filesystem::path& path,
                 const ChainMetadata& metadata) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["n"] = chain.n_sections;
  doc["pairs"] = json::array();
  for (const CorrespondencePair& pair : chain.pairs) {
    json entry;
    entry["index"] = pair.index;
    entry["forward"] = point_set_to_json(pair.forward);
    entry["backward"] = point_set_to_json(pair.backward);
    doc["pairs"].push_back(std::move(entry));
  }
  if (metadata.pixel_size || metadata.description) {
    json meta;
    if (metadata.pixel_size) {
      meta["pixel_size"] = *metadata.pixel_size;
    }
    if (metadata.description) {
      meta["description"] = *metadata.description;
    }
    doc["metadata"] = std::move(meta);
  }
  write_text_atomically(path, doc.dump(2) + "\n");
}

std::vector<RigidTransform2> read_transforms(const std::filesystem::path& path,
                                             bool require_fixed_endpoints) {
  const json doc = parse_file(path);
  check_version(doc, path);
  if (!doc.contains("transforms") || !doc["transforms"].is_array()) {
    throw DataError(path.string() + ": missing array field \"transforms\"");
  }

  const json& entries = doc["transforms"];
  std::vector<RigidTransform2> transforms;
  transforms.reserve(entries.size());
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const json& entry = entries[k];
    const std::string where = "transforms[" + std::to_string(k) + "]";
    if (!entry.is_object()) {
      throw DataError(where + ": expected an object");
    }
    for (const char* field : {"index", "angle_rad", "rotation", "translation"}) {
      if (!entry.contains(field)) {
        throw DataError(where + ": missing field \"" + field + "\"");
      }
    }
    if (!entry["index"].is_number_integer() ||
        entry["index"].get<int>() != static_cast<int>(k) + 1) {
      throw DataError(where + ".index: expected " + std::to_string(k + 1));
    }

    RigidTransform2 t;
    t.rotation = matrix_at(entry["rotation"], where + ".rotation");
    if (!is_rotation(t.rotation)) {
      throw DataError(where + ".rotation: not a rotation matrix");
    }
    const double angle = number_at(entry["angle_rad"], where + ".angle_rad");
    if ((rot(angle) - t.rotation).cwiseAbs().maxCoeff() > 1e-9) {
      throw DataError(where + ": angle_rad disagrees with the rotation matrix");
    }
    const json& translation = entry["translation"];
    if (!translation.is_array() || translation.size() != 2) {
      throw DataError(where + ".translation: expected [tx, ty]");
    }
    t.translation.x() = number_at(translation[0], where + ".translation[0]");
    t.translation.y() = number_at(translation[1], where + ".translation[1]");
    if (!t.translation.allFinite()) {
      throw DataError(where + ".translation: non-finite value");
    }
    transforms.push_back(t);
  }

  if (transforms.size() < 2) {
    throw DataError(path.string() + ": need at least 2 transforms");
  }
  if (require_fixed_endpoints &&
      (!transforms.front().is_exact_identity() ||
       !transforms.back().is_exact_identity())) {
    throw DataError(path.string() +
                    ": first and last transforms must be identity / zero");
  }
  return transforms;
}

void write_transforms(std::span<const RigidTransform2> transforms,
                      const std::filesystem::path& path) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["transforms"] = json::array();
  for (std::size_t k = 0; k < transforms.size(); ++k) {
    const RigidTransform2& t = transforms[k];
    json entry;
    entry["index"] = static_cast<int>(k) + 1;
    entry["angle_rad"] = angle_of(t.rotation).radians();
    entry["rotation"] = {{t.rotation(0, 0), t.rotation(0, 1)},
                         {t.rotation(1, 0), t.rotation(1, 1)}};
    entry["translation"] = {t.translation.x(), t.translation.y()};
    doc["transforms"].push_back(std::move(entry));
  }
  write_text_atomically(path, doc.dump(2) + "\n");
}

void write_solve_report(const SolveReport& report, int n_sections,
                        double epe_after, const std::filesystem::path& path) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["method"] = "nsrr";
  doc["n_sections"] = n_sections;
  doc["objective_before"] = report.objective_before;
  doc["objective_after"] = report.objective_after;
  doc["per_pair_residuals"] = report.per_pair_residuals;
  doc["angle_thetas"] = report.angle_solution.thetas;
  doc["angle_objective"] = report.angle_solution.objective;
  doc["epe"] = epe_after;
  doc["wall_time_seconds"] = report.wall_time_seconds;
  write_text_atomically(path, doc.dump(2) + "\n");
}

void write_sweep_csv(std::span<const SweepRow> rows,
                     const std::filesystem::path& path) {
  std::ostringstream out;
  out << "noise_ratio,mean_mse,std_mse,mean_mse_unregistered\n";
  for (const SweepRow& row : rows) {
    out << format_full_precision(row.noise_ratio) << ','
        << format_full_precision(row.mean_mse) << ','
        << format_full_precision(row.std_mse) << ','
        << format_full_precision(row.mean_mse_unregistered) << '\n';
  }
  write_text_atomically(path, out.str());
}

}  // namespace nsrr
