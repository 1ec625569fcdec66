#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "nsrr/errors.hpp"
#include "nsrr/io.hpp"
#include "nsrr/synthetic.hpp"
#include "oracles.hpp"

using namespace nsrr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nsrr-io-test-" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

fs::path write_file(const TempDir& dir, const std::string& name,
                    const std::string& content) {
  const fs::path p = dir.path / name;
  std::ofstream out(p);
  out << content;
  return p;
}

}  // namespace

TEST_CASE("read_chain parses a minimal valid document") {
  TempDir dir;
  const fs::path p = write_file(dir, "minimal.json", R"({
    "format_version": "1.0",
    "n": 2,
    "pairs": [
      {"index": 1,
       "forward": [[0.0, 0.0], [1.0, 0.5]],
       "backward": [[0.1, 0.0], [1.1, 0.5]]}
    ]
  })");
  const SectionChain chain = read_chain(p);
  CHECK(chain.n_sections == 2);
  REQUIRE(chain.pairs.size() == 1);
  CHECK(chain.pairs[0].forward.count() == 2);
  CHECK(chain.pairs[0].backward.point(1) == Vec2(1.1, 0.5));
}

TEST_CASE("read_chain rejects malformed documents with diagnostics") {
  TempDir dir;

  SUBCASE("non-finite coordinate names the pair and point") {
    // Writers emit NaN/inf as null (JSON has no non-finite literals); the
    // diagnostic pins down the offending pair and point.
    const fs::path p = write_file(dir, "nan.json", R"({
      "format_version": "1.0", "n": 2,
      "pairs": [{"index": 1,
                 "forward": [[0, 0], [null, 0]],
                 "backward": [[0, 0], [1, 0]]}]
    })");
    CHECK_THROWS_WITH_AS(read_chain(p),
                         doctest::Contains("pairs[0].forward[1]"), DataError);
  }

  SUBCASE("out-of-range literal is a parse error") {
    const fs::path p = write_file(dir, "overflow.json", R"({
      "format_version": "1.0", "n": 2,
      "pairs": [{"index": 1,
                 "forward": [[0, 0], [1e999, 0]],
                 "backward": [[0, 0], [1, 0]]}]
    })");
    CHECK_THROWS_WITH_AS(read_chain(p), doctest::Contains("parse error"),
                         DataError);
  }

  SUBCASE("version mismatch") {
    const fs::path p = write_file(dir, "version.json",
                                  R"({"format_version": "9.9", "n": 2, "pairs": []})");
    CHECK_THROWS_WITH_AS(read_chain(p),
                         doctest::Contains("format_version"), DataError);
  }

  SUBCASE("broken JSON") {
    const fs::path p = write_file(dir, "broken.json", "{ not json");
    CHECK_THROWS_WITH_AS(read_chain(p), doctest::Contains("parse error"),
                         DataError);
  }

  SUBCASE("missing field has a path") {
    const fs::path p = write_file(dir, "missing.json", R"({
      "format_version": "1.0", "n": 2,
      "pairs": [{"index": 1, "forward": [[0, 0]]}]
    })");
    CHECK_THROWS_WITH_AS(read_chain(p), doctest::Contains("pairs[0]"),
                         DataError);
  }

  SUBCASE("bad point shape has an indexed path") {
    const fs::path p = write_file(dir, "shape.json", R"({
      "format_version": "1.0", "n": 2,
      "pairs": [{"index": 1, "forward": [[0, 0], [1]], "backward": [[0, 0], [1, 1]]}]
    })");
    CHECK_THROWS_WITH_AS(read_chain(p),
                         doctest::Contains("pairs[0].forward[1]"), DataError);
  }

  SUBCASE("index order violations surface from validation") {
    const fs::path p = write_file(dir, "order.json", R"({
      "format_version": "1.0", "n": 3,
      "pairs": [
        {"index": 2, "forward": [[0, 0]], "backward": [[0, 0]]},
        {"index": 1, "forward": [[0, 0]], "backward": [[0, 0]]}
      ]
    })");
    CHECK_THROWS_WITH_AS(read_chain(p), doctest::Contains("pair_index"),
                         DataError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_chain(dir.path / "does-not-exist.json"), DataError);
  }
}

TEST_CASE("chain round trip is lossless for a random 50-section chain") {
  TempDir dir;
  Rng rng(701);
  const SectionChain chain = test::random_chain(rng, 50, 7);
  const fs::path p = dir.path / "chain.json";
  write_chain(chain, p);
  const SectionChain reread = read_chain(p);

  CHECK(reread.n_sections == chain.n_sections);
  REQUIRE(reread.pairs.size() == chain.pairs.size());
  for (std::size_t k = 0; k < chain.pairs.size(); ++k) {
    CHECK(reread.pairs[k].index == chain.pairs[k].index);
    CHECK(reread.pairs[k].forward.data() == chain.pairs[k].forward.data());
    CHECK(reread.pairs[k].backward.data() == chain.pairs[k].backward.data());
  }

  // Metadata survives as optional content without disturbing the chain.
  ChainMetadata metadata;
  metadata.pixel_size = 0.11;
  metadata.description = "round trip";
  write_chain(chain, p, metadata);
  const SectionChain with_meta = read_chain(p);
  CHECK(with_meta.pairs.size() == chain.pairs.size());
}

TEST_CASE("transform round trip and validation") {
  TempDir dir;
  const fs::path p = dir.path / "transforms.json";

  std::vector<RigidTransform2> transforms(4);
  transforms[1].rotation = rot(0.35);
  transforms[1].translation = Vec2(1.25, -0.5);
  transforms[2].rotation = rot(-1.1);
  transforms[2].translation = Vec2(-3.0, 0.25);
  write_transforms(transforms, p);

  const std::vector<RigidTransform2> reread = read_transforms(p, true);
  REQUIRE(reread.size() == 4);
  for (std::size_t k = 0; k < transforms.size(); ++k) {
    CHECK(reread[k].rotation == transforms[k].rotation);
    CHECK(reread[k].translation == transforms[k].translation);
  }

  SUBCASE("angle/matrix disagreement is rejected") {
    const fs::path bad = write_file(dir, "bad-angle.json", R"({
      "format_version": "1.0",
      "transforms": [
        {"index": 1, "angle_rad": 0.0,
         "rotation": [[1.0, 0.0], [0.0, 1.0]], "translation": [0.0, 0.0]},
        {"index": 2, "angle_rad": 0.5,
         "rotation": [[1.0, 0.0], [0.0, 1.0]], "translation": [0.0, 0.0]}
      ]
    })");
    CHECK_THROWS_WITH_AS(read_transforms(bad), doctest::Contains("angle_rad"),
                         DataError);
  }

  SUBCASE("fixed-endpoint requirement") {
    std::vector<RigidTransform2> drifting(3);
    drifting[2].rotation = rot(0.2);
    const fs::path drift_path = dir.path / "drift.json";
    write_transforms(drifting, drift_path);
    CHECK_NOTHROW(read_transforms(drift_path, false));
    CHECK_THROWS_AS(read_transforms(drift_path, true), DataError);
  }

  SUBCASE("non-rotation matrix is rejected") {
    const fs::path bad = write_file(dir, "bad-rot.json", R"({
      "format_version": "1.0",
      "transforms": [
        {"index": 1, "angle_rad": 0.0,
         "rotation": [[2.0, 0.0], [0.0, 2.0]], "translation": [0.0, 0.0]},
        {"index": 2, "angle_rad": 0.0,
         "rotation": [[1.0, 0.0], [0.0, 1.0]], "translation": [0.0, 0.0]}
      ]
    })");
    CHECK_THROWS_WITH_AS(read_transforms(bad),
                         doctest::Contains("not a rotation"), DataError);
  }
}

TEST_CASE("sweep CSV format") {
  TempDir dir;
  const fs::path p = dir.path / "sweep.csv";
  std::vector<SweepRow> rows(2);
  rows[0] = {0.0, 0.125, 0.0, 4.0};
  rows[1] = {0.5, 1.0 / 3.0, 0.25, 8.0};
  write_sweep_csv(rows, p);

  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  CHECK(line == "noise_ratio,mean_mse,std_mse,mean_mse_unregistered");
  std::getline(in, line);
  CHECK(line == "0,0.125,0,4");
  std::getline(in, line);
  CHECK(line == "0.5,0.33333333333333331,0.25,8");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("full precision formatting round-trips doubles") {
  Rng rng(709);
  for (int k = 0; k < 200; ++k) {
    const double value = rng.uniform(-1e6, 1e6) * std::pow(10.0, -(k % 9));
    CHECK(std::stod(format_full_precision(value)) == value);
  }
}
