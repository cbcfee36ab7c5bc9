#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "rieszlab/config.hpp"
#include "rieszlab/grid.hpp"
#include "rieszlab/io.hpp"

using namespace riesz;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "rieszlab-io-tests";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("doubles survive a text round trip bit for bit") {
  for (double x : {0.1, -1.0 / 3.0, 3.141592653589793, 1e-300, 6.02e23, 0.0, -2.5e-9, 42.0}) {
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK_THROWS_AS(parse_double("banana"), std::runtime_error);
  CHECK_THROWS_AS(parse_double("1.5 trailing"), std::runtime_error);
}

TEST_CASE("number lists split on commas and reject emptiness") {
  const std::vector<double> got = parse_number_list(" 1, 2.5 ,3e-2 ");
  REQUIRE(got.size() == 3);
  CHECK(got[0] == 1.0);
  CHECK(got[1] == 2.5);
  CHECK(got[2] == 0.03);
  CHECK(parse_number_list("7").size() == 1);
  CHECK_THROWS_AS(parse_number_list(""), std::runtime_error);
  CHECK_THROWS_AS(parse_number_list(" , "), std::runtime_error);
  CHECK_THROWS_AS(parse_number_list("1,oops"), std::runtime_error);
}

TEST_CASE("configurations round-trip exactly") {
  const Configuration config = validate_configuration(
      {{0.1, 0.2, 0.0}, {0.5, 1.0 / 3.0, 0.0}, {-0.25, 0.7, 0.0}}, 2, 0.05);
  const fs::path path = scratch_dir() / "points.txt";
  save_configuration(path, config);
  const Configuration back = load_configuration(path);
  CHECK(back.d == 2);
  CHECK(back.epsilon == 0.05);
  REQUIRE(back.size() == config.size());
  for (std::size_t i = 0; i < config.size(); ++i)
    for (int k = 0; k < 3; ++k) CHECK(back.points[i][k] == config.points[i][k]);
}

TEST_CASE("pixel sets and fields round-trip exactly") {
  const PixelSet set = make_pixel_set({{0, 0, 0}, {-3, 2, 0}, {5, -1, 0}}, 2, 0.125);
  const fs::path spath = scratch_dir() / "pixels.txt";
  save_pixel_set(spath, set);
  const PixelSet sback = load_pixel_set(spath);
  CHECK(sback.dim == set.dim);
  CHECK(sback.h == set.h);
  REQUIRE(sback.cells.size() == set.cells.size());
  for (std::size_t i = 0; i < set.cells.size(); ++i) CHECK(sback.cells[i] == set.cells[i]);

  ScalarField f;
  f.dim = 2;
  f.h = 0.25;
  f.origin = {-1, 3, 0};
  f.shape = {2, 3, 1};
  f.values = {0.0, 0.25, 1.0 / 3.0, 0.5, 0.75, 1.0};
  const fs::path fpath = scratch_dir() / "field.txt";
  save_field(fpath, f);
  const ScalarField fback = load_field(fpath);
  CHECK(fback.dim == f.dim);
  CHECK(fback.h == f.h);
  CHECK(fback.origin == f.origin);
  CHECK(fback.shape == f.shape);
  REQUIRE(fback.values.size() == f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(fback.values[i] == f.values[i]);

  const DensityField dback = load_density_field(fpath);
  CHECK(dback.values == f.values);

  ScalarField loud = f;
  loud.values[0] = 2.0;
  const fs::path lpath = scratch_dir() / "loud.txt";
  save_field(lpath, loud);
  CHECK_NOTHROW(load_field(lpath));
  CHECK_THROWS_AS(load_density_field(lpath), std::invalid_argument);
}

TEST_CASE("csv cells are quoted exactly when they need to be") {
  const fs::path path = scratch_dir() / "table.csv";
  write_csv(path, {"name", "note"},
            {{"plain", "with,comma"}, {"quote\"inside", "two\nlines"}});
  CHECK(slurp(path) ==
        "name,note\nplain,\"with,comma\"\n\"quote\"\"inside\",\"two\nlines\"\n");
  CHECK_THROWS_AS(write_csv(path, {"a", "b"}, {{"only-one"}}), std::runtime_error);
}

TEST_CASE("manifests parse sections, keep order and type their values") {
  const std::string text =
      "# comment\n"
      "[run]\n"
      "seed = 7\n"
      "label = hello world\n"
      "\n"
      "[sweep]\n"
      "eps = 0.5\n";
  Manifest m = Manifest::parse(text);
  CHECK(m.has("run.seed"));
  CHECK(m.get_int("run.seed") == 7);
  CHECK(m.get("run.label") == "hello world");
  CHECK(m.get_double("sweep.eps") == 0.5);
  CHECK_FALSE(m.has("sweep.missing"));
  CHECK(m.get_or("sweep.missing", "fallback") == "fallback");
  CHECK_THROWS_AS(m.get("sweep.missing"), std::runtime_error);

  m.set("run.seed", "8");
  m.set_double("sweep.r", 0.25);
  const Manifest again = Manifest::parse(m.dump());
  REQUIRE(again.entries().size() == m.entries().size());
  for (std::size_t i = 0; i < m.entries().size(); ++i) {
    CHECK(again.entries()[i].first == m.entries()[i].first);
    CHECK(again.entries()[i].second == m.entries()[i].second);
  }
  CHECK(again.get_int("run.seed") == 8);

  const fs::path path = scratch_dir() / "manifest.txt";
  m.save(path);
  const Manifest loaded = Manifest::load(path);
  CHECK(loaded.get_double("sweep.r") == 0.25);
}
