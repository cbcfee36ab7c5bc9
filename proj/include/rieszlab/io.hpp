#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rieszlab/config.hpp"
#include "rieszlab/grid.hpp"

namespace riesz {

// Shortest decimal form that round-trips the exact double.
std::string format_double(double x);
double parse_double(const std::string& s);

// Comma-separated doubles; whitespace around entries is ignored and an
// empty list is rejected.
std::vector<double> parse_number_list(const std::string& text);

// Text formats, one record per line, '#' comments, bit-exact round-trips.
//
//   points:  "points <d> <epsilon> <n>" header then one "x y z"[:d] per line
//   pixels:  "pixels <d> <h> <n>" header then one "cx cy cz"[:d] per line
//   field:   "field <d> <h> <origin..> <shape..>" then values row-major
void save_configuration(const std::filesystem::path& path, const Configuration& c);
Configuration load_configuration(const std::filesystem::path& path);

void save_pixel_set(const std::filesystem::path& path, const PixelSet& s);
PixelSet load_pixel_set(const std::filesystem::path& path);

void save_field(const std::filesystem::path& path, const ScalarField& f);
ScalarField load_field(const std::filesystem::path& path);
DensityField load_density_field(const std::filesystem::path& path);

// CSV with RFC-style quoting: fields containing comma, quote or newline are
// wrapped in quotes with quotes doubled. Numbers are preformatted by the
// caller (format_double keeps them exact).
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

// Flat "key = value" manifests with "[section]" headers; keys are stored as
// "section.key" in insertion order. Blank lines and '#' comments pass
// through the reader; the writer regroups by section.
class Manifest {
 public:
  static Manifest load(const std::filesystem::path& path);
  static Manifest parse(const std::string& text);

  bool has(const std::string& key) const;
  const std::string& get(const std::string& key) const;                     // throws if absent
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key) const;

  void set(const std::string& key, const std::string& value);  // keeps first-insertion order
  void set_double(const std::string& key, double value);
  void set_int(const std::string& key, std::int64_t value);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  std::string dump() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::size_t> index_;
};

}  // namespace riesz
