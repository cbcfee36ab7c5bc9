#include "rieszlab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace riesz {
namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("short write to " + path.string());
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Data lines of a record file: comments and blanks skipped.
std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    out.push_back(t);
  }
  return out;
}

std::int64_t parse_int(const std::string& s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("bad integer: '" + s + "'");
  return v;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    throw std::runtime_error("bad number: '" + s + "'");
  return v;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string token;
  while (std::getline(in, token, ',')) {
    const std::string entry = trim(token);
    if (!entry.empty()) out.push_back(parse_double(entry));
  }
  if (out.empty()) throw std::runtime_error("empty number list: '" + text + "'");
  return out;
}

void save_configuration(const std::filesystem::path& path, const Configuration& c) {
  std::ostringstream out;
  out << "points " << c.d << ' ' << format_double(c.epsilon) << ' ' << c.points.size() << '\n';
  for (const Vec& p : c.points) {
    for (int k = 0; k < c.d; ++k) out << (k ? " " : "") << format_double(p[static_cast<std::size_t>(k)]);
    out << '\n';
  }
  write_text(path, out.str());
}

Configuration load_configuration(const std::filesystem::path& path) {
  auto lines = data_lines(read_text(path));
  if (lines.empty()) throw std::runtime_error("empty points file " + path.string());
  auto head = split_ws(lines[0]);
  if (head.size() != 4 || head[0] != "points")
    throw std::runtime_error("bad points header in " + path.string());
  int d = static_cast<int>(parse_int(head[1]));
  double epsilon = parse_double(head[2]);
  std::size_t n = static_cast<std::size_t>(parse_int(head[3]));
  if (lines.size() != n + 1) throw std::runtime_error("point count mismatch in " + path.string());
  std::vector<Vec> pts(n, Vec{});
  for (std::size_t i = 0; i < n; ++i) {
    auto toks = split_ws(lines[i + 1]);
    if (toks.size() != static_cast<std::size_t>(d))
      throw std::runtime_error("bad point row in " + path.string());
    for (int k = 0; k < d; ++k) pts[i][static_cast<std::size_t>(k)] = parse_double(toks[static_cast<std::size_t>(k)]);
  }
  return validate_configuration(std::move(pts), d, epsilon);
}

void save_pixel_set(const std::filesystem::path& path, const PixelSet& s) {
  std::ostringstream out;
  out << "pixels " << s.dim << ' ' << format_double(s.h) << ' ' << s.cells.size() << '\n';
  for (const Cell& c : s.cells) {
    for (int k = 0; k < s.dim; ++k) out << (k ? " " : "") << c[static_cast<std::size_t>(k)];
    out << '\n';
  }
  write_text(path, out.str());
}

PixelSet load_pixel_set(const std::filesystem::path& path) {
  auto lines = data_lines(read_text(path));
  if (lines.empty()) throw std::runtime_error("empty pixels file " + path.string());
  auto head = split_ws(lines[0]);
  if (head.size() != 4 || head[0] != "pixels")
    throw std::runtime_error("bad pixels header in " + path.string());
  int d = static_cast<int>(parse_int(head[1]));
  double h = parse_double(head[2]);
  std::size_t n = static_cast<std::size_t>(parse_int(head[3]));
  if (lines.size() != n + 1) throw std::runtime_error("pixel count mismatch in " + path.string());
  std::vector<Cell> cells(n, Cell{});
  for (std::size_t i = 0; i < n; ++i) {
    auto toks = split_ws(lines[i + 1]);
    if (toks.size() != static_cast<std::size_t>(d))
      throw std::runtime_error("bad pixel row in " + path.string());
    for (int k = 0; k < d; ++k) cells[i][static_cast<std::size_t>(k)] = parse_int(toks[static_cast<std::size_t>(k)]);
  }
  return make_pixel_set(std::move(cells), d, h);
}

void save_field(const std::filesystem::path& path, const ScalarField& f) {
  std::ostringstream out;
  out << "field " << f.dim << ' ' << format_double(f.h);
  for (int k = 0; k < f.dim; ++k) out << ' ' << f.origin[static_cast<std::size_t>(k)];
  for (int k = 0; k < f.dim; ++k) out << ' ' << f.shape[static_cast<std::size_t>(k)];
  out << '\n';
  for (double v : f.values) out << format_double(v) << '\n';
  write_text(path, out.str());
}

ScalarField load_field(const std::filesystem::path& path) {
  auto lines = data_lines(read_text(path));
  if (lines.empty()) throw std::runtime_error("empty field file " + path.string());
  auto head = split_ws(lines[0]);
  if (head.size() < 3 || head[0] != "field")
    throw std::runtime_error("bad field header in " + path.string());
  ScalarField f;
  f.dim = static_cast<int>(parse_int(head[1]));
  f.h = parse_double(head[2]);
  if (head.size() != 3 + 2 * static_cast<std::size_t>(f.dim))
    throw std::runtime_error("bad field header in " + path.string());
  std::size_t total = 1;
  for (int k = 0; k < f.dim; ++k) {
    f.origin[static_cast<std::size_t>(k)] = parse_int(head[3 + static_cast<std::size_t>(k)]);
    auto s = parse_int(head[3 + static_cast<std::size_t>(f.dim + k)]);
    if (s <= 0) throw std::runtime_error("bad field shape in " + path.string());
    f.shape[static_cast<std::size_t>(k)] = s;
    total *= static_cast<std::size_t>(s);
  }
  if (lines.size() != total + 1) throw std::runtime_error("field size mismatch in " + path.string());
  f.values.resize(total);
  for (std::size_t i = 0; i < total; ++i) f.values[i] = parse_double(lines[i + 1]);
  return f;
}

DensityField load_density_field(const std::filesystem::path& path) {
  DensityField rho;
  static_cast<ScalarField&>(rho) = load_field(path);
  validate_density_field(rho);
  return rho;
}

namespace {

std::string csv_quote(const std::string& field) {
  bool needs = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs && !field.empty() && (field.front() == ' ' || field.back() == ' ')) needs = true;
  if (!needs) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_quote(row[i]);
    out << '\n';
  };
  emit(header);
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::runtime_error("csv row width mismatch for " + path.string());
    emit(row);
  }
  write_text(path, out.str());
}

Manifest Manifest::load(const std::filesystem::path& path) { return parse(read_text(path)); }

Manifest Manifest::parse(const std::string& text) {
  Manifest m;
  std::istringstream ss(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw std::runtime_error("unterminated section at line " + std::to_string(lineno));
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("expected key = value at line " + std::to_string(lineno));
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw std::runtime_error("empty key at line " + std::to_string(lineno));
    m.set(section.empty() ? key : section + "." + key, value);
  }
  return m;
}

bool Manifest::has(const std::string& key) const { return index_.count(key) != 0; }

const std::string& Manifest::get(const std::string& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw std::runtime_error("manifest key missing: " + key);
  return entries_[it->second].second;
}

std::string Manifest::get_or(const std::string& key, const std::string& fallback) const {
  auto it = index_.find(key);
  return it == index_.end() ? fallback : entries_[it->second].second;
}

double Manifest::get_double(const std::string& key) const { return parse_double(get(key)); }

std::int64_t Manifest::get_int(const std::string& key) const { return parse_int(get(key)); }

void Manifest::set(const std::string& key, const std::string& value) {
  auto it = index_.find(key);
  if (it != index_.end()) {
    entries_[it->second].second = value;
    return;
  }
  index_.emplace(key, entries_.size());
  entries_.emplace_back(key, value);
}

void Manifest::set_double(const std::string& key, double value) { set(key, format_double(value)); }

void Manifest::set_int(const std::string& key, std::int64_t value) { set(key, std::to_string(value)); }

std::string Manifest::dump() const {
  // Group by section, sections in first-appearance order, keys in insertion
  // order within each section.
  std::vector<std::string> sections;
  auto section_of = [](const std::string& key) {
    auto dot = key.rfind('.');
    return dot == std::string::npos ? std::string() : key.substr(0, dot);
  };
  for (const auto& [key, value] : entries_) {
    std::string s = section_of(key);
    bool seen = false;
    for (const auto& t : sections) seen = seen || t == s;
    if (!seen) sections.push_back(s);
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& s : sections) {
    if (!s.empty()) {
      if (!first) out << '\n';
      out << '[' << s << "]\n";
    }
    first = false;
    for (const auto& [key, value] : entries_) {
      if (section_of(key) != s) continue;
      out << (s.empty() ? key : key.substr(s.size() + 1)) << " = " << value << '\n';
    }
  }
  return out.str();
}

void Manifest::save(const std::filesystem::path& path) const { write_text(path, dump()); }

}  // namespace riesz
