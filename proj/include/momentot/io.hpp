#pragma once

#include <cctype>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "moments.hpp"
#include "postprocess.hpp"

namespace momentot::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s)
{
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline bool parse_double(const std::string& tok, double& out)
{
  const std::string t = trim(tok);
  if (t.empty()) return false;
  const char* end = t.data() + t.size();
  auto [p, ec] = std::from_chars(t.data(), end, out);
  return ec == std::errc() && p == end;
}

// numeric rows of a CSV file; a leading non-numeric row is taken as a header
inline std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string tok;
    bool ok = true;
    while (std::getline(ss, tok, ',')) {
      double v;
      if (!parse_double(tok, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (first) {
        first = false;
        continue;
      }
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": non-numeric field '" + trim(tok) + "'");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

inline std::string fmt(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

using detail::fmt;

// one point per row with n coordinates, optionally followed by a weight column
inline Empirical read_empirical_csv(const std::filesystem::path& path, std::size_t n)
{
  const auto rows = detail::read_numeric_csv(path);
  if (rows.empty()) throw FormatError(path.string() + ": no data rows");
  const std::size_t c = rows.front().size();
  if (c != n && c != n + 1)
    throw FormatError(path.string() + ": expected " + std::to_string(n) + " or " + std::to_string(n + 1) +
                      " columns, got " + std::to_string(c));
  Empirical e;
  double tot = 0.0;
  for (const auto& r : rows) {
    e.points.emplace_back(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(n));
    if (c == n + 1) {
      if (!(r[n] >= 0.0)) throw FormatError(path.string() + ": negative weight");
      e.weights.push_back(r[n]);
      tot += r[n];
    }
  }
  if (!e.weights.empty()) {
    if (!(tot > 0.0)) throw FormatError(path.string() + ": weights sum to zero");
    for (double& w : e.weights) w /= tot;
  }
  return e;
}

inline void write_empirical_csv(const std::filesystem::path& path, const Empirical& e)
{
  std::string s;
  for (std::size_t k = 0; k < e.points.size(); ++k) {
    for (std::size_t i = 0; i < e.points[k].size(); ++i) s += (i ? "," : "") + fmt(e.points[k][i]);
    if (!e.weights.empty()) s += "," + fmt(e.weights[k]);
    s += "\n";
  }
  detail::write_text(path, s);
}

struct Raster {
  std::size_t rows = 0, cols = 0;
  std::vector<std::uint8_t> active;  // row 0 at the top
};

inline Raster read_pgm(const std::filesystem::path& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  auto token = [&]() {
    std::string t;
    int ch;
    while ((ch = in.get()) != EOF) {
      if (ch == '#') {
        while ((ch = in.get()) != EOF && ch != '\n') {
        }
        continue;
      }
      if (std::isspace(ch)) {
        if (!t.empty()) break;
        continue;
      }
      t += static_cast<char>(ch);
    }
    if (t.empty()) throw FormatError(path.string() + ": truncated PGM header");
    return t;
  };
  const std::string magic = token();
  if (magic != "P2" && magic != "P5") throw FormatError(path.string() + ": not a P2/P5 PGM file");
  Raster r;
  long w = 0, h = 0, maxval = 0;
  try {
    w = std::stol(token());
    h = std::stol(token());
    maxval = std::stol(token());
  } catch (const std::logic_error&) {
    throw FormatError(path.string() + ": malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw FormatError(path.string() + ": bad PGM dimensions");
  r.rows = static_cast<std::size_t>(h);
  r.cols = static_cast<std::size_t>(w);
  r.active.resize(r.rows * r.cols);
  for (std::size_t k = 0; k < r.active.size(); ++k) {
    long v = 0;
    if (magic == "P2") {
      try {
        v = std::stol(token());
      } catch (const std::logic_error&) {
        throw FormatError(path.string() + ": malformed PGM pixel");
      }
    } else if (maxval < 256) {
      const int ch = in.get();
      if (ch == EOF) throw FormatError(path.string() + ": truncated PGM data");
      v = ch;
    } else {
      const int hi = in.get(), lo = in.get();
      if (lo == EOF) throw FormatError(path.string() + ": truncated PGM data");
      v = hi * 256 + lo;
    }
    r.active[k] = v != 0 ? 1 : 0;
  }
  return r;
}

// rows of 0/1 values, top row first
inline Raster read_mask_csv(const std::filesystem::path& path)
{
  const auto rows = detail::read_numeric_csv(path);
  if (rows.empty()) throw FormatError(path.string() + ": empty mask");
  Raster r;
  r.rows = rows.size();
  r.cols = rows.front().size();
  for (const auto& row : rows)
    for (double v : row) r.active.push_back(v != 0.0 ? 1 : 0);
  return r;
}

inline Raster read_raster(const std::filesystem::path& path)
{
  auto ext = path.extension().string();
  for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".pgm") return read_pgm(path);
  if (ext == ".csv") return read_mask_csv(path);
  throw FormatError(path.string() + ": mask files must be .pgm or .csv");
}

// place a raster on [x0, x0 + w] x [y0, y0 + h]
inline UniformMask to_mask(const Raster& r, double x0, double y0, double w, double h)
{
  if (!(w > 0.0 && h > 0.0)) throw std::invalid_argument("mask extent must be positive");
  UniformMask m;
  m.rows = r.rows;
  m.cols = r.cols;
  m.active = r.active;
  m.origin_x = x0;
  m.origin_y = y0;
  m.cell_w = w / static_cast<double>(r.cols);
  m.cell_h = h / static_cast<double>(r.rows);
  return m;
}

inline void write_pgm(const std::filesystem::path& path, const Raster& r)
{
  std::string s = "P5\n" + std::to_string(r.cols) + " " + std::to_string(r.rows) + "\n255\n";
  for (auto v : r.active) s += static_cast<char>(v ? 255 : 0);
  detail::write_text(path, s);
}

// moments in original coordinates, one row per index in graded-lex order
inline void write_moments_csv(const std::filesystem::path& path, const TruncatedMomentSequence& y)
{
  const auto z = to_original(y);
  const std::size_t n = z.dimension();
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += "alpha_" + std::to_string(i + 1) + ",";
  s += "value\n";
  for (const auto& a : enumerate_indices(n, z.degree())) {
    for (std::size_t i = 0; i < n; ++i) s += std::to_string(a[i]) + ",";
    s += fmt(z.at(a)) + "\n";
  }
  detail::write_text(path, s);
}

inline TruncatedMomentSequence read_moments_csv(const std::filesystem::path& path)
{
  const auto rows = detail::read_numeric_csv(path);
  if (rows.empty()) throw FormatError(path.string() + ": no moments");
  const std::size_t c = rows.front().size();
  if (c < 2) throw FormatError(path.string() + ": expected alpha columns and a value column");
  const std::size_t n = c - 1;
  int degree = 0;
  std::vector<std::pair<MultiIndex, double>> entries;
  for (const auto& r : rows) {
    std::vector<int> e(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (r[i] < 0 || r[i] != std::floor(r[i])) throw FormatError(path.string() + ": exponents must be natural numbers");
      e[i] = static_cast<int>(r[i]);
    }
    MultiIndex a(std::move(e));
    degree = std::max(degree, a.degree());
    entries.push_back({a, r[n]});
  }
  if (entries.size() != basis_size(n, degree))
    throw FormatError(path.string() + ": incomplete moment table for degree " + std::to_string(degree));
  TruncatedMomentSequence y(n, degree);
  std::vector<bool> seen(entries.size(), false);
  for (const auto& [a, v] : entries) {
    const auto k = static_cast<std::size_t>(y.index(a));
    if (seen[k]) throw FormatError(path.string() + ": duplicate index " + a.to_string());
    seen[k] = true;
    y.at(a) = v;
  }
  return y;
}

inline void write_grid_csv(const std::filesystem::path& path, const SupportEstimate& s)
{
  const std::size_t n = s.points.empty() ? 0 : s.points.front().size();
  std::string out;
  for (std::size_t i = 0; i < n; ++i) out += "x" + std::to_string(i + 1) + ",";
  out += "kappa,label\n";
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    for (double v : s.points[k]) out += fmt(v) + ",";
    out += fmt(s.kappa[k]) + (s.inside[k] ? ",1\n" : ",0\n");
  }
  detail::write_text(path, out);
}

// label image of a 2-D regular grid with the first axis fastest; top row is the largest x2
inline Raster label_raster(const SupportEstimate& s, std::size_t nx, std::size_t ny)
{
  if (s.inside.size() != nx * ny) throw std::invalid_argument("label_raster: grid size mismatch");
  Raster r;
  r.rows = ny;
  r.cols = nx;
  r.active.resize(nx * ny);
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) r.active[(ny - 1 - j) * nx + i] = s.inside[j * nx + i] ? 1 : 0;
  return r;
}

}  // namespace momentot::io
