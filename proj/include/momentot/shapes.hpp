#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "moments.hpp"

namespace momentot {

struct SmileyShape {
  double cx = 0.5, cy = 0.5;  // face center
  double radius = 0.25;

  // face disk minus two eyes and a mouth arc
  bool contains(double x, double y) const
  {
    const double u = (x - cx) / radius, v = (y - cy) / radius;
    if (u * u + v * v > 1.0) return false;
    for (double ex : {-0.35, 0.35})
      if ((u - ex) * (u - ex) + (v - 0.3) * (v - 0.3) < 0.15 * 0.15) return false;
    const double rm = std::sqrt(u * u + (v - 0.1) * (v - 0.1));
    if (v < -0.05 && rm > 0.45 && rm < 0.62) return false;
    return true;
  }
};

// rows x cols cells over [x0, x0 + w] x [y0, y0 + h]; a cell is active when its center is in the shape
inline UniformMask rasterize(const SmileyShape& s, std::size_t rows, std::size_t cols, double x0 = 0.0, double y0 = 0.0,
                             double w = 1.0, double h = 1.0)
{
  UniformMask m;
  m.rows = rows;
  m.cols = cols;
  m.origin_x = x0;
  m.origin_y = y0;
  m.cell_w = w / static_cast<double>(cols);
  m.cell_h = h / static_cast<double>(rows);
  m.active.assign(rows * cols, 0);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const auto [x, y] = m.corner(i, j);
      m.active[i * cols + j] = s.contains(x + 0.5 * m.cell_w, y + 0.5 * m.cell_h) ? 1 : 0;
    }
  return m;
}

// the same mask moved by (dx, dy)
inline UniformMask translated(UniformMask m, double dx, double dy)
{
  m.origin_x += dx;
  m.origin_y += dy;
  return m;
}

// uniform samples from the active cells of a mask
inline Empirical sample_mask(const UniformMask& m, std::size_t count, std::uint64_t seed)
{
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      if (m.at(i, j)) cells.push_back({i, j});
  if (cells.empty()) throw std::invalid_argument("sample_mask: empty mask");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cells.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Empirical e;
  for (std::size_t k = 0; k < count; ++k) {
    const auto [i, j] = cells[pick(rng)];
    const auto [x, y] = m.corner(i, j);
    const double u = unit(rng), v = unit(rng);
    e.points.push_back({x + u * m.cell_w, y + v * m.cell_h});
  }
  return e;
}

// equal-weight mixture of two uniform eye disks of unequal size and a uniform mouth arc
inline Empirical sample_face(std::size_t count, std::uint64_t seed)
{
  constexpr double pi = 3.14159265358979323846;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Empirical e;
  for (std::size_t k = 0; k < count; ++k) {
    const double pick = unit(rng);
    if (pick < 2.0 / 3.0) {
      const bool left = pick < 1.0 / 3.0;
      const double rad = (left ? 0.08 : 0.05) * std::sqrt(unit(rng)), t = 2.0 * pi * unit(rng);
      e.points.push_back({(left ? 0.3 : 0.65) + rad * std::cos(t), (left ? 0.35 : 0.4) + rad * std::sin(t)});
    } else {
      const double t = pi * (0.1 + 0.8 * unit(rng));
      e.points.push_back({0.45 + 0.15 * std::cos(t), 0.55 + 0.15 * std::sin(t)});
    }
  }
  return e;
}

// rotation by angle about (cx, cy)
inline Empirical rotated(const Empirical& e, double angle, double cx, double cy)
{
  Empirical out = e;
  const double c = std::cos(angle), s = std::sin(angle);
  for (auto& p : out.points) {
    const double x = p[0] - cx, y = p[1] - cy;
    p[0] = cx + c * x - s * y;
    p[1] = cy + s * x + c * y;
  }
  return out;
}

}  // namespace momentot
