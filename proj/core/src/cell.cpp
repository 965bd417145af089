#include "ugraph/cell.hpp"

#include <cmath>

namespace ugraph {

namespace {

std::uint32_t quantize(double value, double lo, double hi, int level) {
  const double span = hi - lo;
  const double scaled = (value - lo) / span * static_cast<double>(1u << level);
  std::int64_t q = static_cast<std::int64_t>(std::floor(scaled));
  const std::int64_t max = (std::int64_t{1} << level) - 1;
  if (q < 0) q = 0;
  if (q > max) q = max;  // value == hi lands in the last cell
  return static_cast<std::uint32_t>(q);
}

// Spread the low 32 bits of v so bit k moves to bit 2k.
std::uint64_t spread_bits(std::uint64_t v) {
  v &= 0xFFFFFFFFull;
  v = (v | (v << 16)) & 0x0000FFFF0000FFFFull;
  v = (v | (v << 8)) & 0x00FF00FF00FF00FFull;
  v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0Full;
  v = (v | (v << 2)) & 0x3333333333333333ull;
  v = (v | (v << 1)) & 0x5555555555555555ull;
  return v;
}

std::uint32_t compact_bits(std::uint64_t v) {
  v &= 0x5555555555555555ull;
  v = (v | (v >> 1)) & 0x3333333333333333ull;
  v = (v | (v >> 2)) & 0x0F0F0F0F0F0F0F0Full;
  v = (v | (v >> 4)) & 0x00FF00FF00FF00FFull;
  v = (v | (v >> 8)) & 0x0000FFFF0000FFFFull;
  v = (v | (v >> 16)) & 0x00000000FFFFFFFFull;
  return static_cast<std::uint32_t>(v);
}

void check_level(int level) {
  if (level < 0 || level > kMaxCellLevel) {
    throw ConfigError("cell level must be in [0,24], got " + std::to_string(level));
  }
}

}  // namespace

CellId cell_id(const GeoPoint& p, int level) {
  check_level(level);
  validate_point(p);
  if (level == 0) return {0, 0};
  const std::uint32_t x = quantize(p.lon, -180.0, 180.0, level);
  const std::uint32_t y = quantize(p.lat, -90.0, 90.0, level);
  return {level, spread_bits(x) | (spread_bits(y) << 1)};
}

CellId cell_parent(const CellId& c) {
  if (c.level <= 0) throw ConfigError("level-0 cell has no parent");
  return {c.level - 1, c.code >> 2};
}

CellXY cell_to_xy(const CellId& c) {
  return {compact_bits(c.code), compact_bits(c.code >> 1)};
}

CellId cell_from_xy(int level, std::uint32_t x, std::uint32_t y) {
  check_level(level);
  return {level, spread_bits(x) | (spread_bits(y) << 1)};
}

std::vector<CellId> cell_neighbors(const CellId& c) {
  check_level(c.level);
  const auto xy = cell_to_xy(c);
  const std::int64_t max = (std::int64_t{1} << c.level) - 1;
  std::vector<CellId> out;
  out.reserve(8);
  for (int dy = -1; dy <= 1; ++dy) {
    for (int dx = -1; dx <= 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      const std::int64_t nx = static_cast<std::int64_t>(xy.x) + dx;
      const std::int64_t ny = static_cast<std::int64_t>(xy.y) + dy;
      if (nx < 0 || nx > max || ny < 0 || ny > max) continue;
      out.push_back(cell_from_xy(c.level, static_cast<std::uint32_t>(nx),
                                 static_cast<std::uint32_t>(ny)));
    }
  }
  return out;
}

CellBounds cell_bounds(const CellId& c) {
  const auto xy = cell_to_xy(c);
  const double nx = static_cast<double>(1u << c.level);
  const double lon_step = 360.0 / nx;
  const double lat_step = 180.0 / nx;
  return {-180.0 + xy.x * lon_step, -180.0 + (xy.x + 1) * lon_step,
          -90.0 + xy.y * lat_step, -90.0 + (xy.y + 1) * lat_step};
}

bool cell_contains(const CellId& c, const GeoPoint& p) {
  return cell_id(p, c.level) == c;
}

}  // namespace ugraph
