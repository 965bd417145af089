#pragma once

#include <cstdint>
#include <vector>

#include "ugraph/geo.hpp"

namespace ugraph {

inline constexpr int kMaxCellLevel = 24;

// Hierarchical cell over an equirectangular lon/lat grid. At level L the
// domain is split into 2^L x 2^L cells; `code` is the Morton interleave of
// the quantized (lon, lat) bits: lon bit k at position 2k, lat bit k at
// position 2k+1.
struct CellId {
  int level = 0;
  std::uint64_t code = 0;

  bool operator==(const CellId&) const = default;
  auto operator<=>(const CellId&) const = default;
};

// Cell containing p at the given level. Throws ConfigError for levels
// outside [0, 24].
CellId cell_id(const GeoPoint& p, int level);

CellId cell_parent(const CellId& c);

// Up-to-8 face and corner adjacent cells at the same level; cells on the
// domain edge return fewer. Order: row-major by (dy, dx).
std::vector<CellId> cell_neighbors(const CellId& c);

// Decoded grid coordinates (x = lon index, y = lat index).
struct CellXY {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
};

CellXY cell_to_xy(const CellId& c);
CellId cell_from_xy(int level, std::uint32_t x, std::uint32_t y);

// Geographic bounds of the cell (min inclusive, max exclusive).
struct CellBounds {
  double lon_min, lon_max, lat_min, lat_max;
};

CellBounds cell_bounds(const CellId& c);
bool cell_contains(const CellId& c, const GeoPoint& p);

}  // namespace ugraph
