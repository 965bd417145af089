#include "ugraph/synth.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ugraph/rng.hpp"

namespace ugraph {

namespace {

const char* kPoiCategories[] = {"cafe",  "restaurant", "school", "pharmacy", "bank",
                                "hotel", "church",     "museum", "library",  "bar"};
const char* kAoiUses[] = {"park", "campus", "residential", "commercial", "historic district"};

std::string ordinal_name(int i) {
  std::string n = std::to_string(i + 1);
  const int mod100 = (i + 1) % 100;
  const int mod10 = (i + 1) % 10;
  if (mod100 / 10 == 1) return n + "th";
  if (mod10 == 1) return n + "st";
  if (mod10 == 2) return n + "nd";
  if (mod10 == 3) return n + "rd";
  return n + "th";
}

}  // namespace

SynthCity gen_city(const SynthCityConfig& cfg) {
  SynthCity city;
  Rng rng(cfg.seed);

  const double dlat = cfg.block_m / kMetersPerDegree;
  const double cos_lat = std::cos(cfg.origin.lat * kDegToRad);
  const double dlon = cfg.block_m / (kMetersPerDegree * cos_lat);
  const double width = dlon * (cfg.cols - 1);
  const double height = dlat * (cfg.rows - 1);

  auto at = [&](double col, double row) -> GeoPoint {
    return {cfg.origin.lon + col * dlon, cfg.origin.lat + row * dlat};
  };

  // Streets run east-west, avenues north-south; every pair crosses.
  int road_seq = 0;
  for (int r = 0; r < cfg.rows; ++r) {
    GraphNode n;
    n.id = "r" + std::to_string(road_seq++);
    n.kind = NodeKind::Road;
    n.name = ordinal_name(r) + " St";
    std::vector<GeoPoint> pts;
    for (int c = 0; c < cfg.cols; ++c) pts.push_back(at(c, r));
    n.geometry = Geometry::line(std::move(pts));
    n.anchor = n.geometry.anchor();
    city.nodes.push_back(std::move(n));
  }
  for (int c = 0; c < cfg.cols; ++c) {
    GraphNode n;
    n.id = "r" + std::to_string(road_seq++);
    n.kind = NodeKind::Road;
    n.name = ordinal_name(c) + " Ave";
    std::vector<GeoPoint> pts;
    for (int r = 0; r < cfg.rows; ++r) pts.push_back(at(c, r));
    n.geometry = Geometry::line(std::move(pts));
    n.anchor = n.geometry.anchor();
    city.nodes.push_back(std::move(n));
  }

  // POIs hug road lines so Nearest/Near edges exist.
  for (std::size_t i = 0; i < cfg.pois; ++i) {
    GraphNode n;
    n.id = "p" + std::to_string(i);
    n.kind = NodeKind::POI;
    n.category = kPoiCategories[rng.next_below(std::size(kPoiCategories))];
    n.name = (i % 7 == 3) ? "" : "The " + ordinal_name(static_cast<int>(i)) + " " + n.category;
    const bool on_street = rng.next_below(2) == 0;
    const double offset_m = 5.0 + rng.next_double() * 30.0;
    GeoPoint p;
    if (on_street) {
      const int row = static_cast<int>(rng.next_below(cfg.rows));
      p = at(rng.next_double() * (cfg.cols - 1), row);
      p.lat += (rng.next_below(2) ? 1 : -1) * offset_m / kMetersPerDegree;
    } else {
      const int col = static_cast<int>(rng.next_below(cfg.cols));
      p = at(col, rng.next_double() * (cfg.rows - 1));
      p.lon += (rng.next_below(2) ? 1 : -1) * offset_m / (kMetersPerDegree * cos_lat);
    }
    n.geometry = Geometry::point(p);
    n.anchor = p;
    n.attrs["street"] = on_street ? "unknown" : "avenue-side";
    city.nodes.push_back(std::move(n));
  }

  // AOIs are inflated blocks; some overlap roads so bounds/intersects fire.
  for (std::size_t i = 0; i < cfg.aois; ++i) {
    GraphNode n;
    n.id = "a" + std::to_string(i);
    n.kind = NodeKind::AOI;
    const char* use = kAoiUses[i % std::size(kAoiUses)];
    n.name = std::string(use) + " " + std::to_string(i + 1);
    n.attrs["building use"] = use;
    const int c0 = cfg.cols > 2 ? static_cast<int>(rng.next_below(cfg.cols - 1)) : 0;
    const int r0 = cfg.rows > 2 ? static_cast<int>(rng.next_below(cfg.rows - 1)) : 0;
    // Inset or overshoot the block boundary a little.
    const double grow = (rng.next_double() - 0.35) * 0.3;
    const double pad_lon = grow * dlon;
    const double pad_lat = grow * dlat;
    const GeoPoint sw{at(c0, r0).lon - pad_lon, at(c0, r0).lat - pad_lat};
    const GeoPoint ne{at(c0 + 1, r0 + 1).lon + pad_lon, at(c0 + 1, r0 + 1).lat + pad_lat};
    n.geometry = Geometry::polygon(
        {sw, {ne.lon, sw.lat}, ne, {sw.lon, ne.lat}, sw});
    n.anchor = n.geometry.anchor();
    city.nodes.push_back(std::move(n));
  }

  for (std::size_t i = 0; i < cfg.transit; ++i) {
    GraphNode n;
    n.id = "t" + std::to_string(i);
    n.kind = NodeKind::TransitFacility;
    n.name = "Stop " + std::to_string(i + 1);
    n.category = "bus_stop";
    GeoPoint p = at(rng.next_double() * (cfg.cols - 1),
                    static_cast<double>(rng.next_below(cfg.rows)));
    p.lat += 6.0 / kMetersPerDegree;
    n.geometry = Geometry::point(p);
    n.anchor = p;
    city.nodes.push_back(std::move(n));
  }

  // Viewpoints sit a couple of meters off a road.
  for (std::size_t i = 0; i < cfg.images; ++i) {
    SynthImage img;
    img.id = std::to_string(539125490000000ull + cfg.seed * 1000 + i);
    const int row = static_cast<int>(rng.next_below(cfg.rows));
    GeoPoint p = at(0.05 + rng.next_double() * (cfg.cols - 1.1), row);
    p.lat += (rng.next_below(2) ? 1 : -1) * (1.0 + rng.next_double() * 6.0) / kMetersPerDegree;
    img.position = p;
    city.images.push_back(std::move(img));
  }
  return city;
}

std::string images_to_csv(const std::vector<SynthImage>& images) {
  std::string out = "id,lon,lat\n";
  char buf[96];
  for (const auto& img : images) {
    std::snprintf(buf, sizeof(buf), ",%.8f,%.8f\n", img.position.lon, img.position.lat);
    out += img.id;
    out += buf;
  }
  return out;
}

std::vector<SynthImage> images_from_csv(const std::string& text) {
  std::vector<SynthImage> out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (first && line.rfind("id,", 0) == 0) {
      first = false;
      continue;
    }
    first = false;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw DataError("image manifest line " + std::to_string(lineno) +
                      " is not id,lon,lat: " + line);
    }
    SynthImage img;
    img.id = line.substr(0, c1);
    try {
      img.position.lon = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      img.position.lat = std::stod(line.substr(c2 + 1));
    } catch (const std::exception&) {
      throw DataError("bad coordinates in image manifest line " + std::to_string(lineno));
    }
    validate_point(img.position);
    out.push_back(std::move(img));
  }
  return out;
}

}  // namespace ugraph
