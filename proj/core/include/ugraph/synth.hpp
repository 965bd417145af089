#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ugraph/graph.hpp"

namespace ugraph {

// Synthetic grid-city generator. Produces a deterministic street grid with
// named avenues/streets, POIs scattered along roads, block-shaped AOIs, and
// transit stops; plus an image manifest of viewpoints near roads. Used for
// fixtures, property tests, and scale benchmarks.
struct SynthCityConfig {
  std::string name = "gridville";
  GeoPoint origin{-73.99, 40.73};  // south-west corner
  int rows = 6;                    // east-west streets
  int cols = 6;                    // north-south avenues
  double block_m = 120.0;          // block edge length
  std::size_t pois = 50;
  std::size_t aois = 5;
  std::size_t transit = 0;
  std::size_t images = 20;
  std::uint64_t seed = 1;
};

struct SynthImage {
  std::string id;
  GeoPoint position;
};

struct SynthCity {
  std::vector<GraphNode> nodes;
  std::vector<SynthImage> images;
};

SynthCity gen_city(const SynthCityConfig& cfg);

// Image manifest CSV (id,lon,lat) writer/reader used by the pipeline.
std::string images_to_csv(const std::vector<SynthImage>& images);
std::vector<SynthImage> images_from_csv(const std::string& text);

}  // namespace ugraph
