#ifndef SCATTER_DATASET_HPP
#define SCATTER_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "scatter/geometry.hpp"
#include "scatter/point_set.hpp"
#include "scatter/rng.hpp"

namespace scatter {

enum class DatasetRole { Train, TestCircles, TestArbitrary };

std::string to_string(DatasetRole role);
DatasetRole parse_role(const std::string &text);

struct ShapeRecord {
  std::uint64_t id = 0;
  ShapeVector shape;
  friend bool operator==(const ShapeRecord &, const ShapeRecord &) = default;
};

struct ShapeDataset {
  DatasetRole role = DatasetRole::Train;
  std::uint64_t seed = 0;
  std::vector<ShapeRecord> shapes;

  const ShapeRecord &find(std::uint64_t id) const; // throws LookupError
  friend bool operator==(const ShapeDataset &, const ShapeDataset &) = default;
};

struct DatasetOptions {
  double radius_min = 0.05; // test-circles radii, evenly spaced
  double radius_max = 0.19;
  double magnitude_min = kMagnitudeMin;
  double magnitude_max = kMagnitudeMax;
  // Vectors that must not be reproduced (e.g. the training set).
  const ShapeDataset *exclude = nullptr;
};

// Deterministic in (role, count, seed, options). Shape i draws from a stream
// seeded by (seed XOR i, role, sub-seed); a duplicate of an earlier shape or
// of options.exclude is redrawn with the next sub-seed.
ShapeDataset generate_dataset(DatasetRole role, std::size_t count,
                              std::uint64_t seed,
                              const DatasetOptions &options = {});

struct PointCounts {
  std::size_t interior = 10000;
  std::size_t inner = 200;
  std::size_t outer = 200;
  friend bool operator==(const PointCounts &, const PointCounts &) = default;
};

// Uniform interior points with rejection of the scatterer, uniform boundary
// parameters on the scatterer, and half-offset points on each square edge.
PointSet sample_points(const ShapeVector &v, const PointCounts &counts,
                       Rng &rng);

// n points on the boundary of [0,1]^2 with axis-aligned outward normals;
// corners are never sampled.
std::vector<BoundarySample> sample_outer_boundary(std::size_t n);

// Shape-set text: '#' header with key=value metadata, then one line per
// shape: id followed by 16 magnitudes.
void write_dataset(std::ostream &os, const ShapeDataset &ds,
                   const std::string &header_extra = {});
ShapeDataset read_dataset(std::istream &is);
void save_dataset(const std::filesystem::path &path, const ShapeDataset &ds,
                  const std::string &header_extra = {});
ShapeDataset load_dataset(const std::filesystem::path &path);

// CSV rows x,y,role,nx,ny (interior rows carry zero normals).
void write_points_csv(std::ostream &os, const PointSet &ps);

} // namespace scatter

#endif // SCATTER_DATASET_HPP
