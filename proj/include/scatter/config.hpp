#ifndef SCATTER_CONFIG_HPP
#define SCATTER_CONFIG_HPP

#include <filesystem>
#include <iosfwd>
#include <string>

#include "scatter/dataset.hpp"
#include "scatter/net.hpp"
#include "scatter/physics_config.hpp"
#include "scatter/training.hpp"

namespace scatter {

inline constexpr const char *kToolName = "scatter";
inline constexpr const char *kToolVersion = "0.1.0";

struct GeometryConfig {
  double magnitude_min = kMagnitudeMin;
  double magnitude_max = kMagnitudeMax;
  double circle_radius_min = 0.05;
  double circle_radius_max = 0.19;
  friend bool operator==(const GeometryConfig &, const GeometryConfig &) = default;
};

struct OracleConfig {
  std::size_t fdfd_grid = 201;
  int cylinder_terms = 40;
  double tolerance = 1e-10;
  friend bool operator==(const OracleConfig &, const OracleConfig &) = default;
};

struct IoConfig {
  std::size_t grid = 100;   // prediction grid per side
  bool write_images = false;
  friend bool operator==(const IoConfig &, const IoConfig &) = default;
};

// Every tunable of the pipeline; sections [physics], [geometry], [network],
// [training], [oracle], [io].
struct RunConfig {
  PhysicsConfig physics;
  GeometryConfig geometry;
  ResNetPlan branch = ResNetPlan::branch();
  ResNetPlan trunk = ResNetPlan::trunk();
  TrainConfig training;
  OracleConfig oracle;
  IoConfig io;

  // Throws ConfigError describing the first invalid value.
  void validate() const;
  DatasetOptions dataset_options() const;
  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

// Keys absent from the text keep their defaults; unknown sections or keys
// and malformed values throw ConfigError.
RunConfig parse_config(std::istream &is);
RunConfig load_config(const std::filesystem::path &path);

// Every key in a fixed order, values printed round-trip exact.
std::string canonical_config(const RunConfig &cfg);
// 16 hex digits of FNV-1a over canonical_config.
std::string config_hash(const RunConfig &cfg);

// "scatter/0.1.0 config=<hash> seed=<seed>", used as the first line of every
// artifact.
std::string artifact_header(const RunConfig &cfg, std::uint64_t seed);

} // namespace scatter

#endif // SCATTER_CONFIG_HPP
