#include "scatter/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "scatter/error.hpp"
#include "scatter/field.hpp"

namespace scatter {

namespace {

struct Binding {
  const char *section;
  const char *key;
  std::function<std::string(const RunConfig &)> get;
  std::function<void(RunConfig &, const std::string &)> set;
};

template <typename T> T parse_integer(const std::string &text) {
  T v{};
  const char *first = text.data();
  const char *last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("expected an integer, got '" + text + "'");
  return v;
}

double parse_real(const std::string &text) {
  try {
    return parse_double(text, 0);
  } catch (const ParseError &) {
    throw std::invalid_argument("expected a number, got '" + text + "'");
  }
}

bool parse_bool(const std::string &text) {
  if (text == "true" || text == "1" || text == "yes")
    return true;
  if (text == "false" || text == "0" || text == "no")
    return false;
  throw std::invalid_argument("expected true or false, got '" + text + "'");
}

// Member-pointer helpers keep the table below one line per key.
template <typename Owner>
Binding real(const char *section, const char *key, Owner RunConfig::*owner,
             double Owner::*field) {
  return {section, key,
          [=](const RunConfig &c) { return format_double(c.*owner.*field); },
          [=](RunConfig &c, const std::string &v) {
            c.*owner.*field = parse_real(v);
          }};
}

template <typename Owner, typename T>
Binding integer(const char *section, const char *key, Owner RunConfig::*owner,
                T Owner::*field) {
  return {section, key,
          [=](const RunConfig &c) { return std::to_string(c.*owner.*field); },
          [=](RunConfig &c, const std::string &v) {
            c.*owner.*field = parse_integer<T>(v);
          }};
}

template <typename Owner>
Binding flag(const char *section, const char *key, Owner RunConfig::*owner,
             bool Owner::*field) {
  return {section, key,
          [=](const RunConfig &c) { return std::string(c.*owner.*field ? "true" : "false"); },
          [=](RunConfig &c, const std::string &v) { c.*owner.*field = parse_bool(v); }};
}

Binding count(const char *section, const char *key,
              std::size_t PointCounts::*field, bool batch) {
  auto counts = [batch](auto &c) -> auto & {
    return batch ? c.training.points_per_batch : c.training.points_per_shape;
  };
  return {section, key,
          [=](const RunConfig &c) { return std::to_string(counts(c).*field); },
          [=](RunConfig &c, const std::string &v) {
            counts(c).*field = parse_integer<std::size_t>(v);
          }};
}

const std::vector<Binding> &bindings() {
  using RC = RunConfig;
  static const std::vector<Binding> table = {
      real("physics", "frequency", &RC::physics, &PhysicsConfig::frequency),
      real("physics", "sound_speed", &RC::physics, &PhysicsConfig::sound_speed),
      real("physics", "amplitude", &RC::physics, &PhysicsConfig::amplitude),
      {"physics", "direction_x",
       [](const RC &c) { return format_double(c.physics.direction.x); },
       [](RC &c, const std::string &v) { c.physics.direction.x = parse_real(v); }},
      {"physics", "direction_y",
       [](const RC &c) { return format_double(c.physics.direction.y); },
       [](RC &c, const std::string &v) { c.physics.direction.y = parse_real(v); }},
      real("physics", "w_pde", &RC::physics, &PhysicsConfig::w_pde),
      real("physics", "w_inner", &RC::physics, &PhysicsConfig::w_inner),
      real("physics", "w_outer", &RC::physics, &PhysicsConfig::w_outer),
      {"physics", "rigid_bc",
       [](const RC &c) {
         return std::string(c.physics.rigid_bc == RigidBcMode::Projected ? "projected"
                                                                         : "literal");
       },
       [](RC &c, const std::string &v) {
         if (v == "projected")
           c.physics.rigid_bc = RigidBcMode::Projected;
         else if (v == "literal")
           c.physics.rigid_bc = RigidBcMode::Literal;
         else
           throw std::invalid_argument("expected projected or literal, got '" + v + "'");
       }},

      real("geometry", "magnitude_min", &RC::geometry, &GeometryConfig::magnitude_min),
      real("geometry", "magnitude_max", &RC::geometry, &GeometryConfig::magnitude_max),
      real("geometry", "circle_radius_min", &RC::geometry, &GeometryConfig::circle_radius_min),
      real("geometry", "circle_radius_max", &RC::geometry, &GeometryConfig::circle_radius_max),
      count("geometry", "interior_points", &PointCounts::interior, false),
      count("geometry", "inner_points", &PointCounts::inner, false),
      count("geometry", "outer_points", &PointCounts::outer, false),

      integer("network", "branch_width", &RC::branch, &ResNetPlan::width),
      integer("network", "branch_blocks", &RC::branch, &ResNetPlan::n_blocks),
      integer("network", "branch_layers_per_block", &RC::branch, &ResNetPlan::layers_per_block),
      real("network", "branch_omega", &RC::branch, &ResNetPlan::first_omega),
      integer("network", "trunk_width", &RC::trunk, &ResNetPlan::width),
      integer("network", "trunk_blocks", &RC::trunk, &ResNetPlan::n_blocks),
      integer("network", "trunk_layers_per_block", &RC::trunk, &ResNetPlan::layers_per_block),
      real("network", "trunk_omega", &RC::trunk, &ResNetPlan::first_omega),

      real("training", "learning_rate", &RC::training, &TrainConfig::learning_rate),
      integer("training", "epochs", &RC::training, &TrainConfig::epochs),
      integer("training", "shapes_per_batch", &RC::training, &TrainConfig::shapes_per_batch),
      count("training", "batch_interior", &PointCounts::interior, true),
      count("training", "batch_inner", &PointCounts::inner, true),
      count("training", "batch_outer", &PointCounts::outer, true),
      real("training", "beta1", &RC::training, &TrainConfig::beta1),
      real("training", "beta2", &RC::training, &TrainConfig::beta2),
      real("training", "epsilon", &RC::training, &TrainConfig::epsilon),
      integer("training", "seed", &RC::training, &TrainConfig::seed),
      integer("training", "checkpoint_every", &RC::training, &TrainConfig::checkpoint_every),
      integer("training", "log_every", &RC::training, &TrainConfig::log_every),
      flag("training", "resample_points", &RC::training, &TrainConfig::resample_points),

      integer("oracle", "fdfd_grid", &RC::oracle, &OracleConfig::fdfd_grid),
      integer("oracle", "cylinder_terms", &RC::oracle, &OracleConfig::cylinder_terms),
      real("oracle", "tolerance", &RC::oracle, &OracleConfig::tolerance),

      integer("io", "grid", &RC::io, &IoConfig::grid),
      flag("io", "write_images", &RC::io, &IoConfig::write_images),
  };
  return table;
}

const Binding *find_binding(const std::string &section, const std::string &key) {
  for (const Binding &b : bindings()) {
    if (section == b.section && key == b.key)
      return &b;
  }
  return nullptr;
}

} // namespace

void RunConfig::validate() const {
  auto check = [](const char *section, auto &&fn) {
    try {
      fn();
    } catch (const Error &e) {
      throw ConfigError(std::string("[") + section + "] " + e.what());
    }
  };
  check("physics", [&] { physics.validate(); });
  check("network", [&] {
    branch.validate();
    trunk.validate();
  });
  check("training", [&] { training.validate(); });
  if (!(geometry.magnitude_min > 0.0 && geometry.magnitude_min < geometry.magnitude_max))
    throw ConfigError("[geometry] magnitude range must satisfy 0 < min < max");
  if (!(geometry.circle_radius_min > 0.0 &&
        geometry.circle_radius_min <= geometry.circle_radius_max &&
        geometry.circle_radius_max <= 0.2))
    throw ConfigError("[geometry] circle radii must satisfy 0 < min <= max <= 0.2");
  if (oracle.fdfd_grid < 3)
    throw ConfigError("[oracle] fdfd_grid must be at least 3");
  if (!(oracle.tolerance > 0.0))
    throw ConfigError("[oracle] tolerance must be positive");
  if (io.grid < 1)
    throw ConfigError("[io] grid must be at least 1");
}

DatasetOptions RunConfig::dataset_options() const {
  DatasetOptions o;
  o.radius_min = geometry.circle_radius_min;
  o.radius_max = geometry.circle_radius_max;
  o.magnitude_min = geometry.magnitude_min;
  o.magnitude_max = geometry.magnitude_max;
  return o;
}

RunConfig parse_config(std::istream &is) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw ConfigError("line " + std::to_string(e.line()) + ": " + e.message());
  }
  RunConfig cfg;
  for (const auto &[section, entries] : tree) {
    if (entries.empty() && !entries.data().empty())
      throw ConfigError("key '" + section + "' outside of any section");
    for (const auto &[key, value] : entries) {
      const Binding *b = find_binding(section, key);
      if (b == nullptr)
        throw ConfigError("unknown key [" + section + "] " + key);
      try {
        b->set(cfg, value.data());
      } catch (const std::exception &e) {
        throw ConfigError("[" + section + "] " + key + ": " + e.what());
      }
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("file not found: " + path.string());
  return parse_config(is);
}

std::string canonical_config(const RunConfig &cfg) {
  std::ostringstream os;
  std::string section;
  for (const Binding &b : bindings()) {
    if (section != b.section) {
      section = b.section;
      os << '[' << section << "]\n";
    }
    os << b.key << " = " << b.get(cfg) << '\n';
  }
  return os.str();
}

std::string config_hash(const RunConfig &cfg) {
  const std::string text = canonical_config(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text)
    h = (h ^ c) * 1099511628211ULL;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string artifact_header(const RunConfig &cfg, std::uint64_t seed) {
  return std::string(kToolName) + "/" + kToolVersion + " config=" + config_hash(cfg) +
         " seed=" + std::to_string(seed);
}

} // namespace scatter
