#include "scatter/dataset.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "scatter/error.hpp"
#include "scatter/field.hpp"
#include "scatter/parallel.hpp"

namespace scatter {

namespace {

constexpr const char *kFormatTag = "scatter-shapes";
constexpr int kFormatVersion = 1;

std::uint64_t role_tag(DatasetRole role) {
  return static_cast<std::uint64_t>(role) + 1;
}

ShapeVector draw_shape(DatasetRole role, std::uint64_t seed, std::uint64_t id,
                       std::uint64_t sub_seed, const DatasetOptions &opt) {
  Rng rng(mix_seed({seed ^ id, role_tag(role), sub_seed}));
  if (opt.magnitude_min == kMagnitudeMin && opt.magnitude_max == kMagnitudeMax)
    return random_shape(rng);
  ShapeVector v;
  for (auto &c : v.cx)
    c = uniform(rng, opt.magnitude_min, opt.magnitude_max);
  for (auto &c : v.cy)
    c = uniform(rng, opt.magnitude_min, opt.magnitude_max);
  return v;
}

std::vector<std::string> split_ws(const std::string &line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok)
    out.push_back(tok);
  return out;
}

std::uint64_t parse_uint(const std::string &text, std::size_t line) {
  std::uint64_t v = 0;
  const char *first = text.data();
  const char *last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(line, "not an unsigned integer: '" + text + "'");
  return v;
}

} // namespace

std::string to_string(DatasetRole role) {
  switch (role) {
  case DatasetRole::Train:
    return "train";
  case DatasetRole::TestCircles:
    return "test-circles";
  case DatasetRole::TestArbitrary:
    return "test-arbitrary";
  }
  return "unknown";
}

DatasetRole parse_role(const std::string &text) {
  if (text == "train")
    return DatasetRole::Train;
  if (text == "test-circles")
    return DatasetRole::TestCircles;
  if (text == "test-arbitrary")
    return DatasetRole::TestArbitrary;
  throw InputDomainError("unknown dataset role '" + text + "'");
}

const ShapeRecord &ShapeDataset::find(std::uint64_t id) const {
  for (const auto &rec : shapes) {
    if (rec.id == id)
      return rec;
  }
  throw LookupError("shape id " + std::to_string(id) + " not in dataset");
}

ShapeDataset generate_dataset(DatasetRole role, std::size_t count,
                              std::uint64_t seed,
                              const DatasetOptions &options) {
  if (count < 1)
    throw InputDomainError("dataset count must be at least 1");
  ShapeDataset ds;
  ds.role = role;
  ds.seed = seed;
  ds.shapes.resize(count);

  if (role == DatasetRole::TestCircles) {
    if (!(options.radius_min > 0.0 && options.radius_min <= options.radius_max))
      throw InputDomainError("invalid circle radius range");
    parallel_for(count, [&](std::size_t i) {
      const double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
      const double r = options.radius_min + t * (options.radius_max - options.radius_min);
      ds.shapes[i] = {i, circle_shape(r).shape};
    });
    return ds;
  }

  parallel_for(count, [&](std::size_t i) {
    ds.shapes[i] = {i, draw_shape(role, seed, i, 0, options)};
  });

  std::set<std::array<double, 16>> seen;
  if (options.exclude != nullptr) {
    for (const auto &rec : options.exclude->shapes)
      seen.insert(rec.shape.flat());
  }
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t sub = 0;
    while (seen.count(ds.shapes[i].shape.flat()) != 0)
      ds.shapes[i].shape = draw_shape(role, seed, i, ++sub, options);
    seen.insert(ds.shapes[i].shape.flat());
  }
  return ds;
}

std::vector<BoundarySample> sample_outer_boundary(std::size_t n) {
  if (n < 4)
    throw InputDomainError("outer boundary needs at least 4 points");
  // Edges in counter-clockwise order: bottom, right, top, left.
  const std::array<Vec2, 4> start{{{0, 0}, {1, 0}, {1, 1}, {0, 1}}};
  const std::array<Vec2, 4> dir{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
  const std::array<Vec2, 4> normal{{{0, -1}, {1, 0}, {0, 1}, {-1, 0}}};
  std::vector<BoundarySample> out;
  out.reserve(n);
  for (std::size_t side = 0; side < 4; ++side) {
    const std::size_t m = n / 4 + (side < n % 4 ? 1 : 0);
    for (std::size_t j = 0; j < m; ++j) {
      const double s = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
      out.push_back({start[side] + s * dir[side], normal[side],
                     (static_cast<double>(side) + s) / 4.0});
    }
  }
  return out;
}

PointSet sample_points(const ShapeVector &v, const PointCounts &counts,
                       Rng &rng) {
  if (counts.interior < 1 || counts.inner < 3 || counts.outer < 4)
    throw InputDomainError("point counts too small");
  const NurbsCurve curve = shape_from_vector(v);
  const ShapeRegion region(curve);

  PointSet ps;
  ps.interior.reserve(counts.interior);
  const std::size_t max_draws = 100 * counts.interior;
  while (ps.interior.size() < counts.interior) {
    if (ps.interior_draws >= max_draws)
      throw DegenerateGeometryError(
          "interior rejection sampling exceeded 100x oversampling");
    const double x = uniform01(rng);
    const double y = uniform01(rng);
    ++ps.interior_draws;
    if (!region.contains({x, y}))
      ps.interior.push_back({x, y});
  }
  ps.inner_boundary = sample_boundary(curve, counts.inner);
  ps.outer_boundary = sample_outer_boundary(counts.outer);
  return ps;
}

void write_dataset(std::ostream &os, const ShapeDataset &ds,
                   const std::string &header_extra) {
  os << "# " << kFormatTag << " version=" << kFormatVersion
     << " role=" << to_string(ds.role) << " seed=" << ds.seed
     << " count=" << ds.shapes.size();
  if (!header_extra.empty())
    os << ' ' << header_extra;
  os << '\n';
  for (const auto &rec : ds.shapes) {
    os << rec.id;
    for (double m : rec.shape.flat())
      os << ' ' << format_double(m);
    os << '\n';
  }
}

ShapeDataset read_dataset(std::istream &is) {
  ShapeDataset ds;
  bool header_seen = false;
  std::size_t declared = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty())
      continue;
    if (line[0] == '#') {
      if (header_seen)
        continue;
      const auto tokens = split_ws(line.substr(1));
      if (tokens.empty() || tokens[0] != kFormatTag)
        throw ParseError(line_no, "missing '" + std::string(kFormatTag) +
                                      "' header");
      header_seen = true;
      for (std::size_t i = 1; i < tokens.size(); ++i) {
        const auto eq = tokens[i].find('=');
        if (eq == std::string::npos)
          continue;
        const std::string key = tokens[i].substr(0, eq);
        const std::string value = tokens[i].substr(eq + 1);
        if (key == "version" && parse_uint(value, line_no) != kFormatVersion)
          throw ParseError(line_no, "unsupported shape-set version " + value);
        if (key == "role")
          ds.role = parse_role(value);
        else if (key == "seed")
          ds.seed = parse_uint(value, line_no);
        else if (key == "count")
          declared = parse_uint(value, line_no);
      }
      continue;
    }
    if (!header_seen)
      throw ParseError(line_no, "record before header");
    const auto tokens = split_ws(line);
    if (tokens.size() != 17)
      throw ParseError(line_no, "expected id and 16 magnitudes, found " +
                                    std::to_string(tokens.size()) + " fields");
    ShapeRecord rec;
    rec.id = parse_uint(tokens[0], line_no);
    std::array<double, 16> vals{};
    for (std::size_t i = 0; i < 16; ++i)
      vals[i] = parse_double(tokens[i + 1], line_no);
    rec.shape = ShapeVector::from_flat(vals);
    ds.shapes.push_back(rec);
  }
  if (!header_seen)
    throw ParseError(line_no, "empty shape set");
  if (declared != ds.shapes.size())
    throw ParseError(line_no, "header declares " + std::to_string(declared) +
                                  " shapes, file has " +
                                  std::to_string(ds.shapes.size()));
  return ds;
}

void save_dataset(const std::filesystem::path &path, const ShapeDataset &ds,
                  const std::string &header_extra) {
  std::ofstream os(path);
  if (!os)
    throw IoError("cannot write " + path.string());
  write_dataset(os, ds, header_extra);
}

ShapeDataset load_dataset(const std::filesystem::path &path) {
  std::ifstream is(path);
  if (!is)
    throw IoError("file not found: " + path.string());
  return read_dataset(is);
}

void write_points_csv(std::ostream &os, const PointSet &ps) {
  os << "x,y,role,nx,ny\n";
  for (const auto &p : ps.interior)
    os << format_double(p.x) << ',' << format_double(p.y) << ",interior,0,0\n";
  auto boundary = [&os](const std::vector<BoundarySample> &pts,
                        const char *role) {
    for (const auto &b : pts)
      os << format_double(b.position.x) << ',' << format_double(b.position.y)
         << ',' << role << ',' << format_double(b.outward_normal.x) << ','
         << format_double(b.outward_normal.y) << '\n';
  };
  boundary(ps.inner_boundary, "inner");
  boundary(ps.outer_boundary, "outer");
}

} // namespace scatter
