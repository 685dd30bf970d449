#include "scatter/field.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "scatter/error.hpp"

namespace scatter {

bool ComplexField::masked(std::size_t i) const {
  return std::isnan(values[i].real()) || std::isnan(values[i].imag());
}

std::size_t ComplexField::valid_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < values.size(); ++i)
    n += masked(i) ? 0 : 1;
  return n;
}

std::vector<Vec2> cell_centered_grid(std::size_t n) {
  std::vector<Vec2> pts;
  pts.reserve(n * n);
  const double h = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back({(static_cast<double>(i) + 0.5) * h,
                     (static_cast<double>(j) + 0.5) * h});
  return pts;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string &text, std::size_t line) {
  double v = 0.0;
  const char *first = text.data();
  const char *last = first + text.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw ParseError(line, "not a number: '" + text + "'");
  return v;
}

void write_field_csv(std::ostream &os, const ComplexField &field,
                     const std::string &header_comment) {
  if (!header_comment.empty())
    os << "# " << header_comment << '\n';
  os << "x,y,re,im\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field.masked(i))
      continue;
    const auto &p = field.points[i];
    const auto &v = field.values[i];
    os << format_double(p.x) << ',' << format_double(p.y) << ','
       << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
  }
}

ComplexField read_field_csv(std::istream &is) {
  ComplexField field;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#')
      continue;
    if (!header_seen) {
      if (line != "x,y,re,im")
        throw ParseError(line_no, "expected header x,y,re,im");
      header_seen = true;
      continue;
    }
    std::array<double, 4> vals{};
    std::stringstream ss(line);
    std::string cell;
    std::size_t k = 0;
    while (std::getline(ss, cell, ',')) {
      if (k >= 4)
        throw ParseError(line_no, "too many columns");
      vals[k++] = parse_double(cell, line_no);
    }
    if (k != 4)
      throw ParseError(line_no, "expected 4 columns");
    field.points.push_back({vals[0], vals[1]});
    field.values.emplace_back(vals[2], vals[3]);
  }
  if (!header_seen)
    throw ParseError(line_no, "missing header x,y,re,im");
  return field;
}

} // namespace scatter
