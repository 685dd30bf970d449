#ifndef SCATTER_FIELD_HPP
#define SCATTER_FIELD_HPP

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "scatter/geometry.hpp"

namespace scatter {

// Complex samples on a point list. Masked entries (inside the scatterer) hold
// NaN in both components.
struct ComplexField {
  std::vector<Vec2> points;
  std::vector<std::complex<double>> values;

  std::size_t size() const { return points.size(); }
  bool masked(std::size_t i) const;
  std::size_t valid_count() const;
};

// Cell centers ((i+0.5)/n, (j+0.5)/n), x fastest.
std::vector<Vec2> cell_centered_grid(std::size_t n);

// CSV with header x,y,re,im; masked rows are omitted. header_comment, when
// non-empty, is written first as a '#' line.
void write_field_csv(std::ostream &os, const ComplexField &field,
                     const std::string &header_comment);
ComplexField read_field_csv(std::istream &is);

// Shortest decimal that round-trips the double exactly.
std::string format_double(double v);
// Strict full-string parse; throws ParseError(line) on failure.
double parse_double(const std::string &text, std::size_t line);

} // namespace scatter

#endif // SCATTER_FIELD_HPP
