#pragma once

#include <charconv>
#include <cstddef>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "edmdr/edm.hpp"
#include "edmdr/error.hpp"
#include "edmdr/solver.hpp"

// Text formats read and written by the command line tool.
//
//   structure   ELEMENT X Y Z RESIDUE per line; '#' lines and blanks skipped
//   radii       CSV element,radius_angstrom
//   partial EDM CSV i,j,value with 0-based i < j, value in Angstrom^2
//   trace       CSV iteration,relative_error,relative_error_db,gap_norm
//   xyz         count, comment, then ELEMENT X Y Z with 6 decimals

namespace edmdr {

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  if (sep == ' ') {
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r'))
        ++pos;
      if (pos >= line.size()) break;
      std::size_t end = pos;
      while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r')
        ++end;
      out.push_back(line.substr(pos, end - pos));
      pos = end;
    }
    return out;
  }
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(sep, start);
    auto field = line.substr(start, end == std::string_view::npos ? end : end - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r'))
      field.remove_suffix(1);
    out.push_back(field);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

inline bool parse_double(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size() && std::isfinite(out);
}

inline bool parse_index(std::string_view s, std::size_t& out) {
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

inline bool skippable(std::string_view line) {
  const auto first = line.find_first_not_of(" \t\r");
  return first == std::string_view::npos || line[first] == '#';
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

/// Reads a whitespace-separated structure file into a 3-D point cloud.
inline PointCloud parse_structure(std::istream& in) {
  std::vector<double> coords;
  std::vector<std::string> elements;
  std::vector<std::size_t> residues;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto f = detail::split_fields(line, ' ');
    if (f.size() != 5) throw ParseError("expected ELEMENT X Y Z RESIDUE", lineno);
    double xyz[3];
    for (int k = 0; k < 3; ++k)
      if (!detail::parse_double(f[1 + k], xyz[k]))
        throw ParseError("invalid coordinate '" + std::string(f[1 + k]) + "'", lineno);
    std::size_t residue = 0;
    if (!detail::parse_index(f[4], residue))
      throw ParseError("invalid residue index '" + std::string(f[4]) + "'", lineno);
    elements.emplace_back(f[0]);
    residues.push_back(residue);
    coords.insert(coords.end(), xyz, xyz + 3);
  }
  if (elements.empty()) throw InvalidInput("structure file contains no atoms");
  const std::size_t m = elements.size();
  return PointCloud(Matrix::from_data(m, 3, std::move(coords)), std::move(elements),
                    std::move(residues));
}

inline PointCloud parse_structure(const std::string& text) {
  std::istringstream in(text);
  return parse_structure(in);
}

/// element -> Van der Waals radius in Angstrom. A header row is optional.
inline std::map<std::string, double> parse_radii(std::istream& in) {
  std::map<std::string, double> radii;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto f = detail::split_fields(line, ',');
    if (lineno == 1 && f.size() == 2 && f[0] == "element") continue;
    double r = 0.0;
    if (f.size() != 2 || f[0].empty() || !detail::parse_double(f[1], r) || r <= 0.0)
      throw ParseError("expected element,radius_angstrom with a positive radius", lineno);
    radii[std::string(f[0])] = r;
  }
  return radii;
}

/// Reads `i,j,value` rows into a partial EDM of the given order.
inline PartialEDM read_partial_edm(std::istream& in, std::size_t order) {
  PartialEDM out(order);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::skippable(line)) continue;
    const auto f = detail::split_fields(line, ',');
    if (!header_seen) {
      header_seen = true;
      if (f.size() == 3 && f[0] == "i" && f[1] == "j" && f[2] == "value") continue;
      throw ParseError("missing header i,j,value", lineno);
    }
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (f.size() != 3 || !detail::parse_index(f[0], i) || !detail::parse_index(f[1], j) ||
        !detail::parse_double(f[2], v))
      throw ParseError("expected i,j,value", lineno);
    if (i >= j || j >= order) throw ParseError("indices must satisfy i < j < m", lineno);
    if (v < 0.0) throw ParseError("squared distance must be nonnegative", lineno);
    out.set(i, j, v);
  }
  return out;
}

inline void write_partial_edm(std::ostream& out, const PartialEDM& d) {
  out << "i,j,value\n";
  for (std::size_t i = 0; i < d.order(); ++i)
    for (std::size_t j = i + 1; j < d.order(); ++j)
      if (d.known(i, j)) out << i << ',' << j << ',' << detail::format_double(d.value(i, j)) << '\n';
}

inline void write_trace(std::ostream& out, const std::vector<TraceRecord>& trace) {
  out << "iteration,relative_error,relative_error_db,gap_norm\n";
  for (const auto& t : trace)
    out << t.iteration << ',' << detail::format_double(t.relative_error) << ','
        << detail::format_double(t.relative_error_db) << ','
        << detail::format_double(t.gap_norm) << '\n';
}

/// Standard XYZ. Clouds of dimension below 3 are padded with zeros.
inline void write_xyz(std::ostream& out, const PointCloud& pc, const std::string& comment) {
  out << pc.size() << '\n' << comment << '\n';
  char buf[64];
  for (std::size_t i = 0; i < pc.size(); ++i) {
    out << pc.elements()[i];
    for (std::size_t k = 0; k < std::max<std::size_t>(3, pc.dim()); ++k) {
      std::snprintf(buf, sizeof buf, " %.6f", k < pc.dim() ? pc.coord(i, k) : 0.0);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace edmdr
