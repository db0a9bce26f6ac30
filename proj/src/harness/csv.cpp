#include "anchored/harness/csv.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string_view>

namespace anchored::harness {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view strip_cr(std::string_view s) {
  if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::size_t row) {
  double v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::runtime_error("csv row " + std::to_string(row) + ": bad number '" +
                             std::string(s) + "'");
  }
  return v;
}

Index parse_index(std::string_view s, std::size_t row) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::runtime_error("csv row " + std::to_string(row) + ": bad index '" +
                             std::string(s) + "'");
  }
  return static_cast<Index>(v);
}

std::optional<double> parse_optional(std::string_view s, std::size_t row) {
  if (s.empty()) return std::nullopt;
  return parse_double(s, row);
}

void put(std::ostream& os, const std::optional<double>& v) {
  if (v) os << format_double(*v);
}

template <typename Row>
std::vector<Row> parse_rows(std::istream& is, std::string_view header, std::size_t fields,
                            Row (*convert)(const std::vector<std::string_view>&, std::size_t)) {
  std::string line;
  if (!std::getline(is, line) || strip_cr(line) != header) {
    throw std::runtime_error("csv: missing or unexpected header");
  }
  std::vector<Row> rows;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    const auto view = strip_cr(line);
    if (view.empty() || view.front() == '#') continue;  // annotations
    const auto cells = split(view);
    if (cells.size() != fields) {
      throw std::runtime_error("csv row " + std::to_string(row) + ": expected " +
                               std::to_string(fields) + " fields, got " +
                               std::to_string(cells.size()));
    }
    rows.push_back(convert(cells, row));
  }
  return rows;
}

TrajectoryRecord to_record(const std::vector<std::string_view>& c, std::size_t row) {
  TrajectoryRecord r;
  r.k = parse_index(c[0], row);
  r.grad_norm_sq = parse_double(c[1], row);
  r.dist_to_saddle_sq = parse_optional(c[2], row);
  r.anchor_dist_sq = parse_optional(c[3], row);
  r.lyapunov = parse_optional(c[4], row);
  r.alpha_k = parse_double(c[5], row);
  r.c_k = parse_double(c[6], row);
  r.gamma_k = parse_double(c[7], row);
  r.bound = parse_optional(c[8], row);
  return r;
}

CoordinateRecord to_coordinate(const std::vector<std::string_view>& c, std::size_t row) {
  return {parse_index(c[0], row), parse_double(c[1], row), parse_double(c[2], row),
          parse_double(c[3], row), parse_double(c[4], row)};
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf.data(), ptr);
}

void write_trajectory_csv(std::ostream& os, const Trajectory& rows) {
  os << kTrajectoryHeader << '\n';
  for (const auto& r : rows) {
    os << r.k << ',' << format_double(r.grad_norm_sq) << ',';
    put(os, r.dist_to_saddle_sq);
    os << ',';
    put(os, r.anchor_dist_sq);
    os << ',';
    put(os, r.lyapunov);
    os << ',' << format_double(r.alpha_k) << ',' << format_double(r.c_k) << ','
       << format_double(r.gamma_k) << ',';
    put(os, r.bound);
    os << '\n';
  }
}

Trajectory parse_trajectory_csv(std::istream& is) {
  return parse_rows<TrajectoryRecord>(is, kTrajectoryHeader, 9, &to_record);
}

void write_coordinates_csv(std::ostream& os, const std::vector<CoordinateRecord>& rows) {
  os << kCoordinateHeader << '\n';
  for (const auto& r : rows) {
    os << r.k << ',' << format_double(r.x) << ',' << format_double(r.y) << ','
       << format_double(r.x_bar) << ',' << format_double(r.y_bar) << '\n';
  }
}

std::vector<CoordinateRecord> parse_coordinates_csv(std::istream& is) {
  return parse_rows<CoordinateRecord>(is, kCoordinateHeader, 5, &to_coordinate);
}

}  // namespace anchored::harness
