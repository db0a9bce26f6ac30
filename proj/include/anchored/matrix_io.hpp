#ifndef ANCHORED_MATRIX_IO_HPP
#define ANCHORED_MATRIX_IO_HPP

#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "anchored/types.hpp"

namespace anchored {

// Plain matrix interchange for reproducibility audits. Both formats carry
// a (rows, cols) header followed by row-major doubles.
//
// text:    "rows cols\n" then one line per row, shortest round-trip decimals
// binary:  8-byte magic "ANCMAT01", uint64 rows, uint64 cols, then doubles,
//          all in host byte order (little-endian on every supported target)

inline void write_matrix_text(std::ostream& os, const Matrix<double>& M) {
  os << M.rows() << ' ' << M.cols() << '\n';
  char buf[32];
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      const auto res = std::to_chars(buf, buf + sizeof buf, M(i, j));
      if (j > 0) os << ' ';
      os.write(buf, res.ptr - buf);
    }
    os << '\n';
  }
  if (!os) throw std::runtime_error("write_matrix_text: stream failure");
}

inline Matrix<double> read_matrix_text(std::istream& is) {
  long long rows = -1, cols = -1;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
    throw std::runtime_error("read_matrix_text: bad header");
  }
  Matrix<double> M(rows, cols);
  std::string token;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (!(is >> token)) throw std::runtime_error("read_matrix_text: truncated data");
      double v = 0;
      const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
      if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
        throw std::runtime_error("read_matrix_text: bad number '" + token + "'");
      }
      M(i, j) = v;
    }
  }
  return M;
}

inline constexpr char kMatrixMagic[8] = {'A', 'N', 'C', 'M', 'A', 'T', '0', '1'};

inline void write_matrix_binary(std::ostream& os, const Matrix<double>& M) {
  os.write(kMatrixMagic, sizeof kMatrixMagic);
  const std::uint64_t dims[2] = {static_cast<std::uint64_t>(M.rows()),
                                 static_cast<std::uint64_t>(M.cols())};
  os.write(reinterpret_cast<const char*>(dims), sizeof dims);
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      const double v = M(i, j);
      os.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
  }
  if (!os) throw std::runtime_error("write_matrix_binary: stream failure");
}

inline Matrix<double> read_matrix_binary(std::istream& is) {
  char magic[sizeof kMatrixMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMatrixMagic, sizeof magic) != 0) {
    throw std::runtime_error("read_matrix_binary: bad magic");
  }
  std::uint64_t dims[2];
  if (!is.read(reinterpret_cast<char*>(dims), sizeof dims)) {
    throw std::runtime_error("read_matrix_binary: truncated header");
  }
  const auto limit = static_cast<std::uint64_t>(std::numeric_limits<Index>::max());
  if (dims[0] > limit || dims[1] > limit) throw std::runtime_error("read_matrix_binary: bad size");
  Matrix<double> M(static_cast<Index>(dims[0]), static_cast<Index>(dims[1]));
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      double v = 0;
      if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) {
        throw std::runtime_error("read_matrix_binary: truncated data");
      }
      M(i, j) = v;
    }
  }
  return M;
}

}  // namespace anchored

#endif  // ANCHORED_MATRIX_IO_HPP
