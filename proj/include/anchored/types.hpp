#ifndef ANCHORED_TYPES_HPP
#define ANCHORED_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace anchored {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Index = Eigen::Index;

// A joint point z = (x, y) is stored as one contiguous vector, primal block
// first. The block sizes travel with the problem, not with the vector.
template <typename Scalar>
using JointPoint = Vector<Scalar>;

struct BlockDims {
  Index n = 0;  // primal
  Index m = 0;  // dual

  Index total() const { return n + m; }
  friend bool operator==(const BlockDims&, const BlockDims&) = default;
};

template <typename Derived>
auto primal_block(Eigen::MatrixBase<Derived>& z, const BlockDims& dims) {
  return z.head(dims.n);
}
template <typename Derived>
auto primal_block(const Eigen::MatrixBase<Derived>& z, const BlockDims& dims) {
  return z.head(dims.n);
}
template <typename Derived>
auto dual_block(Eigen::MatrixBase<Derived>& z, const BlockDims& dims) {
  return z.tail(dims.m);
}
template <typename Derived>
auto dual_block(const Eigen::MatrixBase<Derived>& z, const BlockDims& dims) {
  return z.tail(dims.m);
}

enum class Algorithm { eagv, feg };

enum class AnchorMode { fixed, moving_pos, moving_neg_naive, moving_neg_strict };

inline std::string_view to_string(Algorithm a) {
  return a == Algorithm::eagv ? "eagv" : "feg";
}

inline std::string_view to_string(AnchorMode mode) {
  switch (mode) {
    case AnchorMode::fixed: return "fixed";
    case AnchorMode::moving_pos: return "moving_pos";
    case AnchorMode::moving_neg_naive: return "moving_neg_naive";
    case AnchorMode::moving_neg_strict: return "moving_neg_strict";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "eagv") return Algorithm::eagv;
  if (s == "feg") return Algorithm::feg;
  throw std::invalid_argument("unknown algorithm '" + std::string(s) + "'");
}

inline AnchorMode parse_anchor_mode(std::string_view s) {
  if (s == "fixed") return AnchorMode::fixed;
  if (s == "moving_pos") return AnchorMode::moving_pos;
  if (s == "moving_neg_naive") return AnchorMode::moving_neg_naive;
  if (s == "moving_neg_strict") return AnchorMode::moving_neg_strict;
  throw std::invalid_argument("unknown anchor mode '" + std::string(s) + "'");
}

}  // namespace anchored

#endif  // ANCHORED_TYPES_HPP
