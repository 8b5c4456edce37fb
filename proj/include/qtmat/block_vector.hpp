#pragma once

#include "qtmat/types.hpp"

namespace qtmat {

/// Leading rows of a block of semi-infinite vectors; rows beyond rows() are zero.
class BlockVector {
public:
   BlockVector() = default;
   explicit BlockVector(Mat data);

   static BlockVector zero(Eigen::Index cols) { return BlockVector(Mat(0, cols)); }
   /// Canonical basis vector e_i (1-based), single column.
   static BlockVector unit(Eigen::Index i);

   Eigen::Index rows() const { return data_.rows(); }
   Eigen::Index cols() const { return data_.cols(); }
   const Mat& data() const { return data_; }

   /// Copy padded with zero rows up to n rows (n >= rows()).
   Mat padded(Eigen::Index n) const;

   double norm() const { return data_.norm(); }

private:
   Mat data_;
};

/// Zero-pad (or keep) a dense block to exactly n rows; n must be >= m.rows().
Mat pad_rows(const Mat& m, Eigen::Index n);

/// a^* b for blocks with implicit zero tails.
Mat inner(const Mat& a, const Mat& b);

/// Drop trailing rows that are exactly zero.
Mat trim_zero_rows(const Mat& m);

/// a + b with implicit zero tails.
Mat add_padded(const Mat& a, const Mat& b);

} // namespace qtmat
