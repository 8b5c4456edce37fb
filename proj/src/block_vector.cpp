#include "qtmat/block_vector.hpp"

#include <algorithm>

namespace qtmat {

BlockVector::BlockVector(Mat data) : data_(trim_zero_rows(data)) {}

BlockVector BlockVector::unit(Eigen::Index i)
{
   Mat e = Mat::Zero(i, 1);
   e(i - 1, 0) = 1.0;
   return BlockVector(std::move(e));
}

Mat BlockVector::padded(Eigen::Index n) const
{
   return pad_rows(data_, n);
}

Mat pad_rows(const Mat& m, Eigen::Index n)
{
   if (m.rows() == n) return m;
   Mat out = Mat::Zero(n, m.cols());
   out.topRows(std::min(n, m.rows())) = m.topRows(std::min(n, m.rows()));
   return out;
}

Mat inner(const Mat& a, const Mat& b)
{
   const Eigen::Index r = std::min(a.rows(), b.rows());
   if (r == 0) return Mat::Zero(a.cols(), b.cols());
   return a.topRows(r).adjoint() * b.topRows(r);
}

Mat trim_zero_rows(const Mat& m)
{
   Eigen::Index r = m.rows();
   while (r > 0 && m.row(r - 1).isZero(0.0)) --r;
   if (r == m.rows()) return m;
   return m.topRows(r);
}

Mat add_padded(const Mat& a, const Mat& b)
{
   const Eigen::Index r = std::max(a.rows(), b.rows());
   return pad_rows(a, r) + pad_rows(b, r);
}

} // namespace qtmat
