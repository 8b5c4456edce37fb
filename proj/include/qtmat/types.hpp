#pragma once

#include <complex>

#include <Eigen/Core>

namespace qtmat {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

} // namespace qtmat
