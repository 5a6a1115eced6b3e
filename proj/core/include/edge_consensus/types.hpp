#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace edge_consensus {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

using Spectrum = std::vector<Complex>;

}  // namespace edge_consensus
