#pragma once

#include <complex>

#include <Eigen/Dense>

namespace xylab {

/// Pfaffian of a complex antisymmetric matrix by Parlett-Reid elimination with
/// partial pivoting. Odd dimension gives 0. Throws StructuralError unless
/// |X + X^T| <= 1e-12 max(1, |X|) entrywise.
std::complex<double> pfaffian(const Eigen::MatrixXcd& skew);

}  // namespace xylab
