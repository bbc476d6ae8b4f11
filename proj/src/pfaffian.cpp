#include "xylab/pfaffian.hpp"

#include <algorithm>
#include <cmath>

#include "xylab/error.hpp"

namespace xylab {

std::complex<double> pfaffian(const Eigen::MatrixXcd& skew) {
    if (skew.rows() != skew.cols()) {
        throw StructuralError("pfaffian of a non-square matrix");
    }
    const double scale = std::max(1.0, skew.cwiseAbs().maxCoeff());
    if ((skew + skew.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw StructuralError("pfaffian input is not antisymmetric");
    }
    const Eigen::Index m = skew.rows();
    if (m % 2 == 1) {
        return 0.0;
    }
    Eigen::MatrixXcd a = skew;
    std::complex<double> pf = 1.0;
    for (Eigen::Index k = 0; k + 1 < m; k += 2) {
        // pivot the largest entry of column k below the diagonal into row k+1
        Eigen::Index kp = k + 1;
        a.col(k).tail(m - k - 1).cwiseAbs().maxCoeff(&kp);
        kp += k + 1;
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            pf = -pf;
        }
        if (a(k + 1, k) == 0.0) {
            return 0.0;
        }
        pf *= a(k, k + 1);
        if (k + 2 < m) {
            const Eigen::Index rest = m - k - 2;
            const Eigen::VectorXcd tau = a.row(k).tail(rest).transpose() / a(k, k + 1);
            const Eigen::VectorXcd col = a.col(k + 1).tail(rest);
            a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
        }
    }
    return pf;
}

}  // namespace xylab
