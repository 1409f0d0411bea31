#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace qk {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

/// Raised when a numerical procedure cannot produce a trustworthy result
/// (rank-deficient fit, indefinite metric on a stencil, singular lift system).
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when finite-difference stencils would leave the chart domain.
struct sampling_error : std::runtime_error {
    explicit sampling_error(const std::string& what) : std::runtime_error(what) {}
};

inline double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

/// Even permutations of (0,1,2); the index bookkeeping for every
/// (alpha, beta, gamma) rule in the 3-structure formulas.
inline constexpr int kEvenPerm[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};

/// Default tolerances: `alg` for constant-matrix algebra, `d1` for
/// quantities built from one finite-difference level, `d2` for two.
struct Tolerances {
    double alg = 1e-8;
    double d1 = 1e-4;
    double d2 = 2e-2;
};

}  // namespace qk
