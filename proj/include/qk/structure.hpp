#pragma once

#include "qk/linalg.hpp"
#include "qk/report.hpp"

#include <array>
#include <functional>
#include <utility>
#include <vector>

namespace qk {

/// Three anticommuting complex structures (J_1, J_2, J_3) on R^N with
/// J_a^2 = -Id and J_1 J_2 = -J_2 J_1 = J_3, each orthogonal.
struct StructureTriple {
    int dim = 0;
    std::array<Mat, 3> J;
};

enum class Convention { Left, Right };

/// Quaternion-multiplication triple on H^m = R^{4m}. The left convention
/// multiplies by (i, j, k); the right convention multiplies by (i, k, j),
/// the ordering that restores J_1 J_2 = J_3 (right multiplication reverses
/// composition order in H).
StructureTriple make_structure_triple(int quaternionic_dim, Convention convention);

/// Residuals of the triple axioms and of metric compatibility
/// g(J X, J Y) = g(X, Y), evaluated as matrix identities plus a
/// deterministic vector sample.
CheckReport check_structure_axioms(const StructureTriple& t, const Mat& metric,
                                   double tol = 1e-10, std::uint64_t seed = 42);

/// Basis change J'_a = sum_b c_ab J_b for C in SO(3).
StructureTriple so3_rotate(const StructureTriple& t, const Mat3& c, double tol = 1e-8);

/// Orthonormal basis of the quaternionic 4-plane span{X, J_1 X, J_2 X, J_3 X}.
Mat quaternionic_plane(const StructureTriple& t, const Vec& x);

/// True iff Q(X) = Q(Y) as subspaces (projector distance below tol).
bool half_quaternionic(const StructureTriple& t, const Vec& x, const Vec& y,
                       double tol = 1e-8);

/// Connection-form fit: per sample direction, the 1-form values
/// (w_1(X), w_2(X), w_3(X)) solving
///   dJ_1 =  w_3 J_2 - w_2 J_3
///   dJ_2 = -w_3 J_1 + w_1 J_3
///   dJ_3 =  w_2 J_1 - w_1 J_2
/// jointly in least squares, plus the post-fit defect.
struct QKFormFit {
    std::vector<Vec3> omega;             // one (w_1, w_2, w_3) per sample
    std::vector<double> sample_residual; // post-fit defect per sample (max-norm)
    double residual = 0.0;               // max over samples
    double max_omega = 0.0;
    bool hyperkaehler = false;           // all |w_a| and the post-fit defect below tol_d1
};

using TripleField = std::function<StructureTriple(const Vec&)>;

/// Directional derivative oracle for the J-field: (point, direction, alpha) -> dJ_alpha.
using TripleDerivative = std::function<Mat(const Vec&, const Vec&, int)>;

QKFormFit qk_connection_forms(const TripleField& field,
                              const std::vector<std::pair<Vec, Vec>>& samples,
                              double fd_step = 1e-5, double tol_d1 = 1e-4,
                              const TripleDerivative& derivative = nullptr);

}  // namespace qk
