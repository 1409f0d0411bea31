#pragma once

#include "qk/chart.hpp"
#include "qk/hypersurface.hpp"
#include "qk/structure.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace qk {

enum class BaseMetricMode { Pushed, Explicit };

/// Riemannian submersion pi: M -> M' with M chart-parametrized in flat R^N.
/// `project_ambient` must be defined on an ambient neighborhood of M and be
/// constant along normal directions at M; `patch_at` re-centers the total
/// chart at an arbitrary ambient point of M (parameter 0 maps to the point),
/// so fiber points outside the primary patch stay reachable.
struct SubmersionDescriptor {
    Chart total;
    int base_dim = 0;
    Vec base_lo, base_hi;
    MapFn project_ambient;  // ambient point -> base parameter
    MapFn section_ambient;  // base parameter -> ambient point on M
    std::function<Chart(const Vec&)> patch_at;
    int fiber_dim = 3;
    BaseMetricMode base_metric_mode = BaseMetricMode::Pushed;
    MetricField base_metric_explicit;  // required in Explicit mode
    double fd_step = 1e-5;

    Chart patch(const Vec& ambient_point) const {
        return patch_at ? patch_at(ambient_point) : total;
    }
    /// Base metric: pushforward of the horizontal metric at the section point
    /// in Pushed mode, the explicit field otherwise.
    Mat base_metric(const Vec& q) const;
};

/// Pointwise linearization of the submersion at an ambient point of M:
/// tangent frame, differential, vertical/horizontal projectors, lift solver.
struct SubmersionFrame {
    Vec x;           // ambient point
    Vec u;           // chart parameter within `chart`
    Chart chart;     // patch used
    Mat tangent;     // N x d orthonormal tangent basis
    Mat dpi;         // k x N differential of the projection
    Mat vproj;       // N x N projector onto ker(pi_*) within the tangent space
    Mat hproj;       // N x N projector onto the horizontal space
    Mat hbasis;      // N x k orthonormal horizontal basis
    Mat lift_matrix; // k x k, dpi * hbasis

    Vec push(const Vec& x_tangent) const { return dpi * x_tangent; }
    Vec lift(const Vec& x_base) const;
};

SubmersionFrame make_frame(const SubmersionDescriptor& s, const Vec& ambient_point);

/// pi_* X at the given total point.
Vec differential(const SubmersionDescriptor& s, const Vec& ambient_point, const Vec& x);

/// (vertical, horizontal) projector pair at the given total point.
std::pair<Mat, Mat> vertical_horizontal_split(const SubmersionDescriptor& s,
                                              const Vec& ambient_point);

/// The unique horizontal X at fiber point p with pi_* X = X'.
Vec horizontal_lift(const SubmersionDescriptor& s, const Vec& base_tangent,
                    const Vec& fiber_point);

/// O'Neill tensors, Levi-Civita of the total space with vertical/horizontal
/// field extensions: T_E F = h nab_{vE} vF + v nab_{vE} hF and
/// A_E F = v nab_{hE} hF + h nab_{hE} vF.
Vec oneill_T(const SubmersionDescriptor& s, const Vec& ambient_point, const Vec& e, const Vec& f);
Vec oneill_A(const SubmersionDescriptor& s, const Vec& ambient_point, const Vec& e, const Vec& f);

/// v[X,Y]/2 for horizontal extensions of X, Y; the independent route to A.
Vec half_vertical_bracket(const SubmersionDescriptor& s, const Vec& ambient_point, const Vec& x,
                          const Vec& y);

/// Everything a QR 3-submersion check needs: the submersion plus the induced
/// 3-structure, re-centerable at arbitrary total points.
struct QR3Setup {
    SubmersionDescriptor sub;
    std::function<OrientedHypersurface(const Vec&)> hyp_at;  // patch centered at ambient point
    StructureTriple ambient_triple;

    Induced3Structure structure_at(const Vec& ambient_point) const {
        OrientedHypersurface h = hyp_at(ambient_point);
        return induce_3_structure(h, Vec::Zero(h.chart.domain_dim));
    }
};

/// Structure triple on the base obtained by J'_a X' = pi_*(phi_a lift(X')).
struct PushedTriple {
    Vec base_point;
    Vec source_fiber_point;
    std::array<Mat, 3> J;  // base_dim x base_dim, in base chart coordinates
};

PushedTriple push_structure(const QR3Setup& s, const Vec& fiber_point);

/// SO(3) transition between the triples pushed from two points of the same
/// fiber: least-squares C with J^(2)_a = sum_b c_ab J^(1)_b.
struct FiberCompatibility {
    Mat3 c;
    double fit_residual = 0.0;
    double orthogonality_residual = 0.0;
    double det = 0.0;
};

FiberCompatibility fiber_compatibility(const QR3Setup& s, const Vec& p1, const Vec& p2);

/// Aggregate QR 3-submersion verification: Ker pi_* = V, the intertwining
/// pi_* phi_a = J'_a pi_* against a best-fit SO(3) rotation of the
/// section-anchored basis, horizontal isometry, mixed-geodesic, and the
/// invariance of V and H under phi_a.
CheckReport check_qr3_submersion(const QR3Setup& s, const SamplePlan& plan);

/// Quaternionic submersion between flat almost quaternionic hermitian models.
struct QuaternionicSubmersionSetup {
    SubmersionDescriptor sub;
    TripleField total_triple;          // triple field over ambient points of M
    std::array<Mat, 3> base_triple;    // sigma' basis in base chart coordinates
};

/// (sigma, sigma')-holomorphy, Riemannian-submersion isometry, the
/// connection-form transfer w'_a(X_*) = w_a(X), the base nab'J' defect
/// against the transferred forms, and locally hyper-Kaehler verdicts for
/// both sides.
CheckReport check_quaternionic_submersion(const QuaternionicSubmersionSetup& s,
                                          const SamplePlan& plan);

/// Least-squares fit of the constant c in the space-form curvature model
///   R(X,Y)Z = c/4 { g(Z,Y)X - g(X,Z)Y
///                   + sum_a [ g(Z,J_a Y)J_a X - g(Z,J_a X)J_a Y + 2 g(X,J_a Y)J_a Z ] }.
struct SpaceFormSample {
    CurvatureSample curvature;
    std::array<Mat, 3> triple;  // J'_a at the sample point, base coordinates
};

struct SpaceFormFit {
    double c = 0.0;
    double relative_residual = 0.0;
    bool flat = false;
    std::vector<double> quaternionic_sectional;  // sampled half-quaternionic K values
    double sectional_spread = 0.0;               // (max - min) / |mean|
};

SpaceFormFit space_form_fit(const std::vector<SpaceFormSample>& samples,
                            std::uint64_t seed = 42, int planes_per_point = 2,
                            double flatness_floor = 1e-3);

}  // namespace qk
