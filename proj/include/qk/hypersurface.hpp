#pragma once

#include "qk/chart.hpp"
#include "qk/structure.hpp"

#include <optional>

namespace qk {

/// Orientable hypersurface of flat R^{4(m+1)} together with the ambient
/// structure triple. If no normal map is supplied the unit normal is computed
/// from the chart with a deterministic orientation rule (positive determinant
/// of [Jacobian | normal]).
struct OrientedHypersurface {
    Chart chart;                    // domain_dim = ambient_dim - 1
    StructureTriple ambient;        // triple on R^{ambient_dim}
    MapFn normal;                   // optional explicit unit normal (parameter -> R^N)

    Vec unit_normal(const Vec& u) const;
};

/// Point sample of the induced almost contact metric 3-structure:
/// xi_a = -J_a xi, eta_a(X) = g(X, xi_a), J_a X = phi_a X + F_a X with
/// phi_a tangential and F_a X = eta_a(X) xi.
struct Induced3Structure {
    Vec point;
    Vec normal;                  // xi
    std::array<Vec, 3> xi;       // xi_a, tangent, unit, mutually orthogonal
    std::array<Mat, 3> phi;      // ambient N x N matrices, zero on the normal
    Mat tangent_proj;            // P = Id - xi xi^T
    Mat horizontal_proj;         // S = P - sum_a xi_a xi_a^T

    double eta(int a, const Vec& x) const { return xi[a].dot(x); }
    Vec f(int a, const Vec& x) const { return eta(a, x) * normal; }
    Mat vertical_proj() const;
};

Induced3Structure induce_3_structure(const OrientedHypersurface& m, const Vec& u);

/// Sampling plan shared by the hypersurface checks.
struct SamplePlan {
    int points = 8;
    int vectors = 8;
    std::uint64_t seed = 42;
    std::vector<Vec> explicit_points;  // used in addition to the random draw
    Tolerances tol;

    std::vector<Vec> draw_points(const Chart& c) const;
};

/// Residuals of the almost contact metric 3-structure axioms plus the
/// defining decomposition J_a X = phi_a X + F_a X.
CheckReport check_ac3_axioms(const OrientedHypersurface& m, const SamplePlan& plan);

/// Residuals of (nab_X phi_a) Y = 0 and (nab_X eta_a) Y = 0 under the
/// induced Levi-Civita connection; also reports max |nab_X xi_a|.
CheckReport check_cosymplectic(const OrientedHypersurface& m, const SamplePlan& plan);

/// max |B(xi_a, X)| over horizontal X, side by side with the integrability
/// residual of span{xi_a} (component of [xi_a, xi_b] outside the span).
CheckReport check_mixed_geodesic(const OrientedHypersurface& m, const SamplePlan& plan);

}  // namespace qk
