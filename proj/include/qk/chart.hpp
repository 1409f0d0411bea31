#pragma once

#include "qk/linalg.hpp"
#include "qk/report.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace qk {

using MapFn = std::function<Vec(const Vec&)>;
using VectorField = std::function<Vec(const Vec&)>;  // parameter -> ambient vector
using MetricField = std::function<Mat(const Vec&)>;  // parameter -> d x d metric

/// Smooth parametrization of a d-submanifold of flat R^N over an open box,
/// with numerical first derivatives. The universal manifold representation.
struct Chart {
    int domain_dim = 0;
    int ambient_dim = 0;
    MapFn embed;
    Vec box_lo, box_hi;
    double fd_step1 = 1e-5;
    double fd_step2 = 1e-3;
    double rank_floor = 1e-6;  // smallest admissible singular value of the Jacobian

    bool interior(const Vec& u, double margin) const;
    void require_interior(const Vec& u) const;

    Vec value(const Vec& u) const { return embed(u); }
    /// Central-difference Jacobian, N x d.
    Mat jacobian(const Vec& u) const;
    /// Parameter-space coordinates of an ambient tangent vector (least squares).
    Vec parameter_direction(const Vec& u, const Vec& x) const;
};

Chart identity_chart(int dim, double half_width = 1.0);

/// Pullback of the flat ambient metric, J^T J.
Mat induced_metric(const Chart& c, const Vec& u);

/// Orthogonal projector onto the tangent space (N x N).
Mat tangent_projector(const Chart& c, const Vec& u);

/// Tangential projection of the flat ambient derivative: P(u) D_X Y for
/// tangent-vector-valued fields X, Y. This is the Levi-Civita connection of
/// the induced metric.
Vec levi_civita(const Chart& c, const Vec& u, const VectorField& x_field,
                const VectorField& y_field, double tangency_tol = 1e-7);

/// Flat ambient directional derivative of a field along tangent X (no
/// projection applied).
Vec ambient_derivative(const Chart& c, const Vec& u, const VectorField& field, const Vec& x);

/// Lie bracket [X, Y] = D_X Y - D_Y X of tangent fields, in ambient coordinates.
Vec lie_bracket(const Chart& c, const Vec& u, const VectorField& x_field,
                const VectorField& y_field);

/// Normal component of D_X Y~ for any tangent extension Y~ of Y.
Vec second_fundamental_form(const Chart& c, const Vec& u, const Vec& x, const Vec& y,
                            double tangency_tol = 1e-7);

/// Shape classification of a chart from sampled second-fundamental-form data.
struct ShapeData {
    Vec point;                           // last sampled parameter
    std::vector<Vec> b_samples;          // B(T_i, T_j) stacked per point
    Vec mean_curvature;                  // at the last sampled point
    double mean_curvature_norm = 0.0;    // min |H| over points
    double max_b = 0.0;
    double symmetry_residual = 0.0;      // max |B(X,Y) - B(Y,X)|
    double umbilical_residual = 0.0;     // max |B(X,Y) - g(X,Y) H|
    double normal_parallel_residual = 0.0;
    bool totally_geodesic = false;
    bool totally_umbilical = false;
    bool extrinsic_sphere = false;
};

ShapeData classify_umbilical(const Chart& c, const std::vector<Vec>& points,
                             const Tolerances& tol = {});

/// Christoffels and Riemann curvature of a metric field by central
/// differences. Convention: R(X,Y)Z = nab_X nab_Y Z - nab_Y nab_X Z -
/// nab_[X,Y] Z, with (R(e_k, e_l) e_j)^i stored at (i,j,k,l); the round
/// sphere then has positive sectional curvature.
struct CurvatureSample {
    Vec point;
    int dim = 0;
    Mat metric;
    std::vector<double> christoffel;   // [i][j][k] -> Gamma^i_{jk}
    std::vector<double> riemann_up;    // R^i_{jkl}
    std::vector<double> riemann_low;   // R_{ijkl}
    double antisymmetry_residual = 0.0;
    double bianchi_residual = 0.0;
    std::string convention = "R(X,Y)Z = nab_X nab_Y Z - nab_Y nab_X Z - nab_[X,Y] Z";

    double gamma(int i, int j, int k) const { return christoffel[(i * dim + j) * dim + k]; }
    double up(int i, int j, int k, int l) const {
        return riemann_up[((i * dim + j) * dim + k) * dim + l];
    }
    double low(int i, int j, int k, int l) const {
        return riemann_low[((i * dim + j) * dim + k) * dim + l];
    }
    /// g(R(X,Y)Y, X) / (|X|^2 |Y|^2 - g(X,Y)^2).
    double sectional(const Vec& x, const Vec& y) const;
};

CurvatureSample riemann_tensor(const MetricField& metric_field, const Vec& u,
                               double fd_step2 = 1e-3);

}  // namespace qk
