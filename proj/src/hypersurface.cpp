#include "qk/hypersurface.hpp"

#include "qk/rng.hpp"

#include <Eigen/QR>

namespace qk {

Vec OrientedHypersurface::unit_normal(const Vec& u) const {
    if (normal) {
        Vec n = normal(u);
        return n / n.norm();
    }
    const int n = chart.ambient_dim, d = chart.domain_dim;
    Mat j = chart.jacobian(u);
    Eigen::HouseholderQR<Mat> qr(j);
    Mat q = qr.householderQ();
    Vec xi = q.col(n - 1);
    // Orientation rule: det [J | xi] > 0.
    Mat frame(n, n);
    frame.leftCols(d) = j;
    frame.col(n - 1) = xi;
    if (frame.determinant() < 0.0) xi = -xi;
    return xi;
}

Mat Induced3Structure::vertical_proj() const {
    Mat v = Mat::Zero(normal.size(), normal.size());
    for (int a = 0; a < 3; ++a) v += xi[a] * xi[a].transpose();
    return v;
}

Induced3Structure induce_3_structure(const OrientedHypersurface& m, const Vec& u) {
    const int n = m.chart.ambient_dim;
    if (m.chart.domain_dim != n - 1)
        throw std::invalid_argument("induce_3_structure: chart is not a hypersurface");
    if (m.ambient.dim != n)
        throw std::invalid_argument("induce_3_structure: triple dimension mismatch");
    m.chart.require_interior(u);

    Vec xi = m.unit_normal(u);
    if (std::abs(xi.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("induce_3_structure: normal is not unit");
    Mat j = m.chart.jacobian(u);
    for (int i = 0; i < m.chart.domain_dim; ++i)
        if (std::abs(xi.dot(j.col(i))) > 1e-6 * j.col(i).norm())
            throw std::invalid_argument("induce_3_structure: normal not orthogonal to tangent");

    Induced3Structure s;
    s.point = u;
    s.normal = xi;
    s.tangent_proj = Mat::Identity(n, n) - xi * xi.transpose();
    for (int a = 0; a < 3; ++a) s.xi[a] = -(m.ambient.J[a] * xi);
    s.horizontal_proj = s.tangent_proj;
    for (int a = 0; a < 3; ++a) s.horizontal_proj -= s.xi[a] * s.xi[a].transpose();
    for (const auto& [a, b, g] : kEvenPerm)
        s.phi[a] = m.ambient.J[a] * s.horizontal_proj + s.xi[g] * s.xi[b].transpose() -
                   s.xi[b] * s.xi[g].transpose();
    return s;
}

std::vector<Vec> SamplePlan::draw_points(const Chart& c) const {
    std::vector<Vec> pts = explicit_points;
    Rng rng(seed);
    for (int i = 0; i < points; ++i) {
        Vec u(c.domain_dim);
        for (int k = 0; k < c.domain_dim; ++k) {
            double margin = 2.0 * c.fd_step2 + 0.02 * (c.box_hi[k] - c.box_lo[k]);
            double a = c.box_lo[k] + margin, b = c.box_hi[k] - margin;
            u[k] = a + (b - a) * rng.uniform();
        }
        pts.push_back(u);
    }
    return pts;
}

CheckReport check_ac3_axioms(const OrientedHypersurface& m, const SamplePlan& plan) {
    CheckReport rep;
    rep.check = "ac3_axioms";
    const double tol = plan.tol.alg;
    CheckRow phi_sq{"phi_square", "phi_a^2 = -I + eta_a (x) xi_a", 0, tol};
    CheckRow eta_xi{"eta_xi", "eta_a(xi_a) = 1, eta_a(xi_b) = 0 for a != b", 0, tol};
    CheckRow phi_xi{"phi_xi", "phi_a(xi_b) = -phi_b(xi_a) = xi_c (even permutations)", 0, tol};
    CheckRow eta_phi{"eta_phi", "eta_a o phi_b = -eta_b o phi_a = eta_c", 0, tol};
    CheckRow phi_prod{"phi_product",
                      "phi_a phi_b - eta_b (x) xi_a = -phi_b phi_a + eta_a (x) xi_b = phi_c", 0,
                      tol};
    CheckRow compat{"metric_compat", "g(phi_a X, phi_a Y) = g(X, Y) - eta_a(X) eta_a(Y)", 0, tol};
    CheckRow decomp{"decomposition", "J_a X = phi_a X + F_a X", 0, 1e-10};
    CheckRow horiz{"horizontal_restriction", "phi_a = J_a on the horizontal distribution", 0,
                   1e-9};
    CheckRow wiring{"eta_definition", "wiring", 0, tol};

    Rng vec_rng(plan.seed ^ fnv1a("ac3_vectors"));
    int idx = 0;
    for (const Vec& u : plan.draw_points(m.chart)) {
        Induced3Structure s = induce_3_structure(m, u);
        for (int a = 0; a < 3; ++a) {
            eta_xi.record(idx, std::abs(s.eta(a, s.xi[a]) - 1.0));
            for (int b = 0; b < 3; ++b)
                if (a != b) eta_xi.record(idx, std::abs(s.eta(a, s.xi[b])));
        }
        for (const auto& [a, b, g] : kEvenPerm) {
            phi_xi.record(idx, (s.phi[a] * s.xi[b] - s.xi[g]).norm());
            phi_xi.record(idx, (s.phi[b] * s.xi[a] + s.xi[g]).norm());
        }
        for (int v = 0; v < plan.vectors; ++v) {
            Vec x = s.tangent_proj * vec_rng.gaussian(m.chart.ambient_dim);
            Vec y = s.tangent_proj * vec_rng.gaussian(m.chart.ambient_dim);
            x /= x.norm();
            y /= y.norm();
            for (int a = 0; a < 3; ++a) {
                phi_sq.record(idx,
                              (s.phi[a] * (s.phi[a] * x) + x - s.eta(a, x) * s.xi[a]).norm());
                compat.record(idx, std::abs((s.phi[a] * x).dot(s.phi[a] * y) - x.dot(y) +
                                            s.eta(a, x) * s.eta(a, y)));
                decomp.record(idx,
                              (m.ambient.J[a] * x - s.phi[a] * x - s.f(a, x)).norm());
                horiz.record(idx, ((s.phi[a] - m.ambient.J[a]) * (s.horizontal_proj * x)).norm());
                wiring.record(idx, std::abs(s.eta(a, x) - x.dot(s.xi[a])));
            }
            for (const auto& [a, b, g] : kEvenPerm) {
                eta_phi.record(idx, std::abs(s.eta(a, s.phi[b] * x) - s.eta(g, x)));
                eta_phi.record(idx, std::abs(s.eta(b, s.phi[a] * x) + s.eta(g, x)));
                phi_prod.record(
                    idx, (s.phi[a] * (s.phi[b] * x) - s.eta(b, x) * s.xi[a] - s.phi[g] * x).norm());
                phi_prod.record(
                    idx, (-(s.phi[b] * (s.phi[a] * x)) + s.eta(a, x) * s.xi[b] - s.phi[g] * x)
                             .norm());
            }
        }
        ++idx;
    }
    for (CheckRow* r : {&phi_sq, &eta_xi, &phi_xi, &eta_phi, &phi_prod, &compat, &decomp, &horiz,
                        &wiring})
        r->finish();
    rep.rows = {phi_sq, eta_xi, phi_xi, eta_phi, phi_prod, compat, decomp, horiz, wiring};
    return rep;
}

namespace {

struct StructureStencil {
    Induced3Structure center, plus, minus;
    double h;
};

StructureStencil stencil_along(const OrientedHypersurface& m, const Induced3Structure& s,
                               const Vec& u, const Vec& x) {
    Vec a = m.chart.parameter_direction(u, x);
    double h = m.chart.fd_step1 / std::max(1.0, a.norm());
    if (!m.chart.interior(u + h * a, 0.0) || !m.chart.interior(u - h * a, 0.0))
        throw sampling_error("hypersurface check: stencil exits chart domain");
    return {s, induce_3_structure(m, u + h * a), induce_3_structure(m, u - h * a), h};
}

}  // namespace

CheckReport check_cosymplectic(const OrientedHypersurface& m, const SamplePlan& plan) {
    CheckReport rep;
    rep.check = "cosymplectic";
    CheckRow nphi{"nabla_phi", "(nab_X phi_a) Y = 0", 0, plan.tol.d1};
    CheckRow neta{"nabla_eta", "(nab_X eta_a) Y = 0", 0, plan.tol.d1};
    CheckRow nxi{"nabla_xi", "nab_X xi_a = 0 (parallel Reeb fields)", 0, plan.tol.d1};

    Rng vec_rng(plan.seed ^ fnv1a("cosymplectic_vectors"));
    int idx = 0;
    for (const Vec& u : plan.draw_points(m.chart)) {
        Induced3Structure s = induce_3_structure(m, u);
        for (int v = 0; v < plan.vectors; ++v) {
            Vec x = s.tangent_proj * vec_rng.gaussian(m.chart.ambient_dim);
            Vec y0 = s.tangent_proj * vec_rng.gaussian(m.chart.ambient_dim);
            x /= x.norm();
            y0 /= y0.norm();
            StructureStencil st = stencil_along(m, s, u, x);
            Vec yp = st.plus.tangent_proj * y0;
            Vec ym = st.minus.tangent_proj * y0;
            Vec nab_y = s.tangent_proj * ((yp - ym) / (2.0 * st.h));
            for (int a = 0; a < 3; ++a) {
                Vec dz = (st.plus.phi[a] * yp - st.minus.phi[a] * ym) / (2.0 * st.h);
                nphi.record(idx, (s.tangent_proj * dz - s.phi[a] * nab_y).norm());
                double ds =
                    (st.plus.xi[a].dot(yp) - st.minus.xi[a].dot(ym)) / (2.0 * st.h);
                neta.record(idx, std::abs(ds - s.xi[a].dot(nab_y)));
                Vec dxi = (st.plus.xi[a] - st.minus.xi[a]) / (2.0 * st.h);
                nxi.record(idx, (s.tangent_proj * dxi).norm());
            }
        }
        ++idx;
    }
    nphi.finish();
    neta.finish();
    nxi.finish();
    rep.rows = {nphi, neta, nxi};
    return rep;
}

CheckReport check_mixed_geodesic(const OrientedHypersurface& m, const SamplePlan& plan) {
    CheckReport rep;
    rep.check = "mixed_geodesic";
    CheckRow mixed{"mixed_geodesic", "B(U, X) = 0 for vertical U, horizontal X", 0, plan.tol.d1};
    CheckRow bracket{"vertical_bracket",
                     "[xi_a, xi_b] stays in span{xi_1, xi_2, xi_3} (integrability of V)", 0,
                     plan.tol.d1};

    Rng vec_rng(plan.seed ^ fnv1a("mixed_vectors"));
    int idx = 0;
    for (const Vec& u : plan.draw_points(m.chart)) {
        Induced3Structure s = induce_3_structure(m, u);
        for (int a = 0; a < 3; ++a) {
            StructureStencil st = stencil_along(m, s, u, s.xi[a]);
            for (int v = 0; v < plan.vectors; ++v) {
                Vec x0 = s.horizontal_proj * vec_rng.gaussian(m.chart.ambient_dim);
                x0 /= x0.norm();
                Vec d = (st.plus.tangent_proj * x0 - st.minus.tangent_proj * x0) / (2.0 * st.h);
                mixed.record(idx, std::abs(s.normal.dot(d)));
            }
            for (int b = a + 1; b < 3; ++b) {
                Vec dxb = (st.plus.xi[b] - st.minus.xi[b]) / (2.0 * st.h);
                StructureStencil stb = stencil_along(m, s, u, s.xi[b]);
                Vec dxa = (stb.plus.xi[a] - stb.minus.xi[a]) / (2.0 * stb.h);
                Vec br = dxb - dxa;
                bracket.record(idx, (br - s.vertical_proj() * br).norm());
            }
        }
        ++idx;
    }
    mixed.finish();
    bracket.finish();
    rep.rows = {mixed, bracket};
    return rep;
}

}  // namespace qk
