#include "qk/chart.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

namespace qk {

bool Chart::interior(const Vec& u, double margin) const {
    for (int i = 0; i < domain_dim; ++i)
        if (u[i] < box_lo[i] + margin || u[i] > box_hi[i] - margin) return false;
    return true;
}

void Chart::require_interior(const Vec& u) const {
    if (u.size() != domain_dim)
        throw std::invalid_argument("chart: parameter dimension mismatch");
    if (!interior(u, 2.0 * fd_step2))
        throw sampling_error("chart: evaluation point too close to the box boundary");
}

Mat Chart::jacobian(const Vec& u) const {
    Mat j(ambient_dim, domain_dim);
    Vec up = u, um = u;
    for (int i = 0; i < domain_dim; ++i) {
        up[i] = u[i] + fd_step1;
        um[i] = u[i] - fd_step1;
        j.col(i) = (embed(up) - embed(um)) / (2.0 * fd_step1);
        up[i] = u[i];
        um[i] = u[i];
    }
    return j;
}

Vec Chart::parameter_direction(const Vec& u, const Vec& x) const {
    Mat j = jacobian(u);
    return j.colPivHouseholderQr().solve(x);
}

Chart identity_chart(int dim, double half_width) {
    Chart c;
    c.domain_dim = dim;
    c.ambient_dim = dim;
    c.embed = [](const Vec& u) { return u; };
    c.box_lo = Vec::Constant(dim, -half_width);
    c.box_hi = Vec::Constant(dim, half_width);
    return c;
}

Mat induced_metric(const Chart& c, const Vec& u) {
    c.require_interior(u);
    Mat j = c.jacobian(u);
    Eigen::JacobiSVD<Mat> svd(j);
    if (svd.singularValues()[c.domain_dim - 1] < c.rank_floor)
        throw numerical_error("induced_metric: degenerate chart (rank-deficient Jacobian)");
    return j.transpose() * j;
}

Mat tangent_projector(const Chart& c, const Vec& u) {
    c.require_interior(u);
    Mat j = c.jacobian(u);
    Eigen::JacobiSVD<Mat> svd(j);
    if (svd.singularValues()[c.domain_dim - 1] < c.rank_floor)
        throw numerical_error("tangent_projector: degenerate chart");
    Eigen::HouseholderQR<Mat> qr(j);
    Mat q = qr.householderQ() * Mat::Identity(c.ambient_dim, c.domain_dim);
    return q * q.transpose();
}

namespace {

// Re-projects a nominally tangent vector, rejecting inputs whose normal
// component exceeds 10x the tangency threshold.
Vec ensure_tangent(const Mat& p, const Vec& x, double tol, const char* who) {
    Vec px = p * x;
    double defect = (x - px).norm();
    double scale = std::max(1.0, x.norm());
    if (defect > 10.0 * tol * scale)
        throw std::invalid_argument(std::string(who) + ": input vector is not tangent");
    return px;
}

}  // namespace

Vec ambient_derivative(const Chart& c, const Vec& u, const VectorField& field, const Vec& x) {
    Vec a = c.parameter_direction(u, x);
    double h = c.fd_step1 / std::max(1.0, a.norm());
    if (!c.interior(u + h * a, 0.0) || !c.interior(u - h * a, 0.0))
        throw sampling_error("ambient_derivative: stencil exits chart domain");
    return (field(u + h * a) - field(u - h * a)) / (2.0 * h);
}

Vec levi_civita(const Chart& c, const Vec& u, const VectorField& x_field,
                const VectorField& y_field, double tangency_tol) {
    c.require_interior(u);
    Mat p = tangent_projector(c, u);
    Vec x = ensure_tangent(p, x_field(u), tangency_tol, "levi_civita (X)");
    ensure_tangent(p, y_field(u), tangency_tol, "levi_civita (Y)");
    return p * ambient_derivative(c, u, y_field, x);
}

Vec lie_bracket(const Chart& c, const Vec& u, const VectorField& x_field,
                const VectorField& y_field) {
    Vec x = x_field(u);
    Vec y = y_field(u);
    return ambient_derivative(c, u, y_field, x) - ambient_derivative(c, u, x_field, y);
}

Vec second_fundamental_form(const Chart& c, const Vec& u, const Vec& x, const Vec& y,
                            double tangency_tol) {
    c.require_interior(u);
    Mat p = tangent_projector(c, u);
    Vec xt = ensure_tangent(p, x, tangency_tol, "second_fundamental_form (X)");
    Vec y0 = ensure_tangent(p, y, tangency_tol, "second_fundamental_form (Y)");
    VectorField ext = [&c, y0](const Vec& v) { return Vec(tangent_projector(c, v) * y0); };
    Vec d = ambient_derivative(c, u, ext, xt);
    return d - p * d;
}

ShapeData classify_umbilical(const Chart& c, const std::vector<Vec>& points,
                             const Tolerances& tol) {
    if (points.size() < 1)
        throw std::invalid_argument("classify_umbilical: needs at least one sample point");
    // B and nab^perp H stack three finite-difference levels; the first-order
    // step would amplify Jacobian round-off catastrophically, so this routine
    // differentiates with the coarser second-derivative step throughout.
    Chart cc = c;
    cc.fd_step1 = std::max(c.fd_step1, c.fd_step2);
    const Chart& ch = cc;
    const int d = c.domain_dim;
    ShapeData s;
    s.mean_curvature_norm = std::numeric_limits<double>::max();

    for (const Vec& u : points) {
        ch.require_interior(u);
        Mat j = ch.jacobian(u);
        Eigen::HouseholderQR<Mat> qr(j);
        Mat tan = qr.householderQ() * Mat::Identity(ch.ambient_dim, d);
        Mat p = tan * tan.transpose();

        // B on an orthonormal tangent frame; g is then the identity, so the
        // umbilical defect is B_ij - delta_ij H.
        std::vector<std::vector<Vec>> b(d, std::vector<Vec>(d));
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                b[i][k] = second_fundamental_form(ch, u, tan.col(i), tan.col(k));

        Vec h = Vec::Zero(ch.ambient_dim);
        for (int i = 0; i < d; ++i) h += b[i][i];
        h /= static_cast<double>(d);

        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) {
                s.b_samples.push_back(b[i][k]);
                s.max_b = std::max(s.max_b, b[i][k].norm());
                s.symmetry_residual = std::max(s.symmetry_residual, (b[i][k] - b[k][i]).norm());
                Vec defect = b[i][k] - (i == k ? 1.0 : 0.0) * h;
                s.umbilical_residual = std::max(s.umbilical_residual, defect.norm());
            }

        // nab^perp H = (Id - P) D_X H along the tangent frame; ambient
        // flatness makes this the normal connection exactly.
        VectorField h_field = [&ch, d](const Vec& v) {
            Mat jv = ch.jacobian(v);
            Eigen::HouseholderQR<Mat> qv(jv);
            Mat tv = qv.householderQ() * Mat::Identity(ch.ambient_dim, d);
            Vec hv = Vec::Zero(ch.ambient_dim);
            for (int i = 0; i < d; ++i)
                hv += second_fundamental_form(ch, v, tv.col(i), tv.col(i));
            return Vec(hv / static_cast<double>(d));
        };
        for (int i = 0; i < d; ++i) {
            Vec dh = ambient_derivative(ch, u, h_field, tan.col(i));
            s.normal_parallel_residual =
                std::max(s.normal_parallel_residual, (dh - p * dh).norm());
        }

        s.point = u;
        s.mean_curvature = h;
        s.mean_curvature_norm = std::min(s.mean_curvature_norm, h.norm());
    }

    s.totally_geodesic = s.max_b < tol.d1;
    s.totally_umbilical = s.umbilical_residual < tol.d1;
    s.extrinsic_sphere = s.totally_umbilical && s.mean_curvature_norm > 100.0 * tol.d1 &&
                         s.normal_parallel_residual < tol.d1;
    return s;
}

namespace {

std::vector<double> christoffels(const MetricField& g, const Vec& u, int d, double h) {
    Mat g0 = g(u);
    Eigen::LDLT<Mat> ldlt(g0);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw numerical_error("riemann_tensor: metric not positive definite on stencil");
    Mat ginv = ldlt.solve(Mat::Identity(d, d));

    std::vector<Mat> dg(d);
    Vec up = u, um = u;
    for (int k = 0; k < d; ++k) {
        up[k] = u[k] + h;
        um[k] = u[k] - h;
        dg[k] = (g(up) - g(um)) / (2.0 * h);
        up[k] = u[k];
        um[k] = u[k];
    }

    std::vector<double> gamma(d * d * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k) {
                double s = 0.0;
                for (int l = 0; l < d; ++l)
                    s += ginv(i, l) * (dg[j](l, k) + dg[k](l, j) - dg[l](j, k));
                gamma[(i * d + j) * d + k] = 0.5 * s;
            }
    return gamma;
}

}  // namespace

double CurvatureSample::sectional(const Vec& x, const Vec& y) const {
    double num = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            for (int k = 0; k < dim; ++k)
                for (int l = 0; l < dim; ++l)
                    num += low(i, j, k, l) * x[i] * y[j] * x[k] * y[l];
    double gxx = x.dot(metric * x), gyy = y.dot(metric * y), gxy = x.dot(metric * y);
    double den = gxx * gyy - gxy * gxy;
    if (std::abs(den) < 1e-14) throw numerical_error("sectional: degenerate 2-plane");
    return num / den;
}

CurvatureSample riemann_tensor(const MetricField& metric_field, const Vec& u, double fd_step2) {
    const int d = static_cast<int>(u.size());
    const double h = fd_step2;

    CurvatureSample cs;
    cs.point = u;
    cs.dim = d;
    cs.metric = metric_field(u);
    cs.christoffel = christoffels(metric_field, u, d, h);

    std::vector<std::vector<double>> dgamma(d);
    Vec up = u, um = u;
    for (int k = 0; k < d; ++k) {
        up[k] = u[k] + h;
        um[k] = u[k] - h;
        auto gp = christoffels(metric_field, up, d, h);
        auto gm = christoffels(metric_field, um, d, h);
        dgamma[k].resize(d * d * d);
        for (int t = 0; t < d * d * d; ++t) dgamma[k][t] = (gp[t] - gm[t]) / (2.0 * h);
        up[k] = u[k];
        um[k] = u[k];
    }

    auto gam = [&](int i, int j, int k) { return cs.christoffel[(i * d + j) * d + k]; };
    auto dgam = [&](int p, int i, int j, int k) { return dgamma[p][(i * d + j) * d + k]; };

    cs.riemann_up.assign(d * d * d * d, 0.0);
    cs.riemann_low.assign(d * d * d * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double r = dgam(k, i, l, j) - dgam(l, i, k, j);
                    for (int m = 0; m < d; ++m)
                        r += gam(i, k, m) * gam(m, l, j) - gam(i, l, m) * gam(m, k, j);
                    cs.riemann_up[((i * d + j) * d + k) * d + l] = r;
                }
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double r = 0.0;
                    for (int m = 0; m < d; ++m)
                        r += cs.metric(i, m) * cs.up(m, j, k, l);
                    cs.riemann_low[((i * d + j) * d + k) * d + l] = r;
                }

    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    cs.antisymmetry_residual =
                        std::max({cs.antisymmetry_residual,
                                  std::abs(cs.low(i, j, k, l) + cs.low(j, i, k, l)),
                                  std::abs(cs.low(i, j, k, l) + cs.low(i, j, l, k))});
                    cs.bianchi_residual = std::max(
                        cs.bianchi_residual,
                        std::abs(cs.up(i, j, k, l) + cs.up(i, k, l, j) + cs.up(i, l, j, k)));
                }
    return cs;
}

}  // namespace qk
