#include "qk/scenarios.hpp"

#include "qk/quat.hpp"
#include "qk/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qk {

void RunConfig::validate() const {
    if (samples < 4) throw std::invalid_argument("config: samples must be at least 4");
    if (vectors < 1) throw std::invalid_argument("config: vectors must be positive");
    if (tol_alg <= 0.0 || tol_d1 <= 0.0 || tol_d2 <= 0.0)
        throw std::invalid_argument("config: tolerances must be positive");
    if (fd1 <= 0.0 || fd2 <= 0.0)
        throw std::invalid_argument("config: finite-difference steps must be positive");
}

namespace {

// Orthonormal basis of the hyperplane orthogonal to p, deterministic in p.
Mat orthonormal_complement(const Vec& p) {
    const int n = static_cast<int>(p.size());
    Mat pcol = p;
    Eigen::HouseholderQR<Mat> qr(pcol);
    Mat q = qr.householderQ();
    return q.rightCols(n - 1);
}

Vec4 quat_block(const Vec& x, int i) { return Vec4(x.segment(4 * i, 4)); }

double report_row(const CheckReport& r, const std::string& name) {
    const CheckRow* row = r.row(name);
    if (!row) throw std::logic_error("missing report row: " + name);
    return row->max_residual;
}

double report_max_except(const CheckReport& r, const std::vector<std::string>& excluded) {
    double m = 0.0;
    for (const auto& row : r.rows) {
        if (std::find(excluded.begin(), excluded.end(), row.name) != excluded.end()) continue;
        m = std::max(m, row.max_residual);
    }
    return m;
}

SamplePlan make_plan(const RunConfig& cfg, int points, const char* stream) {
    SamplePlan p;
    p.points = points;
    p.vectors = cfg.vectors;
    p.seed = cfg.seed ^ fnv1a(stream);
    p.tol = cfg.tolerances();
    return p;
}

}  // namespace

OrientedHypersurface hyperplane_hypersurface(int m, const StructureTriple& ambient,
                                             const Vec& center, double fd1, double fd2) {
    const int n = ambient.dim;
    Chart c;
    c.domain_dim = n - 1;
    c.ambient_dim = n;
    c.box_lo = Vec::Constant(n - 1, -1.0);
    c.box_hi = Vec::Constant(n - 1, 1.0);
    c.fd_step1 = fd1;
    c.fd_step2 = fd2;
    Vec base = center;
    base[n - 1] = 0.0;
    c.embed = [base, n](const Vec& u) {
        Vec x = base;
        x.head(n - 1) += u;
        return x;
    };
    Vec e_last = Vec::Unit(n, n - 1);
    OrientedHypersurface h;
    h.chart = c;
    h.ambient = ambient;
    h.normal = [e_last](const Vec&) { return e_last; };
    return h;
}

OrientedHypersurface sphere_hypersurface(const StructureTriple& ambient, const Vec& center,
                                         double radius, double fd1, double fd2) {
    const int n = ambient.dim;
    if (center.size() != n) throw std::invalid_argument("sphere_hypersurface: bad center");
    Vec p = center.normalized();
    Mat e = orthonormal_complement(p);
    Chart c;
    c.domain_dim = n - 1;
    c.ambient_dim = n;
    double hw = radius / std::sqrt(static_cast<double>(n - 1));
    c.box_lo = Vec::Constant(n - 1, -hw);
    c.box_hi = Vec::Constant(n - 1, hw);
    c.fd_step1 = fd1;
    c.fd_step2 = fd2;
    c.embed = [p, e](const Vec& u) {
        double s2 = 1.0 - u.squaredNorm();
        if (s2 <= 0.0) throw sampling_error("sphere chart: parameter outside the hemisphere");
        return Vec(std::sqrt(s2) * p + e * u);
    };
    OrientedHypersurface h;
    h.chart = c;
    h.ambient = ambient;
    h.normal = c.embed;  // outward normal of the unit sphere is the position
    return h;
}

OrientedHypersurface graph_hypersurface(const StructureTriple& ambient,
                                        const std::function<double(const Vec&)>& f,
                                        double half_width, double fd1, double fd2) {
    const int n = ambient.dim;
    Chart c;
    c.domain_dim = n - 1;
    c.ambient_dim = n;
    c.box_lo = Vec::Constant(n - 1, -half_width);
    c.box_hi = Vec::Constant(n - 1, half_width);
    c.fd_step1 = fd1;
    c.fd_step2 = fd2;
    c.embed = [f, n](const Vec& u) {
        Vec x(n);
        x.head(n - 1) = u;
        x[n - 1] = f(u);
        return x;
    };
    OrientedHypersurface h;
    h.chart = c;
    h.ambient = ambient;
    return h;
}

QR3Setup flat_hyperplane_setup(int m, double fd1, double fd2) {
    const int n = 4 * (m + 1);
    const int k = 4 * m;
    StructureTriple t = make_structure_triple(m + 1, Convention::Left);

    QR3Setup s;
    s.ambient_triple = t;
    s.hyp_at = [t, m, fd1, fd2](const Vec& x) {
        return hyperplane_hypersurface(m, t, x, fd1, fd2);
    };

    SubmersionDescriptor sub;
    sub.total = s.hyp_at(Vec::Zero(n)).chart;
    sub.base_dim = k;
    sub.base_lo = Vec::Constant(k, -1.0);
    sub.base_hi = Vec::Constant(k, 1.0);
    sub.project_ambient = [k](const Vec& x) { return Vec(x.head(k)); };
    sub.section_ambient = [k, n](const Vec& q) {
        Vec x = Vec::Zero(n);
        x.head(k) = q;
        return x;
    };
    auto hyp_at = s.hyp_at;
    sub.patch_at = [hyp_at](const Vec& x) { return hyp_at(x).chart; };
    sub.fiber_dim = 3;
    sub.fd_step = fd1;
    s.sub = sub;
    return s;
}

QR3Setup hopf_sphere_setup(int m, double fd1, double fd2) {
    const int n = 4 * (m + 1);
    const int k = 4 * m;
    StructureTriple t = make_structure_triple(m + 1, Convention::Right);

    QR3Setup s;
    s.ambient_triple = t;
    s.hyp_at = [t, fd1, fd2](const Vec& x) { return sphere_hypersurface(t, x, 0.6, fd1, fd2); };

    SubmersionDescriptor sub;
    sub.total = s.hyp_at(Vec::Unit(n, 0)).chart;
    sub.base_dim = k;
    sub.base_lo = Vec::Constant(k, -0.5);
    sub.base_hi = Vec::Constant(k, 0.5);
    // Affine coordinates q_j = p_{j+1} p_1^{-1}; invariant along the fiber
    // p -> p lambda and under scaling, so the differential kills the normal.
    sub.project_ambient = [m, k](const Vec& x) {
        Vec4 inv = quat::inv(quat_block(x, 0));
        Vec q(k);
        for (int j = 0; j < m; ++j) q.segment(4 * j, 4) = quat::mul(quat_block(x, j + 1), inv);
        return q;
    };
    sub.section_ambient = [m, n](const Vec& q) {
        Vec x = Vec::Zero(n);
        x[0] = 1.0;
        for (int j = 0; j < m; ++j) x.segment(4 * (j + 1), 4) = q.segment(4 * j, 4);
        return Vec(x / x.norm());
    };
    auto hyp_at = s.hyp_at;
    sub.patch_at = [hyp_at](const Vec& x) { return hyp_at(x).chart; };
    sub.fiber_dim = 3;
    sub.fd_step = fd1;
    s.sub = sub;
    return s;
}

QuaternionicSubmersionSetup flat_projection_setup(int n, int k, double metric_scale, double fd1,
                                                  double fd2) {
    const int nn = 4 * n;
    const int kk = 4 * k;
    QuaternionicSubmersionSetup s;

    Chart total = identity_chart(nn, 1.0);
    total.fd_step1 = fd1;
    total.fd_step2 = fd2;
    SubmersionDescriptor sub;
    sub.total = total;
    sub.base_dim = kk;
    sub.base_lo = Vec::Constant(kk, -1.0);
    sub.base_hi = Vec::Constant(kk, 1.0);
    sub.project_ambient = [kk](const Vec& x) { return Vec(x.head(kk)); };
    sub.section_ambient = [kk, nn](const Vec& q) {
        Vec x = Vec::Zero(nn);
        x.head(kk) = q;
        return x;
    };
    sub.patch_at = [nn, fd1, fd2](const Vec& x) {
        Chart c = identity_chart(nn, 1.0);
        c.fd_step1 = fd1;
        c.fd_step2 = fd2;
        c.embed = [x](const Vec& u) { return Vec(x + u); };
        return c;
    };
    sub.fiber_dim = nn - kk;
    sub.fd_step = fd1;
    sub.base_metric_mode = BaseMetricMode::Explicit;
    sub.base_metric_explicit = [kk, metric_scale](const Vec&) {
        return Mat(metric_scale * Mat::Identity(kk, kk));
    };
    s.sub = sub;

    StructureTriple tt = make_structure_triple(n, Convention::Left);
    s.total_triple = [tt](const Vec&) { return tt; };
    s.base_triple = make_structure_triple(k, Convention::Left).J;
    return s;
}

namespace {

// --- shared row computations -------------------------------------------

struct OneillStats {
    double t_max = 0.0;        // max |T_EF| over vertical-rooted pairs
    double t_phi = 0.0;        // max |T_(U,V) + T_(phi_a U, phi_a V)|
    double a_max = 0.0;        // max |A_XY| over horizontal pairs
    double a_min_unit = 0.0;   // min |A_X(J_a X)| over unit horizontal X
    double a_bracket = 0.0;    // max |A_XY - v[X,Y]/2|
};

OneillStats oneill_stats(const QR3Setup& s, const RunConfig& cfg, int points) {
    OneillStats st;
    st.a_min_unit = std::numeric_limits<double>::max();
    Rng rng(cfg.seed ^ fnv1a("oneill_vectors"));
    SamplePlan plan = make_plan(cfg, points, "oneill_points");
    const int pairs = std::max(2, cfg.vectors / 2);
    for (const Vec& u : plan.draw_points(s.sub.total)) {
        Vec x = s.sub.total.embed(u);
        SubmersionFrame fr = make_frame(s.sub, x);
        Induced3Structure ind = s.structure_at(x);
        const int n = static_cast<int>(x.size());
        for (int v = 0; v < pairs; ++v) {
            Vec uu = (fr.vproj * rng.gaussian(n)).normalized();
            Vec ff = fr.tangent * rng.unit(static_cast<int>(fr.tangent.cols()));
            st.t_max = std::max(st.t_max, oneill_T(s.sub, x, uu, ff).norm());

            Vec vv = (fr.vproj * rng.gaussian(n)).normalized();
            for (int a = 0; a < 3; ++a) {
                Vec t1 = oneill_T(s.sub, x, uu, vv);
                Vec t2 = oneill_T(s.sub, x, Vec(ind.phi[a] * uu), Vec(ind.phi[a] * vv));
                st.t_phi = std::max(st.t_phi, (t1 + t2).norm());
            }

            Vec xh = (fr.hproj * rng.gaussian(n)).normalized();
            Vec yh = (fr.hproj * rng.gaussian(n)).normalized();
            Vec axy = oneill_A(s.sub, x, xh, yh);
            st.a_max = std::max(st.a_max, axy.norm());
            st.a_bracket = std::max(
                st.a_bracket, (axy - half_vertical_bracket(s.sub, x, xh, yh)).norm());
            for (int a = 0; a < 3; ++a) {
                Vec ja = ind.phi[a] * xh;  // horizontal, unit, g(J_a X, Y) = 1 at Y = J_a X
                double anorm = oneill_A(s.sub, x, xh, ja).norm();
                st.a_min_unit = std::min(st.a_min_unit, anorm);
                st.a_max = std::max(st.a_max, anorm);
            }
        }
    }
    return st;
}

// max over the parallelism defect of the pushed structures on the base and
// the fitted base connection forms; both vanish iff locally hyper-Kaehler.
double base_hyperkaehler_residual(const QR3Setup& s, const RunConfig& cfg, int points) {
    const int k = s.sub.base_dim;
    TripleField field = [&s, k](const Vec& q) {
        return StructureTriple{k, push_structure(s, s.sub.section_ambient(q)).J};
    };
    Rng rng(cfg.seed ^ fnv1a("base_hk_points"));
    std::vector<std::pair<Vec, Vec>> samples;
    for (int p = 0; p < points; ++p) {
        Vec q = rng.in_box(s.sub.base_lo, s.sub.base_hi, 0.05 + 2.0 * cfg.fd2);
        for (int i = 0; i < k; ++i) samples.emplace_back(q, Vec(Vec::Unit(k, i)));
    }
    QKFormFit fit = qk_connection_forms(field, samples, cfg.fd2, cfg.tol_d1);
    return std::max(fit.residual, fit.max_omega);
}

double base_curvature_max(const QR3Setup& s, const RunConfig& cfg, int points) {
    MetricField g = [&s](const Vec& q) { return s.sub.base_metric(q); };
    Rng rng(cfg.seed ^ fnv1a("base_curvature_points"));
    double rmax = 0.0;
    for (int p = 0; p < points; ++p) {
        Vec q = rng.in_box(s.sub.base_lo, s.sub.base_hi, 0.05);
        CurvatureSample cs = riemann_tensor(g, q, cfg.fd2);
        for (double r : cs.riemann_low) rmax = std::max(rmax, std::abs(r));
    }
    return rmax;
}

SpaceFormFit base_space_form(const QR3Setup& s, const RunConfig& cfg, int points,
                             int planes_per_point) {
    MetricField g = [&s](const Vec& q) { return s.sub.base_metric(q); };
    Rng rng(cfg.seed ^ fnv1a("space_form_points"));
    std::vector<SpaceFormSample> samples;
    for (int p = 0; p < points; ++p) {
        Vec q = rng.in_box(s.sub.base_lo, s.sub.base_hi, 0.05);
        SpaceFormSample sm;
        sm.curvature = riemann_tensor(g, q, cfg.fd2);
        sm.triple = push_structure(s, s.sub.section_ambient(q)).J;
        samples.push_back(std::move(sm));
    }
    return space_form_fit(samples, cfg.seed, planes_per_point);
}

double fiber_so3_residual(const QR3Setup& s, const RunConfig& cfg, int pairs) {
    Rng rng(cfg.seed ^ fnv1a("fiber_pairs"));
    const Chart& c = s.sub.total;
    const int blocks = c.ambient_dim / 4;
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
        Vec u(c.domain_dim);
        for (int i = 0; i < c.domain_dim; ++i) {
            double margin = 2.0 * c.fd_step2 + 0.02 * (c.box_hi[i] - c.box_lo[i]);
            u[i] = c.box_lo[i] + margin + (c.box_hi[i] - c.box_lo[i] - 2.0 * margin) *
                                              rng.uniform();
        }
        Vec p1 = c.embed(u);
        Vec4 lam = rng.unit(4);
        Vec p2(p1.size());
        for (int j = 0; j < blocks; ++j)
            p2.segment(4 * j, 4) = quat::mul(quat_block(p1, j), lam);
        FiberCompatibility fc = fiber_compatibility(s, p1, p2);
        worst = std::max({worst, fc.fit_residual, fc.orthogonality_residual,
                          std::abs(fc.det - 1.0)});
    }
    return worst;
}

// --- per-scenario runners -----------------------------------------------

std::vector<double> run_flat_hyperplane(int m, const RunConfig& cfg) {
    QR3Setup s = flat_hyperplane_setup(m, cfg.fd1, cfg.fd2);
    OrientedHypersurface hyp = s.hyp_at(Vec::Zero(4 * (m + 1)));
    const int small = std::min(cfg.samples, 8);

    std::vector<double> out;
    CheckReport ac3 = check_ac3_axioms(hyp, make_plan(cfg, cfg.samples, "ac3"));
    out.push_back(report_max_except(ac3, {"decomposition"}));
    out.push_back(report_row(ac3, "decomposition"));
    out.push_back(check_cosymplectic(hyp, make_plan(cfg, small, "cosymplectic")).max_residual());
    CheckReport mg = check_mixed_geodesic(hyp, make_plan(cfg, small, "mixed"));
    out.push_back(report_row(mg, "mixed_geodesic"));
    out.push_back(report_row(mg, "vertical_bracket"));
    out.push_back(check_qr3_submersion(s, make_plan(cfg, cfg.samples, "qr3")).max_residual());
    OneillStats on = oneill_stats(s, cfg, std::max(4, cfg.samples / 4));
    out.push_back(std::max(on.t_max, on.t_phi));
    out.push_back(on.a_max);
    out.push_back(base_hyperkaehler_residual(s, cfg, 2));
    out.push_back(base_curvature_max(s, cfg, 2));
    return out;
}

std::vector<double> run_hopf_sphere(int m, const RunConfig& cfg) {
    QR3Setup s = hopf_sphere_setup(m, cfg.fd1, cfg.fd2);
    Vec p0 = s.sub.section_ambient(Vec::Zero(4 * m));
    OrientedHypersurface hyp = s.hyp_at(p0);
    const int small = std::min(cfg.samples, 8);

    std::vector<double> out;
    CheckReport ac3 = check_ac3_axioms(hyp, make_plan(cfg, cfg.samples, "ac3"));
    out.push_back(report_max_except(ac3, {"decomposition"}));
    out.push_back(report_row(ac3, "decomposition"));
    CheckReport mg = check_mixed_geodesic(hyp, make_plan(cfg, small, "mixed"));
    out.push_back(report_row(mg, "mixed_geodesic"));
    out.push_back(report_row(mg, "vertical_bracket"));

    SamplePlan shape_plan = make_plan(cfg, std::max(2, cfg.samples / 16), "shape");
    ShapeData sd =
        classify_umbilical(hyp.chart, shape_plan.draw_points(hyp.chart), cfg.tolerances());
    out.push_back(std::max({sd.umbilical_residual, std::abs(sd.mean_curvature_norm - 1.0),
                            sd.normal_parallel_residual}));

    out.push_back(check_cosymplectic(hyp, make_plan(cfg, small, "cosymplectic")).max_residual());
    out.push_back(check_qr3_submersion(s, make_plan(cfg, cfg.samples, "qr3")).max_residual());

    OneillStats on = oneill_stats(s, cfg, std::max(4, cfg.samples / 4));
    out.push_back(on.t_max);
    out.push_back(on.t_phi);
    out.push_back(on.a_min_unit);
    out.push_back(on.a_bracket);

    out.push_back(fiber_so3_residual(s, cfg, 8));

    SpaceFormFit fit = base_space_form(s, cfg, std::max(8, cfg.samples / 4), 2);
    out.push_back(fit.flat ? 1.0 : std::abs(fit.c - 4.0) / 4.0);
    out.push_back(fit.relative_residual);
    out.push_back(fit.sectional_spread);
    return out;
}

std::vector<double> run_flat_projection(int n, int k, const RunConfig& cfg) {
    QuaternionicSubmersionSetup s = flat_projection_setup(n, k, 1.0, cfg.fd1, cfg.fd2);
    CheckReport rep = check_quaternionic_submersion(s, make_plan(cfg, cfg.samples, "qsub"));
    std::vector<double> out;
    for (const char* name : {"holomorphy", "isometry", "omega_total", "omega_base",
                             "base_connection_defect", "hyperkaehler_total", "hyperkaehler_base"})
        out.push_back(report_row(rep, name));
    return out;
}

int param_or(const std::map<std::string, int>& params, const std::string& key, int fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

}  // namespace

Scenario build_scenario(const std::string& name, const std::map<std::string, int>& params) {
    Scenario s;
    s.name = name;
    if (name == "FlatHyperplane") {
        int m = param_or(params, "m", 1);
        if (m < 1 || m > 2)
            throw std::invalid_argument("FlatHyperplane: m must be 1 or 2");
        s.params = {{"m", m}};
        s.expected = {
            {"ac3_axioms", "induced (phi_a, xi_a, eta_a) satisfies the almost contact metric "
                           "3-structure axioms", true, 1e-10},
            {"decomposition", "J_a X splits as phi_a X plus eta_a(X) xi", true, 1e-10},
            {"cosymplectic", "nabla phi_a = nabla eta_a = nabla xi_a = 0 (3-cosymplectic)", true,
             1e-6},
            {"mixed_geodesic", "B(U, X) = 0 on vertical x horizontal pairs", true, 1e-10},
            {"vertical_bracket", "[xi_a, xi_b] closes into the vertical distribution", true,
             1e-10},
            {"qr3_submersion", "Riemannian 3-submersion: kernel, intertwining, isometry, "
                               "invariance of V and H", true, 1e-6},
            {"oneill_T", "fundamental tensor T vanishes (totally geodesic fibers)", true, 1e-6},
            {"oneill_A", "integrability tensor A vanishes (integrable horizontal space)", true,
             1e-6},
            {"base_hyperkaehler", "pushed structures are parallel on the base: nabla' J'_a = 0 "
                                  "and omega' = 0", true, 1e-6},
            {"base_flat", "pushed base metric has vanishing curvature", true, 1e-3},
        };
        s.run_residuals = [m](const RunConfig& cfg) { return run_flat_hyperplane(m, cfg); };
    } else if (name == "HopfSphere") {
        int m = param_or(params, "m", 1);
        if (m < 1 || m > 2)
            throw std::invalid_argument("HopfSphere: m must be 1 or 2");
        s.params = {{"m", m}};
        s.expected = {
            {"ac3_axioms", "induced (phi_a, xi_a, eta_a) satisfies the almost contact metric "
                           "3-structure axioms", true, 1e-8},
            {"decomposition", "J_a X splits as phi_a X plus eta_a(X) xi", true, 1e-10},
            {"mixed_geodesic", "B(U, X) = 0 on vertical x horizontal pairs", true, 1e-6},
            {"vertical_bracket", "[xi_a, xi_b] closes into the vertical distribution", true,
             1e-4},
            {"extrinsic_sphere", "totally umbilical with unit parallel mean curvature", true,
             1e-4},
            {"cosymplectic", "round-sphere structure is 3-Sasakian, not 3-cosymplectic: "
                             "nabla xi_a is order one", false, 0.5},
            {"qr3_submersion", "Riemannian 3-submersion: kernel, intertwining, isometry, "
                               "invariance of V and H", true, 1e-3},
            {"oneill_T", "fundamental tensor T vanishes (totally geodesic fibers)", true, 1e-4},
            {"oneill_T_phi", "T_(U,V) = -T_(phi_a U, phi_a V) on vertical pairs", true, 1e-4},
            {"oneill_A_nonzero", "A_X(J_a X) has unit length on unit horizontal X "
                                 "(non-integrable horizontal space)", false, 0.5},
            {"oneill_A_bracket", "A_X Y = v[X,Y]/2 on horizontal pairs", true, 1e-3},
            {"fiber_so3", "pushed bases along one fiber differ by a special orthogonal "
                          "rotation", true, 1e-4},
            {"space_form_c", "constant quaternionic sectional curvature c = 4 for the "
                             "unit-sphere pushforward", true, 0.02},
            {"space_form_residual", "curvature tensor matches the space-form model", true, 0.02},
            {"sectional_spread", "sampled quaternionic sectional curvatures agree", true, 0.02},
        };
        s.run_residuals = [m](const RunConfig& cfg) { return run_hopf_sphere(m, cfg); };
    } else if (name == "FlatQuaternionicProjection") {
        int n = param_or(params, "n", 2);
        int k = param_or(params, "k", 1);
        if (!(n > k && k >= 1 && n <= 3))
            throw std::invalid_argument(
                "FlatQuaternionicProjection: requires n > k >= 1 and n <= 3");
        s.params = {{"k", k}, {"n", n}};
        const char* refs[7] = {
            "pi_* J = J' pi_* with J' in span(sigma') ((sigma, sigma')-holomorphy)",
            "g'(pi_* X, pi_* Y) = g(X, Y) on horizontal pairs",
            "connection 1-forms of the total space vanish",
            "transferred connection 1-forms w'_a(X_*) = w_a(X) vanish",
            "nabla' J'_a matches the transferred-form model on the base",
            "total space is locally hyper-Kaehler",
            "base is locally hyper-Kaehler",
        };
        const char* names[7] = {"holomorphy",   "isometry",          "omega_total",
                                "omega_base",   "base_connection_defect",
                                "hyperkaehler_total", "hyperkaehler_base"};
        for (int i = 0; i < 7; ++i) s.expected.push_back({names[i], refs[i], true, 1e-8});
        s.run_residuals = [n, k](const RunConfig& cfg) { return run_flat_projection(n, k, cfg); };
    } else {
        throw std::invalid_argument("unknown scenario: " + name);
    }
    return s;
}

const std::vector<ExpectationRow>& expected_table(const Scenario& s) { return s.expected; }

RunResult run_scenario(const Scenario& s, const RunConfig& config) {
    config.validate();
    std::vector<double> residuals = s.run_residuals(config);
    if (residuals.size() != s.expected.size())
        throw std::logic_error("scenario runner returned a mismatched residual count");
    RunResult r;
    r.scenario = s.name;
    r.params = s.params;
    r.config = config;
    r.overall = true;
    for (size_t i = 0; i < residuals.size(); ++i) {
        const ExpectationRow& e = s.expected[i];
        ScenarioResultRow row;
        row.check = e.check;
        row.ref = e.ref;
        row.expect_pass = e.expect_pass;
        row.max_residual = residuals[i];
        row.tolerance = e.tolerance;
        row.passed = residuals[i] < e.tolerance;
        if (!row.ok()) r.overall = false;
        r.rows.push_back(std::move(row));
    }
    return r;
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string pad(const std::string& s, size_t w) {
    std::string out = s;
    while (out.size() < w) out.push_back(' ');
    return out;
}

}  // namespace

std::string to_json(const RunResult& r) {
    std::ostringstream o;
    o << "{\n";
    o << "  \"scenario\": \"" << json_escape(r.scenario) << "\",\n";
    o << "  \"params\": {";
    bool first = true;
    for (const auto& [k, v] : r.params) {
        if (!first) o << ", ";
        first = false;
        o << "\"" << json_escape(k) << "\": " << v;
    }
    o << "},\n";
    const RunConfig& c = r.config;
    o << "  \"config\": {\"samples\": " << c.samples << ", \"vectors\": " << c.vectors
      << ", \"seed\": " << c.seed << ", \"tol_alg\": " << format_g17(c.tol_alg)
      << ", \"tol_d1\": " << format_g17(c.tol_d1) << ", \"tol_d2\": " << format_g17(c.tol_d2)
      << ", \"fd_step1\": " << format_g17(c.fd1) << ", \"fd_step2\": " << format_g17(c.fd2)
      << "},\n";
    o << "  \"rows\": [\n";
    for (size_t i = 0; i < r.rows.size(); ++i) {
        const ScenarioResultRow& row = r.rows[i];
        o << "    {\"check_name\": \"" << json_escape(row.check) << "\", \"ref\": \""
          << json_escape(row.ref) << "\", \"expected\": \""
          << (row.expect_pass ? "pass" : "fail") << "\", \"passed\": "
          << (row.passed ? "true" : "false")
          << ", \"max_residual\": " << format_g17(row.max_residual)
          << ", \"tolerance\": " << format_g17(row.tolerance) << "}"
          << (i + 1 < r.rows.size() ? "," : "") << "\n";
    }
    o << "  ],\n";
    o << "  \"overall\": \"" << (r.overall ? "pass" : "fail") << "\"\n";
    o << "}\n";
    return o.str();
}

std::string to_text(const RunResult& r) {
    std::ostringstream o;
    o << "scenario: " << r.scenario << "\n";
    o << "params:  ";
    for (const auto& [k, v] : r.params) o << " " << k << "=" << v;
    o << "\n";
    const RunConfig& c = r.config;
    o << "config:   samples=" << c.samples << " vectors=" << c.vectors << " seed=" << c.seed
      << " tol_alg=" << format_g17(c.tol_alg) << " tol_d1=" << format_g17(c.tol_d1)
      << " tol_d2=" << format_g17(c.tol_d2) << " fd1=" << format_g17(c.fd1)
      << " fd2=" << format_g17(c.fd2) << "\n\n";
    o << pad("check", 24) << pad("expected", 10) << pad("verdict", 9)
      << pad("max_residual", 26) << pad("tolerance", 24) << "status\n";
    int ok_count = 0;
    for (const ScenarioResultRow& row : r.rows) {
        if (row.ok()) ++ok_count;
        o << pad(row.check, 24) << pad(row.expect_pass ? "pass" : "fail", 10)
          << pad(row.passed ? "pass" : "fail", 9) << pad(format_g17(row.max_residual), 26)
          << pad(format_g17(row.tolerance), 24) << (row.ok() ? "ok" : "MISMATCH") << "\n";
    }
    o << "\nOVERALL: " << (r.overall ? "PASS" : "FAIL") << " (" << ok_count << "/"
      << r.rows.size() << " rows match the expected verdicts)\n";
    return o.str();
}

}  // namespace qk
