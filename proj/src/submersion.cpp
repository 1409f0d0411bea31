#include "qk/submersion.hpp"

#include "qk/rng.hpp"

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace qk {

namespace {

Mat projection_differential(const SubmersionDescriptor& s, const Vec& x) {
    const int n = static_cast<int>(x.size());
    Vec q0 = s.project_ambient(x);
    Mat dpi(q0.size(), n);
    Vec xp = x, xm = x;
    for (int i = 0; i < n; ++i) {
        xp[i] = x[i] + s.fd_step;
        xm[i] = x[i] - s.fd_step;
        dpi.col(i) = (s.project_ambient(xp) - s.project_ambient(xm)) / (2.0 * s.fd_step);
        xp[i] = x[i];
        xm[i] = x[i];
    }
    return dpi;
}

}  // namespace

Vec SubmersionFrame::lift(const Vec& x_base) const {
    Eigen::PartialPivLU<Mat> lu(lift_matrix);
    Vec c = lu.solve(x_base);
    if ((lift_matrix * c - x_base).norm() > 1e-6 * std::max(1.0, x_base.norm()))
        throw numerical_error("horizontal_lift: singular restricted system");
    return hbasis * c;
}

SubmersionFrame make_frame(const SubmersionDescriptor& s, const Vec& x) {
    SubmersionFrame fr;
    fr.x = x;
    fr.chart = s.patch(x);
    fr.u = Vec::Zero(fr.chart.domain_dim);
    const int n = fr.chart.ambient_dim, d = fr.chart.domain_dim;

    Mat j = fr.chart.jacobian(fr.u);
    Eigen::HouseholderQR<Mat> qr(j);
    fr.tangent = qr.householderQ() * Mat::Identity(n, d);
    fr.dpi = projection_differential(s, x);

    Mat m = fr.dpi * fr.tangent;  // k x d
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const Vec& sv = svd.singularValues();
    double smax = sv[0];
    if (smax <= 0.0) throw numerical_error("make_frame: zero differential");
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv[i] > 1e-6 * smax) ++rank;
    if (d - rank != s.fiber_dim)
        throw numerical_error("make_frame: Ker pi_* has dimension " + std::to_string(d - rank) +
                              ", expected " + std::to_string(s.fiber_dim));
    if (rank != s.base_dim)
        throw numerical_error("make_frame: differential of the projection is not surjective");

    Mat v = svd.matrixV();  // d x d
    Mat hcoords = v.leftCols(rank);
    Mat vcoords = v.rightCols(d - rank);
    fr.hbasis = fr.tangent * hcoords;
    Mat vbasis = fr.tangent * vcoords;
    fr.hproj = fr.hbasis * fr.hbasis.transpose();
    fr.vproj = vbasis * vbasis.transpose();
    fr.lift_matrix = fr.dpi * fr.hbasis;
    return fr;
}

Mat SubmersionDescriptor::base_metric(const Vec& q) const {
    if (base_metric_mode == BaseMetricMode::Explicit) {
        if (!base_metric_explicit)
            throw std::invalid_argument("base_metric: explicit mode without a metric field");
        return base_metric_explicit(q);
    }
    SubmersionFrame fr = make_frame(*this, section_ambient(q));
    Mat g(base_dim, base_dim);
    std::vector<Vec> lifts(base_dim);
    for (int i = 0; i < base_dim; ++i) {
        Vec e = Vec::Zero(base_dim);
        e[i] = 1.0;
        lifts[i] = fr.lift(e);
    }
    for (int i = 0; i < base_dim; ++i)
        for (int k = 0; k < base_dim; ++k) g(i, k) = lifts[i].dot(lifts[k]);
    return g;
}

Vec differential(const SubmersionDescriptor& s, const Vec& x, const Vec& v) {
    return projection_differential(s, x) * v;
}

std::pair<Mat, Mat> vertical_horizontal_split(const SubmersionDescriptor& s, const Vec& x) {
    SubmersionFrame fr = make_frame(s, x);
    return {fr.vproj, fr.hproj};
}

Vec horizontal_lift(const SubmersionDescriptor& s, const Vec& x_base, const Vec& fiber_point) {
    return make_frame(s, fiber_point).lift(x_base);
}

namespace {

// Directional derivative (flat ambient) of an ambient-valued field defined on
// the frame's patch, along a tangent direction at the frame point.
Vec patch_derivative(const SubmersionFrame& fr, const std::function<Vec(const Vec&)>& field,
                     const Vec& x_tangent) {
    Vec a = fr.chart.parameter_direction(fr.u, x_tangent);
    double h = fr.chart.fd_step1 / std::max(1.0, a.norm());
    return (field(fr.u + h * a) - field(fr.u - h * a)) / (2.0 * h);
}

}  // namespace

Vec oneill_T(const SubmersionDescriptor& s, const Vec& x, const Vec& e, const Vec& f) {
    SubmersionFrame fr = make_frame(s, x);
    Vec ve = fr.vproj * e;
    Vec vf0 = fr.vproj * f, hf0 = fr.hproj * f;
    if (ve.norm() < 1e-14) return Vec::Zero(x.size());
    // Tensorial in F: extend vF and hF by projecting the constant ambient
    // vector with the pointwise vertical/horizontal projectors.
    auto vext = [&](const Vec& u) { return Vec(make_frame(s, fr.chart.embed(u)).vproj * vf0); };
    auto hext = [&](const Vec& u) { return Vec(make_frame(s, fr.chart.embed(u)).hproj * hf0); };
    Vec t = fr.hproj * patch_derivative(fr, vext, ve) + fr.vproj * patch_derivative(fr, hext, ve);
    return t;
}

Vec oneill_A(const SubmersionDescriptor& s, const Vec& x, const Vec& e, const Vec& f) {
    SubmersionFrame fr = make_frame(s, x);
    Vec he = fr.hproj * e;
    Vec vf0 = fr.vproj * f, hf0 = fr.hproj * f;
    if (he.norm() < 1e-14) return Vec::Zero(x.size());
    auto vext = [&](const Vec& u) { return Vec(make_frame(s, fr.chart.embed(u)).vproj * vf0); };
    auto hext = [&](const Vec& u) { return Vec(make_frame(s, fr.chart.embed(u)).hproj * hf0); };
    Vec a = fr.vproj * patch_derivative(fr, hext, he) + fr.hproj * patch_derivative(fr, vext, he);
    return a;
}

Vec half_vertical_bracket(const SubmersionDescriptor& s, const Vec& x, const Vec& xv,
                          const Vec& yv) {
    SubmersionFrame fr = make_frame(s, x);
    Vec x0 = fr.hproj * xv, y0 = fr.hproj * yv;
    auto xext = [&](const Vec& u) { return Vec(make_frame(s, fr.chart.embed(u)).hproj * x0); };
    auto yext = [&](const Vec& u) { return Vec(make_frame(s, fr.chart.embed(u)).hproj * y0); };
    Vec br = patch_derivative(fr, yext, x0) - patch_derivative(fr, xext, y0);
    return 0.5 * (fr.vproj * br);
}

PushedTriple push_structure(const QR3Setup& s, const Vec& fiber_point) {
    SubmersionFrame fr = make_frame(s.sub, fiber_point);
    Induced3Structure st = s.structure_at(fiber_point);
    const int k = s.sub.base_dim;

    // Precondition (invariance of H under phi_a): horizontal vectors must stay
    // horizontal, otherwise the pushdown is not well formed.
    for (int a = 0; a < 3; ++a) {
        double defect = max_abs(fr.vproj * (st.phi[a] * fr.hbasis));
        if (defect > 1e-4)
            throw numerical_error("push_structure: phi does not preserve the horizontal space");
    }

    PushedTriple out;
    out.base_point = s.sub.project_ambient(fiber_point);
    out.source_fiber_point = fiber_point;
    for (int a = 0; a < 3; ++a) {
        out.J[a] = Mat(k, k);
        for (int i = 0; i < k; ++i) {
            Vec e = Vec::Zero(k);
            e[i] = 1.0;
            out.J[a].col(i) = fr.push(st.phi[a] * fr.lift(e));
        }
    }
    return out;
}

namespace {

// Least-squares 3x3 coefficient matrix with targets_a ~ sum_b c_ab basis_b,
// under the Frobenius inner product. Returns (C, max-norm post-fit defect).
std::pair<Mat3, double> fit_basis_rotation(const std::array<Mat, 3>& targets,
                                           const std::array<Mat, 3>& basis) {
    Mat3 gram;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) gram(a, b) = basis[a].cwiseProduct(basis[b]).sum();
    Eigen::FullPivLU<Mat3> lu(gram);
    if (!lu.isInvertible()) throw numerical_error("fit_basis_rotation: degenerate basis");
    Mat3 c;
    double residual = 0.0;
    for (int a = 0; a < 3; ++a) {
        Vec3 rhs;
        for (int b = 0; b < 3; ++b) rhs[b] = targets[a].cwiseProduct(basis[b]).sum();
        Vec3 row = lu.solve(rhs);
        c.row(a) = row.transpose();
        Mat defect = targets[a];
        for (int b = 0; b < 3; ++b) defect -= row[b] * basis[b];
        residual = std::max(residual, max_abs(defect));
    }
    return {c, residual};
}

}  // namespace

FiberCompatibility fiber_compatibility(const QR3Setup& s, const Vec& p1, const Vec& p2) {
    Vec q1 = s.sub.project_ambient(p1), q2 = s.sub.project_ambient(p2);
    if ((q1 - q2).norm() > 1e-6)
        throw std::invalid_argument("fiber_compatibility: points lie on different fibers");
    PushedTriple t1 = push_structure(s, p1);
    PushedTriple t2 = push_structure(s, p2);
    auto [c, res] = fit_basis_rotation(t2.J, t1.J);
    FiberCompatibility out;
    out.c = c;
    out.fit_residual = res;
    out.orthogonality_residual = (c.transpose() * c - Mat3::Identity()).cwiseAbs().maxCoeff();
    out.det = c.determinant();
    return out;
}

CheckReport check_qr3_submersion(const QR3Setup& s, const SamplePlan& plan) {
    CheckReport rep;
    rep.check = "qr3_submersion";
    CheckRow kernel{"kernel_equals_v", "Ker pi_* = span{xi_1, xi_2, xi_3}", 0, plan.tol.d1};
    CheckRow inter{"intertwine", "pi_* phi_a = J'_a pi_* for an SO(3)-rotated local basis", 0,
                   plan.tol.d1};
    CheckRow inter_so3{"intertwine_so3", "fitted basis change lies in SO(3)", 0, plan.tol.d1};
    CheckRow isom{"isometry", "g'(pi_* X, pi_* Y) = g(X, Y) on horizontal pairs", 0, plan.tol.d1};
    CheckRow inv{"phi_invariance", "phi_a preserves V and H", 0, plan.tol.d1};
    CheckRow mixed{"mixed_geodesic", "B(U, X) = 0 for vertical U, horizontal X", 0, plan.tol.d1};

    Rng vec_rng(plan.seed ^ fnv1a("qr3_vectors"));
    int idx = 0;
    for (const Vec& u : plan.draw_points(s.sub.total)) {
        Vec x = s.sub.total.embed(u);
        SubmersionFrame fr = make_frame(s.sub, x);
        Induced3Structure st = s.structure_at(x);
        Vec q = s.sub.project_ambient(x);

        kernel.record(idx, max_abs(fr.vproj - st.vertical_proj()));

        // Def 4.1(ii): the anchored basis at pi(p) must intertwine after an
        // SO(3) rotation; the rotation is nontrivial away from the section.
        PushedTriple anchored = push_structure(s, s.sub.section_ambient(q));
        std::array<Mat, 3> lhs;
        for (int a = 0; a < 3; ++a) lhs[a] = fr.dpi * (st.phi[a] * fr.hbasis);
        std::array<Mat, 3> basis;
        for (int a = 0; a < 3; ++a) basis[a] = anchored.J[a] * (fr.dpi * fr.hbasis);
        auto [c, res] = fit_basis_rotation(lhs, basis);
        inter.record(idx, res);
        inter_so3.record(idx, (c.transpose() * c - Mat3::Identity()).cwiseAbs().maxCoeff());
        inter_so3.record(idx, std::abs(c.determinant() - 1.0));
        // Vertical vectors must be annihilated on both sides.
        for (int a = 0; a < 3; ++a)
            inter.record(idx, max_abs(fr.dpi * (st.phi[a] * (st.vertical_proj()))));

        Mat gp = s.sub.base_metric(q);
        for (int v = 0; v < plan.vectors; ++v) {
            Vec xh = fr.hproj * vec_rng.gaussian(x.size());
            Vec yh = fr.hproj * vec_rng.gaussian(x.size());
            xh /= xh.norm();
            yh /= yh.norm();
            Vec px = fr.push(xh), py = fr.push(yh);
            isom.record(idx, std::abs(px.dot(gp * py) - xh.dot(yh)));
            for (int a = 0; a < 3; ++a) inv.record(idx, (fr.vproj * (st.phi[a] * xh)).norm());
        }
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                inv.record(idx, (fr.hproj * (st.phi[a] * st.xi[b])).norm());

        // Mixed-geodesic hypothesis at this point, on its own patch.
        OrientedHypersurface hyp = s.hyp_at(x);
        SamplePlan local;
        local.points = 0;
        local.vectors = plan.vectors;
        local.seed = plan.seed ^ fnv1a("qr3_mixed") ^ static_cast<std::uint64_t>(idx);
        local.explicit_points = {Vec::Zero(hyp.chart.domain_dim)};
        local.tol = plan.tol;
        CheckReport mg = check_mixed_geodesic(hyp, local);
        mixed.record(idx, mg.row("mixed_geodesic")->max_residual);
        ++idx;
    }
    for (CheckRow* r : {&kernel, &inter, &inter_so3, &isom, &inv, &mixed}) r->finish();
    rep.rows = {kernel, inter, inter_so3, isom, inv, mixed};
    return rep;
}

CheckReport check_quaternionic_submersion(const QuaternionicSubmersionSetup& s,
                                          const SamplePlan& plan) {
    CheckReport rep;
    rep.check = "quaternionic_submersion";
    const int k = s.sub.base_dim;
    CheckRow holo{"holomorphy", "f_* J = J' f_* with J' fitted in span(sigma')", 0, plan.tol.d1};
    CheckRow isom{"isometry", "g'(pi_* X, pi_* Y) = g(X, Y) on horizontal pairs", 0, plan.tol.d1};
    CheckRow w_tot{"omega_total", "connection 1-forms of the total space", 0, plan.tol.d1};
    CheckRow w_base{"omega_base", "transferred forms w'_a(X_*) = w_a(X)", 0, plan.tol.d1};
    CheckRow base_def{"base_connection_defect",
                      "nab' J'_a matches the transferred-form model on the base", 0, plan.tol.d1};
    CheckRow hk_tot{"hyperkaehler_total", "all w_a below tolerance", 0, plan.tol.d1};
    CheckRow hk_base{"hyperkaehler_base", "all w'_a below tolerance", 0, plan.tol.d1};

    Rng vec_rng(plan.seed ^ fnv1a("qsub_vectors"));
    int idx = 0;

    // Holomorphy fit at a total point; returns the sigma'-coefficients of the
    // fitted J' for the total J = sum_a coef_a J_a, plus the defect.
    auto holo_fit = [&](const SubmersionFrame& fr, const Vec3& coef) -> std::pair<Vec3, double> {
        StructureTriple tt = s.total_triple(fr.x);
        Mat j = coef[0] * tt.J[0] + coef[1] * tt.J[1] + coef[2] * tt.J[2];
        Mat target = fr.dpi * (j * fr.tangent);
        std::array<Mat, 3> basis;
        for (int b = 0; b < 3; ++b) basis[b] = s.base_triple[b] * (fr.dpi * fr.tangent);
        Mat3 gram;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) gram(a, b) = basis[a].cwiseProduct(basis[b]).sum();
        Vec3 rhs;
        for (int b = 0; b < 3; ++b) rhs[b] = target.cwiseProduct(basis[b]).sum();
        Eigen::FullPivLU<Mat3> lu(gram);
        if (!lu.isInvertible()) throw numerical_error("holomorphy fit: degenerate sigma' basis");
        Vec3 bb = lu.solve(rhs);
        Mat defect = target;
        for (int b = 0; b < 3; ++b) defect -= bb[b] * basis[b];
        return {bb, max_abs(defect)};
    };

    for (const Vec& u : plan.draw_points(s.sub.total)) {
        Vec x = s.sub.total.embed(u);
        SubmersionFrame fr = make_frame(s.sub, x);
        Vec q = s.sub.project_ambient(x);
        Mat gp = s.sub.base_metric(q);

        for (int v = 0; v < 3 + plan.vectors / 2; ++v) {
            Vec3 coef;
            if (v < 3)
                coef = Vec3::Unit(v);
            else {
                Vec g3 = vec_rng.gaussian(3);
                coef = Vec3(g3[0], g3[1], g3[2]).normalized();
            }
            holo.record(idx, holo_fit(fr, coef).second);
        }

        for (int v = 0; v < plan.vectors; ++v) {
            Vec xh = fr.hproj * vec_rng.gaussian(x.size());
            Vec yh = fr.hproj * vec_rng.gaussian(x.size());
            xh /= xh.norm();
            yh /= yh.norm();
            isom.record(idx, std::abs(fr.push(xh).dot(gp * fr.push(yh)) - xh.dot(yh)));
        }

        // Connection forms of the total space along random tangent directions,
        // and along horizontal lifts of the base frame (the transfer rule
        // w'_a(X_*) = w_a(X) for the lift X).
        std::vector<std::pair<Vec, Vec>> dirs;
        for (int v = 0; v < 2; ++v) {
            Vec t = fr.tangent * vec_rng.unit(fr.tangent.cols());
            dirs.emplace_back(x, t);
        }
        QKFormFit ft = qk_connection_forms(s.total_triple, dirs, s.sub.fd_step, plan.tol.d1);
        w_tot.record(idx, ft.max_omega);
        hk_tot.record(idx, ft.max_omega);

        std::vector<std::pair<Vec, Vec>> lift_dirs;
        for (int i = 0; i < k; ++i) {
            Vec e = Vec::Zero(k);
            e[i] = 1.0;
            lift_dirs.emplace_back(x, fr.lift(e));
        }
        QKFormFit fb = qk_connection_forms(s.total_triple, lift_dirs, s.sub.fd_step, plan.tol.d1);
        w_base.record(idx, fb.max_omega);
        hk_base.record(idx, fb.max_omega);

        // Base nab' J' defect: finite differences of the fitted J' field over
        // the base, against the transferred-form right side.
        double h = 1e-4;
        for (int a = 0; a < 3; ++a) {
            for (int i = 0; i < k; ++i) {
                Vec qp = q, qm = q;
                qp[i] += h;
                qm[i] -= h;
                SubmersionFrame frp = make_frame(s.sub, s.sub.section_ambient(qp));
                SubmersionFrame frm = make_frame(s.sub, s.sub.section_ambient(qm));
                Vec3 bp = holo_fit(frp, Vec3::Unit(a)).first;
                Vec3 bm = holo_fit(frm, Vec3::Unit(a)).first;
                Mat dj = Mat::Zero(k, k);
                for (int b = 0; b < 3; ++b) dj += ((bp[b] - bm[b]) / (2.0 * h)) * s.base_triple[b];
                // Transferred-form model with indices mod 3.
                Vec3 w = static_cast<size_t>(i) < fb.omega.size() ? fb.omega[i]
                                                                  : Vec3(Vec3::Zero());
                Mat model = w[(a + 2) % 3] * s.base_triple[(a + 1) % 3] -
                            w[(a + 1) % 3] * s.base_triple[(a + 2) % 3];
                base_def.record(idx, max_abs(dj - model));
            }
        }
        ++idx;
    }
    for (CheckRow* r : {&holo, &isom, &w_tot, &w_base, &base_def, &hk_tot, &hk_base}) r->finish();
    rep.rows = {holo, isom, w_tot, w_base, base_def, hk_tot, hk_base};
    return rep;
}

SpaceFormFit space_form_fit(const std::vector<SpaceFormSample>& samples, std::uint64_t seed,
                            int planes_per_point, double flatness_floor) {
    if (samples.empty()) throw std::invalid_argument("space_form_fit: no samples");
    const int d = samples[0].curvature.dim;
    if (d % 4 != 0)
        throw std::invalid_argument("space_form_fit: dimension is not a multiple of 4");

    SpaceFormFit out;
    double num = 0.0, den = 0.0, res2 = 0.0, rnorm2 = 0.0, rmax = 0.0;
    std::vector<std::vector<double>> models;
    models.reserve(samples.size());

    for (const auto& sm : samples) {
        const CurvatureSample& cs = sm.curvature;
        if (cs.dim != d) throw std::invalid_argument("space_form_fit: mixed dimensions");
        const Mat& g = cs.metric;
        std::array<Mat, 3> gj;
        for (int a = 0; a < 3; ++a) gj[a] = g * sm.triple[a];

        // Lowered model tensor at c = 1, contracted as M(W,Z,X,Y) with
        // W = e_i, Z = e_j, X = e_k, Y = e_l and A_a = g J_a (g-skew):
        // M_ijkl = 1/4 { g_jl g_ki - g_kj g_li
        //                + sum_a [ -A_a(j,l) A_a(k,i) + A_a(j,k) A_a(l,i)
        //                          - 2 A_a(k,l) A_a(j,i) ] }.
        std::vector<double> m1(static_cast<size_t>(d) * d * d * d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int kk = 0; kk < d; ++kk)
                    for (int l = 0; l < d; ++l) {
                        double v = g(j, l) * g(kk, i) - g(kk, j) * g(l, i);
                        for (int a = 0; a < 3; ++a)
                            v += -gj[a](j, l) * gj[a](kk, i) + gj[a](j, kk) * gj[a](l, i) -
                                 2.0 * gj[a](kk, l) * gj[a](j, i);
                        m1[((static_cast<size_t>(i) * d + j) * d + kk) * d + l] = 0.25 * v;
                    }

        for (size_t t = 0; t < m1.size(); ++t) {
            double r = cs.riemann_low[t];
            num += r * m1[t];
            den += m1[t] * m1[t];
            rnorm2 += r * r;
            rmax = std::max(rmax, std::abs(r));
        }
        models.push_back(std::move(m1));
    }

    if (rmax < flatness_floor) {
        out.flat = true;
        out.c = 0.0;
        out.relative_residual = 0.0;
        return out;
    }
    if (den <= 0.0) throw numerical_error("space_form_fit: degenerate model");
    out.c = num / den;
    for (size_t s = 0; s < samples.size(); ++s)
        for (size_t t = 0; t < models[s].size(); ++t) {
            double e = samples[s].curvature.riemann_low[t] - out.c * models[s][t];
            res2 += e * e;
        }
    out.relative_residual = std::sqrt(res2 / rnorm2);

    // Quaternionic sectional curvatures of sampled half-quaternionic planes.
    Rng rng(seed ^ fnv1a("space_form_planes"));
    for (const auto& sm : samples) {
        const Mat& g = sm.curvature.metric;
        for (int pl = 0; pl < planes_per_point; ++pl) {
            Vec x = rng.gaussian(d);
            x /= std::sqrt(x.dot(g * x));
            Vec3 w = Vec3(rng.normal(), rng.normal(), rng.normal()).normalized();
            Vec y = Vec::Zero(d);
            for (int a = 0; a < 3; ++a) y += w[a] * (sm.triple[a] * x);
            out.quaternionic_sectional.push_back(sm.curvature.sectional(x, y));
        }
    }
    double lo = out.quaternionic_sectional[0], hi = lo, mean = 0.0;
    for (double k : out.quaternionic_sectional) {
        lo = std::min(lo, k);
        hi = std::max(hi, k);
        mean += k;
    }
    mean /= static_cast<double>(out.quaternionic_sectional.size());
    out.sectional_spread = (hi - lo) / std::abs(mean);
    return out;
}

}  // namespace qk
