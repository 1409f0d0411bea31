#include "doctest.h"

#include "qk/quat.hpp"
#include "qk/rng.hpp"
#include "qk/scenarios.hpp"
#include "qk/submersion.hpp"

#include <cmath>

using namespace qk;

namespace {

// Chart of the fiber {p lambda : |lambda| = 1} of the quaternionic Hopf map
// through a unit p in R^{4(m+1)}, ambient coordinates.
Chart fiber_chart(const Vec& p) {
    Chart c;
    c.domain_dim = 3;
    c.ambient_dim = static_cast<int>(p.size());
    c.box_lo = Vec::Constant(3, -0.5);
    c.box_hi = Vec::Constant(3, 0.5);
    c.embed = [p](const Vec& u) {
        Vec4 lam;
        lam << std::sqrt(1.0 - u.squaredNorm()), u[0], u[1], u[2];
        Vec x(p.size());
        for (int j = 0; j * 4 < p.size(); ++j)
            x.segment(4 * j, 4) = quat::mul(Vec4(p.segment(4 * j, 4)), lam);
        return x;
    };
    return c;
}

}  // namespace

TEST_CASE("differential: coordinate projection is its own differential") {
    QR3Setup s = flat_hyperplane_setup(1);
    Vec x = Vec::Zero(8);
    CHECK(max_abs(differential(s.sub, x, Vec::Unit(8, 0)) - Vec::Unit(4, 0)) < 1e-9);

    // Linearity.
    Rng rng(3);
    Vec a = rng.gaussian(8), b = rng.gaussian(8);
    Vec lhs = differential(s.sub, x, Vec(2.0 * a - 3.0 * b));
    Vec rhs = 2.0 * differential(s.sub, x, a) - 3.0 * differential(s.sub, x, b);
    CHECK(max_abs(lhs - rhs) < 1e-6);
}

TEST_CASE("differential kills the induced Reeb fields of the Hopf fibration") {
    QR3Setup s = hopf_sphere_setup(1);
    Rng rng(5);
    for (int i = 0; i < 3; ++i) {
        Vec u = rng.in_box(s.sub.total.box_lo, s.sub.total.box_hi, 0.05);
        Vec x = s.sub.total.embed(u);
        Induced3Structure st = s.structure_at(x);
        for (int a = 0; a < 3; ++a)
            CHECK(differential(s.sub, x, st.xi[a]).norm() < 1e-6);
    }
}

TEST_CASE("vertical/horizontal split is a complementary projector pair") {
    QR3Setup hopf = hopf_sphere_setup(1);
    Rng rng(7);
    Vec u = rng.in_box(hopf.sub.total.box_lo, hopf.sub.total.box_hi, 0.05);
    Vec x = hopf.sub.total.embed(u);
    auto [v, h] = vertical_horizontal_split(hopf.sub, x);
    Mat p = tangent_projector(hopf.sub.patch(x), Vec::Zero(7));
    CHECK(max_abs(v + h - p) < 1e-9);
    CHECK(max_abs(v * v - v) < 1e-9);
    CHECK(max_abs(v * h) < 1e-9);
    // The vertical space is exactly the span of the Reeb fields.
    Induced3Structure st = hopf.structure_at(x);
    CHECK(max_abs(v - st.vertical_proj()) < 1e-6);

    QR3Setup flat = flat_hyperplane_setup(1);
    auto [vf, hf] = vertical_horizontal_split(flat.sub, Vec(Vec::Zero(8)));
    Mat expected = Mat::Zero(8, 8);
    for (int i = 4; i < 7; ++i) expected(i, i) = 1.0;
    CHECK(max_abs(vf - expected) < 1e-9);
}

TEST_CASE("horizontal lift: coordinate projection and Hopf fibration") {
    QR3Setup flat = flat_hyperplane_setup(1);
    CHECK(max_abs(horizontal_lift(flat.sub, Vec(Vec::Unit(4, 0)), Vec(Vec::Zero(8))) -
                  Vec::Unit(8, 0)) < 1e-9);

    QR3Setup hopf = hopf_sphere_setup(1);
    Rng rng(11);
    Vec u = rng.in_box(hopf.sub.total.box_lo, hopf.sub.total.box_hi, 0.05);
    Vec x = hopf.sub.total.embed(u);
    Induced3Structure st = hopf.structure_at(x);
    for (int trial = 0; trial < 32; ++trial) {
        Vec xb = rng.unit(4);
        Vec lift = horizontal_lift(hopf.sub, xb, x);
        for (int a = 0; a < 3; ++a) CHECK(std::abs(lift.dot(st.xi[a])) < 1e-8);
        CHECK(std::abs(lift.dot(st.normal)) < 1e-8);
        CHECK(max_abs(differential(hopf.sub, x, lift) - xb) < 1e-6);  // round trip
    }
}

TEST_CASE("O'Neill tensors vanish for the flat product projection") {
    QR3Setup s = flat_hyperplane_setup(1);
    Rng rng(13);
    Vec x = Vec::Zero(8);
    for (int i = 0; i < 4; ++i) {
        Vec e = rng.gaussian(8), f = rng.gaussian(8);
        e[7] = f[7] = 0.0;
        CHECK(oneill_T(s.sub, x, e, f).norm() < 1e-6);
        CHECK(oneill_A(s.sub, x, e, f).norm() < 1e-6);
    }
}

TEST_CASE("Hopf fibration: A_X Y = v[X,Y]/2 and g(A_X Y, xi_a) = g(phi_a X, Y)") {
    QR3Setup s = hopf_sphere_setup(1);
    Rng rng(17);
    Vec u = rng.in_box(s.sub.total.box_lo, s.sub.total.box_hi, 0.05);
    Vec x = s.sub.total.embed(u);
    SubmersionFrame fr = make_frame(s.sub, x);
    Induced3Structure st = s.structure_at(x);
    for (int trial = 0; trial < 4; ++trial) {
        Vec xh = (fr.hproj * rng.gaussian(8)).normalized();
        Vec yh = (fr.hproj * rng.gaussian(8)).normalized();
        Vec a = oneill_A(s.sub, x, xh, yh);
        CHECK((a - half_vertical_bracket(s.sub, x, xh, yh)).norm() < 1e-3);
        for (int al = 0; al < 3; ++al)
            CHECK(a.dot(st.xi[al]) ==
                  doctest::Approx((st.phi[al] * xh).dot(yh)).epsilon(1e-3));
        // On the quaternionic pair (X, phi_a X) the tensor has unit length.
        for (int al = 0; al < 3; ++al)
            CHECK(oneill_A(s.sub, x, xh, Vec(st.phi[al] * xh)).norm() ==
                  doctest::Approx(1.0).epsilon(1e-3));
    }
}

TEST_CASE("Hopf fibers are totally geodesic: T agrees with the fiber shape oracle") {
    QR3Setup s = hopf_sphere_setup(1);
    Rng rng(19);
    Vec u = rng.in_box(s.sub.total.box_lo, s.sub.total.box_hi, 0.05);
    Vec p = s.sub.total.embed(u);
    SubmersionFrame fr = make_frame(s.sub, p);

    // Oracle: the fiber is a great 3-sphere; its flat-ambient second
    // fundamental form is -g(U,V) p, so its horizontal component (the shape
    // seen inside the total sphere, which is what T measures) vanishes.
    Chart fc = fiber_chart(p);
    ShapeData sd = classify_umbilical(fc, {Vec::Zero(3)});
    CHECK(sd.extrinsic_sphere);
    CHECK(std::abs(sd.mean_curvature_norm - 1.0) < 1e-4);

    for (int trial = 0; trial < 4; ++trial) {
        Vec uu = (fr.vproj * rng.gaussian(8)).normalized();
        Vec vv = (fr.vproj * rng.gaussian(8)).normalized();
        Vec b = second_fundamental_form(fc, Vec::Zero(3), uu, vv);
        CHECK((fr.hproj * b).norm() < 1e-3);
        Vec t = oneill_T(s.sub, p, uu, vv);
        CHECK((t - fr.hproj * b).norm() < 1e-3);
        CHECK(t.norm() < 1e-4);
    }
}

TEST_CASE("basic fields: the pushed horizontal connection is fiber independent") {
    QR3Setup s = hopf_sphere_setup(1);
    Vec q = 0.2 * Vec::Ones(4);
    Vec p1 = s.sub.section_ambient(q);
    Vec4 lam = Vec4(0.8, 0.4, -0.3, 0.33).normalized();
    Vec p2(8);
    for (int j = 0; j < 2; ++j) p2.segment(4 * j, 4) = quat::mul(Vec4(p1.segment(4 * j, 4)), lam);

    Rng rng(23);
    Vec xb = rng.unit(4), yb = rng.unit(4);
    auto pushed_nabla = [&](const Vec& p) {
        SubmersionFrame fr = make_frame(s.sub, p);
        const Chart& c = fr.chart;
        VectorField liftx = [&s, &c, xb](const Vec& uu) {
            return Vec(make_frame(s.sub, c.embed(uu)).lift(xb));
        };
        VectorField lifty = [&s, &c, yb](const Vec& uu) {
            return Vec(make_frame(s.sub, c.embed(uu)).lift(yb));
        };
        Vec nab = levi_civita(c, Vec::Zero(c.domain_dim), liftx, lifty);
        return Vec(differential(s.sub, p, Vec(fr.hproj * nab)));
    };
    CHECK(max_abs(pushed_nabla(p1) - pushed_nabla(p2)) < 1e-4);
}

TEST_CASE("push_structure: flat projection reproduces the standard triple exactly") {
    QR3Setup s = flat_hyperplane_setup(1);
    PushedTriple pt = push_structure(s, Vec(Vec::Zero(8)));
    StructureTriple expected = make_structure_triple(1, Convention::Left);
    for (int a = 0; a < 3; ++a) CHECK(max_abs(pt.J[a] - expected.J[a]) < 1e-9);
}

TEST_CASE("push_structure on the Hopf fibration yields a valid triple for the pushed metric") {
    QR3Setup s = hopf_sphere_setup(1);
    Vec q = Vec::Zero(4);
    PushedTriple pt = push_structure(s, s.sub.section_ambient(q));
    StructureTriple t{4, pt.J};
    CheckReport rep = check_structure_axioms(t, s.sub.base_metric(q), 1e-4);
    CHECK(rep.passed());
}

TEST_CASE("fiber compatibility: same point, flat fibers, and input validation") {
    QR3Setup flat = flat_hyperplane_setup(1);
    Vec p1 = Vec::Zero(8);
    FiberCompatibility same = fiber_compatibility(flat, p1, p1);
    CHECK(max_abs(Mat(same.c) - Mat(Mat3::Identity())) < 1e-12);
    CHECK(same.fit_residual < 1e-12);

    Vec p2 = Vec::Zero(8);
    p2[4] = 0.3;
    p2[5] = -0.2;
    p2[6] = 0.1;
    FiberCompatibility shifted = fiber_compatibility(flat, p1, p2);
    CHECK(max_abs(Mat(shifted.c) - Mat(Mat3::Identity())) < 1e-8);
    CHECK(std::abs(shifted.det - 1.0) < 1e-8);

    Vec other = Vec::Zero(8);
    other[0] = 0.4;
    CHECK_THROWS_AS(fiber_compatibility(flat, p1, other), std::invalid_argument);
}

TEST_CASE("QR 3-submersion check passes on both model fibrations") {
    SamplePlan plan;
    plan.points = 4;
    plan.vectors = 4;
    CheckReport flat = check_qr3_submersion(flat_hyperplane_setup(1), plan);
    CHECK(flat.passed());
    CHECK(flat.max_residual() < 1e-6);

    CheckReport hopf = check_qr3_submersion(hopf_sphere_setup(1), plan);
    CHECK(hopf.passed());
    CHECK(hopf.max_residual() < 1e-3);
}

TEST_CASE("a mismatched base metric breaks the isometry row") {
    QR3Setup s = hopf_sphere_setup(1);
    s.sub.base_metric_mode = BaseMetricMode::Explicit;
    s.sub.base_metric_explicit = [](const Vec&) { return Mat(Mat::Identity(4, 4)); };
    SamplePlan plan;
    plan.points = 4;
    plan.vectors = 4;
    CheckReport rep = check_qr3_submersion(s, plan);
    CHECK(rep.row("isometry")->max_residual > 0.1);
    CHECK(!rep.row("isometry")->passed);
}

TEST_CASE("quaternionic submersion: flat model passes, rotated base basis still passes") {
    SamplePlan plan;
    plan.points = 4;
    plan.vectors = 4;
    QuaternionicSubmersionSetup s = flat_projection_setup(2, 1);
    CheckReport rep = check_quaternionic_submersion(s, plan);
    CHECK(rep.passed());
    CHECK(rep.max_residual() < 1e-8);

    // Holomorphy only requires J' in the span of sigma'; a rotated basis of
    // the same bundle must not change any verdict.
    Rng rng(29);
    StructureTriple base{4, s.base_triple};
    s.base_triple = so3_rotate(base, rng.so3()).J;
    CheckReport rotated = check_quaternionic_submersion(s, plan);
    CHECK(rotated.passed());
    CHECK(rotated.row("holomorphy")->max_residual < 1e-8);
    CHECK(rotated.row("omega_base")->max_residual < 1e-8);
}

TEST_CASE("a scaled base metric breaks the quaternionic submersion isometry") {
    SamplePlan plan;
    plan.points = 4;
    plan.vectors = 4;
    QuaternionicSubmersionSetup s = flat_projection_setup(2, 1, 4.0);
    CheckReport rep = check_quaternionic_submersion(s, plan);
    CHECK(rep.row("isometry")->max_residual >= 0.5);
    CHECK(!rep.passed());
}

TEST_CASE("space-form fit: flat metric short-circuits, bad dimension is rejected") {
    QR3Setup flat = flat_hyperplane_setup(1);
    MetricField g = [&flat](const Vec& q) { return flat.sub.base_metric(q); };
    SpaceFormSample sm;
    sm.curvature = riemann_tensor(g, Vec(Vec::Zero(4)));
    sm.triple = make_structure_triple(1, Convention::Left).J;
    SpaceFormFit fit = space_form_fit({sm});
    CHECK(fit.flat);
    CHECK(fit.c == 0.0);

    MetricField flat2 = [](const Vec&) { return Mat(Mat::Identity(2, 2)); };
    SpaceFormSample bad;
    bad.curvature = riemann_tensor(flat2, Vec(Vec::Zero(2)));
    bad.triple = make_structure_triple(1, Convention::Left).J;
    CHECK_THROWS_AS(space_form_fit({bad}), std::invalid_argument);
    CHECK_THROWS_AS(space_form_fit({}), std::invalid_argument);
}
