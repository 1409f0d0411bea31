#include "doctest.h"

#include "qk/quat.hpp"
#include "qk/rng.hpp"
#include "qk/structure.hpp"

#include <cmath>

using namespace qk;

TEST_CASE("left triple acts by quaternion left multiplication") {
    StructureTriple t = make_structure_triple(1, Convention::Left);
    Vec e1 = Vec::Zero(4), e2 = Vec::Zero(4), e3 = Vec::Zero(4), e4 = Vec::Zero(4);
    e1[0] = e2[1] = e3[2] = e4[3] = 1.0;
    CHECK(max_abs(t.J[0] * e1 - e2) == 0.0);     // i * 1 = i
    CHECK(max_abs(t.J[1] * e1 - e3) == 0.0);     // j * 1 = j
    CHECK(max_abs(t.J[0] * (t.J[1] * e1) - e4) == 0.0);  // i j = k
    CHECK(max_abs(t.J[2] * e1 - e4) == 0.0);
}

TEST_CASE("triple axioms hold exactly for both conventions, m = 1..3") {
    for (int m = 1; m <= 3; ++m) {
        for (Convention c : {Convention::Left, Convention::Right}) {
            StructureTriple t = make_structure_triple(m, c);
            CheckReport rep = check_structure_axioms(t, Mat::Identity(4 * m, 4 * m));
            CHECK(rep.passed());
            CHECK(rep.max_residual() == 0.0);
        }
    }
}

TEST_CASE("naive right-multiplication ordering (i, j, k) breaks the product axiom by exactly 2") {
    StructureTriple t;
    t.dim = 4;
    t.J[0] = quat::right_mult(quat::unit(1));
    t.J[1] = quat::right_mult(quat::unit(2));
    t.J[2] = quat::right_mult(quat::unit(3));
    // Right multiplications compose in reverse order: R_i R_j = R_{ji} = R_{-k}.
    CHECK(max_abs(t.J[0] * t.J[1] - t.J[2]) == 2.0);
    CheckReport rep = check_structure_axioms(t, Mat::Identity(4, 4));
    CHECK(!rep.passed());
    CHECK(rep.row("J_product")->max_residual == 2.0);
    CHECK(rep.row("J_square")->passed);  // squares are still -Id
}

TEST_CASE("flipping the sign of J_3 is detected with residual 2") {
    StructureTriple t = make_structure_triple(1, Convention::Left);
    t.J[2] = -t.J[2];
    CheckReport rep = check_structure_axioms(t, Mat::Identity(4, 4));
    CHECK(!rep.passed());
    CHECK(rep.row("J_product")->max_residual == 2.0);
}

TEST_CASE("metric compatibility failure is reported for a stretched metric") {
    StructureTriple t = make_structure_triple(1, Convention::Left);
    Mat g = Mat::Identity(4, 4);
    g(0, 0) = 2.0;  // J_a no longer orthogonal for this metric
    CheckReport rep = check_structure_axioms(t, g);
    CHECK(!rep.passed());
    // The matrix identity defect J^T g J - g has unit entries; vector
    // contractions can only enlarge the recorded maximum.
    CHECK(rep.row("metric_compat")->max_residual >= 1.0);
}

TEST_CASE("axiom check validates the metric argument") {
    StructureTriple t = make_structure_triple(1, Convention::Left);
    CHECK_THROWS_AS(check_structure_axioms(t, Mat::Identity(5, 5)), std::invalid_argument);
    Mat g = Mat::Identity(4, 4);
    g(0, 1) = 0.5;  // not symmetric
    CHECK_THROWS_AS(check_structure_axioms(t, g), std::invalid_argument);
}

TEST_CASE("so3_rotate: identity leaves the triple unchanged") {
    StructureTriple t = make_structure_triple(2, Convention::Left);
    StructureTriple r = so3_rotate(t, Mat3::Identity());
    for (int a = 0; a < 3; ++a) CHECK(max_abs(r.J[a] - t.J[a]) == 0.0);
}

TEST_CASE("so3_rotate: quarter turn about the first axis preserves the axioms") {
    StructureTriple t = make_structure_triple(1, Convention::Left);
    Mat3 c;
    c << 1, 0, 0,
         0, 0, -1,
         0, 1, 0;
    StructureTriple r = so3_rotate(t, c);
    CHECK(max_abs(r.J[0] - t.J[0]) == 0.0);
    CHECK(max_abs(r.J[1] + t.J[2]) == 0.0);
    CHECK(max_abs(r.J[2] - t.J[1]) == 0.0);
    CHECK(check_structure_axioms(r, Mat::Identity(4, 4)).passed());
}

TEST_CASE("so3_rotate rejects a reflection") {
    StructureTriple t = make_structure_triple(1, Convention::Left);
    Mat3 c = Mat3::Identity();
    c(2, 2) = -1.0;  // det = -1
    CHECK_THROWS_AS(so3_rotate(t, c), std::invalid_argument);
}

TEST_CASE("so3_rotate: 100 seeded random rotations keep residuals below 1e-12") {
    StructureTriple t = make_structure_triple(2, Convention::Right);
    Mat g = Mat::Identity(8, 8);
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        StructureTriple r = so3_rotate(t, rng.so3());
        CheckReport rep = check_structure_axioms(r, g, 1e-12);
        CHECK(rep.passed());
    }
}

TEST_CASE("quaternionic plane of e_1 spans all of R^4 when m = 1") {
    StructureTriple t = make_structure_triple(1, Convention::Left);
    Vec e1 = Vec::Zero(4);
    e1[0] = 1.0;
    Mat q = quaternionic_plane(t, e1);
    CHECK(max_abs(q * q.transpose() - Mat::Identity(4, 4)) < 1e-12);
    Vec e2 = Vec::Zero(4);
    e2[1] = 1.0;
    CHECK(half_quaternionic(t, e1, e2));
}

TEST_CASE("quaternionic planes in H^2 distinguish the two blocks") {
    StructureTriple t = make_structure_triple(2, Convention::Left);
    Vec e1 = Vec::Zero(8), e5 = Vec::Zero(8);
    e1[0] = 1.0;
    e5[4] = 1.0;
    CHECK(!half_quaternionic(t, e1, e5));
    CHECK(half_quaternionic(t, e1, Vec(t.J[1] * e1)));
    // Q(J_a X) = Q(X) for random X.
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        Vec x = rng.unit(8);
        for (int a = 0; a < 3; ++a) CHECK(half_quaternionic(t, x, Vec(t.J[a] * x)));
    }
    CHECK_THROWS_AS(quaternionic_plane(t, Vec(Vec::Zero(8))), std::invalid_argument);
}

TEST_CASE("connection-form fit: constant triple field has vanishing forms") {
    StructureTriple t = make_structure_triple(1, Convention::Left);
    TripleField field = [t](const Vec&) { return t; };
    Rng rng(11);
    std::vector<std::pair<Vec, Vec>> samples;
    for (int i = 0; i < 4; ++i) samples.emplace_back(rng.gaussian(4), rng.unit(4));
    QKFormFit fit = qk_connection_forms(field, samples);
    CHECK(fit.max_omega < 1e-10);
    CHECK(fit.residual < 1e-10);
    CHECK(fit.hyperkaehler);
}

TEST_CASE("connection-form fit recovers a unit form from a rotating triple field") {
    StructureTriple t0 = make_structure_triple(1, Convention::Left);
    // Rotate about the first so(3) axis with angle = first coordinate, so
    // w = (1, 0, 0) along e_1 at t = 0.
    TripleField field = [t0](const Vec& p) {
        double s = p[0];
        Mat3 c;
        c << 1, 0, 0,
             0, std::cos(s), std::sin(s),
             0, -std::sin(s), std::cos(s);
        return so3_rotate(t0, c);
    };
    Vec origin = Vec::Zero(1), dir = Vec::Ones(1);
    QKFormFit fit = qk_connection_forms(field, {{origin, dir}});
    CHECK(fit.omega[0][0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(std::abs(fit.omega[0][1]) < 1e-6);
    CHECK(std::abs(fit.omega[0][2]) < 1e-6);
    CHECK(fit.residual < 1e-6);
    CHECK(!fit.hyperkaehler);
}

TEST_CASE("connection-form fit flags a derivative outside the model span") {
    StructureTriple t = make_structure_triple(1, Convention::Left);
    TripleField field = [t](const Vec&) { return t; };
    const double eps = 0.01;
    Mat s = Mat::Zero(4, 4);
    s(0, 0) = 1.0;
    s(1, 2) = s(2, 1) = 0.5;  // symmetric, outside the span of skew products
    TripleDerivative oracle = [eps, s](const Vec&, const Vec&, int) { return Mat(eps * s); };
    Vec origin = Vec::Zero(4), dir = Vec::Ones(4);
    QKFormFit fit = qk_connection_forms(field, {{origin, dir}}, 1e-5, 1e-4, oracle);
    CHECK(fit.residual >= eps / 2.0);
    CHECK(!fit.hyperkaehler);
}
