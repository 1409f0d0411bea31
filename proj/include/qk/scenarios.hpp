#pragma once

#include "qk/report.hpp"
#include "qk/submersion.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qk {

struct RunConfig {
    int samples = 32;       // sample points per check
    int vectors = 8;        // tangent vectors per point
    std::uint64_t seed = 42;
    double tol_alg = 1e-8;
    double tol_d1 = 1e-4;
    double tol_d2 = 2e-2;
    double fd1 = 1e-5;
    double fd2 = 1e-3;

    void validate() const;
    Tolerances tolerances() const { return {tol_alg, tol_d1, tol_d2}; }
};

/// One row of a scenario's expected-verdict table. `expect_pass = false`
/// marks a REQUIRED FAILURE: the run succeeds only if the check fails.
struct ExpectationRow {
    std::string check;
    std::string ref;
    bool expect_pass = true;
    double tolerance = 0.0;
};

/// A fully wired desk-scale instance: charts, triples, hypersurfaces and
/// submersion bound together, with the theorem-to-check expectation table.
struct Scenario {
    std::string name;
    std::map<std::string, int> params;
    std::vector<ExpectationRow> expected;
    /// Measured residuals, aligned with `expected`.
    std::function<std::vector<double>(const RunConfig&)> run_residuals;
};

/// Supported: FlatHyperplane (m in {1,2}), HopfSphere (m in {1,2}),
/// FlatQuaternionicProjection (n > k >= 1, n <= 3).
Scenario build_scenario(const std::string& name, const std::map<std::string, int>& params);

const std::vector<ExpectationRow>& expected_table(const Scenario& s);

struct ScenarioResultRow {
    std::string check;
    std::string ref;
    bool expect_pass = true;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;  // raw verdict: max_residual < tolerance
    bool ok() const { return passed == expect_pass; }
};

struct RunResult {
    std::string scenario;
    std::map<std::string, int> params;
    RunConfig config;
    std::vector<ScenarioResultRow> rows;
    bool overall = false;  // every row matches its expected verdict
};

RunResult run_scenario(const Scenario& s, const RunConfig& config);

std::string to_json(const RunResult& r);
std::string to_text(const RunResult& r);

// Scenario building blocks, exposed for tests and custom instances.

/// Hyperplane {x_N = 0} of R^N with an explicit constant normal e_N,
/// re-centered at `center` (which must lie on the hyperplane).
OrientedHypersurface hyperplane_hypersurface(int m, const StructureTriple& ambient,
                                             const Vec& center, double fd1 = 1e-5,
                                             double fd2 = 1e-3);

/// Orthographic patch of the unit sphere S^{N-1} centered at the unit point
/// `center`, outward normal, parameter radius `radius`.
OrientedHypersurface sphere_hypersurface(const StructureTriple& ambient, const Vec& center,
                                         double radius = 0.6, double fd1 = 1e-5,
                                         double fd2 = 1e-3);

/// Graph hypersurface x_N = f(x_1..x_{N-1}) over a centered box.
OrientedHypersurface graph_hypersurface(const StructureTriple& ambient,
                                        const std::function<double(const Vec&)>& f,
                                        double half_width = 0.5, double fd1 = 1e-5,
                                        double fd2 = 1e-3);

QR3Setup flat_hyperplane_setup(int m, double fd1 = 1e-5, double fd2 = 1e-3);
QR3Setup hopf_sphere_setup(int m, double fd1 = 1e-5, double fd2 = 1e-3);
QuaternionicSubmersionSetup flat_projection_setup(int n, int k, double metric_scale = 1.0,
                                                  double fd1 = 1e-5, double fd2 = 1e-3);

}  // namespace qk
