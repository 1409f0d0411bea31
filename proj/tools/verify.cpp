#include "qk/scenarios.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Deterministic numerical verifier for quaternionic 3-structure scenarios"};
    app.footer("scenarios: FlatHyperplane [--m K], HopfSphere [--m K], "
               "FlatQuaternionicProjection [--n K --k K]");

    std::string scenario;
    app.add_option("scenario", scenario, "scenario name")->required();

    int m = -1, n = -1, k = -1;
    app.add_option("--m", m, "quaternionic size for FlatHyperplane / HopfSphere");
    app.add_option("--n", n, "total quaternionic dimension for FlatQuaternionicProjection");
    app.add_option("--k", k, "base quaternionic dimension for FlatQuaternionicProjection");

    qk::RunConfig cfg;
    app.add_option("--samples", cfg.samples, "sample points per check");
    app.add_option("--vectors", cfg.vectors, "tangent vectors per point");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--tol-alg", cfg.tol_alg, "algebraic tolerance");
    app.add_option("--tol-d1", cfg.tol_d1, "first-derivative tolerance");
    app.add_option("--tol-d2", cfg.tol_d2, "second-derivative tolerance");
    app.add_option("--fd1", cfg.fd1, "first-derivative step");
    app.add_option("--fd2", cfg.fd2, "second-derivative step");

    std::string format = "text";
    std::string out_path;
    app.add_option("--format", format, "report format")
        ->check(CLI::IsMember({"text", "json"}));
    app.add_option("--out", out_path, "write the report to this path instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    std::map<std::string, int> params;
    if (m >= 0) params["m"] = m;
    if (n >= 0) params["n"] = n;
    if (k >= 0) params["k"] = k;

    try {
        cfg.validate();
        qk::Scenario s = qk::build_scenario(scenario, params);
        qk::RunResult r = qk::run_scenario(s, cfg);
        std::string report = format == "json" ? qk::to_json(r) : qk::to_text(r);
        if (out_path.empty()) {
            std::cout << report;
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) {
                std::cerr << "error: cannot open output path: " << out_path << "\n";
                return 2;
            }
            f << report;
        }
        return r.overall ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n" << app.help() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
