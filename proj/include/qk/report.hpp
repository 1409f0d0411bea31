#pragma once

#include <string>
#include <vector>

namespace qk {

struct SampleRecord {
    int index = 0;
    double residual = 0.0;
};

/// One named residual with its tolerance and verdict. `ref` identifies the
/// mathematical statement being checked; "wiring" marks pure plumbing checks.
struct CheckRow {
    std::string name;
    std::string ref;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::vector<SampleRecord> samples;

    void record(int index, double r) {
        samples.push_back({index, r});
        if (r > max_residual) max_residual = r;
    }
    void finish() { passed = max_residual < tolerance; }
};

/// Universal output of every verification: a set of named residual rows.
struct CheckReport {
    std::string check;
    std::vector<CheckRow> rows;

    bool passed() const {
        for (const auto& r : rows)
            if (!r.passed) return false;
        return true;
    }
    double max_residual() const {
        double m = 0.0;
        for (const auto& r : rows)
            if (r.max_residual > m) m = r.max_residual;
        return m;
    }
    const CheckRow* row(const std::string& name) const {
        for (const auto& r : rows)
            if (r.name == name) return &r;
        return nullptr;
    }
};

/// Formats a double with 17 significant digits; used everywhere a report
/// value is serialized so output is byte-stable.
std::string format_g17(double v);

}  // namespace qk
