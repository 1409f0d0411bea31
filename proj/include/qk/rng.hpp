#pragma once

#include "qk/linalg.hpp"

#include <cmath>
#include <cstdint>

namespace qk {

/// Deterministic sample generator. splitmix64 for the integer stream and
/// Box-Muller for normal deviates, so identically seeded runs produce
/// identical samples on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    Vec gaussian(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

    Vec unit(int n) {
        Vec v = gaussian(n);
        double nn = v.norm();
        while (nn < 1e-12) {
            v = gaussian(n);
            nn = v.norm();
        }
        return v / nn;
    }

    /// Uniform point in a box, shrunk toward the center by `margin` per side.
    Vec in_box(const Vec& lo, const Vec& hi, double margin = 0.0) {
        Vec u(lo.size());
        for (int i = 0; i < lo.size(); ++i) {
            double a = lo[i] + margin, b = hi[i] - margin;
            u[i] = a + (b - a) * uniform();
        }
        return u;
    }

    /// Random rotation via normalized quaternion conjugation.
    Mat3 so3() {
        Vec q = unit(4);
        double w = q[0], x = q[1], y = q[2], z = q[3];
        Mat3 r;
        r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
            2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
            2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
        return r;
    }

  private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

/// FNV-1a, used to derive per-check substream seeds from a run seed.
inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace qk
