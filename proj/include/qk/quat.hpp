#pragma once

#include "qk/linalg.hpp"

namespace qk::quat {

// Quaternions as R^4 with basis (1, i, j, k).

inline Vec4 mul(const Vec4& p, const Vec4& q) {
    Vec4 r;
    r[0] = p[0] * q[0] - p[1] * q[1] - p[2] * q[2] - p[3] * q[3];
    r[1] = p[0] * q[1] + p[1] * q[0] + p[2] * q[3] - p[3] * q[2];
    r[2] = p[0] * q[2] - p[1] * q[3] + p[2] * q[0] + p[3] * q[1];
    r[3] = p[0] * q[3] + p[1] * q[2] - p[2] * q[1] + p[3] * q[0];
    return r;
}

inline Vec4 conj(const Vec4& q) { return Vec4(q[0], -q[1], -q[2], -q[3]); }

inline Vec4 inv(const Vec4& q) { return conj(q) / q.squaredNorm(); }

/// Matrix of q' -> q q' (left multiplication by q).
inline Mat4 left_mult(const Vec4& q) {
    Mat4 m;
    m << q[0], -q[1], -q[2], -q[3],
         q[1],  q[0], -q[3],  q[2],
         q[2],  q[3],  q[0], -q[1],
         q[3], -q[2],  q[1],  q[0];
    return m;
}

/// Matrix of q' -> q' q (right multiplication by q).
inline Mat4 right_mult(const Vec4& q) {
    Mat4 m;
    m << q[0], -q[1], -q[2], -q[3],
         q[1],  q[0],  q[3], -q[2],
         q[2], -q[3],  q[0],  q[1],
         q[3],  q[2], -q[1],  q[0];
    return m;
}

inline Vec4 unit(int axis) {
    Vec4 e = Vec4::Zero();
    e[axis] = 1.0;
    return e;
}

}  // namespace qk::quat
