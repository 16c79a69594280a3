#include "adgi/geometry.hpp"

#include <cmath>

namespace adgi {

static inline float signNotZero(float v) { return v >= 0.f ? 1.f : -1.f; }

Vec2 octaEncode(Vec3 d) {
    float s = std::fabs(d.x) + std::fabs(d.y) + std::fabs(d.z);
    float px = d.x / s, py = d.y / s;
    if (d.z < 0.f) {
        float fx = (1.f - std::fabs(py)) * signNotZero(px);
        float fy = (1.f - std::fabs(px)) * signNotZero(py);
        px = fx;
        py = fy;
    }
    // Half-open [0,1): the fold seam at u or v == 1 belongs to the wrapped side.
    const float below1 = 0.99999994f;
    return {std::min(px * 0.5f + 0.5f, below1), std::min(py * 0.5f + 0.5f, below1)};
}

Vec3 octaDecode(Vec2 uv) {
    float px = uv.x * 2.f - 1.f;
    float py = uv.y * 2.f - 1.f;
    float z = 1.f - std::fabs(px) - std::fabs(py);
    float x = px, y = py;
    if (z < 0.f) {
        x = (1.f - std::fabs(py)) * signNotZero(px);
        y = (1.f - std::fabs(px)) * signNotZero(py);
    }
    return normalize(Vec3{x, y, z});
}

Vec3 texelDirection(int res, int i, int j) {
    float inv = 1.f / static_cast<float>(res);
    return octaDecode({(static_cast<float>(i) + 0.5f) * inv, (static_cast<float>(j) + 0.5f) * inv});
}

void directionTexel(int res, Vec3 d, int& i, int& j) {
    Vec2 uv = octaEncode(d);
    i = std::min(static_cast<int>(uv.x * static_cast<float>(res)), res - 1);
    j = std::min(static_cast<int>(uv.y * static_cast<float>(res)), res - 1);
}

void octaWrapTexel(int& x, int& y, int W, int H) {
    // Each pass resolves one edge crossing; corners need two.
    for (int guard = 0; guard < 4 && (x < 0 || x >= W || y < 0 || y >= H); ++guard) {
        if (x < 0) {
            x = -1 - x;
            y = H - 1 - y;
        } else if (x >= W) {
            x = 2 * W - 1 - x;
            y = H - 1 - y;
        } else if (y < 0) {
            y = -1 - y;
            x = W - 1 - x;
        } else if (y >= H) {
            y = 2 * H - 1 - y;
            x = W - 1 - x;
        }
    }
}

int octantOfTexel(int res, int i, int j) {
    // Texel center in octahedral plane coordinates; dyadic, so exact in float.
    float px = (2.f * static_cast<float>(i) + 1.f) / static_cast<float>(res) - 1.f;
    float py = (2.f * static_cast<float>(j) + 1.f) / static_cast<float>(res) - 1.f;
    float z = 1.f - std::fabs(px) - std::fabs(py);
    int zbit;
    if (z == 0.f) {
        // Center sits exactly on the fold. Alternate along the seam so each
        // octant owns exactly res*res/8 texels.
        zbit = i & 1;
    } else {
        zbit = z > 0.f ? 1 : 0;
    }
    // Fold transform preserves the x/y signs, so px/py signs are the
    // direction signs on both branches.
    return (px >= 0.f ? 1 : 0) | (py >= 0.f ? 2 : 0) | (zbit ? 4 : 0);
}

namespace {
// octant -> 4x2 cell of the octahedral square holding its center direction.
constexpr int kOctantCellU[8] = {0, 3, 0, 3, 1, 2, 1, 2};
constexpr int kOctantCellV[8] = {0, 0, 1, 1, 0, 0, 1, 1};
constexpr int kCellOctant[2][4] = {{0, 4, 5, 1}, {2, 6, 7, 3}};
} // namespace

void octantCell(int octant, int& cu, int& cv) {
    cu = kOctantCellU[octant];
    cv = kOctantCellV[octant];
}

int cellOctant(int cu, int cv) { return kCellOctant[cv][cu]; }

IVec3 ProbeGrid::nearestProbe(Vec3 p) const {
    IVec3 c;
    for (int a = 0; a < 3; ++a) {
        float t = (p[a] - origin[a]) / spacing[a];
        int i = static_cast<int>(std::lround(t));
        c[a] = std::min(std::max(i, 0), dims[a] - 1);
    }
    return c;
}

Cage cageWeights(const ProbeGrid& grid, Vec3 p) {
    int base[3];
    float frac[3];
    for (int a = 0; a < 3; ++a) {
        float t = (p[a] - grid.origin[a]) / grid.spacing[a];
        int i = static_cast<int>(std::floor(t));
        float f = t - static_cast<float>(i);
        if (i < 0) {
            i = 0;
            f = 0.f;
        }
        if (i > grid.dims[a] - 2) {
            // Degenerate axis (dims==1) collapses to the single plane.
            if (grid.dims[a] == 1) {
                i = 0;
                f = 0.f;
            } else {
                i = grid.dims[a] - 2;
                f = 1.f;
            }
        }
        base[a] = i;
        frac[a] = f;
    }
    Cage cage;
    for (int c = 0; c < 8; ++c) {
        int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
        IVec3 idx{std::min(base[0] + dx, grid.dims.x - 1),
                  std::min(base[1] + dy, grid.dims.y - 1),
                  std::min(base[2] + dz, grid.dims.z - 1)};
        cage.probe[c] = grid.linearIndex(idx);
        float wx = dx ? frac[0] : 1.f - frac[0];
        float wy = dy ? frac[1] : 1.f - frac[1];
        float wz = dz ? frac[2] : 1.f - frac[2];
        cage.weight[c] = wx * wy * wz;
    }
    return cage;
}

void Camera::basis(Vec3& right, Vec3& upOrtho, Vec3& fwd) const {
    fwd = normalize(forward);
    right = cross(fwd, up);
    if (lengthSq(right) < 1e-10f) right = cross(fwd, Vec3{1, 0, 0});
    right = normalize(right);
    upOrtho = cross(right, fwd);
}

bool FrustumVolumes::insideClip(Vec3 p, float m) const {
    Vec3 right, upv, fwd;
    camera.basis(right, upv, fwd);
    Vec3 d = p - camera.position;
    float vz = dot(d, fwd);
    if (vz < 0.f) return false;
    float ty = std::tan(camera.vfovDeg * 0.5f * 3.14159265358979f / 180.f);
    float tx = ty * camera.aspect;
    return std::fabs(dot(d, right)) <= m * tx * vz && std::fabs(dot(d, upv)) <= m * ty * vz;
}

VolumeClass FrustumVolumes::test(Vec3 p) const {
    float fc = fCamera(p, camera.position, k);
    if (fc >= fcInner && insideClip(p, clipInner)) return VolumeClass::InsideVin;
    if (fc >= fcOuter && insideClip(p, clipOuter)) return VolumeClass::Between;
    return VolumeClass::Outside;
}

Classification classifyProbes(const ProbeGrid& grid, const FrustumVolumes& volumes) {
    Classification cl;
    int n = grid.probeCount();
    cl.cls.resize(n);
    cl.voutLo = grid.dims; // empty until first hit
    cl.voutHi = IVec3{-1, -1, -1};
    for (int idx = 0; idx < n; ++idx) {
        IVec3 c = grid.coordOf(idx);
        Vec3 p = grid.probePosition(c);
        VolumeClass v = volumes.test(p);
        cl.cls[idx] = static_cast<uint8_t>(v);
        if (v != VolumeClass::Outside) {
            cl.voutProbes.push_back(idx);
            for (int a = 0; a < 3; ++a) {
                cl.voutLo[a] = std::min(cl.voutLo[a], c[a]);
                cl.voutHi[a] = std::max(cl.voutHi[a], c[a]);
            }
            if (v == VolumeClass::InsideVin) {
                cl.vinProbes.push_back(idx);
                cl.vinAabb.extend(p);
            } else {
                cl.betweenProbes.push_back(idx);
            }
        }
    }
    if (!cl.vinAabb.valid()) cl.vinAabb = grid.bounds();
    return cl;
}

} // namespace adgi
