#pragma once

#include <cstdint>
#include <vector>

#include "adgi/vec.hpp"
#include "adgi/rng.hpp"

namespace adgi {

// ---------------------------------------------------------------------------
// Octahedral direction <-> square mapping. Convention: +z hemisphere maps to
// the inner diamond |px|+|py| <= 1, -z folds into the four corners. Output is
// uv in [0,1)^2; no border texels are ever baked, neighbors use octaWrapTexel.
// ---------------------------------------------------------------------------

Vec2 octaEncode(Vec3 d);       // d need not be normalized; d != 0
Vec3 octaDecode(Vec2 uv);      // unit vector

// Center direction of texel (i,j) on a res x res octahedral map.
Vec3 texelDirection(int res, int i, int j);

// Texel containing direction d. Always in range.
void directionTexel(int res, Vec3 d, int& i, int& j);
inline int directionTexelIndex(int res, Vec3 d) {
    int i, j;
    directionTexel(res, d, i, j);
    return j * res + i;
}

// Octahedral wrap for texel coordinates on a W x H map: crossing an edge
// re-enters mirrored, crossing a corner applies both axes. Handles offsets up
// to one full map size, which covers every filter kernel in the pipeline.
void octaWrapTexel(int& x, int& y, int W, int H);

// ---------------------------------------------------------------------------
// Direction octants. An octant is an axis-aligned sign octant of direction
// space; heuristics, pilot rays and virtual proxies are all binned this way.
// ---------------------------------------------------------------------------

inline int octantOf(Vec3 d) {
    return (d.x >= 0.f ? 1 : 0) | (d.y >= 0.f ? 2 : 0) | (d.z >= 0.f ? 4 : 0);
}
inline int oppositeOctant(int o) { return o ^ 7; }

// Octant of a texel's center direction. Texel centers with z exactly on the
// octahedral fold are split alternately by column parity so that every octant
// owns exactly res^2/8 texels (8 at 8x8, 32 at 16x16).
int octantOfTexel(int res, int i, int j);

// Fixed 4x2 layout used for the 3x3 directional convolution: each octant maps
// to the cell of the octahedral square containing its center direction.
void octantCell(int octant, int& cu, int& cv);
int cellOctant(int cu, int cv);

inline Vec3 octantCenterDir(int o) {
    return normalize(Vec3{o & 1 ? 1.f : -1.f, o & 2 ? 1.f : -1.f, o & 4 ? 1.f : -1.f});
}

// Uniform direction within an octant's solid angle.
inline Vec3 sampleOctant(int o, Pcg32& rng) {
    Vec3 d;
    do {
        d = {std::fabs(rng.gaussian()), std::fabs(rng.gaussian()), std::fabs(rng.gaussian())};
    } while (lengthSq(d) < 1e-12f);
    d = normalize(d);
    if (!(o & 1)) d.x = -d.x;
    if (!(o & 2)) d.y = -d.y;
    if (!(o & 4)) d.z = -d.z;
    return d;
}

// ---------------------------------------------------------------------------
// Probe grid
// ---------------------------------------------------------------------------

struct ProbeGrid {
    IVec3 dims{1, 1, 1};
    Vec3 origin{0, 0, 0};   // position of probe (0,0,0)
    Vec3 spacing{1, 1, 1};

    int probeCount() const { return dims.x * dims.y * dims.z; }
    int linearIndex(IVec3 c) const { return c.x + dims.x * (c.y + dims.y * c.z); }
    IVec3 coordOf(int index) const {
        return {index % dims.x, (index / dims.x) % dims.y, index / (dims.x * dims.y)};
    }
    Vec3 probePosition(IVec3 c) const {
        return {origin.x + spacing.x * c.x, origin.y + spacing.y * c.y, origin.z + spacing.z * c.z};
    }
    Vec3 probePosition(int index) const { return probePosition(coordOf(index)); }

    // Nearest probe; indices clamp at the borders, no wrap.
    IVec3 nearestProbe(Vec3 p) const;
    int nearestProbeIndex(Vec3 p) const { return linearIndex(nearestProbe(p)); }

    // Diagonal of one grid cell; "s" in the visibility heuristic and the
    // normalizer for stored visibility distances.
    float cellDiagonal() const { return length(spacing); }

    AABB bounds() const {
        AABB b;
        b.extend(origin);
        b.extend(probePosition(IVec3{dims.x - 1, dims.y - 1, dims.z - 1}));
        return b;
    }
};

// Trilinear interpolation cage around a point, clamped at grid borders.
// Weights sum to 1.
struct Cage {
    int probe[8];
    float weight[8];
};
Cage cageWeights(const ProbeGrid& grid, Vec3 p);

// ---------------------------------------------------------------------------
// Camera frustum volumes
// ---------------------------------------------------------------------------

struct Camera {
    Vec3 position{0, 0, 0};
    Vec3 forward{0, 0, -1};
    Vec3 up{0, 1, 0};
    float vfovDeg = 60.f;
    float aspect = 16.f / 9.f;

    void basis(Vec3& right, Vec3& upOrtho, Vec3& fwd) const;
};

// Camera-distance falloff: 1 inside radius k, exponential decay beyond.
inline float fCamera(Vec3 p, Vec3 camPos, float k) {
    float d = length(p - camPos);
    return d < k ? 1.f : std::exp(-(d - k));
}

enum class VolumeClass : uint8_t { Outside = 0, Between = 1, InsideVin = 2 };

struct FrustumVolumes {
    Camera camera;
    float k = 20.f;        // meters
    float fcInner = 0.75f; // f_c threshold for V_in
    float fcOuter = 0.5f;  // f_c threshold for V_out
    float clipInner = 1.2f;
    float clipOuter = 1.4f;

    // |clip_xy| <= m test without division; true at the camera position.
    bool insideClip(Vec3 p, float m) const;
    VolumeClass test(Vec3 p) const;
};

// Per-probe classification, cached by the harness while the camera is static.
struct Classification {
    std::vector<uint8_t> cls;       // VolumeClass per probe
    std::vector<int> voutProbes;    // InsideVin + Between, ascending
    std::vector<int> vinProbes;
    std::vector<int> betweenProbes;
    AABB vinAabb;                   // AABB of V_in probe positions (grid bounds if empty)
    IVec3 voutLo{0, 0, 0};          // index-space AABB of V_out probes
    IVec3 voutHi{-1, -1, -1};

    VolumeClass of(int probe) const { return static_cast<VolumeClass>(cls[probe]); }
};
Classification classifyProbes(const ProbeGrid& grid, const FrustumVolumes& volumes);

} // namespace adgi
