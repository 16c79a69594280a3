#pragma once

#include <vector>

#include "adgi/cache.hpp"
#include "adgi/geometry.hpp"
#include "adgi/scene.hpp"
#include "adgi/vec.hpp"

namespace adgi {

// Variance-shadow-map style visibility bound. Inputs are normalized by the
// cage diagonal like the stored visibility values.
inline float chebyshevWeight(float mean, float meanSq, float d) {
    if (d <= mean) return 1.f;
    float var = std::max(meanSq - mean * mean, 1e-4f);
    float delta = d - mean;
    return var / (var + delta * delta);
}

// Irradiance from the sun and from emitter sample points, with shadow rays.
// Deterministic: no RNG anywhere on this path.
Vec3 directIrradiance(const FrameScene& fs, Vec3 p, Vec3 n);

// Outgoing luminance under direct light only at a front-face hit; the
// reflectance heuristic's "lum". Miss and backface handling live with the
// callers (sky luma / zero).
float directLuminance(const FrameScene& fs, const HitRecord& h);

// Exact per-texel solid angles of a res x res octahedral map; they sum to 4pi.
std::vector<float> texelSolidAngles(int res);

// ---------------------------------------------------------------------------
// Read path over probe caches: per-probe cosine quadrature, 8-probe cage
// blending with trilinear x wrap-backface x Chebyshev weights. The same field
// serves the adaptive caches, the fixed-hysteresis baseline caches, and
// (through bindReference) full-precision reference bakes.
// ---------------------------------------------------------------------------

struct ShadingParams {
    float normalBiasScale = 0.25f; // x min spacing, along the surface normal
    bool chebyshev = true;
    bool texelFilter = true; // heuristic texel weighting (filled per frame)
    bool glossy = false;
    float phongExp = 8.f;
};

class IrradianceField {
public:
    void init(const ProbeCacheSet* cache, const ShadingParams& params);

    // Full-precision override used by the reference technique: texel arrays
    // probe-major, visibility as (mean, meanSq) pairs.
    void bindReference(const Vec3* irr, const float* visMean, const float* visMeanSq,
                       const std::vector<uint8_t>* active);

    const ProbeGrid& grid() const { return mCache->grid; }
    const ProbeCacheSet& cache() const { return *mCache; }
    const ShadingParams& params() const { return mParams; }
    const std::vector<float>& irrSolidAngles() const { return mIrrSolid; }

    // Per-frame filtered texels (radiance x heuristic filter weight) for
    // probes that have them; everything else reads raw texels (weight 1).
    void clearFilter();
    void setFiltered(int probe, const Vec3* texels); // irrTexels() values
    bool hasFilter(int probe) const { return !mFilterSlot.empty() && mFilterSlot[probe] >= 0; }

    Vec3 texel(int probe, int t) const {
        if (mRefIrr) return mRefIrr[static_cast<size_t>(probe) * mCache->irrTexels() + t];
        return mCache->decodedIrradiance(probe, t);
    }
    bool probeUsable(int probe) const;

    // Cosine quadrature over one probe's texels (filtered when available).
    Vec3 probeIrradiance(int probe, Vec3 n) const;
    // Phong-lobe variant for the glossy configuration.
    Vec3 probeRadiancePhong(int probe, Vec3 r, float exponent) const;

    // Bilinear visibility lookup with octahedral wrap, decoded.
    void visibilityAt(int probe, Vec3 dir, float& mean, float& meanSq) const;

    // Full 8-probe cage reconstruction of indirect irradiance at a surface
    // point. Applies the normal-offset bias internally.
    Vec3 cageIrradiance(Vec3 p, Vec3 n) const;

private:
    const ProbeCacheSet* mCache = nullptr;
    ShadingParams mParams;
    std::vector<float> mIrrSolid;
    std::vector<int> mFilterSlot;
    std::vector<Vec3> mFilterPool;
    std::vector<int> mFilterUsed;

    const Vec3* mRefIrr = nullptr;
    const float* mRefVisMean = nullptr;
    const float* mRefVisMeanSq = nullptr;
    const std::vector<uint8_t>* mRefActive = nullptr;
};

// One cache-feedback radiance sample: emission + direct + albedo/pi x cage
// irradiance at the hit. Miss returns sky, backface returns black. The
// optional hit record reports distance for visibility updates.
Vec3 radianceSample(const FrameScene& fs, const IrradianceField* indirect,
                    Vec3 origin, Vec3 dir, HitRecord* outHit = nullptr);

} // namespace adgi
