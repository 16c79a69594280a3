#include "adgi/lightfield.hpp"

#include <cmath>

namespace adgi {

namespace {

constexpr float kShadowEps = 1e-3f;

// Solid angle of a spherical triangle (Van Oosterom & Strackee).
double sphericalTriangleArea(Vec3 a, Vec3 b, Vec3 c) {
    double ax = a.x, ay = a.y, az = a.z;
    double bx = b.x, by = b.y, bz = b.z;
    double cx = c.x, cy = c.y, cz = c.z;
    double triple = ax * (by * cz - bz * cy) - ay * (bx * cz - bz * cx) + az * (bx * cy - by * cx);
    double da = std::sqrt(ax * ax + ay * ay + az * az);
    double db = std::sqrt(bx * bx + by * by + bz * bz);
    double dc = std::sqrt(cx * cx + cy * cy + cz * cz);
    double ab = ax * bx + ay * by + az * bz;
    double ac = ax * cx + ay * cy + az * cz;
    double bc = bx * cx + by * cy + bz * cz;
    double denom = da * db * dc + ab * dc + ac * db + bc * da;
    double omega = 2.0 * std::atan2(std::fabs(triple), denom);
    return omega < 0.0 ? omega + 2.0 * 3.14159265358979323846 : omega;
}

} // namespace

Vec3 directIrradiance(const FrameScene& fs, Vec3 p, Vec3 n) {
    Vec3 e{0.f, 0.f, 0.f};
    Vec3 origin = p + n * kShadowEps;

    if (fs.hasSun) {
        float cosTheta = dot(n, -fs.sunDir);
        if (cosTheta > 0.f) {
            HitRecord shadow = fs.trace(origin, -fs.sunDir);
            if (!shadow.hit()) e += fs.sunRadiance * cosTheta;
        }
    }

    for (const EmitterPoint& ep : fs.emitters()) {
        Vec3 toL = ep.position - p;
        float distSq = lengthSq(toL);
        if (distSq < 1e-6f) continue;
        float dist = std::sqrt(distSq);
        Vec3 wi = toL * (1.f / dist);
        float cosSurf = dot(n, wi);
        if (cosSurf <= 0.f) continue;
        float cosEmit = dot(ep.normal, -wi);
        if (cosEmit <= 0.f) continue;
        if (fs.occluded(origin, ep.position + ep.normal * kShadowEps)) continue;
        e += ep.radiance * (cosSurf * cosEmit * ep.area / distSq);
    }
    return e;
}

float directLuminance(const FrameScene& fs, const HitRecord& h) {
    Vec3 e = directIrradiance(fs, h.position, h.normal);
    Vec3 radiance = h.emission + h.albedo * (1.f / kPi) * e;
    return luma(radiance);
}

std::vector<float> texelSolidAngles(int res) {
    std::vector<float> sa(static_cast<size_t>(res) * res);
    for (int j = 0; j < res; ++j)
        for (int i = 0; i < res; ++i) {
            float u0 = static_cast<float>(i) / res;
            float u1 = static_cast<float>(i + 1) / res;
            float v0 = static_cast<float>(j) / res;
            float v1 = static_cast<float>(j + 1) / res;
            Vec3 c00 = octaDecode({u0, v0});
            Vec3 c10 = octaDecode({u1, v0});
            Vec3 c01 = octaDecode({u0, v1});
            Vec3 c11 = octaDecode({u1, v1});
            double a = sphericalTriangleArea(c00, c10, c11) +
                       sphericalTriangleArea(c00, c11, c01);
            sa[static_cast<size_t>(j) * res + i] = static_cast<float>(a);
        }
    return sa;
}

void IrradianceField::init(const ProbeCacheSet* cache, const ShadingParams& params) {
    mCache = cache;
    mParams = params;
    mIrrSolid = texelSolidAngles(cache->irrRes);
    mFilterSlot.assign(cache->grid.probeCount(), -1);
    mFilterPool.clear();
    mFilterUsed.clear();
    mRefIrr = nullptr;
    mRefVisMean = nullptr;
    mRefVisMeanSq = nullptr;
    mRefActive = nullptr;
}

void IrradianceField::bindReference(const Vec3* irr, const float* visMean,
                                    const float* visMeanSq,
                                    const std::vector<uint8_t>* active) {
    mRefIrr = irr;
    mRefVisMean = visMean;
    mRefVisMeanSq = visMeanSq;
    mRefActive = active;
}

void IrradianceField::clearFilter() {
    for (int p : mFilterUsed) mFilterSlot[p] = -1;
    mFilterUsed.clear();
    mFilterPool.clear();
}

void IrradianceField::setFiltered(int probe, const Vec3* texels) {
    int n = mCache->irrTexels();
    if (mFilterSlot[probe] < 0) {
        mFilterSlot[probe] = static_cast<int>(mFilterPool.size());
        mFilterPool.insert(mFilterPool.end(), texels, texels + n);
        mFilterUsed.push_back(probe);
    } else {
        std::copy(texels, texels + n, mFilterPool.begin() + mFilterSlot[probe]);
    }
}

bool IrradianceField::probeUsable(int probe) const {
    if (mRefIrr) {
        return !mRefActive || (*mRefActive)[probe] != 0;
    }
    if (!mCache->hasData(probe)) return false;
    return mCache->probeActive.empty() || mCache->probeActive[probe] != 0;
}

Vec3 IrradianceField::probeIrradiance(int probe, Vec3 n) const {
    int res = mCache->irrRes;
    int count = res * res;
    const Vec3* texels = nullptr;
    if (!mRefIrr && !mFilterSlot.empty() && mFilterSlot[probe] >= 0)
        texels = &mFilterPool[mFilterSlot[probe]];

    Vec3 e{0.f, 0.f, 0.f};
    for (int t = 0; t < count; ++t) {
        Vec3 dir = texelDirection(res, t % res, t / res);
        float cosTheta = dot(n, dir);
        if (cosTheta <= 0.f) continue;
        Vec3 L = texels ? texels[t] : texel(probe, t);
        e += L * (cosTheta * mIrrSolid[t]);
    }
    return e;
}

Vec3 IrradianceField::probeRadiancePhong(int probe, Vec3 r, float exponent) const {
    int res = mCache->irrRes;
    int count = res * res;
    // (p+2)/2pi normalization makes a uniform field reproduce itself.
    float norm = (exponent + 2.f) / (2.f * kPi);
    Vec3 out{0.f, 0.f, 0.f};
    for (int t = 0; t < count; ++t) {
        Vec3 dir = texelDirection(res, t % res, t / res);
        float c = dot(r, dir);
        if (c <= 0.f) continue;
        out += texel(probe, t) * (std::pow(c, exponent) * norm * mIrrSolid[t]);
    }
    return out;
}

void IrradianceField::visibilityAt(int probe, Vec3 dir, float& mean, float& meanSq) const {
    int res = mCache->visRes;
    Vec2 uv = octaEncode(dir);
    float fx = uv.x * res - 0.5f;
    float fy = uv.y * res - 0.5f;
    int x0 = static_cast<int>(std::floor(fx));
    int y0 = static_cast<int>(std::floor(fy));
    float tx = fx - x0;
    float ty = fy - y0;

    mean = 0.f;
    meanSq = 0.f;
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) {
            int x = x0 + dx, y = y0 + dy;
            octaWrapTexel(x, y, res, res);
            float w = (dx ? tx : 1.f - tx) * (dy ? ty : 1.f - ty);
            float m, s;
            if (mRefVisMean) {
                size_t idx = static_cast<size_t>(probe) * res * res + y * res + x;
                m = mRefVisMean[idx];
                s = mRefVisMeanSq[idx];
            } else {
                mCache->fetchVisibility(probe, y * res + x, m, s);
            }
            mean += w * m;
            meanSq += w * s;
        }
}

Vec3 IrradianceField::cageIrradiance(Vec3 p, Vec3 n) const {
    const ProbeGrid& g = mCache->grid;
    float minSpacing = std::min(g.spacing.x, std::min(g.spacing.y, g.spacing.z));
    Vec3 biased = p + n * (mParams.normalBiasScale * minSpacing);
    float diag = g.cellDiagonal();

    Cage cage = cageWeights(g, biased);
    Vec3 sum{0.f, 0.f, 0.f};
    float wsum = 0.f;
    for (int i = 0; i < 8; ++i) {
        int probe = cage.probe[i];
        float w = cage.weight[i];
        if (w <= 0.f || !probeUsable(probe)) continue;

        Vec3 toProbe = g.probePosition(probe) - biased;
        float dist = length(toProbe);
        Vec3 dirToProbe = dist > 1e-6f ? toProbe * (1.f / dist) : n;

        // Soft backface: probes behind the surface fade out quadratically.
        float wrap = (1.f + dot(dirToProbe, n)) * 0.5f;
        w *= wrap * wrap;

        if (mParams.chebyshev) {
            float mean, meanSq;
            visibilityAt(probe, -dirToProbe, mean, meanSq);
            w *= chebyshevWeight(mean, meanSq, std::min(dist / diag, 1.f));
        }
        if (w <= 0.f) continue;
        sum += probeIrradiance(probe, n) * w;
        wsum += w;
    }
    return wsum > 0.f ? sum * (1.f / wsum) : Vec3{0.f, 0.f, 0.f};
}

Vec3 radianceSample(const FrameScene& fs, const IrradianceField* indirect,
                    Vec3 origin, Vec3 dir, HitRecord* outHit) {
    HitRecord h = fs.trace(origin, dir);
    if (outHit) *outHit = h;
    if (!h.hit()) return fs.sky;
    if (!h.frontFace) return Vec3{0.f, 0.f, 0.f};
    Vec3 e = directIrradiance(fs, h.position, h.normal);
    if (indirect) e += indirect->cageIrradiance(h.position, h.normal);
    return h.emission + h.albedo * (1.f / kPi) * e;
}

} // namespace adgi
