#include "adgi/cache.hpp"

#include <cassert>
#include <cmath>

#include "adgi/parallel.hpp"

namespace adgi {

float logEncode(float v, LogEncodeParams p) {
    if (!(v > 0.f)) return 0.f;
    return std::min(std::log(p.gamma * v + 1.f), p.beta) / p.beta;
}

float logDecode(float u, LogEncodeParams p) {
    if (!(u > 0.f)) return 0.f;
    return (std::exp(p.beta * u) - 1.f) / p.gamma;
}

namespace {

constexpr uint32_t kMask6 = 0x3fu;

inline uint32_t countBits(uint32_t word) { return word >> 26; }

} // namespace

uint32_t packIrradiance(Vec3 rgb, int n, LogEncodeParams enc, IrradianceLayout layout) {
    if (layout == IrradianceLayout::R9G9B8N6) {
        uint32_t r = quantizeFloor(logEncode(rgb.x, enc), 511);
        uint32_t g = quantizeFloor(logEncode(rgb.y, enc), 511);
        uint32_t b = quantizeFloor(logEncode(rgb.z, enc), 255);
        uint32_t c = static_cast<uint32_t>(std::min(n, kCountMax));
        return r | (g << 9) | (b << 18) | (c << 26);
    }
    uint32_t r = quantizeFloor(logEncode(rgb.x, enc), 2047);
    uint32_t g = quantizeFloor(logEncode(rgb.y, enc), 2047);
    uint32_t b = quantizeFloor(logEncode(rgb.z, enc), 1023);
    return r | (g << 11) | (b << 22);
}

void unpackIrradiance(uint32_t word, LogEncodeParams enc, IrradianceLayout layout, Vec3& rgb, int& n) {
    if (layout == IrradianceLayout::R9G9B8N6) {
        rgb.x = logDecode(dequantize(word & 0x1ffu, 511), enc);
        rgb.y = logDecode(dequantize((word >> 9) & 0x1ffu, 511), enc);
        rgb.z = logDecode(dequantize((word >> 18) & 0xffu, 255), enc);
        n = static_cast<int>(countBits(word));
        return;
    }
    rgb.x = logDecode(dequantize(word & 0x7ffu, 2047), enc);
    rgb.y = logDecode(dequantize((word >> 11) & 0x7ffu, 2047), enc);
    rgb.z = logDecode(dequantize((word >> 22) & 0x3ffu, 1023), enc);
    n = 0;
}

uint32_t packVisibility(float mean, float meanSq, int n, LogEncodeParams meanEnc,
                        LogEncodeParams sqEnc, VisibilityLayout layout) {
    if (layout == VisibilityLayout::M13S13N6) {
        uint32_t m = quantizeFloor(logEncode(mean, meanEnc), 8191);
        uint32_t s = quantizeFloor(logEncode(meanSq, sqEnc), 8191);
        uint32_t c = static_cast<uint32_t>(std::min(n, kCountMax));
        return m | (s << 13) | (c << 26);
    }
    uint32_t m = quantizeFloor(logEncode(mean, meanEnc), 65535);
    uint32_t s = quantizeFloor(logEncode(meanSq, sqEnc), 65535);
    return m | (s << 16);
}

void unpackVisibility(uint32_t word, LogEncodeParams meanEnc, LogEncodeParams sqEnc,
                      VisibilityLayout layout, float& mean, float& meanSq, int& n) {
    if (layout == VisibilityLayout::M13S13N6) {
        mean = logDecode(dequantize(word & 0x1fffu, 8191), meanEnc);
        meanSq = logDecode(dequantize((word >> 13) & 0x1fffu, 8191), sqEnc);
        n = static_cast<int>(countBits(word));
        return;
    }
    mean = logDecode(dequantize(word & 0xffffu, 65535), meanEnc);
    meanSq = logDecode(dequantize((word >> 16) & 0xffffu, 65535), sqEnc);
    n = 0;
}

void ProbeCacheSet::init(const ProbeGrid& g, int irradianceRes, int visibilityRes) {
    grid = g;
    irrRes = irradianceRes;
    visRes = visibilityRes;
    int probes = grid.probeCount();
    size_t nIrr = irrWordCount();
    size_t nVis = visWordCount();
    mIrr.reset(new std::atomic<uint32_t>[nIrr]);
    mVis.reset(new std::atomic<uint32_t>[nVis]);
    for (size_t i = 0; i < nIrr; ++i) mIrr[i].store(0, std::memory_order_relaxed);
    for (size_t i = 0; i < nVis; ++i) mVis[i].store(0, std::memory_order_relaxed);
    mDecoded.assign(nIrr, Vec3{});

    mMipLevels = 0;
    mMipOffset.clear();
    mMipTexelsPerProbe = 0;
    for (int res = irrRes >> 1; res >= 1; res >>= 1) {
        mMipOffset.push_back(mMipTexelsPerProbe);
        mMipTexelsPerProbe += res * res;
        ++mMipLevels;
    }
    mMips.assign(static_cast<size_t>(probes) * mMipTexelsPerProbe, Vec3{});

    mDirty.reset(new std::atomic<uint8_t>[probes]);
    mHasData.reset(new std::atomic<uint8_t>[probes]);
    for (int i = 0; i < probes; ++i) {
        mDirty[i].store(0, std::memory_order_relaxed);
        mHasData[i].store(0, std::memory_order_relaxed);
    }
    probeActive.assign(probes, 1);
}

Vec3 ProbeCacheSet::decodeIrradianceWord(uint32_t word) const {
    Vec3 rgb;
    int n;
    unpackIrradiance(word, irrEnc, irrLayout, rgb, n);
    return rgb;
}

int ProbeCacheSet::texelCount(int probe, int texel) const {
    return static_cast<int>(countBits(irrWord(probe, texel).load(std::memory_order_relaxed)));
}

int ProbeCacheSet::visTexelCount(int probe, int texel) const {
    return static_cast<int>(countBits(visWord(probe, texel).load(std::memory_order_relaxed)));
}

void ProbeCacheSet::atomicUpdateIrradiance(int probe, int texel, Vec3 sample, int nMax) {
    auto& w = irrWord(probe, texel);
    uint32_t old = w.load(std::memory_order_relaxed);
    for (;;) {
        Vec3 v;
        int count;
        unpackIrradiance(old, irrEnc, irrLayout, v, count);
        int n = std::min(count, nMax - 1);
        float inv = 1.f / static_cast<float>(n + 1);
        Vec3 blended = (sample + v * static_cast<float>(n)) * inv;
        uint32_t next = packIrradiance(blended, n + 1, irrEnc, irrLayout);
        if (w.compare_exchange_weak(old, next, std::memory_order_acq_rel, std::memory_order_relaxed))
            break;
        // old now holds the freshly observed word; re-blend against it.
    }
    mHasData[probe].store(1, std::memory_order_relaxed);
    markDirty(probe);
}

void ProbeCacheSet::atomicUpdateVisibility(int probe, int texel, float dist, int nMax) {
    float d = clamp01(dist);
    float dSq = d * d;
    auto& w = visWord(probe, texel);
    uint32_t old = w.load(std::memory_order_relaxed);
    for (;;) {
        float mean, meanSq;
        int count;
        unpackVisibility(old, visMeanEnc, visSqEnc, visLayout, mean, meanSq, count);
        int n = std::min(count, nMax - 1);
        float inv = 1.f / static_cast<float>(n + 1);
        float m = (d + mean * static_cast<float>(n)) * inv;
        float s = (dSq + meanSq * static_cast<float>(n)) * inv;
        uint32_t next = packVisibility(m, s, n + 1, visMeanEnc, visSqEnc, visLayout);
        if (w.compare_exchange_weak(old, next, std::memory_order_acq_rel, std::memory_order_relaxed))
            break;
    }
    mHasData[probe].store(1, std::memory_order_relaxed);
}

void ProbeCacheSet::blendIrradiance(int probe, int texel, Vec3 sample, float hysteresis) {
    auto& w = irrWord(probe, texel);
    Vec3 v;
    int n;
    unpackIrradiance(w.load(std::memory_order_relaxed), irrEnc, irrLayout, v, n);
    Vec3 blended = v * hysteresis + sample * (1.f - hysteresis);
    w.store(packIrradiance(blended, n, irrEnc, irrLayout), std::memory_order_relaxed);
    mHasData[probe].store(1, std::memory_order_relaxed);
    markDirty(probe);
}

void ProbeCacheSet::blendVisibility(int probe, int texel, float dist, float hysteresis) {
    float d = clamp01(dist);
    auto& w = visWord(probe, texel);
    float mean, meanSq;
    int n;
    unpackVisibility(w.load(std::memory_order_relaxed), visMeanEnc, visSqEnc, visLayout, mean, meanSq, n);
    float m = mean * hysteresis + d * (1.f - hysteresis);
    float s = meanSq * hysteresis + d * d * (1.f - hysteresis);
    w.store(packVisibility(m, s, n, visMeanEnc, visSqEnc, visLayout), std::memory_order_relaxed);
    mHasData[probe].store(1, std::memory_order_relaxed);
}

void ProbeCacheSet::fetchVisibility(int probe, int texel, float& mean, float& meanSq) const {
    int n;
    unpackVisibility(visWord(probe, texel).load(std::memory_order_relaxed), visMeanEnc, visSqEnc,
                     visLayout, mean, meanSq, n);
}

void ProbeCacheSet::clampCounts(int probe, int maxN) {
    uint32_t cap = static_cast<uint32_t>(maxN);
    int nIrr = irrTexels();
    for (int t = 0; t < nIrr; ++t) {
        auto& w = irrWord(probe, t);
        uint32_t word = w.load(std::memory_order_relaxed);
        if (countBits(word) > cap)
            w.store((word & 0x03ffffffu) | (cap << 26), std::memory_order_relaxed);
    }
    int nVis = visTexels();
    for (int t = 0; t < nVis; ++t) {
        auto& w = visWord(probe, t);
        uint32_t word = w.load(std::memory_order_relaxed);
        if (countBits(word) > cap)
            w.store((word & 0x03ffffffu) | (cap << 26), std::memory_order_relaxed);
    }
}

void ProbeCacheSet::rebuildProbe(int probe) {
    int res = irrRes;
    size_t base = irrWordIndex(probe, 0);
    Vec3 rgb;
    int n;
    for (int t = 0; t < res * res; ++t) {
        unpackIrradiance(mIrr[base + t].load(std::memory_order_relaxed), irrEnc, irrLayout, rgb, n);
        mDecoded[base + t] = rgb;
    }
    const Vec3* src = &mDecoded[base];
    Vec3* probeMips = &mMips[static_cast<size_t>(probe) * mMipTexelsPerProbe];
    int srcRes = res;
    for (int level = 0; level < mMipLevels; ++level) {
        int dstRes = srcRes >> 1;
        Vec3* dst = probeMips + mMipOffset[level];
        for (int j = 0; j < dstRes; ++j) {
            for (int i = 0; i < dstRes; ++i) {
                Vec3 sum = src[(2 * j) * srcRes + 2 * i] + src[(2 * j) * srcRes + 2 * i + 1] +
                           src[(2 * j + 1) * srcRes + 2 * i] + src[(2 * j + 1) * srcRes + 2 * i + 1];
                dst[j * dstRes + i] = sum * 0.25f;
            }
        }
        src = dst;
        srcRes = dstRes;
    }
}

void ProbeCacheSet::rebuildMips(bool dirtyOnly, int numThreads) {
    int probes = grid.probeCount();
    if (!dirtyOnly) {
        parallelFor(0, probes, numThreads, [&](int64_t p) { rebuildProbe(static_cast<int>(p)); });
        for (int p = 0; p < probes; ++p) mDirty[p].store(0, std::memory_order_relaxed);
        return;
    }
    std::vector<int> touched;
    for (int p = 0; p < probes; ++p)
        if (mDirty[p].load(std::memory_order_relaxed)) touched.push_back(p);
    parallelFor(0, static_cast<int64_t>(touched.size()), numThreads,
                [&](int64_t k) { rebuildProbe(touched[k]); });
    for (int p : touched) mDirty[p].store(0, std::memory_order_relaxed);
}

Vec3 ProbeCacheSet::mipTexel(int probe, int level, int i, int j) const {
    if (level <= 0) {
        return mDecoded[irrWordIndex(probe, j * irrRes + i)];
    }
    int res = irrRes >> level;
    return mMips[static_cast<size_t>(probe) * mMipTexelsPerProbe + mMipOffset[level - 1] +
                 j * res + i];
}

Vec3 ProbeCacheSet::mipFetch(int probe, int level, Vec3 dir) const {
    int lvl = std::min(level, mMipLevels);
    int res = irrRes >> lvl;
    int i, j;
    directionTexel(res, dir, i, j);
    return mipTexel(probe, lvl, i, j);
}

} // namespace adgi
