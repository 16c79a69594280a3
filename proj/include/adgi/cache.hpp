#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <vector>

#include "adgi/geometry.hpp"
#include "adgi/vec.hpp"

namespace adgi {

// ---------------------------------------------------------------------------
// Log-space value encoding. encode: u = min(ln(gamma*v + 1), beta) / beta,
// decode inverts it exactly in the continuous domain. Quantization floors to
// the lowest code so near-black values reach exact zero.
// ---------------------------------------------------------------------------

struct LogEncodeParams {
    float beta = 5.f;
    float gamma = 15.f;
    // Largest representable value, (e^beta - 1) / gamma.
    float maxValue() const { return (std::exp(beta) - 1.f) / gamma; }
};

float logEncode(float v, LogEncodeParams p);
float logDecode(float u, LogEncodeParams p);

inline uint32_t quantizeFloor(float u, uint32_t maxCode) {
    if (!(u > 0.f)) return 0;
    if (u >= 1.f) return maxCode;
    return static_cast<uint32_t>(u * static_cast<float>(maxCode));
}
inline float dequantize(uint32_t code, uint32_t maxCode) {
    return static_cast<float>(code) / static_cast<float>(maxCode);
}

// ---------------------------------------------------------------------------
// Texel word layouts (one 32-bit word per texel).
//   Irradiance: R9 G9 B8 + 6-bit sample count, log-encoded channels.
//   Visibility: mean13 meanSq13 + 6-bit count, log-encoded channels.
// The baseline layouts trade the count bits for channel depth:
//   R11 G11 B10 irradiance, mean16 meanSq16 visibility.
// ---------------------------------------------------------------------------

enum class IrradianceLayout : uint32_t { R9G9B8N6 = 0, R11G11B10 = 1 };
enum class VisibilityLayout : uint32_t { M13S13N6 = 0, M16S16 = 1 };

constexpr int kCountMax = 63; // 6-bit saturating sample count

uint32_t packIrradiance(Vec3 rgb, int n, LogEncodeParams enc, IrradianceLayout layout);
void unpackIrradiance(uint32_t word, LogEncodeParams enc, IrradianceLayout layout, Vec3& rgb, int& n);

uint32_t packVisibility(float mean, float meanSq, int n, LogEncodeParams meanEnc,
                        LogEncodeParams sqEnc, VisibilityLayout layout);
void unpackVisibility(uint32_t word, LogEncodeParams meanEnc, LogEncodeParams sqEnc,
                      VisibilityLayout layout, float& mean, float& meanSq, int& n);

// ---------------------------------------------------------------------------
// Count-based moving average (switches to exponential blending at the count
// ceiling with weight (nMax-1)/nMax, e.g. 63/64 static, 9/10 dynamic).
// ---------------------------------------------------------------------------

struct MovingAvg {
    double value;
    int count;
};
inline MovingAvg movingAvgUpdate(double value, int count, double sample, int nMax) {
    int n = std::min(count, nMax - 1);
    return {(sample + static_cast<double>(n) * value) / static_cast<double>(n + 1), n + 1};
}

// ---------------------------------------------------------------------------
// Probe cache set: per-probe octahedral irradiance and visibility maps plus
// an irradiance mip chain down to 1x1 (rebuilt once per frame) and a decoded
// float copy of the base level used by all read paths. Concurrent writers go
// through the atomic update functions; everything else is phase-separated.
// ---------------------------------------------------------------------------

class ProbeCacheSet {
public:
    ProbeGrid grid;
    int irrRes = 8;
    int visRes = 16;
    IrradianceLayout irrLayout = IrradianceLayout::R9G9B8N6;
    VisibilityLayout visLayout = VisibilityLayout::M13S13N6;
    LogEncodeParams irrEnc{5.f, 15.f};
    LogEncodeParams visMeanEnc{5.f, 15.f};
    LogEncodeParams visSqEnc{8.f, 20.f};

    void init(const ProbeGrid& g, int irradianceRes, int visibilityRes);

    int irrTexels() const { return irrRes * irrRes; }
    int visTexels() const { return visRes * visRes; }
    size_t irrWordIndex(int probe, int texel) const { return static_cast<size_t>(probe) * irrTexels() + texel; }
    size_t visWordIndex(int probe, int texel) const { return static_cast<size_t>(probe) * visTexels() + texel; }

    std::atomic<uint32_t>& irrWord(int probe, int texel) { return mIrr[irrWordIndex(probe, texel)]; }
    const std::atomic<uint32_t>& irrWord(int probe, int texel) const { return mIrr[irrWordIndex(probe, texel)]; }
    std::atomic<uint32_t>& visWord(int probe, int texel) { return mVis[visWordIndex(probe, texel)]; }
    const std::atomic<uint32_t>& visWord(int probe, int texel) const { return mVis[visWordIndex(probe, texel)]; }

    // Lock-free moving-average accumulation into one texel word. nMax 64 for
    // the static regime, 10 when the probe octant is flagged dynamic.
    void atomicUpdateIrradiance(int probe, int texel, Vec3 sample, int nMax);
    void atomicUpdateVisibility(int probe, int texel, float dist, int nMax);

    // Exponential blend with fixed hysteresis; baseline layouts without a
    // count field. Single writer per probe.
    void blendIrradiance(int probe, int texel, Vec3 sample, float hysteresis);
    void blendVisibility(int probe, int texel, float dist, float hysteresis);

    Vec3 decodeIrradianceWord(uint32_t word) const;
    int texelCount(int probe, int texel) const; // sample count N of an irradiance texel
    int visTexelCount(int probe, int texel) const;

    // Decoded base texel (refreshed by rebuildMips; previous-frame values
    // while a frame's sampling is in flight).
    Vec3 decodedIrradiance(int probe, int texel) const { return mDecoded[irrWordIndex(probe, texel)]; }
    void fetchVisibility(int probe, int texel, float& mean, float& meanSq) const;

    // Mip chain (level 0 is the base resolution, stored decoded).
    int mipLevels() const { return mMipLevels + 1; }
    Vec3 mipFetch(int probe, int level, Vec3 dir) const;
    Vec3 mipTexel(int probe, int level, int i, int j) const;

    // Rebuilds decoded copies and the mip chain. With dirtyOnly, only probes
    // touched since the last rebuild are refreshed.
    void rebuildMips(bool dirtyOnly, int numThreads);

    void markDirty(int probe) { mDirty[probe].store(1, std::memory_order_relaxed); }
    bool hasData(int probe) const { return mHasData[probe].load(std::memory_order_relaxed) != 0; }

    std::vector<uint8_t> probeActive; // maintained by the detection passes

    // Clamp a probe's texel counts to at most maxN (V_in boundary relaxation).
    void clampCounts(int probe, int maxN);

    size_t irrWordCount() const { return static_cast<size_t>(grid.probeCount()) * irrTexels(); }
    size_t visWordCount() const { return static_cast<size_t>(grid.probeCount()) * visTexels(); }
    const std::atomic<uint32_t>* irrWords() const { return mIrr.get(); }
    const std::atomic<uint32_t>* visWords() const { return mVis.get(); }
    std::atomic<uint32_t>* irrWords() { return mIrr.get(); }
    std::atomic<uint32_t>* visWords() { return mVis.get(); }

private:
    std::unique_ptr<std::atomic<uint32_t>[]> mIrr;
    std::unique_ptr<std::atomic<uint32_t>[]> mVis;
    std::vector<Vec3> mDecoded;
    std::vector<Vec3> mMips; // levels >= 1, per probe contiguous
    std::unique_ptr<std::atomic<uint8_t>[]> mDirty;
    std::unique_ptr<std::atomic<uint8_t>[]> mHasData;
    int mMipLevels = 0;
    int mMipTexelsPerProbe = 0;
    std::vector<int> mMipOffset; // offset of each level >= 1 within a probe's block

    void rebuildProbe(int probe);
};

} // namespace adgi
