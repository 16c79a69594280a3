#include <doctest.h>

#include <cmath>
#include <thread>
#include <vector>

#include "adgi/cache.hpp"

using namespace adgi;

TEST_CASE("log encoding knowns and inversion") {
    LogEncodeParams p{5.f, 15.f};
    CHECK(logEncode(0.f, p) == 0.f);
    CHECK(logEncode(p.maxValue(), p) == doctest::Approx(1.f));
    CHECK(logEncode(1e6f, p) == 1.f); // saturates
    // u = ln(gamma*v+1)/beta
    CHECK(logEncode(1.f, p) == doctest::Approx(std::log(16.f) / 5.f));
    for (float v = 0.f; v < p.maxValue(); v += 0.37f) {
        float u = logEncode(v, p);
        CHECK(u >= 0.f);
        CHECK(u <= 1.f);
        CHECK(logDecode(u, p) == doctest::Approx(v).epsilon(1e-5));
    }
    // More of the code range goes to darks: half the encoding domain covers
    // values below sqrt-ish of the max, not half of it.
    CHECK(logDecode(0.5f, p) < 0.5f * p.maxValue());
}

TEST_CASE("floor quantization") {
    CHECK(quantizeFloor(0.f, 511) == 0);
    CHECK(quantizeFloor(1.f, 511) == 511);
    CHECK(quantizeFloor(2.f, 511) == 511);
    CHECK(quantizeFloor(-0.5f, 511) == 0);
    CHECK(quantizeFloor(std::nanf(""), 511) == 0);
    // Floor semantics: just below a code boundary stays on the lower code.
    CHECK(quantizeFloor(10.999f / 511.f, 511) == 10);
    CHECK(quantizeFloor(11.001f / 511.f, 511) == 11);
    // Near-black floors to exact zero.
    CHECK(quantizeFloor(0.5f / 511.f, 511) == 0);
}

TEST_CASE("irradiance word packing roundtrip") {
    LogEncodeParams enc{5.f, 15.f};
    Vec3 v{0.8f, 2.5f, 0.01f};

    uint32_t w = packIrradiance(v, 7, enc, IrradianceLayout::R9G9B8N6);
    Vec3 back;
    int n;
    unpackIrradiance(w, enc, IrradianceLayout::R9G9B8N6, back, n);
    CHECK(n == 7);
    // One quantization step of slack per channel (9/9/8 bits).
    float stepR = (logDecode(logEncode(v.x, enc), enc) + 1.f / 15.f);
    CHECK(std::fabs(back.x - v.x) < logDecode(logEncode(v.x, enc) + 1.f / 511.f, enc) - v.x + 1e-4f);
    (void)stepR;
    CHECK(back.x <= v.x + 1e-5f); // floor quantization never overshoots
    CHECK(back.y <= v.y + 1e-5f);
    CHECK(back.z <= v.z + 1e-5f);

    // Count clamps to the 6-bit ceiling.
    w = packIrradiance(v, 1000, enc, IrradianceLayout::R9G9B8N6);
    unpackIrradiance(w, enc, IrradianceLayout::R9G9B8N6, back, n);
    CHECK(n == 63);

    // The wide layout carries no count.
    w = packIrradiance(v, 7, enc, IrradianceLayout::R11G11B10);
    unpackIrradiance(w, enc, IrradianceLayout::R11G11B10, back, n);
    CHECK(n == 0);
    CHECK(back.x == doctest::Approx(v.x).epsilon(0.01));
    CHECK(back.y == doctest::Approx(v.y).epsilon(0.01));
    CHECK(back.z == doctest::Approx(v.z).epsilon(0.01));

    // Zero stays exactly zero through the pipeline.
    w = packIrradiance(Vec3{0, 0, 0}, 1, enc, IrradianceLayout::R9G9B8N6);
    unpackIrradiance(w, enc, IrradianceLayout::R9G9B8N6, back, n);
    CHECK(back.x == 0.f);
    CHECK(back.y == 0.f);
    CHECK(back.z == 0.f);
}

TEST_CASE("visibility word packing roundtrip") {
    LogEncodeParams meanEnc{5.f, 15.f};
    LogEncodeParams sqEnc{8.f, 20.f};

    uint32_t w = packVisibility(0.5f, 0.26f, 9, meanEnc, sqEnc, VisibilityLayout::M13S13N6);
    float mean, meanSq;
    int n;
    unpackVisibility(w, meanEnc, sqEnc, VisibilityLayout::M13S13N6, mean, meanSq, n);
    CHECK(n == 9);
    CHECK(mean == doctest::Approx(0.5f).epsilon(0.002));
    CHECK(meanSq == doctest::Approx(0.26f).epsilon(0.002));
    CHECK(mean <= 0.5f + 1e-6f);
    CHECK(meanSq <= 0.26f + 1e-6f);

    w = packVisibility(0.5f, 0.26f, 9, meanEnc, sqEnc, VisibilityLayout::M16S16);
    unpackVisibility(w, meanEnc, sqEnc, VisibilityLayout::M16S16, mean, meanSq, n);
    CHECK(n == 0);
    CHECK(mean == doctest::Approx(0.5f).epsilon(0.0005));
    CHECK(meanSq == doctest::Approx(0.26f).epsilon(0.0005));
}

TEST_CASE("moving average matches the arithmetic mean until the ceiling") {
    Pcg32 rng(5, 9);
    std::vector<double> samples;
    for (int i = 0; i < 64; ++i) samples.push_back(rng.nextDouble() * 4.0);

    double value = 0.0;
    int count = 0;
    double sum = 0.0;
    for (int i = 0; i < 64; ++i) {
        MovingAvg m = movingAvgUpdate(value, count, samples[i], 64);
        value = m.value;
        count = m.count;
        sum += samples[i];
        CHECK(value == doctest::Approx(sum / (i + 1)).epsilon(1e-9));
        CHECK(count == i + 1);
    }

    // Beyond the ceiling the update is an exponential blend with weight 63/64.
    double prev = value;
    MovingAvg m = movingAvgUpdate(value, 63, 10.0, 64); // stored counts clamp to 63
    CHECK(m.value == doctest::Approx((10.0 + 63.0 * prev) / 64.0));
    CHECK(m.count == 64);

    // Dynamic regime ceiling: weight 9/10 regardless of how high N grew.
    m = movingAvgUpdate(2.0, 63, 12.0, 10);
    CHECK(m.value == doctest::Approx((12.0 + 9.0 * 2.0) / 10.0));
    CHECK(m.count == 10);

    // A constant stream is a fixed point at any count.
    m = movingAvgUpdate(3.25, 17, 3.25, 64);
    CHECK(m.value == 3.25);
}

namespace {

ProbeCacheSet makeSmallCache() {
    ProbeGrid g;
    g.dims = {2, 2, 2};
    g.spacing = {1.f, 1.f, 1.f};
    ProbeCacheSet cache;
    cache.init(g, 8, 16);
    return cache;
}

} // namespace

TEST_CASE("atomic irradiance update equals the sequential fold") {
    ProbeCacheSet cache = makeSmallCache();
    Pcg32 rng(11, 4);

    uint32_t expected = 0;
    for (int i = 0; i < 200; ++i) {
        Vec3 s{rng.nextFloat() * 3.f, rng.nextFloat() * 3.f, rng.nextFloat() * 3.f};
        cache.atomicUpdateIrradiance(0, 5, s, 64);
        // Reference fold through the identical quantized pipeline.
        Vec3 v;
        int n;
        unpackIrradiance(expected, cache.irrEnc, cache.irrLayout, v, n);
        int nn = std::min(n, 63);
        Vec3 blended = (s + v * static_cast<float>(nn)) / static_cast<float>(nn + 1);
        expected = packIrradiance(blended, nn + 1, cache.irrEnc, cache.irrLayout);
    }
    CHECK(cache.irrWord(0, 5).load() == expected);
    CHECK(cache.texelCount(0, 5) == 63);
    CHECK(cache.hasData(0));
    CHECK_FALSE(cache.hasData(1));
}

TEST_CASE("atomic visibility update clamps distance and tracks meanSq") {
    ProbeCacheSet cache = makeSmallCache();
    cache.atomicUpdateVisibility(1, 3, 0.4f, 64);
    cache.atomicUpdateVisibility(1, 3, 0.6f, 64);
    float mean, meanSq;
    cache.fetchVisibility(1, 3, mean, meanSq);
    CHECK(mean == doctest::Approx(0.5f).epsilon(0.01));
    CHECK(meanSq == doctest::Approx((0.16f + 0.36f) / 2.f).epsilon(0.01));
    CHECK(cache.visTexelCount(1, 3) == 2);

    // Distances beyond one cell diagonal clamp to 1 before encoding.
    cache.atomicUpdateVisibility(1, 7, 25.f, 64);
    cache.fetchVisibility(1, 7, mean, meanSq);
    CHECK(mean == doctest::Approx(1.f).epsilon(0.01));
}

TEST_CASE("concurrent atomic updates lose no samples") {
    ProbeCacheSet cache = makeSmallCache();
    const int kThreads = 8;
    const int kPer = 4000;
    std::vector<std::thread> pool;
    for (int t = 0; t < kThreads; ++t)
        pool.emplace_back([&cache, t] {
            Pcg32 rng(77, static_cast<uint64_t>(t));
            for (int i = 0; i < kPer; ++i) {
                float v = 1.f + rng.nextFloat(); // samples in [1,2]
                cache.atomicUpdateIrradiance(0, 0, Vec3{v, v, v}, 64);
            }
        });
    for (auto& th : pool) th.join();

    // Count saturates rather than losing updates, and the running mean stays
    // inside the sample range (one quantization step of slack).
    CHECK(cache.texelCount(0, 0) == 63);
    Vec3 v = cache.decodeIrradianceWord(cache.irrWord(0, 0).load());
    CHECK(v.x > 0.95f);
    CHECK(v.x < 2.05f);
}

TEST_CASE("blend updates use fixed hysteresis") {
    ProbeCacheSet cache = makeSmallCache();
    cache.irrLayout = IrradianceLayout::R11G11B10;
    cache.visLayout = VisibilityLayout::M16S16;

    cache.blendIrradiance(0, 2, Vec3{2.f, 2.f, 2.f}, 0.f); // h=0 stores directly
    Vec3 v = cache.decodeIrradianceWord(cache.irrWord(0, 2).load());
    CHECK(v.x == doctest::Approx(2.f).epsilon(0.01));

    cache.blendIrradiance(0, 2, Vec3{0.f, 0.f, 0.f}, 0.94f);
    v = cache.decodeIrradianceWord(cache.irrWord(0, 2).load());
    CHECK(v.x == doctest::Approx(2.f * 0.94f).epsilon(0.01));

    cache.blendVisibility(0, 2, 0.8f, 0.f);
    cache.blendVisibility(0, 2, 0.4f, 0.5f);
    float mean, meanSq;
    cache.fetchVisibility(0, 2, mean, meanSq);
    CHECK(mean == doctest::Approx(0.6f).epsilon(0.01));
    CHECK(meanSq == doctest::Approx(0.5f * 0.64f + 0.5f * 0.16f).epsilon(0.01));
}

TEST_CASE("mip chain averages down to a single texel") {
    ProbeCacheSet cache = makeSmallCache();
    // One bright texel, everything else stays zero.
    cache.atomicUpdateIrradiance(0, 0, Vec3{6.4f, 0.f, 0.f}, 64);
    cache.rebuildMips(false, 1);

    Vec3 base = cache.decodedIrradiance(0, 0);
    CHECK(base.x > 6.3f);
    CHECK(cache.mipLevels() == 4); // 8 -> 4 -> 2 -> 1

    // Level 1 texel holding the impulse averages 4 base texels.
    CHECK(cache.mipTexel(0, 1, 0, 0).x == doctest::Approx(base.x / 4.f));
    CHECK(cache.mipTexel(0, 2, 0, 0).x == doctest::Approx(base.x / 16.f));
    CHECK(cache.mipTexel(0, 3, 0, 0).x == doctest::Approx(base.x / 64.f));
    // Far corner of level 1 saw no energy.
    CHECK(cache.mipTexel(0, 1, 3, 3).x == 0.f);

    // Fetch by direction at the 1x1 level returns the probe-wide average.
    CHECK(cache.mipFetch(0, 3, Vec3{0, 1, 0}).x == doctest::Approx(base.x / 64.f));
}

TEST_CASE("dirty-only mip rebuild skips untouched probes") {
    ProbeCacheSet cache = makeSmallCache();
    cache.atomicUpdateIrradiance(0, 0, Vec3{1.f, 1.f, 1.f}, 64);
    cache.atomicUpdateIrradiance(3, 0, Vec3{2.f, 2.f, 2.f}, 64);
    cache.rebuildMips(false, 1);
    Vec3 before = cache.mipTexel(3, 3, 0, 0);

    // Touch probe 0 only; probe 3's mips must not move.
    cache.atomicUpdateIrradiance(0, 1, Vec3{1.f, 1.f, 1.f}, 64);
    cache.rebuildMips(true, 1);
    CHECK(cache.mipTexel(3, 3, 0, 0).x == before.x);
    CHECK(cache.mipTexel(0, 3, 0, 0).x > 0.f);
}

TEST_CASE("count clamp keeps values and caps counts") {
    ProbeCacheSet cache = makeSmallCache();
    for (int i = 0; i < 40; ++i) cache.atomicUpdateIrradiance(2, 9, Vec3{1.f, 1.f, 1.f}, 64);
    for (int i = 0; i < 40; ++i) cache.atomicUpdateVisibility(2, 9, 0.5f, 64);
    Vec3 before = cache.decodeIrradianceWord(cache.irrWord(2, 9).load());

    cache.clampCounts(2, 16);
    CHECK(cache.texelCount(2, 9) == 16);
    CHECK(cache.visTexelCount(2, 9) == 16);
    Vec3 after = cache.decodeIrradianceWord(cache.irrWord(2, 9).load());
    CHECK(after.x == before.x);

    // Texels below the cap are untouched.
    cache.atomicUpdateIrradiance(2, 10, Vec3{1.f, 1.f, 1.f}, 64);
    uint32_t w = cache.irrWord(2, 10).load();
    cache.clampCounts(2, 16);
    CHECK(cache.irrWord(2, 10).load() == w);
}
