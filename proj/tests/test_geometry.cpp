#include <doctest.h>

#include <cmath>
#include <map>

#include "adgi/geometry.hpp"
#include "adgi/rng.hpp"

using namespace adgi;

TEST_CASE("octahedral encode/decode roundtrip") {
    Pcg32 rng(1234, 1);
    float worst = 1.f;
    for (int i = 0; i < 100000; ++i) {
        Vec3 d = rng.uniformSphere();
        Vec2 uv = octaEncode(d);
        CHECK(uv.x >= 0.f);
        CHECK(uv.x < 1.f);
        CHECK(uv.y >= 0.f);
        CHECK(uv.y < 1.f);
        Vec3 back = octaDecode(uv);
        worst = std::min(worst, dot(d, back));
    }
    // Angular error stays below ~0.08 degrees.
    CHECK(worst > 1.f - 1e-6f);

    // Axis directions map exactly.
    CHECK(dot(octaDecode(octaEncode({0, 0, 1})), Vec3{0, 0, 1}) == doctest::Approx(1.f));
    CHECK(dot(octaDecode(octaEncode({0, 0, -1})), Vec3{0, 0, -1}) == doctest::Approx(1.f));
    CHECK(dot(octaDecode(octaEncode({1, 0, 0})), Vec3{1, 0, 0}) == doctest::Approx(1.f));
    CHECK(dot(octaDecode(octaEncode({0, -1, 0})), Vec3{0, -1, 0}) == doctest::Approx(1.f));
}

TEST_CASE("texel/direction roundtrip at map resolutions") {
    for (int res : {8, 16}) {
        for (int j = 0; j < res; ++j)
            for (int i = 0; i < res; ++i) {
                Vec3 d = texelDirection(res, i, j);
                CHECK(length(d) == doctest::Approx(1.f));
                int ri, rj;
                directionTexel(res, d, ri, rj);
                CHECK(ri == i);
                CHECK(rj == j);
            }
    }
}

TEST_CASE("every octant owns an equal share of texels") {
    for (int res : {8, 16}) {
        std::map<int, int> counts;
        for (int j = 0; j < res; ++j)
            for (int i = 0; i < res; ++i) {
                int o = octantOfTexel(res, i, j);
                CHECK(o >= 0);
                CHECK(o < 8);
                counts[o]++;
            }
        for (int o = 0; o < 8; ++o) CHECK(counts[o] == res * res / 8);
    }
}

TEST_CASE("octant of direction matches sign bits and flips under negation") {
    Pcg32 rng(99, 2);
    for (int i = 0; i < 10000; ++i) {
        Vec3 d = rng.uniformSphere();
        // Keep components away from zero so negation flips every sign bit.
        if (std::fabs(d.x) < 1e-3f || std::fabs(d.y) < 1e-3f || std::fabs(d.z) < 1e-3f) continue;
        int o = octantOf(d);
        CHECK(octantOf(-d) == oppositeOctant(o));
        CHECK(((o & 1) != 0) == (d.x >= 0.f));
        CHECK(((o & 2) != 0) == (d.y >= 0.f));
        CHECK(((o & 4) != 0) == (d.z >= 0.f));
    }
}

TEST_CASE("octant cell layout is a bijection") {
    bool seen[2][4] = {};
    for (int o = 0; o < 8; ++o) {
        int cu, cv;
        octantCell(o, cu, cv);
        CHECK(cu >= 0);
        CHECK(cu < 4);
        CHECK(cv >= 0);
        CHECK(cv < 2);
        CHECK(!seen[cv][cu]);
        seen[cv][cu] = true;
        CHECK(cellOctant(cu, cv) == o);
    }
}

TEST_CASE("octant cell contains the texels of its octant") {
    // The 4x2 cells of the octahedral square partition texels the same way
    // octantOfTexel does, up to the fold ties which sit on cell borders.
    int res = 16;
    int agree = 0, total = 0;
    for (int j = 0; j < res; ++j)
        for (int i = 0; i < res; ++i) {
            int cu = i / (res / 4);
            int cv = j / (res / 2);
            int o = octantOfTexel(res, i, j);
            int co, ccu, ccv;
            co = cellOctant(cu, cv);
            octantCell(o, ccu, ccv);
            total++;
            if (co == o) agree++;
            // A texel never lands more than one cell away from its octant cell.
            CHECK(std::abs(ccu - cu) <= 1);
            CHECK(std::abs(ccv - cv) <= 1);
        }
    CHECK(agree >= total * 3 / 4);
}

TEST_CASE("sampled octant directions stay inside their octant") {
    Pcg32 rng(7, 3);
    for (int o = 0; o < 8; ++o)
        for (int i = 0; i < 2000; ++i) {
            Vec3 d = sampleOctant(o, rng);
            CHECK(length(d) == doctest::Approx(1.f));
            CHECK(octantOf(d) == o);
        }
}

TEST_CASE("octahedral texel wrap") {
    int W = 8, H = 8;
    // In-range coordinates pass through.
    for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i) {
            int x = i, y = j;
            octaWrapTexel(x, y, W, H);
            CHECK(x == i);
            CHECK(y == j);
        }
    // Hand-checked edge crossings.
    int x = -1, y = 3;
    octaWrapTexel(x, y, W, H);
    CHECK(x == 0);
    CHECK(y == H - 1 - 3);
    x = W, y = 2;
    octaWrapTexel(x, y, W, H);
    CHECK(x == W - 1);
    CHECK(y == H - 1 - 2);
    x = 5, y = -1;
    octaWrapTexel(x, y, W, H);
    CHECK(y == 0);
    CHECK(x == W - 1 - 5);
    x = 5, y = H;
    octaWrapTexel(x, y, W, H);
    CHECK(y == H - 1);
    CHECK(x == W - 1 - 5);

    // Wrapped neighbors are angular neighbors: stepping off any border lands
    // on a texel whose direction is about one texel away.
    float maxStep = 4.f * kPi / W;
    for (int j = 0; j < H; ++j)
        for (int i = 0; i < W; ++i) {
            Vec3 c = texelDirection(W, i, j);
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int nx = i + dx, ny = j + dy;
                    octaWrapTexel(nx, ny, W, H);
                    CHECK(nx >= 0);
                    CHECK(nx < W);
                    CHECK(ny >= 0);
                    CHECK(ny < H);
                    Vec3 nd = texelDirection(W, nx, ny);
                    CHECK(std::acos(clampf(dot(c, nd), -1.f, 1.f)) < maxStep);
                }
        }
}

TEST_CASE("probe grid indexing") {
    ProbeGrid g;
    g.dims = {4, 3, 5};
    g.origin = {-1.f, 0.f, 2.f};
    g.spacing = {0.5f, 1.f, 0.25f};
    CHECK(g.probeCount() == 60);
    for (int idx = 0; idx < g.probeCount(); ++idx) {
        IVec3 c = g.coordOf(idx);
        CHECK(g.linearIndex(c) == idx);
    }
    // x varies fastest.
    CHECK(g.linearIndex({1, 0, 0}) == 1);
    CHECK(g.linearIndex({0, 1, 0}) == 4);
    CHECK(g.linearIndex({0, 0, 1}) == 12);

    Vec3 p = g.probePosition(IVec3{2, 1, 3});
    CHECK(p.x == doctest::Approx(-1.f + 1.f));
    CHECK(p.y == doctest::Approx(1.f));
    CHECK(p.z == doctest::Approx(2.75f));

    CHECK(g.cellDiagonal() == doctest::Approx(std::sqrt(0.25f + 1.f + 0.0625f)));

    // Nearest probe clamps at the borders.
    IVec3 n = g.nearestProbe(Vec3{-100.f, 100.f, 2.3f});
    CHECK(n.x == 0);
    CHECK(n.y == 2);
    CHECK(n.z == 1);
    n = g.nearestProbe(g.probePosition(IVec3{2, 1, 3}) + Vec3{0.1f, -0.2f, 0.05f});
    CHECK(n == IVec3{2, 1, 3});
}

TEST_CASE("trilinear cage weights") {
    ProbeGrid g;
    g.dims = {3, 3, 3};
    g.spacing = {1.f, 1.f, 1.f};

    Cage c = cageWeights(g, Vec3{1.f, 1.f, 1.f}); // exactly on a probe
    float sum = 0.f;
    float onProbe = 0.f;
    for (int i = 0; i < 8; ++i) {
        sum += c.weight[i];
        CHECK(c.weight[i] >= 0.f);
        if (c.probe[i] == g.linearIndex({1, 1, 1})) onProbe += c.weight[i];
    }
    CHECK(sum == doctest::Approx(1.f));
    CHECK(onProbe == doctest::Approx(1.f));

    c = cageWeights(g, Vec3{0.5f, 0.5f, 0.5f}); // cell center
    for (int i = 0; i < 8; ++i) CHECK(c.weight[i] == doctest::Approx(0.125f));

    // Outside the grid the cage clamps but weights still sum to 1.
    c = cageWeights(g, Vec3{-5.f, 0.2f, 9.f});
    sum = 0.f;
    for (int i = 0; i < 8; ++i) {
        sum += c.weight[i];
        CHECK(c.probe[i] >= 0);
        CHECK(c.probe[i] < g.probeCount());
    }
    CHECK(sum == doctest::Approx(1.f));
}

TEST_CASE("camera distance falloff") {
    Vec3 cam{0, 0, 0};
    CHECK(fCamera({5, 0, 0}, cam, 20.f) == 1.f);
    CHECK(fCamera({19.99f, 0, 0}, cam, 20.f) == 1.f);
    CHECK(fCamera({21, 0, 0}, cam, 20.f) == doctest::Approx(std::exp(-1.f)));
    CHECK(fCamera({30, 0, 0}, cam, 20.f) == doctest::Approx(std::exp(-10.f)));
    // Monotone beyond the knee.
    float prev = 1.f;
    for (float d = 20.f; d < 40.f; d += 0.5f) {
        float v = fCamera({d, 0, 0}, cam, 20.f);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("frustum volume classification") {
    FrustumVolumes vol;
    vol.camera.position = {0, 0, 0};
    vol.camera.forward = {0, 0, 1};
    vol.camera.up = {0, 1, 0};
    vol.camera.vfovDeg = 60.f;
    vol.camera.aspect = 16.f / 9.f;
    vol.k = 20.f;

    CHECK(vol.test({0, 0, 5}) == VolumeClass::InsideVin);
    CHECK(vol.test({0, 0, -5}) == VolumeClass::Outside);  // behind the camera
    CHECK(vol.test({0, 0, 20.5f}) == VolumeClass::Between); // falloff between thresholds
    CHECK(vol.test({0, 0, 25}) == VolumeClass::Outside);

    // Vertical frustum edge at z=5: half-height 5*tan(30deg) = 2.887, inner
    // margin 1.2 -> 3.46, outer margin 1.4 -> 4.04.
    CHECK(vol.test({0, 3.0f, 5}) == VolumeClass::InsideVin);
    CHECK(vol.test({0, 3.8f, 5}) == VolumeClass::Between);
    CHECK(vol.test({0, 4.5f, 5}) == VolumeClass::Outside);

    // The camera position itself is inside.
    CHECK(vol.test(vol.camera.position) == VolumeClass::InsideVin);
}

TEST_CASE("probe classification lists and bounds") {
    ProbeGrid g;
    g.dims = {16, 8, 16};
    g.origin = {-8.f, -2.f, -8.f};
    g.spacing = {1.f, 1.f, 1.f};

    FrustumVolumes vol;
    vol.camera.position = {0, 0, -7.f};
    vol.camera.forward = {0, 0, 1};
    vol.k = 6.f;

    Classification cls = classifyProbes(g, vol);
    CHECK(cls.cls.size() == static_cast<size_t>(g.probeCount()));

    size_t vin = 0, between = 0, outside = 0;
    for (int p = 0; p < g.probeCount(); ++p) {
        switch (cls.of(p)) {
        case VolumeClass::InsideVin: vin++; break;
        case VolumeClass::Between: between++; break;
        case VolumeClass::Outside: outside++; break;
        }
        bool inVout = cls.of(p) != VolumeClass::Outside;
        if (inVout) {
            IVec3 c = g.coordOf(p);
            CHECK(c.x >= cls.voutLo.x);
            CHECK(c.y >= cls.voutLo.y);
            CHECK(c.z >= cls.voutLo.z);
            CHECK(c.x <= cls.voutHi.x);
            CHECK(c.y <= cls.voutHi.y);
            CHECK(c.z <= cls.voutHi.z);
        }
    }
    CHECK(vin > 0);
    CHECK(between > 0);
    CHECK(outside > 0);
    CHECK(cls.vinProbes.size() == vin);
    CHECK(cls.betweenProbes.size() == between);
    CHECK(cls.voutProbes.size() == vin + between);

    // V_in positions all fall inside the reported AABB.
    for (int p : cls.vinProbes) {
        Vec3 pos = g.probePosition(p);
        CHECK(pos.x >= cls.vinAabb.lo.x - 1e-4f);
        CHECK(pos.x <= cls.vinAabb.hi.x + 1e-4f);
        CHECK(pos.y >= cls.vinAabb.lo.y - 1e-4f);
        CHECK(pos.y <= cls.vinAabb.hi.y + 1e-4f);
        CHECK(pos.z >= cls.vinAabb.lo.z - 1e-4f);
        CHECK(pos.z <= cls.vinAabb.hi.z + 1e-4f);
    }

    // Lists are ascending (the deterministic iteration order).
    for (size_t i = 1; i < cls.voutProbes.size(); ++i)
        CHECK(cls.voutProbes[i - 1] < cls.voutProbes[i]);
}
