#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>

namespace adgi {

constexpr float kPi = 3.14159265358979323846f;

struct Vec2 {
    float x = 0.f, y = 0.f;
};

static inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
static inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
static inline Vec2 operator*(Vec2 a, float s) { return {a.x * s, a.y * s}; }

struct Vec3 {
    float x = 0.f, y = 0.f, z = 0.f;

    float operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    float& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

static inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
static inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
static inline Vec3 operator-(Vec3 a) { return {-a.x, -a.y, -a.z}; }
static inline Vec3 operator*(Vec3 a, float s) { return {a.x * s, a.y * s, a.z * s}; }
static inline Vec3 operator*(float s, Vec3 a) { return a * s; }
static inline Vec3 operator*(Vec3 a, Vec3 b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
static inline Vec3 operator/(Vec3 a, float s) { return {a.x / s, a.y / s, a.z / s}; }
static inline Vec3& operator+=(Vec3& a, Vec3 b) { a = a + b; return a; }
static inline Vec3& operator*=(Vec3& a, float s) { a = a * s; return a; }

static inline float dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
static inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
static inline float lengthSq(Vec3 a) { return dot(a, a); }
static inline float length(Vec3 a) { return std::sqrt(dot(a, a)); }
static inline Vec3 normalize(Vec3 a) {
    float l = length(a);
    return l > 0.f ? a / l : Vec3{0.f, 0.f, 0.f};
}
static inline Vec3 vmin(Vec3 a, Vec3 b) { return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)}; }
static inline Vec3 vmax(Vec3 a, Vec3 b) { return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)}; }
static inline float maxComponent(Vec3 a) { return std::max(a.x, std::max(a.y, a.z)); }

static inline float clampf(float v, float lo, float hi) { return std::min(std::max(v, lo), hi); }
static inline float clamp01(float v) { return clampf(v, 0.f, 1.f); }

// Rec.709 luma; used for every scalar luminance reduction in the pipeline.
static inline float luma(Vec3 c) { return 0.2126f * c.x + 0.7152f * c.y + 0.0722f * c.z; }

struct IVec3 {
    int x = 0, y = 0, z = 0;

    int operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    int& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

static inline bool operator==(IVec3 a, IVec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }

struct AABB {
    Vec3 lo{ 1e30f,  1e30f,  1e30f};
    Vec3 hi{-1e30f, -1e30f, -1e30f};

    void extend(Vec3 p) { lo = vmin(lo, p); hi = vmax(hi, p); }
    void extend(const AABB& b) { lo = vmin(lo, b.lo); hi = vmax(hi, b.hi); }
    bool valid() const { return lo.x <= hi.x && lo.y <= hi.y && lo.z <= hi.z; }
    Vec3 center() const { return (lo + hi) * 0.5f; }
    Vec3 extents() const { return hi - lo; }
    // Signed-free distance from a point to the box surface (0 inside).
    float distance(Vec3 p) const {
        Vec3 d{std::max({lo.x - p.x, 0.f, p.x - hi.x}),
               std::max({lo.y - p.y, 0.f, p.y - hi.y}),
               std::max({lo.z - p.z, 0.f, p.z - hi.z})};
        return length(d);
    }
};

} // namespace adgi
