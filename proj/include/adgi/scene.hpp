#pragma once

#include <limits>
#include <string>
#include <vector>

#include "adgi/vec.hpp"

namespace adgi {

constexpr float kInf = std::numeric_limits<float>::infinity();

struct Material {
    Vec3 albedo{0.5f, 0.5f, 0.5f};
    Vec3 emission{0.f, 0.f, 0.f};
};

// Rigid transform + emitter intensity keyframe. Tracks interpolate linearly
// and evaluate exactly at keyframe times; world = rotY(deg) * p + translate.
struct Keyframe {
    float t = 0.f;
    Vec3 translate{0.f, 0.f, 0.f};
    float rotateYDeg = 0.f;
    float emissionScale = 1.f;
};

enum class ShapeKind { Box, Plane, TriMesh };

struct SceneObject {
    std::string name;
    ShapeKind shape = ShapeKind::Box;
    Vec3 boxMin, boxMax;           // Box
    Vec3 planePoint, planeNormal;  // Plane, one-sided
    std::vector<Vec3> vertices;    // TriMesh
    std::vector<IVec3> triangles;
    Material material;
    std::vector<Keyframe> track;   // sorted by t; empty = static identity
};

struct SunLight {
    bool enabled = false;
    Vec3 direction{0.f, -1.f, 0.f}; // direction light travels
    Vec3 radiance{0.f, 0.f, 0.f};
    std::vector<Keyframe> scaleTrack; // only emissionScale is used
};

struct HitRecord {
    float dist = kInf;
    Vec3 position;
    Vec3 normal;        // unit, faces against the ray
    bool frontFace = false;
    Vec3 albedo;
    Vec3 emission;      // track-scaled
    int object = -1;

    bool hit() const { return dist < kInf; }
};

struct EmitterPoint {
    Vec3 position;
    Vec3 normal;
    Vec3 radiance;
    float area = 0.f;
};

class FrameScene;

class Scene {
public:
    std::string name;
    Vec3 sky{0.f, 0.f, 0.f};
    SunLight sun;
    std::vector<SceneObject> objects;
    // Emitter faces larger than this are split into a grid of sample points
    // for direct lighting.
    float emitterMaxArea = 0.25f;

    bool animated() const;
    // Bake the world state at time t: transforms applied, acceleration
    // structure rebuilt, emitter sample points regenerated.
    FrameScene at(float t) const;

    static Scene loadFile(const std::string& path);
    static Scene loadString(const std::string& text); // throws ConfigError
    std::string toJson() const;
};

// Immutable per-frame world; all tracing runs against this.
class FrameScene {
public:
    float time = 0.f;
    Vec3 sky;
    bool hasSun = false;
    Vec3 sunDir;      // normalized travel direction
    Vec3 sunRadiance; // track-scaled

    HitRecord trace(Vec3 origin, Vec3 dir, float tMax = kInf) const;
    bool occluded(Vec3 from, Vec3 to) const;
    const std::vector<EmitterPoint>& emitters() const { return mEmitters; }
    const AABB& objectBounds(int object) const { return mObjectBounds[object]; }
    int objectIndex(const std::string& name) const; // -1 if absent
    size_t primCount() const { return mPrims.size() + mPlanes.size(); }

private:
    friend class Scene;

    struct Prim {
        // kind 0: triangle (p0,p1,p2); kind 1: axis-aligned box (p0=min,p1=max)
        int kind = 0;
        Vec3 p0, p1, p2;
        int object = 0;
        AABB bounds() const;
    };
    struct PlanePrim {
        Vec3 point, normal;
        int object;
    };
    struct BakedMaterial {
        Vec3 albedo, emission;
        std::string name;
    };
    struct BvhNode {
        AABB box;
        int left = -1, right = -1;
        int start = 0, count = 0; // leaf when count > 0
    };

    std::vector<Prim> mPrims;
    std::vector<PlanePrim> mPlanes;
    std::vector<BakedMaterial> mMaterials; // per object
    std::vector<AABB> mObjectBounds;
    std::vector<EmitterPoint> mEmitters;
    std::vector<BvhNode> mNodes;
    std::vector<int> mPrimOrder;

    void buildBvh();
    int buildNode(int* prims, int count, int firstSlot);
};

} // namespace adgi
