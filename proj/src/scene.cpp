#include "adgi/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "adgi/errors.hpp"

namespace adgi {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr float kRayEps = 1e-3f;   // offset along normal when spawning rays
constexpr float kHitEps = 1e-4f;   // minimum accepted hit distance

struct BakedTrack {
    Vec3 translate{0.f, 0.f, 0.f};
    float rotYRad = 0.f;
    float emissionScale = 1.f;
};

BakedTrack evalTrack(const std::vector<Keyframe>& track, float t) {
    BakedTrack out;
    if (track.empty()) return out;
    if (t <= track.front().t) {
        const Keyframe& k = track.front();
        return {k.translate, k.rotateYDeg * kPi / 180.f, k.emissionScale};
    }
    if (t >= track.back().t) {
        const Keyframe& k = track.back();
        return {k.translate, k.rotateYDeg * kPi / 180.f, k.emissionScale};
    }
    for (size_t i = 1; i < track.size(); ++i) {
        if (t > track[i].t) continue;
        const Keyframe& a = track[i - 1];
        const Keyframe& b = track[i];
        float span = b.t - a.t;
        float u = span > 0.f ? (t - a.t) / span : 0.f;
        out.translate = a.translate * (1.f - u) + b.translate * u;
        out.rotYRad = (a.rotateYDeg * (1.f - u) + b.rotateYDeg * u) * kPi / 180.f;
        out.emissionScale = a.emissionScale * (1.f - u) + b.emissionScale * u;
        return out;
    }
    return out;
}

Vec3 rotY(Vec3 p, float rad) {
    float c = std::cos(rad), s = std::sin(rad);
    return {c * p.x + s * p.z, p.y, -s * p.x + c * p.z};
}

Vec3 applyTrack(const BakedTrack& tr, Vec3 p) {
    return rotY(p, tr.rotYRad) + tr.translate;
}

// Möller–Trumbore, two-sided. Geometric normal from winding; flipped to face
// the ray, frontFace records which side was struck.
bool hitTriangle(Vec3 o, Vec3 d, Vec3 p0, Vec3 p1, Vec3 p2, float tMax,
                 float& tOut, Vec3& nOut, bool& front) {
    Vec3 e1 = p1 - p0;
    Vec3 e2 = p2 - p0;
    Vec3 pv = cross(d, e2);
    float det = dot(e1, pv);
    if (std::fabs(det) < 1e-12f) return false;
    float inv = 1.f / det;
    Vec3 tv = o - p0;
    float u = dot(tv, pv) * inv;
    if (u < 0.f || u > 1.f) return false;
    Vec3 qv = cross(tv, e1);
    float v = dot(d, qv) * inv;
    if (v < 0.f || u + v > 1.f) return false;
    float t = dot(e2, qv) * inv;
    if (t < kHitEps || t >= tMax) return false;
    Vec3 gn = normalize(cross(e1, e2));
    front = dot(d, gn) < 0.f;
    tOut = t;
    nOut = front ? gn : gn * -1.f;
    return true;
}

// Slab test. A ray starting inside reports the exit point with frontFace
// false, so interior geometry still registers as backface for probes that
// end up inside movers.
bool hitBox(Vec3 o, Vec3 d, Vec3 lo, Vec3 hi, float tMax,
            float& tOut, Vec3& nOut, bool& front) {
    float t0 = 0.f, t1 = tMax;
    int axis0 = -1, axis1 = -1;
    for (int a = 0; a < 3; ++a) {
        float ro = a == 0 ? o.x : (a == 1 ? o.y : o.z);
        float rd = a == 0 ? d.x : (a == 1 ? d.y : d.z);
        float mn = a == 0 ? lo.x : (a == 1 ? lo.y : lo.z);
        float mx = a == 0 ? hi.x : (a == 1 ? hi.y : hi.z);
        if (std::fabs(rd) < 1e-12f) {
            if (ro < mn || ro > mx) return false;
            continue;
        }
        float inv = 1.f / rd;
        float tn = (mn - ro) * inv;
        float tf = (mx - ro) * inv;
        if (tn > tf) std::swap(tn, tf);
        if (tn > t0) { t0 = tn; axis0 = a; }
        if (tf < t1) { t1 = tf; axis1 = a; }
        if (t0 > t1) return false;
    }
    auto faceNormal = [&](int axis, bool negSide) {
        Vec3 n{0.f, 0.f, 0.f};
        float v = negSide ? -1.f : 1.f;
        if (axis == 0) n.x = v; else if (axis == 1) n.y = v; else n.z = v;
        return n;
    };
    if (t0 > kHitEps && axis0 >= 0) {
        float rd = axis0 == 0 ? d.x : (axis0 == 1 ? d.y : d.z);
        tOut = t0;
        nOut = faceNormal(axis0, rd > 0.f);
        front = true;
        return true;
    }
    if (t1 < tMax && t1 > kHitEps && axis1 >= 0) {
        float rd = axis1 == 0 ? d.x : (axis1 == 1 ? d.y : d.z);
        tOut = t1;
        // Exit hit from inside; report the normal facing back at the origin.
        nOut = faceNormal(axis1, rd > 0.f);
        front = false;
        return true;
    }
    return false;
}

void parseVec3(const ordered_json& j, const char* key, Vec3& out, bool required) {
    if (!j.contains(key)) {
        if (required) throw ConfigError(std::string("scene: missing '") + key + "'");
        return;
    }
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != 3)
        throw ConfigError(std::string("scene: '") + key + "' must be [x,y,z]");
    out = Vec3{a[0].get<float>(), a[1].get<float>(), a[2].get<float>()};
}

std::vector<Keyframe> parseTrack(const ordered_json& j) {
    std::vector<Keyframe> track;
    if (!j.contains("track")) return track;
    for (const auto& kj : j.at("track")) {
        Keyframe k;
        k.t = kj.at("t").get<float>();
        parseVec3(kj, "translate", k.translate, false);
        if (kj.contains("rotate_y_deg")) k.rotateYDeg = kj.at("rotate_y_deg").get<float>();
        if (kj.contains("emission_scale")) k.emissionScale = kj.at("emission_scale").get<float>();
        track.push_back(k);
    }
    std::sort(track.begin(), track.end(),
              [](const Keyframe& a, const Keyframe& b) { return a.t < b.t; });
    return track;
}

ordered_json trackJson(const std::vector<Keyframe>& track) {
    ordered_json arr = ordered_json::array();
    for (const auto& k : track) {
        ordered_json kj;
        kj["t"] = k.t;
        kj["translate"] = {k.translate.x, k.translate.y, k.translate.z};
        kj["rotate_y_deg"] = k.rotateYDeg;
        kj["emission_scale"] = k.emissionScale;
        arr.push_back(kj);
    }
    return arr;
}

} // namespace

bool Scene::animated() const {
    for (const auto& o : objects)
        if (o.track.size() > 1) return true;
    return sun.scaleTrack.size() > 1;
}

Scene Scene::loadFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scene: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return loadString(ss.str());
}

Scene Scene::loadString(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("scene: parse error: ") + e.what());
    }
    if (!j.contains("schema") || j.at("schema").get<std::string>() != "adgi-scene/1")
        throw ConfigError("scene: expected schema 'adgi-scene/1'");

    Scene s;
    s.name = j.value("name", std::string("scene"));
    parseVec3(j, "sky", s.sky, false);
    if (j.contains("emitter_max_area"))
        s.emitterMaxArea = j.at("emitter_max_area").get<float>();

    if (j.contains("sun")) {
        const auto& sj = j.at("sun");
        s.sun.enabled = true;
        parseVec3(sj, "direction", s.sun.direction, true);
        if (length(s.sun.direction) < 1e-6f)
            throw ConfigError("scene: sun.direction must be nonzero");
        s.sun.direction = normalize(s.sun.direction);
        parseVec3(sj, "radiance", s.sun.radiance, true);
        s.sun.scaleTrack = parseTrack(sj);
    }

    if (!j.contains("objects") || !j.at("objects").is_array())
        throw ConfigError("scene: missing 'objects' array");
    for (const auto& oj : j.at("objects")) {
        SceneObject o;
        o.name = oj.value("name", std::string());
        std::string shape = oj.value("shape", std::string());
        if (shape == "box") {
            o.shape = ShapeKind::Box;
            parseVec3(oj, "min", o.boxMin, true);
            parseVec3(oj, "max", o.boxMax, true);
            if (o.boxMax.x < o.boxMin.x || o.boxMax.y < o.boxMin.y || o.boxMax.z < o.boxMin.z)
                throw ConfigError("scene: box '" + o.name + "' has max < min");
        } else if (shape == "plane") {
            o.shape = ShapeKind::Plane;
            parseVec3(oj, "point", o.planePoint, true);
            parseVec3(oj, "normal", o.planeNormal, true);
            if (length(o.planeNormal) < 1e-6f)
                throw ConfigError("scene: plane '" + o.name + "' normal must be nonzero");
            o.planeNormal = normalize(o.planeNormal);
        } else if (shape == "trimesh") {
            o.shape = ShapeKind::TriMesh;
            for (const auto& vj : oj.at("vertices"))
                o.vertices.push_back({vj[0].get<float>(), vj[1].get<float>(), vj[2].get<float>()});
            for (const auto& tj : oj.at("triangles")) {
                IVec3 tri{tj[0].get<int>(), tj[1].get<int>(), tj[2].get<int>()};
                int n = static_cast<int>(o.vertices.size());
                if (tri.x < 0 || tri.x >= n || tri.y < 0 || tri.y >= n || tri.z < 0 || tri.z >= n)
                    throw ConfigError("scene: trimesh '" + o.name + "' index out of range");
                o.triangles.push_back(tri);
            }
        } else {
            throw ConfigError("scene: object '" + o.name + "' has unknown shape '" + shape + "'");
        }
        if (oj.contains("material")) {
            const auto& mj = oj.at("material");
            parseVec3(mj, "albedo", o.material.albedo, false);
            parseVec3(mj, "emission", o.material.emission, false);
        }
        o.track = parseTrack(oj);
        s.objects.push_back(std::move(o));
    }
    return s;
}

std::string Scene::toJson() const {
    ordered_json j;
    j["schema"] = "adgi-scene/1";
    j["name"] = name;
    j["sky"] = {sky.x, sky.y, sky.z};
    j["emitter_max_area"] = emitterMaxArea;
    if (sun.enabled) {
        ordered_json sj;
        sj["direction"] = {sun.direction.x, sun.direction.y, sun.direction.z};
        sj["radiance"] = {sun.radiance.x, sun.radiance.y, sun.radiance.z};
        if (!sun.scaleTrack.empty()) sj["track"] = trackJson(sun.scaleTrack);
        j["sun"] = sj;
    }
    ordered_json arr = ordered_json::array();
    for (const auto& o : objects) {
        ordered_json oj;
        oj["name"] = o.name;
        switch (o.shape) {
        case ShapeKind::Box:
            oj["shape"] = "box";
            oj["min"] = {o.boxMin.x, o.boxMin.y, o.boxMin.z};
            oj["max"] = {o.boxMax.x, o.boxMax.y, o.boxMax.z};
            break;
        case ShapeKind::Plane:
            oj["shape"] = "plane";
            oj["point"] = {o.planePoint.x, o.planePoint.y, o.planePoint.z};
            oj["normal"] = {o.planeNormal.x, o.planeNormal.y, o.planeNormal.z};
            break;
        case ShapeKind::TriMesh: {
            oj["shape"] = "trimesh";
            ordered_json vs = ordered_json::array();
            for (const auto& v : o.vertices) vs.push_back({v.x, v.y, v.z});
            oj["vertices"] = vs;
            ordered_json ts = ordered_json::array();
            for (const auto& t : o.triangles) ts.push_back({t.x, t.y, t.z});
            oj["triangles"] = ts;
            break;
        }
        }
        ordered_json mj;
        mj["albedo"] = {o.material.albedo.x, o.material.albedo.y, o.material.albedo.z};
        mj["emission"] = {o.material.emission.x, o.material.emission.y, o.material.emission.z};
        oj["material"] = mj;
        if (!o.track.empty()) oj["track"] = trackJson(o.track);
        arr.push_back(oj);
    }
    j["objects"] = arr;
    return j.dump(2);
}

AABB FrameScene::Prim::bounds() const {
    AABB b;
    if (kind == 1) {
        b.extend(p0);
        b.extend(p1);
    } else {
        b.extend(p0);
        b.extend(p1);
        b.extend(p2);
    }
    return b;
}

FrameScene Scene::at(float t) const {
    FrameScene fs;
    fs.time = t;
    fs.sky = sky;
    if (sun.enabled) {
        fs.hasSun = true;
        fs.sunDir = sun.direction;
        fs.sunRadiance = sun.radiance * evalTrack(sun.scaleTrack, t).emissionScale;
    }

    for (size_t oi = 0; oi < objects.size(); ++oi) {
        const SceneObject& o = objects[oi];
        BakedTrack tr = evalTrack(o.track, t);
        FrameScene::BakedMaterial mat;
        mat.albedo = o.material.albedo;
        mat.emission = o.material.emission * tr.emissionScale;
        mat.name = o.name;
        fs.mMaterials.push_back(mat);
        int obj = static_cast<int>(oi);

        bool rotated = std::fabs(tr.rotYRad) > 1e-7f;
        AABB wb;
        if (o.shape == ShapeKind::Box && !rotated) {
            FrameScene::Prim p;
            p.kind = 1;
            p.p0 = o.boxMin + tr.translate;
            p.p1 = o.boxMax + tr.translate;
            p.object = obj;
            fs.mPrims.push_back(p);
            wb.extend(p.p0);
            wb.extend(p.p1);
        } else if (o.shape == ShapeKind::Box) {
            // Rotated boxes tessellate into 12 triangles.
            Vec3 lo = o.boxMin, hi = o.boxMax;
            Vec3 c[8];
            for (int i = 0; i < 8; ++i) {
                Vec3 v{(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z};
                c[i] = applyTrack(tr, v);
                wb.extend(c[i]);
            }
            // Outward-wound faces: -x +x -y +y -z +z.
            static const int faces[6][4] = {
                {0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6},
            };
            for (const auto& f : faces) {
                FrameScene::Prim a{0, c[f[0]], c[f[1]], c[f[2]], obj};
                FrameScene::Prim b{0, c[f[0]], c[f[2]], c[f[3]], obj};
                fs.mPrims.push_back(a);
                fs.mPrims.push_back(b);
            }
        } else if (o.shape == ShapeKind::Plane) {
            FrameScene::PlanePrim p;
            p.point = applyTrack(tr, o.planePoint);
            p.normal = rotY(o.planeNormal, tr.rotYRad);
            p.object = obj;
            fs.mPlanes.push_back(p);
            wb.extend(p.point); // planes are unbounded; keep a token box
        } else {
            for (const auto& tri : o.triangles) {
                FrameScene::Prim p;
                p.kind = 0;
                p.p0 = applyTrack(tr, o.vertices[tri.x]);
                p.p1 = applyTrack(tr, o.vertices[tri.y]);
                p.p2 = applyTrack(tr, o.vertices[tri.z]);
                p.object = obj;
                fs.mPrims.push_back(p);
                wb.extend(p.p0);
                wb.extend(p.p1);
                wb.extend(p.p2);
            }
        }
        fs.mObjectBounds.push_back(wb);

        // Emitter sample points: subdivide each emissive face so direct
        // lighting integrates area sources deterministically.
        if (maxComponent(mat.emission) > 0.f) {
            auto emitQuad = [&](Vec3 p0, Vec3 e1, Vec3 e2, Vec3 n) {
                float area = length(cross(e1, e2));
                if (area <= 0.f) return;
                int n1 = std::max(1, (int)std::ceil(std::sqrt(area / emitterMaxArea)));
                int n2 = n1;
                float cellArea = area / (float)(n1 * n2);
                for (int a = 0; a < n1; ++a)
                    for (int b = 0; b < n2; ++b) {
                        EmitterPoint ep;
                        ep.position = p0 + e1 * ((a + 0.5f) / n1) + e2 * ((b + 0.5f) / n2);
                        ep.normal = n;
                        ep.radiance = mat.emission;
                        ep.area = cellArea;
                        fs.mEmitters.push_back(ep);
                    }
            };
            if (o.shape == ShapeKind::Box) {
                Vec3 lo = o.boxMin, hi = o.boxMax;
                Vec3 ex{hi.x - lo.x, 0.f, 0.f};
                Vec3 ey{0.f, hi.y - lo.y, 0.f};
                Vec3 ez{0.f, 0.f, hi.z - lo.z};
                struct Face { Vec3 p0, e1, e2, n; };
                Face faces[6] = {
                    {lo, ey, ez, {-1.f, 0.f, 0.f}},
                    {lo + ex, ey, ez, {1.f, 0.f, 0.f}},
                    {lo, ex, ez, {0.f, -1.f, 0.f}},
                    {lo + ey, ex, ez, {0.f, 1.f, 0.f}},
                    {lo, ex, ey, {0.f, 0.f, -1.f}},
                    {lo + ez, ex, ey, {0.f, 0.f, 1.f}},
                };
                for (const auto& f : faces) {
                    Vec3 p0 = applyTrack(tr, f.p0);
                    Vec3 e1 = rotY(f.e1, tr.rotYRad);
                    Vec3 e2 = rotY(f.e2, tr.rotYRad);
                    emitQuad(p0, e1, e2, rotY(f.n, tr.rotYRad));
                }
            } else if (o.shape == ShapeKind::TriMesh) {
                for (const auto& tri : o.triangles) {
                    Vec3 p0 = applyTrack(tr, o.vertices[tri.x]);
                    Vec3 p1 = applyTrack(tr, o.vertices[tri.y]);
                    Vec3 p2 = applyTrack(tr, o.vertices[tri.z]);
                    float area = 0.5f * length(cross(p1 - p0, p2 - p0));
                    if (area <= 0.f) continue;
                    EmitterPoint ep;
                    ep.position = (p0 + p1 + p2) * (1.f / 3.f);
                    ep.normal = normalize(cross(p1 - p0, p2 - p0));
                    ep.radiance = mat.emission;
                    ep.area = area;
                    fs.mEmitters.push_back(ep);
                }
            }
            // Emissive planes are unbounded and unsupported as area sources.
        }
    }

    fs.buildBvh();
    return fs;
}

void FrameScene::buildBvh() {
    mPrimOrder.resize(mPrims.size());
    for (size_t i = 0; i < mPrimOrder.size(); ++i) mPrimOrder[i] = (int)i;
    mNodes.clear();
    if (mPrims.empty()) return;
    mNodes.reserve(mPrims.size() * 2);
    mNodes.push_back({});
    buildNode(mPrimOrder.data(), (int)mPrimOrder.size(), 0);
}

int FrameScene::buildNode(int* prims, int count, int slot) {
    BvhNode node;
    for (int i = 0; i < count; ++i) {
        AABB b = mPrims[prims[i]].bounds();
        node.box.extend(b.lo);
        node.box.extend(b.hi);
    }
    if (count <= 4) {
        node.start = (int)(prims - mPrimOrder.data());
        node.count = count;
        mNodes[slot] = node;
        return slot;
    }
    Vec3 ext = node.box.extents();
    int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
    int mid = count / 2;
    std::nth_element(prims, prims + mid, prims + count, [&](int a, int b) {
        Vec3 ca = mPrims[a].bounds().center();
        Vec3 cb = mPrims[b].bounds().center();
        float fa = axis == 0 ? ca.x : (axis == 1 ? ca.y : ca.z);
        float fb = axis == 0 ? cb.x : (axis == 1 ? cb.y : cb.z);
        return fa < fb;
    });
    mNodes.push_back({});
    mNodes.push_back({});
    int l = (int)mNodes.size() - 2;
    int r = (int)mNodes.size() - 1;
    node.left = buildNode(prims, mid, l);
    node.right = buildNode(prims + mid, count - mid, r);
    mNodes[slot] = node;
    return slot;
}

namespace {

bool hitAabb(const AABB& b, Vec3 o, Vec3 inv, float tMax) {
    float t0 = 0.f, t1 = tMax;
    for (int a = 0; a < 3; ++a) {
        float ro = a == 0 ? o.x : (a == 1 ? o.y : o.z);
        float iv = a == 0 ? inv.x : (a == 1 ? inv.y : inv.z);
        float mn = a == 0 ? b.lo.x : (a == 1 ? b.lo.y : b.lo.z);
        float mx = a == 0 ? b.hi.x : (a == 1 ? b.hi.y : b.hi.z);
        float tn = (mn - ro) * iv;
        float tf = (mx - ro) * iv;
        if (tn > tf) std::swap(tn, tf);
        if (tn > t0) t0 = tn;
        if (tf < t1) t1 = tf;
        if (t0 > t1) return false;
    }
    return true;
}

} // namespace

HitRecord FrameScene::trace(Vec3 origin, Vec3 dir, float tMax) const {
    HitRecord best;
    best.dist = tMax;

    if (!mNodes.empty()) {
        Vec3 inv{1.f / dir.x, 1.f / dir.y, 1.f / dir.z};
        int stack[64];
        int sp = 0;
        stack[sp++] = 0;
        while (sp > 0) {
            const BvhNode& node = mNodes[stack[--sp]];
            if (!hitAabb(node.box, origin, inv, best.dist)) continue;
            if (node.count > 0) {
                for (int i = 0; i < node.count; ++i) {
                    const Prim& p = mPrims[mPrimOrder[node.start + i]];
                    float t;
                    Vec3 n;
                    bool front;
                    bool hit = p.kind == 1
                        ? hitBox(origin, dir, p.p0, p.p1, best.dist, t, n, front)
                        : hitTriangle(origin, dir, p.p0, p.p1, p.p2, best.dist, t, n, front);
                    if (hit) {
                        best.dist = t;
                        best.normal = n;
                        best.frontFace = front;
                        best.object = p.object;
                    }
                }
            } else {
                stack[sp++] = node.left;
                stack[sp++] = node.right;
            }
        }
    }

    for (const auto& pl : mPlanes) {
        float denom = dot(dir, pl.normal);
        if (std::fabs(denom) < 1e-9f) continue;
        float t = dot(pl.point - origin, pl.normal) / denom;
        if (t < kHitEps || t >= best.dist) continue;
        best.dist = t;
        best.normal = denom < 0.f ? pl.normal : pl.normal * -1.f;
        best.frontFace = denom < 0.f;
        best.object = pl.object;
    }

    if (best.object >= 0 && best.dist < tMax) {
        best.position = origin + dir * best.dist;
        const BakedMaterial& m = mMaterials[best.object];
        best.albedo = m.albedo;
        best.emission = m.emission;
    } else {
        best.dist = kInf;
        best.object = -1;
    }
    return best;
}

bool FrameScene::occluded(Vec3 from, Vec3 to) const {
    Vec3 d = to - from;
    float len = length(d);
    if (len < kHitEps) return false;
    d = d * (1.f / len);
    HitRecord h = trace(from + d * kRayEps, d, len - 2.f * kRayEps);
    return h.hit();
}

int FrameScene::objectIndex(const std::string& name) const {
    for (size_t i = 0; i < mMaterials.size(); ++i)
        if (mMaterials[i].name == name) return (int)i;
    return -1;
}

} // namespace adgi
