#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlpoly/vec3.hpp"

namespace rlpoly {

// One polygonal component. Closed components wrap from the last vertex back to
// the first; the closing edge is edge (vertex_count - 1).
struct Component {
    std::vector<Vec3> vertices;
    bool closed = true;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int edge_count() const { return closed ? vertex_count() : vertex_count() - 1; }
};

// An edge identified by component and per-component edge index.
struct EdgeRef {
    int component = 0;
    int index = 0;

    constexpr bool operator==(const EdgeRef&) const = default;
};

// A point on the curve: parameter t in [0,1] along edge `edge` of `component`.
// t = 0 is the edge's start vertex, t = 1 its end vertex.
struct CurvePos {
    int component = 0;
    int edge = 0;
    double t = 0.0;

    constexpr bool operator==(const CurvePos&) const = default;
};

// Inward/outward unit tangents. A side is absent at the corresponding endpoint
// of an open component.
struct TangentPair {
    std::optional<Vec3> t_in;
    std::optional<Vec3> t_out;
};

struct PolyCurve {
    std::vector<Component> components;

    int total_edge_count() const {
        int n = 0;
        for (const auto& c : components) n += c.edge_count();
        return n;
    }

    int edge_id(EdgeRef e) const {
        int base = 0;
        for (int c = 0; c < e.component; ++c) base += components[c].edge_count();
        return base + e.index;
    }

    EdgeRef edge_ref(int id) const {
        for (int c = 0; c < static_cast<int>(components.size()); ++c) {
            int ec = components[c].edge_count();
            if (id < ec) return {c, id};
            id -= ec;
        }
        throw std::invalid_argument("edge id out of range");
    }

    const Vec3& edge_start(EdgeRef e) const { return components[e.component].vertices[e.index]; }

    const Vec3& edge_end(EdgeRef e) const {
        const Component& c = components[e.component];
        return c.vertices[(e.index + 1) % c.vertex_count()];
    }

    Vec3 edge_vector(EdgeRef e) const { return edge_end(e) - edge_start(e); }

    double edge_length(EdgeRef e) const { return norm(edge_vector(e)); }

    bool edges_share_vertex(EdgeRef a, EdgeRef b) const {
        if (a.component != b.component) return false;
        if (a.index == b.index) return true;
        const Component& c = components[a.component];
        int d = std::abs(a.index - b.index);
        if (d == 1) return true;
        return c.closed && d == c.edge_count() - 1;
    }

    // Throws std::invalid_argument when structural invariants fail: a closed
    // component needs >= 3 vertices, an open one >= 2, consecutive vertices
    // (including the closing pair) must be distinct, coordinates finite.
    void validate() const {
        if (components.empty()) throw std::invalid_argument("curve has no components");
        for (size_t ci = 0; ci < components.size(); ++ci) {
            const Component& c = components[ci];
            const int minv = c.closed ? 3 : 2;
            if (c.vertex_count() < minv)
                throw std::invalid_argument("component " + std::to_string(ci) +
                                            ": too few vertices");
            for (const Vec3& v : c.vertices)
                if (!is_finite(v))
                    throw std::invalid_argument("component " + std::to_string(ci) +
                                                ": non-finite coordinate");
            for (int i = 0; i < c.edge_count(); ++i) {
                EdgeRef e{static_cast<int>(ci), i};
                if (edge_start(e) == edge_end(e))
                    throw std::invalid_argument("component " + std::to_string(ci) + ": edge " +
                                                std::to_string(i) + " has zero length");
            }
        }
    }
};

namespace detail {

inline void check_pos(const PolyCurve& curve, const CurvePos& p) {
    if (p.component < 0 || p.component >= static_cast<int>(curve.components.size()))
        throw std::invalid_argument("invalid position: component out of range");
    const Component& c = curve.components[p.component];
    if (p.edge < 0 || p.edge >= c.edge_count())
        throw std::invalid_argument("invalid position: edge out of range");
    if (!(p.t >= 0.0 && p.t <= 1.0))
        throw std::invalid_argument("invalid position: t outside [0,1]");
}

}  // namespace detail

inline Vec3 point_at(const PolyCurve& curve, const CurvePos& p) {
    detail::check_pos(curve, p);
    EdgeRef e{p.component, p.edge};
    return curve.edge_start(e) * (1.0 - p.t) + curve.edge_end(e) * p.t;
}

// Unit tangents of the full curve at p. Interior points have t_in == t_out; at
// a vertex the incoming/outgoing edges are consulted, wrapping around on
// closed components. Missing sides at open endpoints are reported absent.
inline TangentPair tangents_at(const PolyCurve& curve, const CurvePos& p) {
    detail::check_pos(curve, p);
    const Component& c = curve.components[p.component];
    const int n = c.edge_count();
    auto dir = [&](int i) { return normalized(curve.edge_vector({p.component, i})); };

    if (p.t > 0.0 && p.t < 1.0) {
        Vec3 u = dir(p.edge);
        return {u, u};
    }
    // Snap t == 1 to the start of the following edge so both cases share code.
    int v_edge = p.edge;          // vertex = start of v_edge
    if (p.t == 1.0) {
        if (c.closed) {
            v_edge = (p.edge + 1) % n;
        } else if (p.edge + 1 < n) {
            v_edge = p.edge + 1;
        } else {
            // terminal vertex of an open component
            return {dir(p.edge), std::nullopt};
        }
    }
    TangentPair out;
    out.t_out = dir(v_edge);
    if (v_edge > 0)
        out.t_in = dir(v_edge - 1);
    else if (c.closed)
        out.t_in = dir(n - 1);
    return out;
}

// Turning (exterior) angle at the vertex given as (edge i, t = 0): the angle
// between the directions of edge i-1 and edge i. 0 for straight continuation,
// pi for doubling back.
inline double turning_angle(const PolyCurve& curve, const CurvePos& p) {
    detail::check_pos(curve, p);
    if (p.t != 0.0) throw std::invalid_argument("turning_angle: position must have t = 0");
    const Component& c = curve.components[p.component];
    if (!c.closed && p.edge == 0)
        throw std::invalid_argument("turning_angle: endpoint vertex of an open component");
    const int n = c.edge_count();
    int prev = p.edge > 0 ? p.edge - 1 : n - 1;
    Vec3 u = curve.edge_vector({p.component, prev});
    Vec3 v = curve.edge_vector({p.component, p.edge});
    return std::atan2(norm(cross(u, v)), dot(u, v));
}

inline double curve_length(const PolyCurve& curve) {
    double total = 0.0;
    for (int c = 0; c < static_cast<int>(curve.components.size()); ++c)
        for (int i = 0; i < curve.components[c].edge_count(); ++i)
            total += curve.edge_length({c, i});
    return total;
}

}  // namespace rlpoly
