#pragma once

#include <cmath>
#include <optional>

#include "rlpoly/curve.hpp"
#include "rlpoly/vec3.hpp"

namespace rlpoly {

// Pruning region of an edge: any second endpoint of a locally minimal pair
// whose first endpoint lies on the half-open edge e_i - {v_{i+1}} sits either
// in the slab of planes normal to the edge through it, or in the wedge at the
// edge's start vertex bounded by the inward/outward tangent half-spaces.
struct Ramp {
    Vec3 u;                       // unit edge direction
    double lo = 0.0;              // projection of v_i onto u
    double hi = 0.0;              // projection of v_{i+1} onto u (+inf, see below)
    Vec3 apex;                    // v_i
    std::optional<Vec3> t_in;     // T-(v_i); absent at an open component's start
    Vec3 t_out;                   // T+(v_i) = u
    double edge_length = 0.0;

    bool contains(const Vec3& w, double slack = 0.0) const {
        double p = dot(w, u);
        if (p >= lo - slack && p <= hi + slack) return true;
        Vec3 r = w - apex;
        if (t_in && dot(*t_in, r) < -slack) return false;
        return dot(t_out, r) <= slack;
    }
};

// For the last edge of an open component the slab is extended to hi = +inf:
// the terminal vertex lies on no half-open edge, so its tangent cone (the
// far half-space) must be covered here for the box pruning to stay sound.
inline Ramp ramp_for_edge(const PolyCurve& curve, EdgeRef e) {
    const Component& c = curve.components[e.component];
    Ramp ramp;
    Vec3 ev = curve.edge_vector(e);
    ramp.edge_length = norm(ev);
    ramp.u = ev / ramp.edge_length;
    ramp.apex = curve.edge_start(e);
    ramp.lo = dot(ramp.apex, ramp.u);
    ramp.hi = dot(curve.edge_end(e), ramp.u);
    if (!c.closed && e.index == c.edge_count() - 1)
        ramp.hi = std::numeric_limits<double>::infinity();
    ramp.t_out = ramp.u;
    if (e.index > 0)
        ramp.t_in = normalized(curve.edge_vector({e.component, e.index - 1}));
    else if (c.closed)
        ramp.t_in = normalized(curve.edge_vector({e.component, c.edge_count() - 1}));
    return ramp;
}

// Conservative box-ramp test: true whenever the box meets the ramp, false
// positives allowed. The slab test (projection overlap) is exact; the wedge
// is rejected only when every corner fails the same inequality by more than
// the slack margin. The margin tol*(farthest corner + edge length) dominates
// tol*(chord length) for any candidate endpoint inside the box, matching the
// acceptance slack of the edge checks.
inline bool aabb_intersects_ramp(const Aabb& box, const Ramp& ramp, double tol = 1e-10) {
    const double slack = tol * (box.max_corner_distance(ramp.apex) + ramp.edge_length);

    Vec3 center = box.center();
    Vec3 he = box.half_extent();
    double pc = dot(center, ramp.u);
    double pr = std::abs(ramp.u.x) * he.x + std::abs(ramp.u.y) * he.y + std::abs(ramp.u.z) * he.z;
    if (pc + pr >= ramp.lo - slack && pc - pr <= ramp.hi + slack) return true;

    bool in_fails = ramp.t_in.has_value();
    bool out_fails = true;
    for (int k = 0; k < 8 && (in_fails || out_fails); ++k) {
        Vec3 corner{k & 1 ? box.max.x : box.min.x, k & 2 ? box.max.y : box.min.y,
                    k & 4 ? box.max.z : box.min.z};
        Vec3 r = corner - ramp.apex;
        if (in_fails && dot(*ramp.t_in, r) >= -slack) in_fails = false;
        if (out_fails && dot(ramp.t_out, r) <= slack) out_fails = false;
    }
    return !(in_fails || out_fails);
}

// Exact distance from an axis-aligned box to a segment (0 if they meet).
// The squared point-to-box distance along the segment is piecewise quadratic
// with breakpoints where the segment crosses a slab plane; minimize each
// piece in closed form.
inline double aabb_segment_distance(const Aabb& box, const Vec3& a, const Vec3& b) {
    const Vec3 dir = b - a;
    double ts[16];
    int nts = 0;
    ts[nts++] = 0.0;
    ts[nts++] = 1.0;
    for (int d = 0; d < 3; ++d) {
        if (dir[d] == 0.0) continue;
        for (double plane : {box.min[d], box.max[d]}) {
            double t = (plane - a[d]) / dir[d];
            if (t > 0.0 && t < 1.0) ts[nts++] = t;
        }
    }
    std::sort(ts, ts + nts);

    auto sq_dist_at = [&](double t) {
        Vec3 p = a + dir * t;
        Vec3 q = box.clamp(p) - p;
        return dot(q, q);
    };

    double best = std::min(sq_dist_at(0.0), sq_dist_at(1.0));
    for (int i = 0; i + 1 < nts; ++i) {
        double t0 = ts[i], t1 = ts[i + 1];
        if (t1 <= t0) continue;
        double tm = 0.5 * (t0 + t1);
        // Quadratic A t^2 + B t + C on this piece from the axes where the
        // point is outside the box.
        double A = 0.0, B = 0.0;
        for (int d = 0; d < 3; ++d) {
            double pm = a[d] + dir[d] * tm;
            double plane;
            if (pm < box.min[d])
                plane = box.min[d];
            else if (pm > box.max[d])
                plane = box.max[d];
            else
                continue;
            double c0 = a[d] - plane;
            A += dir[d] * dir[d];
            B += 2.0 * c0 * dir[d];
        }
        if (A > 0.0) {
            double tv = -B / (2.0 * A);
            if (tv > t0 && tv < t1) best = std::min(best, sq_dist_at(tv));
        }
        best = std::min(best, std::min(sq_dist_at(t0), sq_dist_at(t1)));
    }
    return std::sqrt(best);
}

}  // namespace rlpoly
