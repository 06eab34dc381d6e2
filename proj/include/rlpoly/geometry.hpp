#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "rlpoly/curve.hpp"
#include "rlpoly/vec3.hpp"

namespace rlpoly {

// Polygonal radius of curvature: min over turning vertices of
// min(|e_i|, |e_{i+1}|) / (2 tan(alpha_i / 2)). Vertices with alpha = 0
// contribute +inf; alpha = pi yields 0 (degenerate, reported not thrown).
// Open components skip their endpoints; a 2-vertex open component has no
// applicable vertex and contributes +inf.
inline double min_rad(const PolyCurve& curve) {
    double best = std::numeric_limits<double>::infinity();
    for (int ci = 0; ci < static_cast<int>(curve.components.size()); ++ci) {
        const Component& c = curve.components[ci];
        const int n = c.edge_count();
        const int last = c.closed ? n : n - 1;
        for (int i = 0; i < last; ++i) {
            int j = (i + 1) % n;
            Vec3 u = curve.edge_vector({ci, i});
            Vec3 v = curve.edge_vector({ci, j});
            double alpha = std::atan2(norm(cross(u, v)), dot(u, v));
            double term;
            if (alpha == 0.0)
                term = std::numeric_limits<double>::infinity();
            else if (alpha == std::numbers::pi)
                term = 0.0;
            else
                term = std::min(norm(u), norm(v)) / (2.0 * std::tan(0.5 * alpha));
            best = std::min(best, term);
        }
    }
    return best;
}

struct SegmentClosest {
    double s = 0.0;  // parameter on the first segment
    double t = 0.0;  // parameter on the second segment
    double distance = 0.0;
};

// Global minimum of the distance between segments p0p1 and q0q1. The squared
// distance is a convex quadratic of (s,t), so the minimizing set is a single
// convex set; when it has positive extent (parallel overlapping segments) the
// representative returned is its center.
inline SegmentClosest segment_closest(const Vec3& p0, const Vec3& p1, const Vec3& q0,
                                      const Vec3& q1) {
    const Vec3 u = p1 - p0;
    const Vec3 v = q1 - q0;
    const Vec3 w0 = p0 - q0;
    const double a = dot(u, u);
    const double c = dot(v, v);
    if (a == 0.0 || c == 0.0) throw std::invalid_argument("segment_closest: zero-length segment");
    const double b = dot(u, v);
    const double d = dot(u, w0);
    const double e = dot(v, w0);
    const double denom = a * c - b * b;

    auto clamp01 = [](double x) { return std::clamp(x, 0.0, 1.0); };
    auto finish = [&](double s, double t) {
        Vec3 ps = p0 + u * s;
        Vec3 qt = q0 + v * t;
        return SegmentClosest{s, t, distance(ps, qt)};
    };

    if (denom > 1e-12 * a * c) {
        // Skew/crossing lines: unique minimizer (Ericson-style clamping).
        double s = clamp01((b * e - c * d) / denom);
        double t = (b * s + e) / c;
        if (t < 0.0) {
            t = 0.0;
            s = clamp01(-d / a);
        } else if (t > 1.0) {
            t = 1.0;
            s = clamp01((b - d) / a);
        }
        return finish(s, t);
    }

    // Parallel (or nearly so). The set of s whose foot lies on segment q is
    // the projection of q onto the p-axis, s in [s_q0, s_q1] sorted; the
    // minimizing s-set is its overlap with [0,1]; take the center.
    double s_q0 = -d / a;            // s with p(s) the foot of q0
    double s_q1 = (b - d) / a;       // s with p(s) the foot of q1
    double s_lo = std::min(s_q0, s_q1);
    double s_hi = std::max(s_q0, s_q1);
    double s;
    if (s_hi < 0.0)
        s = 0.0;
    else if (s_lo > 1.0)
        s = 1.0;
    else
        s = 0.5 * (std::max(s_lo, 0.0) + std::min(s_hi, 1.0));
    double t = clamp01((b * s + e) / c);
    return finish(s, t);
}

// A pair of closest approach: a nontrivial local minimum of the self-distance
// function, with curve positions of both endpoints and the chord length.
struct Poca {
    CurvePos a;
    CurvePos b;
    double length = 0.0;
};

namespace detail {

// One side of the Lemma-1 test: w points from this endpoint to the other.
inline bool tangent_cone_ok(const TangentPair& tp, const Vec3& w, double slack) {
    if (tp.t_in && dot(*tp.t_in, w) < -slack) return false;
    if (tp.t_out && dot(*tp.t_out, w) > slack) return false;
    return true;
}

}  // namespace detail

// Classifies the closest approach of nonadjacent edges a and b. Returns the
// pair's local minimum of the distance function if it satisfies the
// tangent-cone conditions of the full curve (interior endpoints reduce to
// chord-perpendicularity), with slack tol * chord length; otherwise nullopt.
// The restriction of the squared distance to a pair of segments is convex, so
// a pair admits at most one local-minimum value; degenerate continua (parallel
// overlapping edges) are reported by one representative at the center of the
// minimizing set.
inline std::optional<Poca> edge_pair_pocas(const PolyCurve& curve, EdgeRef a, EdgeRef b,
                                           double tol = 1e-10) {
    if (a == b || curve.edges_share_vertex(a, b))
        throw std::invalid_argument("edge_pair_pocas: edges are identical or share a vertex");

    SegmentClosest sc =
        segment_closest(curve.edge_start(a), curve.edge_end(a), curve.edge_start(b),
                        curve.edge_end(b));
    CurvePos pa{a.component, a.index, sc.s};
    CurvePos pb{b.component, b.index, sc.t};
    if (sc.distance == 0.0) {
        // Self-intersection: a zero-length chord is a (degenerate) global
        // minimum of the distance function. Thickness will be 0.
        return Poca{pa, pb, 0.0};
    }
    Vec3 x = point_at(curve, pa);
    Vec3 y = point_at(curve, pb);
    Vec3 w = y - x;
    double slack = tol * sc.distance;
    if (!detail::tangent_cone_ok(tangents_at(curve, pa), w, slack)) return std::nullopt;
    if (!detail::tangent_cone_ok(tangents_at(curve, pb), -w, slack)) return std::nullopt;
    return Poca{pa, pb, sc.distance};
}

}  // namespace rlpoly
