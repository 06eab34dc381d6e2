#pragma once

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rlpoly/curve.hpp"
#include "rlpoly/vec3.hpp"

namespace rlpoly {

// Default tree depth: ceil(3/4 log2 n), at least 1. Clamped to 22 so that the
// 3*(levels-1) tag bits fit in 64 bits.
inline int default_levels(int n) {
    assert(n >= 1);
    int l = static_cast<int>(std::ceil(0.75 * std::log2(static_cast<double>(n))));
    return std::clamp(l, 1, 22);
}

// Leaf capacity for n edges at depth `levels`: ceil(n / 2^(levels-1)).
inline int leaf_capacity(int n, int levels) {
    assert(n >= 1 && levels >= 1);
    const std::int64_t d = std::int64_t{1} << (levels - 1);
    return static_cast<int>((n + d - 1) / d);
}

// Inserts two zero bits between consecutive bits of k (1101 -> 1001000001).
// Precondition: k < 2^21, so the result fits in 63 bits.
inline std::uint64_t spread_bits(std::uint64_t k) {
    assert(k < (std::uint64_t{1} << 21));
    k &= 0x1fffff;
    k = (k | k << 32) & 0x001f00000000ffff;
    k = (k | k << 16) & 0x001f0000ff0000ff;
    k = (k | k << 8) & 0x100f00f00f00f00f;
    k = (k | k << 4) & 0x10c30c30c30c30c3;
    k = (k | k << 2) & 0x1249249249249249;
    return k;
}

// One edge as stored in the traversal-ordered by_oct array: identified by its
// midpoint, carrying the endpoints for exact edge checks and the owning edge.
struct EdgeRecord {
    Vec3 midpoint;
    double length = 0.0;
    Vec3 start;
    Vec3 end;
    EdgeRef edge;
    std::int32_t edge_id = 0;  // flattened id, ties in all sorts break on this
    std::int32_t rank = 0;     // position in by_oct once sorted by tag
};

// Per-edge box numbers in x, y, z and the interleaved octal tag
// z1 y1 x1 z2 y2 x2 ... (z most significant within each octal digit).
struct TagInfo {
    std::uint32_t xbox = 0;
    std::uint32_t ybox = 0;
    std::uint32_t zbox = 0;
    std::uint64_t tag = 0;
};

// Optional build instrumentation.
struct BuildStats {
    std::size_t sort_comparisons = 0;
    std::size_t tag_transitions = 0;
    std::size_t nodes_created = 0;
};

inline std::vector<EdgeRecord> make_edge_records(const PolyCurve& curve) {
    std::vector<EdgeRecord> out;
    out.reserve(curve.total_edge_count());
    std::int32_t id = 0;
    for (int c = 0; c < static_cast<int>(curve.components.size()); ++c) {
        for (int i = 0; i < curve.components[c].edge_count(); ++i) {
            EdgeRef e{c, i};
            const Vec3& a = curve.edge_start(e);
            const Vec3& b = curve.edge_end(e);
            out.push_back({(a + b) * 0.5, distance(a, b), a, b, e, id, 0});
            ++id;
        }
    }
    return out;
}

// Box numbers and octal tags for a set of edges: sort the midpoints by x, y
// and z (ties on edge id, so identical midpoints get reproducible tags), cut
// each sorted array into sections of m = leaf_capacity(n, levels) edges, and
// interleave the bits of the three section numbers. Result is indexed by the
// position of the edge in `records`.
inline std::vector<TagInfo> octal_tags(const std::vector<EdgeRecord>& records, int levels,
                                       BuildStats* stats = nullptr) {
    const int n = static_cast<int>(records.size());
    assert(n >= 1);
    const int m = leaf_capacity(n, levels);
    std::vector<TagInfo> tags(n);

    std::vector<std::int32_t> order(n);
    for (int axis = 0; axis < 3; ++axis) {
        std::iota(order.begin(), order.end(), 0);
        auto key = [&](std::int32_t i) { return records[i].midpoint[axis]; };
        std::sort(order.begin(), order.end(), [&](std::int32_t i, std::int32_t j) {
            if (stats) ++stats->sort_comparisons;
            double a = key(i), b = key(j);
            if (a != b) return a < b;
            return records[i].edge_id < records[j].edge_id;
        });
        for (int rank = 0; rank < n; ++rank) {
            auto box = static_cast<std::uint32_t>(rank / m);
            TagInfo& t = tags[order[rank]];
            (axis == 0 ? t.xbox : axis == 1 ? t.ybox : t.zbox) = box;
        }
    }
    for (TagInfo& t : tags)
        t.tag = spread_bits(t.zbox) << 2 | spread_bits(t.ybox) << 1 | spread_bits(t.xbox);
    return tags;
}

// Tree node over a contiguous by_oct range [first, first + count). `first` is
// also the lowest by_oct rank in the subtree. Leaves have no children.
struct OctreeNode {
    Aabb bounds;  // encloses the edge *endpoints* of every edge in the range
    std::int32_t first = 0;
    std::int32_t count = 0;
    std::int32_t children[8] = {};
    std::int8_t child_count = 0;

    bool is_leaf() const { return child_count == 0; }
};

struct Octree {
    int levels = 1;
    int capacity = 1;
    std::vector<EdgeRecord> by_oct;  // sorted by octal tag, ties on edge id
    std::vector<OctreeNode> nodes;
    std::int32_t root = 0;
};

namespace detail {

inline Aabb range_bounds(const std::vector<EdgeRecord>& by_oct, std::int32_t first,
                         std::int32_t count) {
    Aabb b;
    for (std::int32_t k = first; k < first + count; ++k) {
        b.expand(by_oct[k].start);
        b.expand(by_oct[k].end);
    }
    return b;
}

struct OpenBox {
    std::int32_t first = 0;
    std::int32_t count = 0;
    std::vector<std::int32_t> children;
};

// Finalize a closing box into the node array. When pruning, a subtree with
// <= m edges collapses to a leaf and a single-child box is spliced out.
inline std::int32_t close_box(Octree& tree, OpenBox&& box, int m, bool prune, bool at_leaf_depth,
                              BuildStats* stats) {
    if (at_leaf_depth || (prune && box.count <= m)) {
        OctreeNode node;
        node.first = box.first;
        node.count = box.count;
        node.bounds = range_bounds(tree.by_oct, box.first, box.count);
        tree.nodes.push_back(node);
        if (stats) ++stats->nodes_created;
        return static_cast<std::int32_t>(tree.nodes.size() - 1);
    }
    if (prune && box.children.size() == 1) return box.children[0];
    OctreeNode node;
    node.first = box.first;
    node.count = box.count;
    node.child_count = static_cast<std::int8_t>(box.children.size());
    for (std::size_t i = 0; i < box.children.size(); ++i) {
        node.children[i] = box.children[i];
        node.bounds.expand(tree.nodes[box.children[i]].bounds);
    }
    tree.nodes.push_back(node);
    if (stats) ++stats->nodes_created;
    return static_cast<std::int32_t>(tree.nodes.size() - 1);
}

}  // namespace detail

// Build the octree by the sort/interleave method: tag the edges, sort by_oct
// by tag, then assemble the box hierarchy in one pass over by_oct keeping the
// current root-to-leaf limb of open boxes. When the tag changes, XOR with the
// previous tag tells how many trailing octal digits changed and therefore how
// many limb boxes close. With `prune` (the default) closed subtrees holding
// <= m edges collapse into leaves as they complete.
inline Octree build_octree(const PolyCurve& curve, std::optional<int> levels = std::nullopt,
                           bool prune = true, BuildStats* stats = nullptr) {
    const int n = curve.total_edge_count();
    if (n < 1) throw std::invalid_argument("build_octree: curve has no edges");

    Octree tree;
    tree.levels = std::clamp(levels.value_or(default_levels(n)), 1, 22);
    tree.capacity = leaf_capacity(n, tree.levels);
    tree.by_oct = make_edge_records(curve);
    std::vector<TagInfo> tags = octal_tags(tree.by_oct, tree.levels, stats);

    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t i, std::int32_t j) {
        if (stats) ++stats->sort_comparisons;
        if (tags[i].tag != tags[j].tag) return tags[i].tag < tags[j].tag;
        return i < j;  // record order is edge-id order
    });
    {
        std::vector<EdgeRecord> sorted(n);
        std::vector<std::uint64_t> sorted_tags(n);
        for (int r = 0; r < n; ++r) {
            sorted[r] = tree.by_oct[order[r]];
            sorted[r].rank = r;
            sorted_tags[r] = tags[order[r]].tag;
        }
        tree.by_oct = std::move(sorted);

        const int depth = tree.levels - 1;  // octal digits per tag
        if (depth == 0 || n <= tree.capacity) {
            // Single box: every edge shares tag 0.
            tree.nodes.push_back({detail::range_bounds(tree.by_oct, 0, n), 0, n, {}, 0});
            if (stats) ++stats->nodes_created;
            tree.root = 0;
            return tree;
        }

        // limb[d] is the open box whose path is the first d octal digits of
        // the current tag; limb[0] is the root, limb[depth] the leaf box.
        std::vector<detail::OpenBox> limb(depth + 1);
        std::uint64_t prev_tag = sorted_tags[0];
        std::int32_t r = 0;
        while (r < n) {
            std::int32_t group_first = r;
            while (r < n && sorted_tags[r] == prev_tag) ++r;
            std::int32_t group_count = r - group_first;
            for (auto& b : limb) b.count += group_count;
            if (r == n) break;

            std::uint64_t next_tag = sorted_tags[r];
            if (stats) ++stats->tag_transitions;
            // Highest differing bit -> index of the first differing octal
            // digit (0 = most significant); digits at deeper indices close.
            int hi_bit = std::bit_width(prev_tag ^ next_tag) - 1;
            int keep = depth - 1 - hi_bit / 3;  // digits still shared
            for (int d = depth; d > keep; --d) {
                std::int32_t id = detail::close_box(tree, std::move(limb[d]), tree.capacity,
                                                    prune, d == depth, stats);
                limb[d - 1].children.push_back(id);
            }
            for (int d = keep + 1; d <= depth; ++d) limb[d] = {r, 0, {}};
            prev_tag = next_tag;
        }
        for (int d = depth; d > 0; --d) {
            std::int32_t id = detail::close_box(tree, std::move(limb[d]), tree.capacity, prune,
                                                d == depth, stats);
            limb[d - 1].children.push_back(id);
        }
        tree.root = detail::close_box(tree, std::move(limb[0]), tree.capacity, prune, false, stats);
    }
    return tree;
}

// Standalone pruning pass: collapse every subtree containing <= m edges into
// one leaf and splice out single-child boxes. Idempotent; build_octree with
// prune = true produces this form directly.
inline Octree prune(const Octree& tree) {
    Octree out;
    out.levels = tree.levels;
    out.capacity = tree.capacity;
    out.by_oct = tree.by_oct;

    auto rec = [&](auto&& self, std::int32_t id) -> std::int32_t {
        const OctreeNode& node = tree.nodes[id];
        if (node.count <= tree.capacity || node.is_leaf()) {
            out.nodes.push_back(
                {node.bounds, node.first, node.count, {}, 0});
            return static_cast<std::int32_t>(out.nodes.size() - 1);
        }
        if (node.child_count == 1) return self(self, node.children[0]);
        OctreeNode copy;
        copy.bounds = node.bounds;
        copy.first = node.first;
        copy.count = node.count;
        copy.child_count = node.child_count;
        for (int i = 0; i < node.child_count; ++i) copy.children[i] = self(self, node.children[i]);
        out.nodes.push_back(copy);
        return static_cast<std::int32_t>(out.nodes.size() - 1);
    };
    out.root = rec(rec, tree.root);
    return out;
}

// Per-edge tag table in by_oct order: one line per edge,
// "edge-id x-box y-box z-box bits octal decimal".
inline std::string format_tag_table(const PolyCurve& curve, std::optional<int> levels = std::nullopt,
                                    bool header = true) {
    const int n = curve.total_edge_count();
    if (n < 1) throw std::invalid_argument("format_tag_table: curve has no edges");
    const int lv = std::clamp(levels.value_or(default_levels(n)), 1, 22);
    std::vector<EdgeRecord> records = make_edge_records(curve);
    std::vector<TagInfo> tags = octal_tags(records, lv);

    std::vector<std::int32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::int32_t i, std::int32_t j) {
        if (tags[i].tag != tags[j].tag) return tags[i].tag < tags[j].tag;
        return i < j;
    });

    int max_index = 0;
    for (const auto& c : curve.components) max_index = std::max(max_index, c.edge_count() - 1);
    int width = 1;
    for (int v = max_index; v >= 10; v /= 10) ++width;

    const int digits = lv - 1;
    std::ostringstream os;
    if (header) os << "edge x-box y-box z-box bits octal decimal\n";
    for (std::int32_t i : order) {
        const TagInfo& t = tags[i];
        std::string idx = std::to_string(records[i].edge.index);
        idx.insert(0, width - idx.size(), '0');
        os << "e_" << records[i].edge.component << idx << ' ' << t.xbox << ' ' << t.ybox << ' '
           << t.zbox << ' ';
        if (digits == 0) {
            os << "0 0 0\n";
            continue;
        }
        for (int b = 3 * digits - 1; b >= 0; --b) os << ((t.tag >> b) & 1);
        os << ' ';
        for (int d = digits - 1; d >= 0; --d) os << ((t.tag >> (3 * d)) & 7);
        os << ' ' << t.tag << '\n';
    }
    return os.str();
}

}  // namespace rlpoly
