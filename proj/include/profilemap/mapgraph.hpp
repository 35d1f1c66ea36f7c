#pragma once

// Thresholded institution similarity network with styling attributes.

#include "profilemap/error.hpp"
#include "profilemap/ingest.hpp"
#include "profilemap/similarity.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace profilemap::mapgraph {

/// Share of output in first-quartile journals, binned for node coloring.
enum class Q1Class { gt50, b40_50, b30_40, lt30, unknown };

inline constexpr std::string_view to_string(Q1Class c)
{
    switch (c) {
    case Q1Class::gt50: return "gt50";
    case Q1Class::b40_50: return "b40_50";
    case Q1Class::b30_40: return "b30_40";
    case Q1Class::lt30: return "lt30";
    case Q1Class::unknown: return "unknown";
    }
    return "unknown";
}

/// Half-open bins; a boundary value belongs to the upper bin.
inline Q1Class classify_q1(double share)
{
    if (!(share >= 0.0 && share <= 1.0))
        throw ArgumentError("q1 share must lie in [0, 1]");
    if (share >= 0.5)
        return Q1Class::gt50;
    if (share >= 0.4)
        return Q1Class::b40_50;
    if (share >= 0.3)
        return Q1Class::b30_40;
    return Q1Class::lt30;
}

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct Node {
    std::string institution;
    std::size_t ndocs = 0;
    Q1Class q1_class = Q1Class::unknown;
    std::optional<Point> position;
};

struct Edge {
    std::size_t i = 0; // node indices, i < j
    std::size_t j = 0;
    double similarity = 0.0;
    bool emphasized = false;
};

struct MapGraph {
    std::vector<Node> nodes;
    std::vector<Edge> edges; // sorted by (i, j)
    double threshold = 0.6;
    double emphasis_threshold = 0.75;

    bool has_layout() const
    {
        for (const auto& n : nodes)
            if (!n.position)
                return false;
        return true;
    }
};

inline constexpr double default_threshold = 0.6;
inline constexpr double default_emphasis = 0.75;

/// Keeps pairs with S >= threshold, then drops every node left without an
/// edge. Node order follows the similarity matrix.
inline MapGraph build_graph(const similarity::SimilarityMatrix& s,
                            const std::vector<ingest::InstitutionMeta>& meta,
                            double threshold = default_threshold,
                            double emphasis = default_emphasis)
{
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw ArgumentError("threshold must lie in [0, 1]");
    if (!(emphasis >= threshold))
        throw ArgumentError("emphasis threshold must be >= the edge threshold");

    std::map<std::string_view, const ingest::InstitutionMeta*> by_id;
    for (const auto& m : meta)
        by_id[m.id] = &m;

    const std::size_t n = s.size();
    std::vector<const ingest::InstitutionMeta*> node_meta(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = by_id.find(s.institutions[i]);
        if (it == by_id.end())
            throw ArgumentError("no metadata for institution '" + s.institutions[i] + "'");
        node_meta[i] = it->second;
    }

    std::vector<std::size_t> degree(n, 0);
    struct Candidate {
        std::size_t i, j;
        double s;
    };
    std::vector<Candidate> kept;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (s.at(i, j) >= threshold) {
                kept.push_back({i, j, s.at(i, j)});
                ++degree[i];
                ++degree[j];
            }

    MapGraph g;
    g.threshold = threshold;
    g.emphasis_threshold = emphasis;
    std::vector<std::size_t> remap(n, SIZE_MAX);
    for (std::size_t i = 0; i < n; ++i) {
        if (degree[i] == 0)
            continue;
        remap[i] = g.nodes.size();
        const auto& m = *node_meta[i];
        g.nodes.push_back({m.id, m.ndocs,
                           m.q1_share ? classify_q1(*m.q1_share) : Q1Class::unknown,
                           std::nullopt});
    }
    for (const auto& c : kept)
        g.edges.push_back({remap[c.i], remap[c.j], c.s, c.s >= emphasis});
    return g;
}

} // namespace profilemap::mapgraph
