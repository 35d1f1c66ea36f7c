#pragma once

// Small hand-built inputs shared by the unit and acceptance tests.

#include "profilemap/ingest.hpp"
#include "profilemap/mapgraph.hpp"
#include "profilemap/similarity.hpp"
#include "profilemap/text.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fixture {

inline std::filesystem::path source_dir() { return PROFILEMAP_SOURCE_DIR; }

inline std::string golden(const std::string& name)
{
    return profilemap::text::read_file(source_dir() / "tests" / "golden" / name);
}

/// Five points in two groups {a, b, c} and {d, e}. Merges by hand:
/// (a,b) 0.1, (d,e) 0.2, (ab,c) 0.6, (abc,de) 0.9.
inline profilemap::similarity::DissimilarityMatrix five_point()
{
    const double ab = 0.1, ac = 0.6, ad = 0.9, ae = 0.8, bc = 0.5, bd = 0.85, be = 0.75, cd = 0.7,
                 ce = 0.65, de = 0.2;
    return {profilemap::similarity::Order::second,
            {"a", "b", "c", "d", "e"},
            {0, ab, ac, ad, ae,
             ab, 0, bc, bd, be,
             ac, bc, 0, cd, ce,
             ad, bd, cd, 0, de,
             ae, be, ce, de, 0}};
}

/// Five institutions; at 0.6 / 0.75 the edges are p-q (emphasized), p-r and
/// r-s (emphasized, on the boundary); q-r at 0.59 misses and t is isolated.
inline profilemap::similarity::SimilarityMatrix five_institutions()
{
    return {profilemap::similarity::Order::second,
            {"univ \"p\" & <co>", "q", "r", "s", "t"},
            {1, 0.8, 0.65, 0.3, 0.5,
             0.8, 1, 0.59, 0.1, 0.2,
             0.65, 0.59, 1, 0.75, 0.4,
             0.3, 0.1, 0.75, 1, 0.55,
             0.5, 0.2, 0.4, 0.55, 1}};
}

inline std::vector<profilemap::ingest::InstitutionMeta> five_institution_meta()
{
    return {{"univ \"p\" & <co>", 120, 0.5, {}},
            {"q", 80, 0.4, {}},
            {"r", 60, std::nullopt, {}},
            {"s", 55, 0.3, {}},
            {"t", 70, 0.1, {}}};
}

/// Graph of five_institutions() with fixed positions, so exports do not
/// depend on the layout solver.
inline profilemap::mapgraph::MapGraph positioned_graph()
{
    auto g = profilemap::mapgraph::build_graph(five_institutions(), five_institution_meta());
    const profilemap::mapgraph::Point pos[] = {{0, 0}, {2, 0}, {0, 1}, {1, 1}};
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        g.nodes[i].position = pos[i];
    return g;
}

inline profilemap::mapgraph::MapGraph two_node_graph()
{
    profilemap::similarity::SimilarityMatrix s{
        profilemap::similarity::Order::second, {"alpha", "beta"}, {1, 0.93, 0.93, 1}};
    return profilemap::mapgraph::build_graph(s, {{"alpha", 11168, 0.56, {}}, {"beta", 55, 0.22, {}}});
}

} // namespace fixture
