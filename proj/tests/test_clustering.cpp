#include "profilemap/clustering.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace profilemap;
using namespace profilemap::clustering;
using Catch::Matchers::WithinAbs;
using Groups = std::vector<std::vector<std::size_t>>;

namespace {

Dendrogram three_point()
{
    return complete_linkage({"a", "b", "c"}, {0, 0.1, 0.5, 0.1, 0, 0.4, 0.5, 0.4, 0});
}

// Leaf members of a merge child, for comparing against the naive oracle.
std::vector<std::size_t> members_of(const Dendrogram& d, std::size_t id)
{
    if (id < d.size())
        return {id};
    const auto& m = d.merges[id - d.size()];
    auto out = members_of(d, m.left);
    auto r = members_of(d, m.right);
    out.insert(out.end(), r.begin(), r.end());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_CASE("two leaves", "[clustering]")
{
    const auto d = complete_linkage({"a", "b"}, {0, 0.3, 0.3, 0});
    REQUIRE(d.merges.size() == 1);
    CHECK(d.merges[0] == Merge{0, 1, 0.3, 2});
    CHECK(export_newick(d) == "(a:0.3,b:0.3);");
    const auto json = nlohmann::json::parse(export_dendrogram_json(d));
    CHECK(json["merges"].size() == 1);
}

TEST_CASE("three points by hand", "[clustering]")
{
    const auto d = three_point();
    REQUIRE(d.merges.size() == 2);
    CHECK(d.merges[0] == Merge{0, 1, 0.1, 3});
    CHECK(d.merges[1] == Merge{3, 2, 0.5, 4});
    CHECK(export_newick(d) == "((a:0.1,b:0.1):0.4,c:0.5);");
    CHECK(cut(d, 0.3) == Groups{{0, 1}, {2}});
    CHECK(cut(d, 0.0) == Groups{{0}, {1}, {2}});
    CHECK(cut(d, 0.5) == Groups{{0, 1, 2}});
    CHECK(cut(d, 7.0) == Groups{{0, 1, 2}});
    CHECK_THROWS_AS(cut(d, -0.1), ArgumentError);
}

TEST_CASE("preconditions", "[clustering]")
{
    CHECK_THROWS_AS(complete_linkage({"a"}, {0}), ArgumentError);
    CHECK_THROWS_AS(complete_linkage({"a", "b"}, {0, 0.3, 0.3 + 1e-11, 0}), ConsistencyError);
    CHECK_NOTHROW(complete_linkage({"a", "b"}, {0, 0.3, 0.3 + 1e-13, 0}));
    CHECK_THROWS_AS(complete_linkage({"a", "b"}, {0.1, 0.3, 0.3, 0}), ConsistencyError);
    CHECK_THROWS_AS(complete_linkage({"a", "b"}, {0, 1.5, 1.5, 0}), ConsistencyError);
}

TEST_CASE("ties go to the smallest pair of smallest members", "[clustering]")
{
    // All pairs at 0.5: (0,1) first, then ({0,1},2), then ({0,1,2},3).
    std::vector<double> v(16, 0.5);
    for (int i = 0; i < 4; ++i)
        v[i * 5] = 0.0;
    const auto d = complete_linkage({"w", "x", "y", "z"}, v);
    CHECK(d.merges[0] == Merge{0, 1, 0.5, 4});
    CHECK(d.merges[1] == Merge{4, 2, 0.5, 5});
    CHECK(d.merges[2] == Merge{5, 3, 0.5, 6});

    // (2,3) and (0,1) tie at 0.2; (0,1) wins.
    const auto e = complete_linkage({"w", "x", "y", "z"},
                                    {0, 0.2, 0.9, 0.8, 0.2, 0, 0.7, 0.6, 0.9, 0.7, 0, 0.2, 0.8, 0.6, 0.2, 0});
    CHECK(e.merges[0] == Merge{0, 1, 0.2, 4});
    CHECK(e.merges[1] == Merge{2, 3, 0.2, 5});
}

TEST_CASE("five-point fixture", "[clustering]")
{
    const auto d = complete_linkage(fixture::five_point());
    const auto naive = oracle::complete_linkage({{0, 0.1, 0.6, 0.9, 0.8},
                                                 {0.1, 0, 0.5, 0.85, 0.75},
                                                 {0.6, 0.5, 0, 0.7, 0.65},
                                                 {0.9, 0.85, 0.7, 0, 0.2},
                                                 {0.8, 0.75, 0.65, 0.2, 0}});
    REQUIRE(d.merges.size() == naive.size());
    for (std::size_t k = 0; k < naive.size(); ++k) {
        CHECK(members_of(d, d.merges[k].left) == naive[k].left);
        CHECK(members_of(d, d.merges[k].right) == naive[k].right);
        CHECK(d.merges[k].height == naive[k].height);
    }
    CHECK(export_newick(d) + "\n" == fixture::golden("five_point.nwk"));
    CHECK(export_dendrogram_json(d) == fixture::golden("five_point.json"));
    CHECK(cut(d, 0.65) == Groups{{0, 1, 2}, {3, 4}});
}

TEST_CASE("random matrices agree with the naive oracle", "[clustering][oracle]")
{
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + trial % 7;
        const auto m = oracle::random_dissimilarity(rng, n);
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i)
            ids.push_back(oracle::inst_name(i));
        const auto d = complete_linkage(ids, oracle::flatten(m));
        const auto naive = oracle::complete_linkage(m);
        REQUIRE_NOTHROW(validate(d));
        for (std::size_t k = 0; k < naive.size(); ++k) {
            REQUIRE(members_of(d, d.merges[k].left) == naive[k].left);
            REQUIRE(members_of(d, d.merges[k].right) == naive[k].right);
            REQUIRE(d.merges[k].height == naive[k].height);
        }

        const auto c = cophenetic(d);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t e = 0; e < n; ++e)
                    REQUIRE(c[a * n + e] <= std::max(c[a * n + b], c[b * n + e]));

        // Cuts at increasing heights refine into coarser partitions.
        auto prev = cut(d, 0.0);
        for (const auto& mg : d.merges) {
            const auto next = cut(d, mg.height);
            for (const auto& group : prev) {
                const bool inside = std::any_of(next.begin(), next.end(), [&](const auto& g) {
                    return std::includes(g.begin(), g.end(), group.begin(), group.end());
                });
                REQUIRE(inside);
            }
            prev = next;
        }
    }
}

TEST_CASE("leaf relabelling permutes the dendrogram", "[clustering][property]")
{
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 3 + trial % 6;
        const auto m = oracle::random_dissimilarity(rng, n);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        oracle::Dense pm(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                pm[perm[i]][perm[j]] = m[i][j];
        std::vector<std::string> ids(n);
        for (std::size_t i = 0; i < n; ++i)
            ids[i] = oracle::inst_name(i);
        const auto c1 = cophenetic(complete_linkage(ids, oracle::flatten(m)));
        const auto c2 = cophenetic(complete_linkage(ids, oracle::flatten(pm)));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                REQUIRE(c1[i * n + j] == c2[perm[i] * n + perm[j]]);
    }
}

TEST_CASE("newick round trip", "[clustering]")
{
    std::mt19937_64 rng(77);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 15;
        const auto m = oracle::random_dissimilarity(rng, n);
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i)
            ids.push_back(i % 3 == 0 ? "inst " + std::to_string(i) + "'s" : oracle::inst_name(i));
        const auto d = complete_linkage(ids, oracle::flatten(m));
        const auto back = to_dendrogram(parse_newick(export_newick(d)), ids);
        REQUIRE(back.merges.size() == d.merges.size());
        for (std::size_t k = 0; k < d.merges.size(); ++k) {
            REQUIRE(back.merges[k].left == d.merges[k].left);
            REQUIRE(back.merges[k].right == d.merges[k].right);
            worst = std::max(worst, std::abs(back.merges[k].height - d.merges[k].height));
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("newick labels are quoted when needed", "[clustering]")
{
    CHECK(newick_label("plain") == "plain");
    CHECK(newick_label("univ of x") == "'univ of x'");
    CHECK(newick_label("o'neil") == "'o''neil'");
    const auto d = complete_linkage({"o'neil", "a,b"}, {0, 0.25, 0.25, 0});
    const auto nwk = export_newick(d);
    CHECK(nwk == "('o''neil':0.25,'a,b':0.25);");
    const auto root = parse_newick(nwk);
    REQUIRE(root.children.size() == 2);
    CHECK(root.children[0].label == "o'neil");
    CHECK(root.children[1].label == "a,b");
    CHECK_THROWS_AS(parse_newick("(a:0.1,b:0.1)"), DataError);
    CHECK_THROWS_AS(parse_newick("(a:0.1,b:x);"), DataError);
    CHECK_THROWS_AS(to_dendrogram(parse_newick("(a:1,c:1);"), {"a", "b"}), DataError);
}

TEST_CASE("json round trip is exact", "[clustering]")
{
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + trial % 9;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i)
            ids.push_back(oracle::inst_name(i));
        const auto d = complete_linkage(ids, oracle::flatten(oracle::random_dissimilarity(rng, n)));
        REQUIRE(read_dendrogram_json(export_dendrogram_json(d)) == d);
    }
    CHECK_THROWS_AS(read_dendrogram_json("{\"leaves\":[\"a\"],\"merges\":[]}"), DataError);
    CHECK_THROWS_AS(read_dendrogram_json("{"), DataError);
}
