#include "profilemap/similarity.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace profilemap;
using namespace profilemap::similarity;
using Catch::Matchers::WithinAbs;
using weighting::WeightMatrix;

namespace {

WeightMatrix dense_to_weights(const std::vector<std::vector<double>>& w)
{
    WeightMatrix out;
    const std::size_t m = w.size(), n = w[0].size();
    for (std::size_t a = 0; a < m; ++a)
        out.journals.push_back(oracle::journal_name(a));
    for (std::size_t i = 0; i < n; ++i)
        out.institutions.push_back(oracle::inst_name(i));
    out.columns.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < m; ++a)
            if (w[a][i] != 0.0)
                out.columns[i].push_back({a, w[a][i]});
    return out;
}

SimilarityMatrix two_by_two(double b)
{
    return {Order::first, {"u1", "u2"}, {1.0, b, b, 1.0}};
}

} // namespace

TEST_CASE("identical columns have cosine one", "[similarity]")
{
    const auto b = first_order(dense_to_weights({{1.0, 1.0}, {2.5, 2.5}}));
    CHECK_THAT(b.at(0, 1), WithinAbs(1.0, 1e-15));
    CHECK(b.at(0, 0) == 1.0);
}

TEST_CASE("disjoint supports have cosine zero", "[similarity]")
{
    const auto b = first_order(dense_to_weights({{1.0, 0.0}, {0.0, 3.0}}));
    CHECK(b.at(0, 1) == 0.0);
}

TEST_CASE("three institutions over four journals", "[similarity]")
{
    const std::vector<std::vector<double>> w{
        {1.0, 0.0, 2.0}, {0.5, 1.5, 0.0}, {0.0, 2.0, 1.0}, {3.0, 0.0, 0.25}};
    const auto b = first_order(dense_to_weights(w));
    const auto o = oracle::column_cosine(w);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK_THAT(b.at(i, j), WithinAbs(o[i][j], 1e-12));
    // u1 . u2 = 0.75, |u1|^2 = 10.25, |u2|^2 = 6.25.
    CHECK_THAT(b.at(0, 1), WithinAbs(0.75 / std::sqrt(10.25 * 6.25), 1e-15));
}

TEST_CASE("zero-norm institutions are rejected by name", "[similarity]")
{
    const auto w = dense_to_weights({{1.0, 0.0, 1.0}, {1.0, 0.0, 0.0}});
    CHECK_THROWS_MATCHES(first_order(w), DataError,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("inst1")));
}

TEST_CASE("second order of a two-institution matrix", "[similarity]")
{
    for (double b : {0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
        const auto s = second_order(two_by_two(b));
        CHECK_THAT(s.at(0, 1), WithinAbs(2.0 * b / (1.0 + b * b), 1e-12));
        const auto o = oracle::second_order({{1.0, b}, {b, 1.0}});
        CHECK_THAT(s.at(0, 1), WithinAbs(o[0][1], 1e-12));
    }
    CHECK(second_order(two_by_two(0.0)).at(0, 1) == 0.0);
    CHECK(second_order(two_by_two(1.0)).at(0, 1) == 1.0);
}

TEST_CASE("orthogonal first order stays orthogonal", "[similarity]")
{
    SimilarityMatrix id{Order::first, {"a", "b", "c"}, {1, 0, 0, 0, 1, 0, 0, 0, 1}};
    const auto s = second_order(id);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(s.at(i, j) == (i == j ? 1.0 : 0.0));
    CHECK_THROWS_AS(second_order(s), ArgumentError);
}

TEST_CASE("random corpora match the dense oracle", "[similarity][oracle]")
{
    std::mt19937_64 rng(23);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = oracle::random_corpus(rng);
        auto w = weighting::compute_weights(weighting::count_frequencies(c));
        auto ow = oracle::weights(c);
        const auto zero = weighting::zero_norm_institutions(w);
        REQUIRE(zero == oracle::zero_columns(ow));
        w = weighting::drop_institutions(w, zero);
        ow = oracle::drop(ow, zero);
        if (w.n_institutions() < 1)
            continue;
        ++checked;
        const auto b = first_order(w);
        const auto s = second_order(b);
        const auto ob = oracle::first_order(ow);
        const auto os = oracle::second_order(ob);
        for (std::size_t i = 0; i < b.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) {
                REQUIRE_THAT(b.at(i, j), WithinAbs(ob[i][j], 1e-12));
                REQUIRE_THAT(s.at(i, j), WithinAbs(os[i][j], 1e-12));
                REQUIRE(b.at(i, j) == b.at(j, i));
                REQUIRE(s.at(i, j) == s.at(j, i));
                REQUIRE(b.at(i, j) >= 0.0);
                REQUIRE(s.at(i, j) <= 1.0 + 1e-12);
            }
    }
    CHECK(checked > 150);
}

TEST_CASE("results do not depend on the thread count", "[similarity]")
{
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto c = oracle::random_corpus(rng);
        auto w = weighting::compute_weights(weighting::count_frequencies(c));
        w = weighting::drop_institutions(w, weighting::zero_norm_institutions(w));
        if (w.n_institutions() == 0)
            continue;
        const auto b1 = first_order(w, 1);
        const auto b4 = first_order(w, 4);
        CHECK(b1.values == b4.values);
        CHECK(second_order(b1, 1).values == second_order(b1, 3).values);
    }
}

TEST_CASE("dissimilarity", "[similarity]")
{
    SimilarityMatrix s{Order::second, {"a", "b", "c"}, {1, 0.93, 0, 0.93, 1, 1, 0, 1, 1}};
    const auto d = to_dissimilarity(s);
    CHECK(d.at(0, 0) == 0.0);
    CHECK_THAT(d.at(0, 1), WithinAbs(0.07, 1e-15));
    CHECK(d.at(0, 2) == 1.0);
    CHECK(d.at(1, 2) == 0.0);
    CHECK(d.derived_from == Order::second);

    SimilarityMatrix over{Order::second, {"a", "b"}, {1, 1 + 5e-10, 1 + 5e-10, 1}};
    CHECK(to_dissimilarity(over).at(0, 1) == 0.0);
    SimilarityMatrix bad{Order::second, {"a", "b"}, {1, 1.01, 1.01, 1}};
    CHECK_THROWS_AS(to_dissimilarity(bad), ConsistencyError);
    SimilarityMatrix neg{Order::second, {"a", "b"}, {1, -0.1, -0.1, 1}};
    CHECK_THROWS_AS(to_dissimilarity(neg), ConsistencyError);
}

TEST_CASE("matrix csv", "[similarity]")
{
    SimilarityMatrix s{Order::first, {"a", "b,c"}, {1, 1.0 / 3.0, 1.0 / 3.0, 1}};
    const auto text = write_matrix_csv(s);
    CHECK(text == "institution,a,\"b,c\"\na,1,0.333333333333\n\"b,c\",0.333333333333,1\n");
    const auto back = read_similarity_csv(text, Order::first);
    CHECK(back.institutions == s.institutions);
    CHECK_THAT(back.at(0, 1), WithinAbs(1.0 / 3.0, 1e-12));

    CHECK_THROWS_AS(read_matrix_csv("institution,a,b\na,1,0\n"), DataError);
    CHECK_THROWS_AS(read_matrix_csv("institution,a,b\na,1,0\nc,0,1\n"), DataError);
    CHECK_THROWS_AS(read_matrix_csv("institution,a,b\na,1,0.5\nb,0.4,1\n"), ConsistencyError);
    CHECK_THROWS_AS(read_matrix_csv("institution,a\na,x\n"), DataError);
    CHECK_THROWS_AS(read_matrix_csv("name,a\na,1\n"), DataError);
}
