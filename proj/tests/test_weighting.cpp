#include "profilemap/weighting.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace profilemap;
using namespace profilemap::weighting;
using Catch::Matchers::WithinAbs;
using ingest::Corpus;
using ingest::PublicationRecord;

namespace {

PublicationRecord rec(std::string inst, std::string journal)
{
    return {std::move(inst), std::move(journal), 2009, ingest::DocType::article, {}, false};
}

} // namespace

TEST_CASE("single record", "[weighting]")
{
    const auto f = count_frequencies(Corpus({rec("u1", "j1")}));
    CHECK(f.n_institutions() == 1);
    CHECK(f.n_journals() == 1);
    CHECK(f.at(0, 0) == 1);
    CHECK(f.journal_institution_counts == std::vector<std::size_t>{1});
}

TEST_CASE("repeated records are counted", "[weighting]")
{
    const auto f = count_frequencies(Corpus({rec("u1", "j1"), rec("u1", "j1"), rec("u1", "j1")}));
    CHECK(f.at(0, 0) == 3);
}

TEST_CASE("hand-tallied ten-record matrix", "[weighting]")
{
    // u1: j1 x2, j2 x1; u2: j2 x2, j3 x1; u3: j1 x1, j3 x1, j4 x2.
    const Corpus c({rec("u1", "j1"), rec("u2", "j2"), rec("u3", "j4"), rec("u1", "j2"), rec("u3", "j1"),
                    rec("u2", "j3"), rec("u3", "j3"), rec("u1", "j1"), rec("u2", "j2"), rec("u3", "j4")});
    const auto f = count_frequencies(c);
    const std::size_t expect[4][3] = {{2, 0, 1}, {1, 2, 0}, {0, 1, 1}, {0, 0, 2}};
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(f.at(m, i) == expect[m][i]);
    CHECK(f.journal_institution_counts == std::vector<std::size_t>{2, 2, 2, 1});
    CHECK(write_triplets(f)
          == "journal,institution,value\n"
             "j1,u1,2\nj1,u3,1\nj2,u1,1\nj2,u2,2\nj3,u2,1\nj3,u3,1\nj4,u3,2\n");
    CHECK_THROWS_AS(count_frequencies(Corpus{}), ArgumentError);
}

TEST_CASE("inverse frequency", "[weighting]")
{
    CHECK(inverse_frequency(8, 8) == 0.0);
    CHECK(inverse_frequency(1, 1) == 0.0);
    // ln 56 and ln 4 evaluated to 18 digits with an arbitrary-precision calculator.
    CHECK_THAT(inverse_frequency(1, 56), WithinAbs(4.02535169073514923, 1e-14));
    CHECK_THAT(inverse_frequency(2, 8), WithinAbs(1.38629436111989061, 1e-15));
    CHECK_THAT(inverse_frequency(2, 8, LogBase::base10), WithinAbs(0.602059991327962390, 1e-15));
    CHECK_THROWS_AS(inverse_frequency(0, 8), ArgumentError);
    CHECK_THROWS_AS(inverse_frequency(9, 8), ArgumentError);
}

TEST_CASE("journal weights", "[weighting]")
{
    SECTION("journal used by every institution is elided")
    {
        const auto w = compute_weights(count_frequencies(
            Corpus({rec("a", "common"), rec("b", "common"), rec("a", "x"), rec("a", "x")})));
        CHECK(w.journals == std::vector<std::string>{"common", "x"});
        for (const auto& col : w.columns)
            for (const auto& e : col)
                CHECK(w.journals[e.journal] != "common");
        CHECK_THAT(w.at(1, 0), WithinAbs(2.0 * std::log(2.0), 1e-15));
    }
    SECTION("freq 3, N 8, n_m 2")
    {
        std::vector<PublicationRecord> rs;
        for (int k = 0; k < 3; ++k)
            rs.push_back(rec("u0", "target"));
        rs.push_back(rec("u1", "target"));
        for (int i = 0; i < 8; ++i)
            rs.push_back(rec("u" + std::to_string(i), "filler"));
        const auto w = compute_weights(count_frequencies(Corpus(rs)));
        REQUIRE(w.n_institutions() == 8);
        CHECK_THAT(w.at(1, 0), WithinAbs(4.15888308335967185, 1e-14));
    }
    SECTION("single institution has all weights zero")
    {
        const auto w = compute_weights(count_frequencies(Corpus({rec("u", "j1"), rec("u", "j2")})));
        CHECK(w.columns[0].empty());
        CHECK(zero_norm_institutions(w) == std::vector<std::string>{"u"});
        CHECK(column_norm(w, 0) == 0.0);
    }
}

TEST_CASE("weights match the dense brute-force oracle", "[weighting][oracle]")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = oracle::random_corpus(rng);
        for (auto base : {LogBase::natural, LogBase::base10}) {
            const auto w = compute_weights(count_frequencies(c), base);
            const auto o = oracle::weights(c, base == LogBase::base10);
            REQUIRE(w.journals == o.journals);
            REQUIRE(w.institutions == o.institutions);
            for (std::size_t m = 0; m < o.journals.size(); ++m)
                for (std::size_t i = 0; i < o.institutions.size(); ++i)
                    REQUIRE_THAT(w.at(m, i), WithinAbs(o.w[m][i], 1e-12));
        }
    }
}

TEST_CASE("weight triplets round trip exactly", "[weighting]")
{
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const auto w = compute_weights(count_frequencies(oracle::random_corpus(rng)));
        const auto back = read_weight_triplets(write_triplets(w), w.institutions, w.log_base);
        REQUIRE(back.institutions == w.institutions);
        for (std::size_t i = 0; i < w.n_institutions(); ++i)
            for (std::size_t m = 0; m < w.n_journals(); ++m) {
                auto jm = std::find(back.journals.begin(), back.journals.end(), w.journals[m]);
                const double got = jm == back.journals.end()
                    ? 0.0
                    : back.at(static_cast<std::size_t>(jm - back.journals.begin()), i);
                REQUIRE(got == w.at(m, i));
            }
    }
    CHECK_THROWS_AS(read_weight_triplets("journal,institution,value\nj,u,x\n", {"u"}, LogBase::natural),
                    DataError);
    CHECK_THROWS_AS(read_weight_triplets("journal,institution,value\nj,v,1\n", {"u"}, LogBase::natural),
                    DataError);
}

TEST_CASE("drop_institutions keeps the other columns", "[weighting]")
{
    const auto w = compute_weights(count_frequencies(
        Corpus({rec("a", "j1"), rec("b", "j2"), rec("c", "j1"), rec("c", "j2"), rec("c", "j3")})));
    const auto d = drop_institutions(w, {"b"});
    CHECK(d.institutions == std::vector<std::string>{"a", "c"});
    CHECK(d.columns[0] == w.columns[0]);
    CHECK(d.columns[1] == w.columns[2]);
}
