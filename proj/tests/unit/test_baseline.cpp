#include "oracles/edit_dp.hpp"
#include "support/fixtures.hpp"
#include "traceent/baseline.hpp"
#include "traceent/error.hpp"

#include <doctest.h>

#include <map>
#include <random>

using namespace traceent;

namespace {

    std::vector<std::uint32_t> seq(const std::string& s) { return {s.begin(), s.end()}; }

    symbol_sequence letters(const std::string& s, std::shared_ptr<symbol_table> table = nullptr) {
        trace t;
        for (char ch : s)
            t.records.push_back({std::string(1, ch), record_kind::entry, 1});
        return encode(t, char_type::f, std::move(table));
    }

}  // namespace

TEST_CASE("edit distance examples") {
    CHECK(edit_distance(seq("ABCABBA"), seq("CBABAC")) == 5);
    CHECK(edit_distance(seq("CBABAC"), seq("ABCABBA")) == 5);
    CHECK(edit_distance(seq("abc"), seq("abc")) == 0);
    CHECK(edit_distance(seq(""), seq("abcd")) == 4);
    CHECK(edit_distance(seq("abcd"), seq("")) == 4);
    CHECK(edit_distance(seq(""), seq("")) == 0);
    CHECK(edit_distance(seq("ab"), seq("xyz")) == 5);
}

TEST_CASE("edit distance matches the quadratic program") {
    std::mt19937_64 rng{99};
    for (int i = 0; i < 300; ++i) {
        const auto alphabet = 2 + rng() % 6;
        std::vector<std::uint32_t> a(rng() % 120);
        std::vector<std::uint32_t> b(rng() % 120);
        for (auto& v : a)
            v = static_cast<std::uint32_t>(rng() % alphabet);
        for (auto& v : b)
            v = static_cast<std::uint32_t>(rng() % alphabet);
        CHECK(edit_distance(a, b) == oracle::indel_distance(a, b));
    }
}

TEST_CASE("metric axioms on sampled triples") {
    std::mt19937_64 rng{5};
    auto draw = [&] {
        std::vector<std::uint32_t> v(rng() % 60);
        for (auto& x : v)
            x = static_cast<std::uint32_t>(rng() % 4);
        return v;
    };
    for (int i = 0; i < 100; ++i) {
        auto a = draw(), b = draw(), c = draw();
        CHECK(edit_distance(a, a) == 0);
        CHECK(edit_distance(a, b) == edit_distance(b, a));
        CHECK(edit_distance(a, c) <= edit_distance(a, b) + edit_distance(b, c));
    }
}

TEST_CASE("sequences with separate symbol tables") {
    auto r = myers_edit_distance(letters("ABCABBA"), letters("CBABAC"));
    CHECK(r.distance == 5);
    CHECK(r.combined_length == 13);
    auto disjoint = myers_edit_distance(letters("abc"), letters("XYZW"));
    CHECK(disjoint.distance == disjoint.combined_length);
    auto table = std::make_shared<symbol_table>();
    CHECK(myers_edit_distance(letters("abab", table), letters("baba", table)).distance == 2);
}

TEST_CASE("baseline ranking") {
    auto with_raw = fixtures::ranking_example_index(true);
    auto ranked = baseline_rank(fixtures::ranking_example_query(), with_raw, char_type::f, 10);
    REQUIRE_FALSE(ranked.empty());
    CHECK(ranked.front().class_id == "d4");

    corpus_index single{single_spec_grid(parse_spec("S,-,1,F")), true};
    single.ingest(fixtures::figure1(), "only");
    auto same = baseline_rank(fixtures::figure1(), single, char_type::ftd, 1);
    REQUIRE(same.size() == 1);
    CHECK(same[0] == ranked_class{"only", 1, "fig1", 0.0});

    auto without = fixtures::ranking_example_index(false);
    try {
        baseline_rank(fixtures::ranking_example_query(), without, char_type::f, 3);
        FAIL("no throw");
    }
    catch (const error& e) {
        CHECK(e.code() == errc::raw_traces_unavailable);
    }
}

TEST_CASE("stub distances through the shared ranking pipeline") {
    auto index = fixtures::ranking_example_index();
    const std::map<std::string, double> table{{"t1", 7}, {"t2", 0}, {"t3", 9}, {"t4", 7}, {"t5", 9}};
    std::vector<std::size_t> all{0, 1, 2, 3, 4};
    auto ranked = rank_with(index, all, [&](const corpus_entry& e) { return table.at(e.trace_id); });
    std::vector<std::pair<std::string, std::uint32_t>> got;
    for (const auto& r : ranked)
        got.emplace_back(r.class_id, r.rank);
    CHECK(got == std::vector<std::pair<std::string, std::uint32_t>>{{"d4", 1}, {"d2", 3}, {"d3", 3}, {"d1", 4}});
}
