#include "traceent/error.hpp"
#include "traceent/grid.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>
#include <tuple>

using namespace traceent;

TEST_CASE("default grid size and composition") {
    auto g = default_grid();
    CHECK(g.size() == 504);
    CHECK(g.name == "default");
    auto count = [&](entropy_kind k) {
        return std::count_if(g.specs.begin(), g.specs.end(), [&](const entropy_spec& s) { return s.kind == k; });
    };
    CHECK(count(entropy_kind::landsberg) == 147);
    CHECK(count(entropy_kind::renyi) == 168);
    CHECK(count(entropy_kind::tsallis) == 168);
    CHECK(count(entropy_kind::shannon) == 21);
    for (const auto& s : g.specs) {
        if (s.kind == entropy_kind::shannon)
            CHECK(s.q == 1.0);
        else
            CHECK(s.q != 1.0);
        CHECK_FALSE((s.kind == entropy_kind::landsberg && s.q == 100.0));
    }
}

TEST_CASE("grid order is canonical and duplicate free") {
    auto g = default_grid();
    CHECK(std::is_sorted(g.specs.begin(), g.specs.end(), spec_less));
    std::set<std::tuple<int, double, std::uint32_t, int>> seen;
    for (const auto& s : g.specs)
        seen.emplace(static_cast<int>(s.kind), s.q, s.l, static_cast<int>(s.c));
    CHECK(seen.size() == g.size());
    CHECK(g.specs.front() == entropy_spec{entropy_kind::shannon, 1.0, 1, char_type::f});
    CHECK(g.specs[1] == entropy_spec{entropy_kind::shannon, 1.0, 1, char_type::ft});

    auto again = default_grid();
    CHECK(again.specs == g.specs);
    CHECK(again.hash() == g.hash());
}

TEST_CASE("single spec and custom grids") {
    grid_config cfg;
    cfg.kinds = {entropy_kind::shannon};
    cfg.q_set = {1.0};
    cfg.l_set = {1};
    cfg.c_set = {char_type::f};
    CHECK(build_lambda(cfg).size() == 1);

    auto one = single_spec_grid(entropy_spec{entropy_kind::renyi, 0.0, 2, char_type::ft});
    CHECK(one.size() == 1);
    CHECK(one.index_of(entropy_spec{entropy_kind::renyi, 0.0, 2, char_type::ft}) == 0);
    CHECK_FALSE(one.index_of(entropy_spec{}).has_value());
    CHECK(one.hash() != default_grid().hash());
}

TEST_CASE("invalid grid configs") {
    auto cfg = default_grid_config();
    cfg.q_set.push_back(-1.0);
    CHECK_THROWS_AS(build_lambda(cfg), error);
    cfg = default_grid_config();
    cfg.l_set.clear();
    CHECK_THROWS_AS(build_lambda(cfg), error);
    cfg = default_grid_config();
    cfg.c_set.clear();
    CHECK_THROWS_AS(build_lambda(cfg), error);
}

TEST_CASE("exclusions without q remove a whole family") {
    auto cfg = default_grid_config();
    cfg.exclusions.push_back(grid_exclusion{entropy_kind::tsallis, std::nullopt, 7, std::nullopt});
    CHECK(build_lambda(cfg).size() == 504 - 8 * 3);
}
