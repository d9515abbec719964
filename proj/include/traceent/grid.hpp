#pragma once

#include "traceent/entropy.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace traceent {

    /// Removes every spec matching all of the fields that are set.
    struct grid_exclusion {
        entropy_kind kind{entropy_kind::landsberg};
        std::optional<double> q{};
        std::optional<std::uint32_t> l{};
        std::optional<char_type> c{};
    };

    struct grid_config {
        std::vector<entropy_kind> kinds{};
        std::vector<double> q_set{};
        std::vector<std::uint32_t> l_set{};
        std::vector<char_type> c_set{};
        std::vector<grid_exclusion> exclusions{};
        std::string name{"custom"};
    };

    /// E in {S,L,R,T}, q in {0, 1e-5 .. 1e2} (decades), l in 1..7, c in
    /// {F,FT,FTD}, minus (L, 1e2, *, *).
    grid_config default_grid_config();

    /// Ordered parameter set. Specs are unique and sorted by (E, q, l, c).
    struct grid {
        std::string name{};
        std::vector<entropy_spec> specs{};

        std::size_t size() const noexcept { return specs.size(); }
        std::optional<std::size_t> index_of(const entropy_spec& s) const;

        /// FNV-1a over the serialised spec list; identifies the grid in stores.
        std::uint64_t hash() const;
    };

    /// Cartesian product of the config sets. Extended kinds at q = 1 fold
    /// into the single Shannon spec per (l, c). Throws InvalidConfig.
    grid build_lambda(const grid_config& config);

    grid default_grid();

    /// Grid holding exactly one spec.
    grid single_spec_grid(const entropy_spec& s);

    /// Canonical total order used by grids.
    bool spec_less(const entropy_spec& a, const entropy_spec& b) noexcept;

}  // namespace traceent
