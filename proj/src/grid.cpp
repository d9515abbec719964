#include "traceent/grid.hpp"

#include "traceent/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <tuple>

namespace traceent {

    grid_config default_grid_config() {
        grid_config cfg;
        cfg.kinds = {entropy_kind::shannon, entropy_kind::landsberg, entropy_kind::renyi, entropy_kind::tsallis};
        cfg.q_set = {0.0, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0, 1e1, 1e2};
        cfg.l_set = {1, 2, 3, 4, 5, 6, 7};
        cfg.c_set = {char_type::f, char_type::ft, char_type::ftd};
        cfg.exclusions = {grid_exclusion{entropy_kind::landsberg, 1e2, std::nullopt, std::nullopt}};
        cfg.name = "default";
        return cfg;
    }

    bool spec_less(const entropy_spec& a, const entropy_spec& b) noexcept {
        return std::tuple{static_cast<int>(a.kind), a.q, a.l, static_cast<int>(a.c)} <
               std::tuple{static_cast<int>(b.kind), b.q, b.l, static_cast<int>(b.c)};
    }

    std::optional<std::size_t> grid::index_of(const entropy_spec& s) const {
        for (std::size_t i = 0; i < specs.size(); ++i)
            if (specs[i] == s)
                return i;
        return std::nullopt;
    }

    std::uint64_t grid::hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        auto mix = [&h](std::uint64_t v, int bytes) {
            for (int i = 0; i < bytes; ++i) {
                h ^= (v >> (8 * i)) & 0xffU;
                h *= 0x100000001b3ULL;
            }
        };
        mix(specs.size(), 4);
        for (const auto& s : specs) {
            mix(static_cast<std::uint8_t>(entropy_letter(s.kind)), 1);
            mix(static_cast<std::uint8_t>(s.c), 1);
            mix(s.l, 4);
            mix(std::bit_cast<std::uint64_t>(s.q), 8);
        }
        return h;
    }

    namespace {

        bool excluded(const entropy_spec& s, const std::vector<grid_exclusion>& exclusions) {
            for (const auto& ex : exclusions) {
                if (ex.kind != s.kind)
                    continue;
                if (ex.q && std::abs(*ex.q - s.q) > 1e-12 * std::max(1.0, std::abs(*ex.q)))
                    continue;
                if (ex.l && *ex.l != s.l)
                    continue;
                if (ex.c && *ex.c != s.c)
                    continue;
                return true;
            }
            return false;
        }

    }  // namespace

    grid build_lambda(const grid_config& config) {
        if (config.kinds.empty() || config.l_set.empty() || config.c_set.empty())
            throw error(errc::invalid_config, "grid sets must be non-empty");
        bool extended_kinds = std::any_of(config.kinds.begin(), config.kinds.end(),
                                          [](entropy_kind k) { return k != entropy_kind::shannon; });
        if (extended_kinds && config.q_set.empty())
            throw error(errc::invalid_config, "q set must be non-empty for extended entropies");
        for (double q : config.q_set)
            if (!std::isfinite(q) || q < 0.0)
                throw error(errc::invalid_config, "q values must be finite and >= 0");

        grid g;
        g.name = config.name;
        for (auto kind : config.kinds) {
            for (auto l : config.l_set) {
                for (auto c : config.c_set) {
                    if (kind == entropy_kind::shannon) {
                        auto s = make_spec(kind, 1.0, l, c);
                        if (!excluded(s, config.exclusions))
                            g.specs.push_back(s);
                        continue;
                    }
                    for (double q : config.q_set) {
                        auto s = make_spec(kind, q, l, c);
                        if (!excluded(s, config.exclusions))
                            g.specs.push_back(s);
                    }
                }
            }
        }
        std::sort(g.specs.begin(), g.specs.end(), spec_less);
        g.specs.erase(std::unique(g.specs.begin(), g.specs.end()), g.specs.end());
        return g;
    }

    grid default_grid() { return build_lambda(default_grid_config()); }

    grid single_spec_grid(const entropy_spec& s) {
        grid g;
        g.name = to_string(s);
        g.specs.push_back(s);
        return g;
    }

}  // namespace traceent
