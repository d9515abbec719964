#include "traceent/ranking.hpp"

#include "traceent/error.hpp"
#include "traceent/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

namespace traceent {

    std::vector<std::pair<std::string, std::uint32_t>> modified_competition_ranks(
            std::span<const std::pair<std::string, double>> sorted_items) {
        for (std::size_t i = 1; i < sorted_items.size(); ++i)
            if (sorted_items[i].second < sorted_items[i - 1].second)
                throw error(errc::unsorted_input, fmt::format("item {} is closer than item {}", i, i - 1));

        std::vector<std::pair<std::string, std::uint32_t>> out;
        out.reserve(sorted_items.size());
        std::size_t i = 0;
        while (i < sorted_items.size()) {
            std::size_t j = i + 1;
            while (j < sorted_items.size() && sorted_items[j].second == sorted_items[i].second)
                ++j;
            for (std::size_t k = i; k < j; ++k)
                out.emplace_back(sorted_items[k].first, static_cast<std::uint32_t>(j));
            i = j;
        }
        return out;
    }

    std::vector<ranked_class> rank_scored(std::vector<scored_trace> scored) {
        std::sort(scored.begin(), scored.end(), [](const scored_trace& a, const scored_trace& b) {
            if (a.distance != b.distance)
                return a.distance < b.distance;
            return a.trace_id < b.trace_id;
        });

        std::vector<ranked_class> firsts;
        std::unordered_set<std::string> seen;
        for (auto& s : scored) {
            if (!seen.insert(s.class_id).second)
                continue;
            firsts.push_back(ranked_class{s.class_id, 0, s.trace_id, s.distance});
        }

        std::vector<std::pair<std::string, double>> items;
        items.reserve(firsts.size());
        for (const auto& r : firsts)
            items.emplace_back(r.class_id, r.distance);
        auto ranks = modified_competition_ranks(items);
        for (std::size_t i = 0; i < firsts.size(); ++i)
            firsts[i].rank = ranks[i].second;
        return firsts;
    }

    std::vector<ranked_class> top_x(const std::vector<ranked_class>& ranked, std::uint32_t x) {
        std::vector<ranked_class> out;
        for (const auto& r : ranked)
            if (r.rank <= x)
                out.push_back(r);
        return out;
    }

    distance_config distance_config::single(std::size_t component) {
        return distance_config{{component}, false, 1.0};
    }

    distance_config distance_config::full(const grid& g, double w) {
        distance_config cfg;
        cfg.components.resize(g.size());
        std::iota(cfg.components.begin(), cfg.components.end(), std::size_t{0});
        cfg.normalize = true;
        cfg.w = w;
        return cfg;
    }

    std::string distance_config::describe(const grid& g) const {
        if (!normalize && components.size() == 1)
            return "single " + to_string(g.specs.at(components.front()));
        return fmt::format("{} specs of grid '{}', w={}", components.size(), g.name, w);
    }

    std::vector<double> effective_maxima(const distance_config& config, std::span<const double> maxima) {
        std::vector<double> out(maxima.size(), 0.0);
        for (auto k : config.components)
            out.at(k) = maxima[k];
        return out;
    }

    double config_distance(const distance_config& config, std::span<const double> a, std::span<const double> b,
                           std::span<const double> maxima) {
        if (!config.normalize) {
            if (config.components.size() != 1)
                throw error(errc::invalid_config, "unnormalised distance needs exactly one component");
            const auto k = config.components.front();
            return distance_single(a[k], b[k]);
        }
        for (std::size_t k = 0; k < maxima.size(); ++k)
            if (maxima[k] > 0.0 && std::isfinite(maxima[k]) && (!std::isfinite(a[k]) || !std::isfinite(b[k])))
                throw error(errc::non_finite, fmt::format("component {} is saturated", k));
        return normalized_distance(a, b, maxima, config.w);
    }

    std::vector<ranked_class> rank_with(const corpus_index& index, std::span<const std::size_t> candidates,
                                        const std::function<double(const corpus_entry&)>& distance,
                                        unsigned threads) {
        std::vector<scored_trace> scored(candidates.size());
        parallel_for(candidates.size(), threads, [&](std::size_t i) {
            const auto& e = index.entries().at(candidates[i]);
            scored[i] = scored_trace{e.trace_id, e.class_id, distance(e)};
        });
        return rank_scored(std::move(scored));
    }

    std::vector<ranked_class> rank_all(const fingerprint_vector& query, const corpus_index& index,
                                       const distance_config& config,
                                       std::optional<std::span<const std::size_t>> candidates, unsigned threads) {
        if (index.empty())
            throw error(errc::empty_corpus, "corpus index has no entries");
        if (query.grid_hash != index.grid_hash() || query.values.size() != index.spec_grid().size())
            throw error(errc::grid_mismatch, "query fingerprint does not match the index grid");
        if (!(config.w >= 1.0))
            throw error(errc::invalid_config, fmt::format("norm exponent w must be >= 1, got {}", config.w));
        for (auto k : config.components)
            if (k >= query.values.size())
                throw error(errc::invalid_config, fmt::format("component {} outside grid", k));

        auto norms = index.norms();
        norms.absorb(query.values);
        const auto maxima = effective_maxima(config, norms.maxima);

        std::vector<std::size_t> all;
        if (!candidates) {
            all.resize(index.size());
            std::iota(all.begin(), all.end(), std::size_t{0});
            candidates = all;
        }
        return rank_with(
                index, *candidates,
                [&](const corpus_entry& e) { return config_distance(config, query.values, e.values, maxima); },
                threads);
    }

    std::vector<ranked_class> rank_classes(const trace& query, const corpus_index& index,
                                           const distance_config& config, std::uint32_t x,
                                           prefilter_policy policy, unsigned threads) {
        if (index.empty())
            throw error(errc::empty_corpus, "corpus index has no entries");
        auto fp = compute_fingerprints(query, index.spec_grid());
        auto names = function_names(query);
        auto candidates = prefilter_indices(names, index, policy);
        return top_x(rank_all(fp, index, config, std::span<const std::size_t>{candidates}, threads), x);
    }

}  // namespace traceent
