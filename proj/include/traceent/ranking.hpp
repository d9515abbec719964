#pragma once

#include "traceent/corpus.hpp"
#include "traceent/distance.hpp"
#include "traceent/trace.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace traceent {

    struct ranked_class {
        std::string class_id{};
        std::uint32_t rank{1};
        std::string nearest_trace_id{};
        double distance{0.0};

        friend bool operator==(const ranked_class&, const ranked_class&) = default;
    };

    struct scored_trace {
        std::string trace_id{};
        std::string class_id{};
        double distance{0.0};
    };

    /// Ties share the largest 1-based position of their block ("gap before"):
    /// distances [0, 7, 7, 9] rank as [1, 3, 3, 4]. Input must be ascending
    /// by distance; throws UnsortedInput otherwise.
    std::vector<std::pair<std::string, std::uint32_t>> modified_competition_ranks(
            std::span<const std::pair<std::string, double>> sorted_items);

    /// Sort ascending (ties by trace id), map to classes, keep each class's
    /// first occurrence and rank with modified competition ranking.
    std::vector<ranked_class> rank_scored(std::vector<scored_trace> scored);

    /// Classes with rank <= x.
    std::vector<ranked_class> top_x(const std::vector<ranked_class>& ranked, std::uint32_t x);

    /// Which grid components a query uses and how they are combined.
    /// Single component without normalisation is the plain |z_i - z_j|;
    /// otherwise the w-norm over components scaled by their maxima.
    struct distance_config {
        std::vector<std::size_t> components{};
        bool normalize{true};
        double w{1.0};

        static distance_config single(std::size_t component);
        static distance_config full(const grid& g, double w = 1.0);

        std::string describe(const grid& g) const;
    };

    /// Maxima with unused components zeroed (zero maxima are skipped).
    std::vector<double> effective_maxima(const distance_config& config, std::span<const double> maxima);

    /// Distance between two aligned value vectors under `config`;
    /// `maxima` must come from effective_maxima when normalising.
    double config_distance(const distance_config& config, std::span<const double> a, std::span<const double> b,
                           std::span<const double> maxima);

    /// Full ranked list for an arbitrary per-entry distance over the given
    /// candidate entries. Distances are computed in parallel.
    std::vector<ranked_class> rank_with(const corpus_index& index, std::span<const std::size_t> candidates,
                                        const std::function<double(const corpus_entry&)>& distance,
                                        unsigned threads = 1);

    /// Full ranked list for a fingerprinted query. Normalisation uses
    /// max(stored maxima, query values). Throws EmptyCorpus.
    std::vector<ranked_class> rank_all(const fingerprint_vector& query, const corpus_index& index,
                                       const distance_config& config,
                                       std::optional<std::span<const std::size_t>> candidates = std::nullopt,
                                       unsigned threads = 1);

    /// Classes ranked <= x for a raw query trace. Throws EmptyCorpus, TraceTooShort.
    std::vector<ranked_class> rank_classes(const trace& query, const corpus_index& index,
                                           const distance_config& config, std::uint32_t x,
                                           prefilter_policy policy = prefilter_policy::intersect,
                                           unsigned threads = 1);

}  // namespace traceent
