#pragma once

#include "traceent/corpus.hpp"
#include "traceent/ranking.hpp"
#include "traceent/trace.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace traceent {

    struct edit_distance_result {
        std::uint64_t distance{0};         // insertions + deletions
        std::uint64_t combined_length{0};  // len(a) + len(b)

        friend bool operator==(const edit_distance_result&, const edit_distance_result&) = default;
    };

    /// Insert/delete edit distance (a substitution costs one delete plus one
    /// insert) by the greedy furthest-reaching-diagonal method, in linear space.
    /// Runs in O((N + M) P), P = (D - |N - M|) / 2, which is bounded by O(N D).
    std::uint64_t edit_distance(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

    /// Sequences with different symbol tables are compared by symbol string.
    edit_distance_result myers_edit_distance(const symbol_sequence& a, const symbol_sequence& b);

    /// Same ranking pipeline as rank_classes, with edit distance between the
    /// c-encoded query and each stored raw trace. Throws RawTracesUnavailable.
    std::vector<ranked_class> baseline_rank(const trace& query, const corpus_index& index, char_type c,
                                            std::uint32_t x, unsigned threads = 1);

    /// Stored raw traces encoded with one shared symbol table.
    struct encoded_corpus {
        std::shared_ptr<symbol_table> alphabet{};
        std::vector<std::vector<std::uint32_t>> sequences{};  // parallel to index entries
    };

    encoded_corpus encode_corpus(const corpus_index& index, char_type c);

    /// Full ranked list of the query against a pre-encoded corpus.
    std::vector<ranked_class> baseline_rank_all(const trace& query, const corpus_index& index,
                                                const encoded_corpus& encoded, char_type c, unsigned threads = 1);

}  // namespace traceent
