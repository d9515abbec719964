#pragma once

#include "traceent/distance.hpp"
#include "traceent/grid.hpp"
#include "traceent/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace traceent {

    struct corpus_entry {
        std::string trace_id{};
        std::string class_id{};
        std::vector<double> values{};           // aligned to the index grid
        std::vector<std::string> functions{};   // sorted distinct function names
        std::optional<std::string> raw_trace{};  // canonical text, when retained

        friend bool operator==(const corpus_entry&, const corpus_entry&) = default;
    };

    enum class prefilter_policy { off, intersect, superset };

    std::optional<prefilter_policy> parse_prefilter_policy(std::string_view text) noexcept;

    /// Library of labelled fingerprints. Maxima are kept equal to the
    /// per-component maximum over all entries.
    class corpus_index {
      public:
        explicit corpus_index(grid g, bool retain_raw = false);

        const grid& spec_grid() const noexcept { return grid_; }
        std::uint64_t grid_hash() const noexcept { return grid_hash_; }
        const std::vector<corpus_entry>& entries() const noexcept { return entries_; }
        const norm_maxima& norms() const noexcept { return norms_; }
        bool retains_raw() const noexcept { return retain_raw_; }
        std::size_t size() const noexcept { return entries_.size(); }
        bool empty() const noexcept { return entries_.empty(); }

        /// class_id -> free-form metadata.
        std::map<std::string, std::string>& manifest() noexcept { return manifest_; }
        const std::map<std::string, std::string>& manifest() const noexcept { return manifest_; }

        /// Fingerprints and stores the trace; returns its id (the trace's own
        /// id, or a generated one when empty). Throws DuplicateTraceId, TraceTooShort.
        std::string ingest(const trace& t, const std::string& class_id);

        /// Stores a precomputed entry. Throws DuplicateTraceId, GridMismatch.
        void add_entry(corpus_entry entry);

        const corpus_entry* find(std::string_view trace_id) const;
        fingerprint_vector vector_of(std::size_t entry) const;

        /// Distinct class ids, sorted.
        std::vector<std::string> classes() const;

        friend bool operator==(const corpus_index& a, const corpus_index& b);

      private:
        grid grid_;
        std::uint64_t grid_hash_;
        bool retain_raw_;
        std::vector<corpus_entry> entries_{};
        std::unordered_map<std::string, std::size_t> by_id_{};
        norm_maxima norms_;
        std::map<std::string, std::string> manifest_{};
    };

    /// Builds a corpus entry (fingerprints + function set) without storing it.
    corpus_entry make_entry(const trace& t, const grid& g, const std::string& class_id, bool retain_raw);

    /// Indices of entries passing the shared-function-name filter.
    std::vector<std::size_t> prefilter_indices(std::span<const std::string> query_functions,
                                               const corpus_index& index, prefilter_policy policy);

    std::vector<std::string> prefilter(const trace& query, const corpus_index& index, prefilter_policy policy);

    inline constexpr std::uint32_t index_format_version = 1;

    void save(const corpus_index& index, const std::filesystem::path& path);

    /// A zero-length file loads as an empty index over the default grid.
    /// Throws FormatVersionMismatch or CorruptIndex (bad magic, truncation,
    /// grid hash mismatch, maxima differing from the entries by > 1e-12).
    corpus_index load(const std::filesystem::path& path);

    struct manifest_row {
        std::filesystem::path trace_file{};
        std::string class_id{};
        std::string label{};  // trace_file as written; used as the trace id
    };

    /// Reads `trace_file,class_id` rows; relative paths resolve against the
    /// manifest's directory. A header row is skipped.
    std::vector<manifest_row> read_manifest(const std::filesystem::path& path);

    struct ingest_report {
        std::size_t ingested{0};
        std::vector<std::string> warnings{};
    };

    /// Ingests every manifest row. Traces shorter than the grid's largest l
    /// are skipped with a warning; other errors propagate.
    ingest_report ingest_manifest(const std::filesystem::path& manifest_path, corpus_index& index,
                                  parse_mode mode = parse_mode::strict, unsigned threads = 0);

}  // namespace traceent
