#pragma once

#include "traceent/trace.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace traceent {

    using lword = std::vector<std::uint32_t>;

    /// Empirical l-word distribution of one trace. Only observed words are
    /// stored, ordered lexicographically by symbol-id tuple.
    struct distribution {
        std::vector<lword> words{};
        std::vector<std::uint64_t> counts{};
        std::vector<double> probs{};
        std::uint64_t total{0};  // N - l + 1
        std::uint32_t l{1};
        char_type c{char_type::f};
        std::shared_ptr<const symbol_table> alphabet{};

        std::size_t n() const noexcept { return words.size(); }

        /// Symbols joined with "-", e.g. "f1-f2".
        std::string word_string(std::size_t i) const;
    };

    /// All N - l + 1 overlapping windows in order; empty when N < l.
    std::vector<lword> extract_lwords(const symbol_sequence& seq, std::uint32_t l);

    /// Throws TraceTooShort when the sequence has fewer than l symbols.
    distribution word_distribution(const symbol_sequence& seq, std::uint32_t l, char_type c);
    distribution word_distribution(const trace& t, std::uint32_t l, char_type c);

    /// Debug dump: `word,probability` rows in distribution order.
    void write_distribution_csv(std::ostream& out, const distribution& d);

}  // namespace traceent
