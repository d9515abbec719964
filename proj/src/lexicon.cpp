#include "traceent/lexicon.hpp"

#include "traceent/error.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include <fmt/format.h>

namespace traceent {

    namespace {

        // Windows are keyed by their start offset; hashing and equality read
        // the underlying symbols so no per-window allocation is needed.
        struct window_hash {
            const std::uint32_t* data;
            std::uint32_t l;
            std::size_t operator()(std::size_t off) const noexcept {
                std::uint64_t h = 0xcbf29ce484222325ULL;
                for (std::uint32_t i = 0; i < l; ++i) {
                    h ^= data[off + i];
                    h *= 0x100000001b3ULL;
                    h ^= h >> 29;
                }
                return static_cast<std::size_t>(h);
            }
        };

        struct window_equal {
            const std::uint32_t* data;
            std::uint32_t l;
            bool operator()(std::size_t a, std::size_t b) const noexcept {
                return std::equal(data + a, data + a + l, data + b);
            }
        };

    }  // namespace

    std::string distribution::word_string(std::size_t i) const {
        std::string out;
        for (std::size_t k = 0; k < words[i].size(); ++k) {
            if (k)
                out += '-';
            out += alphabet ? alphabet->name(words[i][k]) : std::to_string(words[i][k]);
        }
        return out;
    }

    std::vector<lword> extract_lwords(const symbol_sequence& seq, std::uint32_t l) {
        std::vector<lword> out;
        if (l == 0 || seq.size() < l)
            return out;
        out.reserve(seq.size() - l + 1);
        for (std::size_t i = 0; i + l <= seq.size(); ++i)
            out.emplace_back(seq.symbols.begin() + static_cast<std::ptrdiff_t>(i),
                             seq.symbols.begin() + static_cast<std::ptrdiff_t>(i + l));
        return out;
    }

    distribution word_distribution(const symbol_sequence& seq, std::uint32_t l, char_type c) {
        if (l == 0)
            throw error(errc::invalid_config, "word length must be positive");
        if (seq.size() < l)
            throw error(errc::trace_too_short,
                        fmt::format("trace has {} records, word length is {}", seq.size(), l));

        const std::uint32_t* data = seq.symbols.data();
        const std::size_t windows = seq.size() - l + 1;

        std::unordered_map<std::size_t, std::uint64_t, window_hash, window_equal> counts(
                std::min<std::size_t>(windows, 1 << 16), window_hash{data, l}, window_equal{data, l});
        for (std::size_t i = 0; i < windows; ++i)
            ++counts[i];

        std::vector<std::pair<std::size_t, std::uint64_t>> entries(counts.begin(), counts.end());
        std::sort(entries.begin(), entries.end(), [&](const auto& a, const auto& b) {
            return std::lexicographical_compare(data + a.first, data + a.first + l, data + b.first,
                                                data + b.first + l);
        });

        distribution d;
        d.l = l;
        d.c = c;
        d.total = windows;
        d.alphabet = seq.alphabet;
        d.words.reserve(entries.size());
        d.counts.reserve(entries.size());
        d.probs.reserve(entries.size());
        const auto total = static_cast<double>(windows);
        for (const auto& [off, count] : entries) {
            d.words.emplace_back(data + off, data + off + l);
            d.counts.push_back(count);
            d.probs.push_back(static_cast<double>(count) / total);
        }
        return d;
    }

    distribution word_distribution(const trace& t, std::uint32_t l, char_type c) {
        return word_distribution(encode(t, c), l, c);
    }

    void write_distribution_csv(std::ostream& out, const distribution& d) {
        out << "word,probability\n";
        for (std::size_t i = 0; i < d.n(); ++i)
            out << d.word_string(i) << ',' << fmt::format("{:.17g}", d.probs[i]) << '\n';
    }

}  // namespace traceent
