#include "traceent/baseline.hpp"

#include "traceent/error.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace traceent {

    std::uint64_t edit_distance(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
        // Walk along the shorter sequence (x) against the longer one (y).
        if (a.size() > b.size())
            std::swap(a, b);
        const auto m = static_cast<std::ptrdiff_t>(a.size());
        const auto n = static_cast<std::ptrdiff_t>(b.size());
        const std::ptrdiff_t delta = n - m;
        const std::ptrdiff_t offset = m + 1;

        // furthest[k + offset] = furthest y reached on diagonal k = y - x
        std::vector<std::ptrdiff_t> furthest(static_cast<std::size_t>(n + m + 3), -1);
        auto fp = [&](std::ptrdiff_t k) -> std::ptrdiff_t& { return furthest[static_cast<std::size_t>(k + offset)]; };

        auto snake = [&](std::ptrdiff_t k, std::ptrdiff_t y) {
            std::ptrdiff_t x = y - k;
            while (x < m && y < n && a[static_cast<std::size_t>(x)] == b[static_cast<std::size_t>(y)]) {
                ++x;
                ++y;
            }
            return y;
        };
        auto step = [&](std::ptrdiff_t k) { fp(k) = snake(k, std::max(fp(k - 1) + 1, fp(k + 1))); };

        std::ptrdiff_t p = -1;
        do {
            ++p;
            for (std::ptrdiff_t k = -p; k < delta; ++k)
                step(k);
            for (std::ptrdiff_t k = delta + p; k > delta; --k)
                step(k);
            step(delta);
        } while (fp(delta) != n);

        return static_cast<std::uint64_t>(delta + 2 * p);
    }

    edit_distance_result myers_edit_distance(const symbol_sequence& a, const symbol_sequence& b) {
        edit_distance_result r;
        r.combined_length = a.size() + b.size();
        if (a.alphabet == b.alphabet || !a.alphabet || !b.alphabet) {
            r.distance = edit_distance(a.symbols, b.symbols);
            return r;
        }
        // Re-express b in a's id space; symbols unknown to a get fresh ids.
        std::vector<std::uint32_t> remap(b.alphabet->size());
        auto next = static_cast<std::uint32_t>(a.alphabet->size());
        for (std::uint32_t id = 0; id < remap.size(); ++id) {
            auto found = a.alphabet->find(b.alphabet->name(id));
            remap[id] = found ? *found : next++;
        }
        std::vector<std::uint32_t> mapped(b.symbols.size());
        std::transform(b.symbols.begin(), b.symbols.end(), mapped.begin(), [&](std::uint32_t s) { return remap[s]; });
        r.distance = edit_distance(a.symbols, mapped);
        return r;
    }

    encoded_corpus encode_corpus(const corpus_index& index, char_type c) {
        if (!index.retains_raw())
            throw error(errc::raw_traces_unavailable, "index was built without raw trace retention");
        encoded_corpus out;
        out.alphabet = std::make_shared<symbol_table>();
        out.sequences.reserve(index.size());
        for (const auto& e : index.entries()) {
            if (!e.raw_trace)
                throw error(errc::raw_traces_unavailable, "entry '" + e.trace_id + "' has no raw trace");
            auto t = parse_trace(*e.raw_trace, parse_mode::lenient, e.trace_id);
            out.sequences.push_back(encode(t, c, out.alphabet).symbols);
        }
        return out;
    }

    std::vector<ranked_class> baseline_rank_all(const trace& query, const corpus_index& index,
                                                const encoded_corpus& encoded, char_type c, unsigned threads) {
        if (index.empty())
            throw error(errc::empty_corpus, "corpus index has no entries");
        if (encoded.sequences.size() != index.size())
            throw error(errc::raw_traces_unavailable, "encoded corpus does not match the index");

        std::unordered_map<std::string, std::uint32_t> unseen;
        std::vector<std::uint32_t> q;
        q.reserve(query.size());
        for (const auto& r : query.records) {
            auto sym = symbol_string(r, c);
            if (auto id = encoded.alphabet->find(sym)) {
                q.push_back(*id);
                continue;
            }
            auto [it, inserted] = unseen.try_emplace(sym, static_cast<std::uint32_t>(encoded.alphabet->size() +
                                                                                      unseen.size()));
            q.push_back(it->second);
        }

        std::vector<std::size_t> all(index.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        const auto* base = index.entries().data();
        return rank_with(
                index, all,
                [&](const corpus_entry& e) {
                    const auto i = static_cast<std::size_t>(&e - base);
                    return static_cast<double>(edit_distance(q, encoded.sequences[i]));
                },
                threads);
    }

    std::vector<ranked_class> baseline_rank(const trace& query, const corpus_index& index, char_type c,
                                            std::uint32_t x, unsigned threads) {
        auto encoded = encode_corpus(index, c);
        return top_x(baseline_rank_all(query, index, encoded, c, threads), x);
    }

}  // namespace traceent
