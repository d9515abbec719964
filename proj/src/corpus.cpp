#include "traceent/corpus.hpp"

#include "traceent/error.hpp"
#include "traceent/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include <fmt/format.h>

namespace traceent {

    namespace {

        constexpr char index_magic[8] = {'T', 'R', 'E', 'N', 'T', 'I', 'D', 'X'};
        constexpr std::uint32_t flag_raw = 1U;

        class byte_writer {
          public:
            void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
            void u16(std::uint16_t v) { le(v, 2); }
            void u32(std::uint32_t v) { le(v, 4); }
            void u64(std::uint64_t v) { le(v, 8); }
            void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
            void str(std::string_view s) {
                u32(static_cast<std::uint32_t>(s.size()));
                buf_.append(s);
            }
            void raw(const char* p, std::size_t n) { buf_.append(p, n); }
            const std::string& bytes() const noexcept { return buf_; }

          private:
            void le(std::uint64_t v, int n) {
                for (int i = 0; i < n; ++i)
                    buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
            }
            std::string buf_{};
        };

        class byte_reader {
          public:
            explicit byte_reader(std::string_view data) : data_(data) {}

            std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
            std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
            std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
            std::uint64_t u64() { return le(8); }
            double f64() { return std::bit_cast<double>(le(8)); }
            std::string str() {
                auto n = u32();
                need(n);
                std::string s{data_.substr(pos_, n)};
                pos_ += n;
                return s;
            }
            std::string_view take(std::size_t n) {
                need(n);
                auto v = data_.substr(pos_, n);
                pos_ += n;
                return v;
            }
            bool at_end() const noexcept { return pos_ == data_.size(); }
            std::size_t remaining() const noexcept { return data_.size() - pos_; }

          private:
            void need(std::size_t n) const {
                if (data_.size() - pos_ < n)
                    throw error(errc::corrupt_index, "index file is truncated");
            }
            std::uint64_t le(int n) {
                need(static_cast<std::size_t>(n));
                std::uint64_t v = 0;
                for (int i = 0; i < n; ++i)
                    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
                pos_ += static_cast<std::size_t>(n);
                return v;
            }
            std::string_view data_;
            std::size_t pos_{0};
        };

        std::string trim(std::string_view s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.remove_prefix(1);
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.remove_suffix(1);
            return std::string{s};
        }

        bool same_value(double a, double b) {
            if (std::isinf(a) || std::isinf(b))
                return a == b;
            return std::abs(a - b) <= 1e-12;
        }

    }  // namespace

    std::optional<prefilter_policy> parse_prefilter_policy(std::string_view text) noexcept {
        if (text == "off")
            return prefilter_policy::off;
        if (text == "intersect")
            return prefilter_policy::intersect;
        if (text == "superset")
            return prefilter_policy::superset;
        return std::nullopt;
    }

    corpus_index::corpus_index(grid g, bool retain_raw)
            : grid_(std::move(g)),
              grid_hash_(grid_.hash()),
              retain_raw_(retain_raw),
              norms_(norm_maxima::zeros(grid_hash_, grid_.size())) {}

    corpus_entry make_entry(const trace& t, const grid& g, const std::string& class_id, bool retain_raw) {
        corpus_entry e;
        e.trace_id = t.id;
        e.class_id = class_id;
        e.values = compute_fingerprints(t, g).values;
        e.functions = function_names(t);
        if (retain_raw)
            e.raw_trace = render(t);
        return e;
    }

    std::string corpus_index::ingest(const trace& t, const std::string& class_id) {
        std::string id = t.id.empty() ? fmt::format("t{}", entries_.size() + 1) : t.id;
        if (by_id_.contains(id))
            throw error(errc::duplicate_trace_id, "trace id '" + id + "' already in index");
        auto e = make_entry(t, grid_, class_id, retain_raw_);
        e.trace_id = id;
        add_entry(std::move(e));
        return id;
    }

    void corpus_index::add_entry(corpus_entry entry) {
        if (entry.values.size() != grid_.size())
            throw error(errc::grid_mismatch, fmt::format("entry '{}' has {} values, grid has {}", entry.trace_id,
                                                         entry.values.size(), grid_.size()));
        if (by_id_.contains(entry.trace_id))
            throw error(errc::duplicate_trace_id, "trace id '" + entry.trace_id + "' already in index");
        if (!retain_raw_)
            entry.raw_trace.reset();
        norms_.absorb(entry.values);
        by_id_.emplace(entry.trace_id, entries_.size());
        entries_.push_back(std::move(entry));
    }

    const corpus_entry* corpus_index::find(std::string_view trace_id) const {
        auto it = by_id_.find(std::string{trace_id});
        return it == by_id_.end() ? nullptr : &entries_[it->second];
    }

    fingerprint_vector corpus_index::vector_of(std::size_t entry) const {
        return fingerprint_vector{grid_hash_, entries_.at(entry).values, entries_.at(entry).trace_id};
    }

    std::vector<std::string> corpus_index::classes() const {
        std::vector<std::string> out;
        for (const auto& e : entries_)
            out.push_back(e.class_id);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    bool operator==(const corpus_index& a, const corpus_index& b) {
        return a.grid_.name == b.grid_.name && a.grid_.specs == b.grid_.specs && a.retain_raw_ == b.retain_raw_ &&
               a.entries_ == b.entries_ && a.norms_.maxima == b.norms_.maxima && a.manifest_ == b.manifest_;
    }

    std::vector<std::size_t> prefilter_indices(std::span<const std::string> query_functions,
                                               const corpus_index& index, prefilter_policy policy) {
        std::vector<std::size_t> out;
        const auto& entries = index.entries();
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto& names = entries[i].functions;
            bool keep = true;
            if (policy == prefilter_policy::intersect) {
                keep = std::any_of(query_functions.begin(), query_functions.end(), [&](const std::string& f) {
                    return std::binary_search(names.begin(), names.end(), f);
                });
            }
            else if (policy == prefilter_policy::superset) {
                keep = std::all_of(query_functions.begin(), query_functions.end(), [&](const std::string& f) {
                    return std::binary_search(names.begin(), names.end(), f);
                });
            }
            if (keep)
                out.push_back(i);
        }
        return out;
    }

    std::vector<std::string> prefilter(const trace& query, const corpus_index& index, prefilter_policy policy) {
        auto names = function_names(query);
        std::vector<std::string> ids;
        for (auto i : prefilter_indices(names, index, policy))
            ids.push_back(index.entries()[i].trace_id);
        return ids;
    }

    void save(const corpus_index& index, const std::filesystem::path& path) {
        const auto& g = index.spec_grid();
        const auto m = g.size();
        byte_writer w;
        w.raw(index_magic, sizeof index_magic);
        w.u32(index_format_version);
        w.u32(index.retains_raw() ? flag_raw : 0U);
        w.u32(static_cast<std::uint32_t>(m));
        for (const auto& s : g.specs) {
            w.u8(static_cast<std::uint8_t>(entropy_letter(s.kind)));
            w.u8(static_cast<std::uint8_t>(s.c));
            w.u16(0);
            w.u32(s.l);
            w.f64(s.q);
        }
        w.str(g.name);
        w.u64(index.grid_hash());
        w.u64(index.size());
        for (double v : index.norms().maxima)
            w.f64(v);
        for (const auto& e : index.entries())
            for (double v : e.values)
                w.f64(v);
        for (const auto& e : index.entries()) {
            w.str(e.trace_id);
            w.str(e.class_id);
            w.u32(static_cast<std::uint32_t>(e.functions.size()));
            for (const auto& f : e.functions)
                w.str(f);
            if (index.retains_raw())
                w.str(e.raw_trace.value_or(std::string{}));
        }
        w.u32(static_cast<std::uint32_t>(index.manifest().size()));
        for (const auto& [cls, meta] : index.manifest()) {
            w.str(cls);
            w.str(meta);
        }

        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw error(errc::io_error, "cannot write index " + path.string());
        out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
        if (!out)
            throw error(errc::io_error, "failed writing index " + path.string());
    }

    corpus_index load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw error(errc::io_error, "cannot open index " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string data = buf.str();
        // a zero-length file is an index nobody has ingested into yet
        if (data.empty())
            return corpus_index{default_grid()};
        byte_reader r{data};

        auto magic = r.take(sizeof index_magic);
        if (std::memcmp(magic.data(), index_magic, sizeof index_magic) != 0)
            throw error(errc::corrupt_index, "bad magic in " + path.string());
        auto version = r.u32();
        if (version != index_format_version)
            throw error(errc::format_version_mismatch,
                        fmt::format("index version {} (expected {})", version, index_format_version));
        const auto flags = r.u32();
        const bool retain_raw = (flags & flag_raw) != 0;

        grid g;
        const auto m = r.u32();
        if (static_cast<std::size_t>(m) * 16 > r.remaining())
            throw error(errc::corrupt_index, "index file is truncated");
        for (std::uint32_t k = 0; k < m; ++k) {
            auto letter = static_cast<char>(r.u8());
            auto c_raw = r.u8();
            r.u16();
            auto l = r.u32();
            auto q = r.f64();
            auto kind = parse_entropy_kind(std::string_view{&letter, 1});
            if (!kind || c_raw > 2 || l == 0)
                throw error(errc::corrupt_index, fmt::format("bad grid spec #{}", k));
            g.specs.push_back(entropy_spec{*kind, q, l, static_cast<char_type>(c_raw)});
        }
        g.name = r.str();
        const auto stored_hash = r.u64();
        if (stored_hash != g.hash())
            throw error(errc::corrupt_index, "grid hash does not match grid serialisation");

        const auto count = r.u64();
        // each entry needs 8 bytes per value plus at least three length fields
        const std::size_t min_entry_bytes = 8 * static_cast<std::size_t>(m) + 12;
        if (count > r.remaining() / min_entry_bytes)
            throw error(errc::corrupt_index, "index file is truncated");
        std::vector<double> stored_maxima(m);
        for (auto& v : stored_maxima)
            v = r.f64();

        std::vector<corpus_entry> entries(count);
        for (auto& e : entries) {
            e.values.resize(m);
            for (auto& v : e.values)
                v = r.f64();
        }
        for (auto& e : entries) {
            e.trace_id = r.str();
            e.class_id = r.str();
            auto nf = r.u32();
            if (nf > r.remaining() / 4)
                throw error(errc::corrupt_index, "index file is truncated");
            e.functions.resize(nf);
            for (auto& f : e.functions)
                f = r.str();
            if (retain_raw)
                e.raw_trace = r.str();
        }
        std::map<std::string, std::string> manifest;
        auto manifest_count = r.u32();
        for (std::uint32_t i = 0; i < manifest_count; ++i) {
            auto cls = r.str();
            manifest[cls] = r.str();
        }
        if (!r.at_end())
            throw error(errc::corrupt_index, "trailing bytes after index payload");

        corpus_index index{std::move(g), retain_raw};
        for (auto& e : entries)
            index.add_entry(std::move(e));
        index.manifest() = std::move(manifest);

        for (std::size_t k = 0; k < m; ++k)
            if (!same_value(stored_maxima[k], index.norms().maxima[k]))
                throw error(errc::corrupt_index,
                            fmt::format("stored maximum {} of component {} disagrees with entries ({})",
                                        stored_maxima[k], k, index.norms().maxima[k]));
        return index;
    }

    std::vector<manifest_row> read_manifest(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in)
            throw error(errc::io_error, "cannot open manifest " + path.string());
        const auto base = path.parent_path();
        std::vector<manifest_row> rows;
        std::string line;
        std::size_t line_no = 0;
        bool first_row = true;
        while (std::getline(in, line)) {
            ++line_no;
            auto text = trim(line);
            if (text.empty() || text.front() == '#')
                continue;
            const bool may_be_header = std::exchange(first_row, false);
            auto comma = text.rfind(',');
            if (comma == std::string::npos)
                throw error(errc::io_error, fmt::format("{}:{}: expected trace_file,class_id", path.string(), line_no));
            auto file = trim(std::string_view{text}.substr(0, comma));
            auto cls = trim(std::string_view{text}.substr(comma + 1));
            if (may_be_header && file == "trace_file" && cls == "class_id")
                continue;
            std::filesystem::path p{file};
            if (p.is_relative())
                p = base / p;
            rows.push_back(manifest_row{p, cls, file});
        }
        return rows;
    }

    ingest_report ingest_manifest(const std::filesystem::path& manifest_path, corpus_index& index, parse_mode mode,
                                  unsigned threads) {
        auto rows = read_manifest(manifest_path);
        std::vector<std::optional<corpus_entry>> built(rows.size());
        std::vector<std::string> skipped(rows.size());

        parallel_for(rows.size(), threads, [&](std::size_t i) {
            auto t = read_trace_file(rows[i].trace_file, mode);
            t.id = rows[i].label;
            try {
                built[i] = make_entry(t, index.spec_grid(), rows[i].class_id, index.retains_raw());
            }
            catch (const error& e) {
                if (e.code() != errc::trace_too_short)
                    throw;
                skipped[i] = fmt::format("skipping {}: {}", rows[i].trace_file.string(), e.what());
            }
        });

        ingest_report report;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (!built[i]) {
                report.warnings.push_back(skipped[i]);
                continue;
            }
            index.add_entry(std::move(*built[i]));
            ++report.ingested;
        }
        return report;
    }

}  // namespace traceent
