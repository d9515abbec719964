#include "traceent/trace.hpp"

#include "traceent/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace traceent {

    namespace {

        bool is_space(char ch) { return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\v' || ch == '\f'; }

        std::vector<std::string_view> split_tokens(std::string_view line) {
            std::vector<std::string_view> out;
            std::size_t i = 0;
            while (i < line.size()) {
                while (i < line.size() && is_space(line[i]))
                    ++i;
                std::size_t start = i;
                while (i < line.size() && !is_space(line[i]))
                    ++i;
                if (i > start)
                    out.push_back(line.substr(start, i - start));
            }
            return out;
        }

        bool iequals(std::string_view a, std::string_view b) {
            return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
                       return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
                   });
        }

        std::string_view strip_pipes(std::string_view tok) {
            while (!tok.empty() && tok.front() == '|')
                tok.remove_prefix(1);
            return tok;
        }

        std::string describe_line(std::size_t line_no, std::string_view line) {
            return "line " + std::to_string(line_no) + ": '" + std::string{line} + "'";
        }

    }  // namespace

    std::string_view to_string(char_type c) noexcept {
        switch (c) {
            case char_type::f:
                return "F";
            case char_type::ft:
                return "FT";
            case char_type::ftd:
                return "FTD";
        }
        return "?";
    }

    std::optional<char_type> parse_char_type(std::string_view text) noexcept {
        if (iequals(text, "F"))
            return char_type::f;
        if (iequals(text, "FT"))
            return char_type::ft;
        if (iequals(text, "FTD"))
            return char_type::ftd;
        return std::nullopt;
    }

    trace parse_trace(std::string_view text, parse_mode mode, std::string id) {
        trace out;
        out.id = std::move(id);
        std::vector<std::string_view> stack;

        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string_view::npos)
                nl = text.size();
            std::string_view line = text.substr(pos, nl - pos);
            pos = nl + 1;
            ++line_no;

            auto tokens = split_tokens(line);
            if (tokens.empty())
                continue;
            if (tokens.size() < 2)
                throw error(errc::malformed_line, describe_line(line_no, line));

            std::string_view kind_tok = tokens.back();
            record_kind kind;
            if (iequals(kind_tok, "entry"))
                kind = record_kind::entry;
            else if (iequals(kind_tok, "exit"))
                kind = record_kind::exit;
            else
                throw error(errc::malformed_line, describe_line(line_no, line));

            std::string_view fn = strip_pipes(tokens[tokens.size() - 2]);
            if (fn.empty())
                throw error(errc::malformed_line, describe_line(line_no, line));

            trace_record rec{std::string{fn}, kind, 1};
            if (kind == record_kind::entry) {
                rec.depth = static_cast<std::uint32_t>(stack.size() + 1);
                stack.push_back(fn);
            }
            else {
                bool matches = !stack.empty() && stack.back() == fn;
                if (matches) {
                    rec.depth = static_cast<std::uint32_t>(stack.size());
                    stack.pop_back();
                }
                else if (mode == parse_mode::strict) {
                    throw error(
                            errc::unbalanced_exit,
                            describe_line(line_no, line) + (stack.empty() ? " (no open call)"
                                                                          : " (open call is '" +
                                                                                    std::string{stack.back()} + "')"));
                }
                else {
                    rec.depth = static_cast<std::uint32_t>(std::max<std::size_t>(stack.size(), 1));
                }
            }
            out.records.push_back(std::move(rec));
        }

        if (out.records.empty())
            throw error(errc::empty_trace, "no records in trace text");
        return out;
    }

    trace read_trace_file(const std::filesystem::path& path, parse_mode mode) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw error(errc::io_error, "cannot open trace file " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_trace(buf.str(), mode, path.stem().string());
    }

    std::string render(const trace& t) {
        std::string out;
        for (const auto& r : t.records) {
            out += r.function;
            out += r.kind == record_kind::entry ? " entry\n" : " exit\n";
        }
        return out;
    }

    void write_trace_file(const std::filesystem::path& path, const trace& t) {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw error(errc::io_error, "cannot write trace file " + path.string());
        out << render(t);
    }

    std::uint32_t symbol_table::intern(std::string_view symbol) {
        if (auto it = ids_.find(symbol); it != ids_.end())
            return it->second;
        auto id = static_cast<std::uint32_t>(names_.size());
        names_.emplace_back(symbol);
        ids_.emplace(names_.back(), id);
        return id;
    }

    std::optional<std::uint32_t> symbol_table::find(std::string_view symbol) const {
        if (auto it = ids_.find(symbol); it != ids_.end())
            return it->second;
        return std::nullopt;
    }

    std::string symbol_string(const trace_record& r, char_type c) {
        std::string s = r.function;
        if (c == char_type::f)
            return s;
        s += r.kind == record_kind::entry ? "-entry" : "-exit";
        if (c == char_type::ftd) {
            s += "-depth";
            s += std::to_string(r.depth);
        }
        return s;
    }

    symbol_sequence encode(const trace& t, char_type c, std::shared_ptr<symbol_table> shared) {
        if (!shared)
            shared = std::make_shared<symbol_table>();
        symbol_sequence seq;
        seq.symbols.reserve(t.records.size());
        std::string scratch;
        for (const auto& r : t.records) {
            scratch = symbol_string(r, c);
            seq.symbols.push_back(shared->intern(scratch));
        }
        seq.alphabet = std::move(shared);
        return seq;
    }

    std::vector<std::string> function_names(const trace& t) {
        std::set<std::string> names;
        for (const auto& r : t.records)
            names.insert(r.function);
        return {names.begin(), names.end()};
    }

}  // namespace traceent
