#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace traceent {

    enum class record_kind : std::uint8_t { entry, exit };

    struct trace_record {
        std::string function{};
        record_kind kind{record_kind::entry};
        std::uint32_t depth{1};  // 1 = outermost call

        friend bool operator==(const trace_record&, const trace_record&) = default;
    };

    struct trace {
        std::string id{};
        std::vector<trace_record> records{};

        std::size_t size() const noexcept { return records.size(); }
        bool empty() const noexcept { return records.empty(); }
    };

    /// Encoding granularity of a record: name, name+kind, name+kind+depth.
    enum class char_type : std::uint8_t { f, ft, ftd };

    inline constexpr char_type all_char_types[] = {char_type::f, char_type::ft, char_type::ftd};

    std::string_view to_string(char_type c) noexcept;
    std::optional<char_type> parse_char_type(std::string_view text) noexcept;

    enum class parse_mode { strict, lenient };

    /// Parses `<function> <entry|exit>` lines. Depth is rebuilt from the
    /// running call stack; line numbers and `|` indentation are ignored.
    /// Throws MalformedLine, UnbalancedExit (strict only) or EmptyTrace.
    trace parse_trace(std::string_view text, parse_mode mode = parse_mode::strict, std::string id = {});

    trace read_trace_file(const std::filesystem::path& path, parse_mode mode = parse_mode::strict);

    /// Canonical writer: one `<function> <entry|exit>` per line, LF endings.
    std::string render(const trace& t);

    void write_trace_file(const std::filesystem::path& path, const trace& t);

    /// Interner mapping symbol strings to dense ids in first-seen order.
    class symbol_table {
      public:
        std::uint32_t intern(std::string_view symbol);
        std::optional<std::uint32_t> find(std::string_view symbol) const;
        const std::string& name(std::uint32_t id) const { return names_.at(id); }
        std::size_t size() const noexcept { return names_.size(); }

      private:
        struct string_hash {
            using is_transparent = void;
            std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
        };
        std::vector<std::string> names_{};
        std::unordered_map<std::string, std::uint32_t, string_hash, std::equal_to<>> ids_{};
    };

    struct symbol_sequence {
        std::vector<std::uint32_t> symbols{};
        std::shared_ptr<const symbol_table> alphabet{};

        std::size_t size() const noexcept { return symbols.size(); }
        std::size_t alphabet_size() const noexcept { return alphabet ? alphabet->size() : 0; }
    };

    /// F: `f`, FT: `f-entry`, FTD: `f-entry-depth3`.
    std::string symbol_string(const trace_record& r, char_type c);

    /// Encodes every record as one symbol. Pass `shared` to intern into an
    /// existing table so several sequences share one id space.
    symbol_sequence encode(const trace& t, char_type c, std::shared_ptr<symbol_table> shared = nullptr);

    /// Distinct function names of a trace, sorted.
    std::vector<std::string> function_names(const trace& t);

}  // namespace traceent
