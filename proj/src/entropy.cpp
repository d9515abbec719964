#include "traceent/entropy.hpp"

#include "traceent/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

namespace traceent {

    namespace {

        std::string_view trim(std::string_view s) {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
                s.remove_prefix(1);
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
                s.remove_suffix(1);
            return s;
        }

        constexpr double inv_ln2 = 1.4426950408889634074;

    }  // namespace

    char entropy_letter(entropy_kind e) noexcept {
        switch (e) {
            case entropy_kind::shannon:
                return 'S';
            case entropy_kind::landsberg:
                return 'L';
            case entropy_kind::renyi:
                return 'R';
            case entropy_kind::tsallis:
                return 'T';
        }
        return '?';
    }

    std::optional<entropy_kind> parse_entropy_kind(std::string_view text) noexcept {
        text = trim(text);
        if (text.size() != 1)
            return std::nullopt;
        switch (text.front()) {
            case 'S':
            case 's':
                return entropy_kind::shannon;
            case 'L':
            case 'l':
                return entropy_kind::landsberg;
            case 'R':
            case 'r':
                return entropy_kind::renyi;
            case 'T':
            case 't':
                return entropy_kind::tsallis;
            default:
                return std::nullopt;
        }
    }

    entropy_spec make_spec(entropy_kind kind, double q, std::uint32_t l, char_type c) {
        if (l == 0)
            throw error(errc::invalid_config, "word length l must be >= 1");
        if (kind == entropy_kind::shannon || std::abs(q - 1.0) <= q_one_tolerance)
            return entropy_spec{entropy_kind::shannon, 1.0, l, c};
        if (!std::isfinite(q) || q < 0.0)
            throw error(errc::invalid_config, fmt::format("entropy index q must be finite and >= 0, got {}", q));
        return entropy_spec{kind, q, l, c};
    }

    entropy_spec parse_spec(std::string_view text) {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        while (true) {
            auto comma = text.find(',', start);
            parts.push_back(trim(text.substr(start, comma - start)));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        if (parts.size() != 4)
            throw error(errc::invalid_config, "spec must be E,q,l,c: '" + std::string{text} + "'");

        auto kind = parse_entropy_kind(parts[0]);
        if (!kind)
            throw error(errc::invalid_config, "unknown entropy '" + std::string{parts[0]} + "'");

        double q = 1.0;
        if (parts[1] != "-" && !parts[1].empty()) {
            std::string qs{parts[1]};
            char* end = nullptr;
            q = std::strtod(qs.c_str(), &end);
            if (end != qs.c_str() + qs.size())
                throw error(errc::invalid_config, "bad q value '" + qs + "'");
        }

        std::uint32_t l = 0;
        auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), l);
        if (ec != std::errc{} || ptr != parts[2].data() + parts[2].size())
            throw error(errc::invalid_config, "bad word length '" + std::string{parts[2]} + "'");

        auto c = parse_char_type(parts[3]);
        if (!c)
            throw error(errc::invalid_config, "unknown character type '" + std::string{parts[3]} + "'");
        return make_spec(*kind, q, l, *c);
    }

    std::string to_string(const entropy_spec& s) {
        return fmt::format("{},{},{},{}", entropy_letter(s.kind), s.q, s.l, to_string(s.c));
    }

    double log_q_moment(std::span<const double> probs, double q) {
        if (probs.empty())
            return -std::numeric_limits<double>::infinity();
        double peak = -std::numeric_limits<double>::infinity();
        for (double p : probs)
            peak = std::max(peak, q * std::log(p));
        double acc = 0.0;
        for (double p : probs)
            acc += std::exp(q * std::log(p) - peak);
        return peak + std::log(acc);
    }

    double q_moment(std::span<const double> probs, double q) { return std::exp(log_q_moment(probs, q)); }

    double shannon(std::span<const double> probs) {
        double acc = 0.0;
        for (double p : probs)
            if (p > 0.0)
                acc -= p * std::log2(p);
        // -0.0 for a single certain state
        return acc == 0.0 ? 0.0 : acc;
    }

    double extended_raw(std::span<const double> probs, entropy_kind kind, double q) {
        const double log_q = log_q_moment(probs, q);
        switch (kind) {
            case entropy_kind::landsberg: {
                // 1/Q overflows for large q and tiny Q; saturate to +inf.
                const double inv = std::exp(-log_q);
                return (1.0 - inv) / (1.0 - q);
            }
            case entropy_kind::renyi:
                return log_q * inv_ln2 / (1.0 - q);
            case entropy_kind::tsallis:
                return std::expm1(log_q) / (1.0 - q);
            case entropy_kind::shannon:
                return shannon(probs);
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    double extended(std::span<const double> probs, entropy_kind kind, double q) {
        if (kind == entropy_kind::shannon || std::abs(q - 1.0) <= q_one_tolerance)
            return shannon(probs);
        double v = extended_raw(probs, kind, q);
        // a single certain state gives 0 for every index; clear rounding noise
        if (probs.size() == 1)
            return 0.0;
        return v;
    }

    double entropy(std::span<const double> probs, entropy_kind kind, double q) {
        return kind == entropy_kind::shannon ? shannon(probs) : extended(probs, kind, q);
    }

    double fingerprint(const trace& t, const entropy_spec& spec) {
        auto d = word_distribution(t, spec.l, spec.c);
        return entropy(d.probs, spec.kind, spec.q);
    }

}  // namespace traceent
