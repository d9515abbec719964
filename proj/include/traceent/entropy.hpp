#pragma once

#include "traceent/lexicon.hpp"
#include "traceent/trace.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace traceent {

    /// S = Shannon, L = Landsberg-Vedral, R = Renyi, T = Tsallis.
    enum class entropy_kind : std::uint8_t { shannon, landsberg, renyi, tsallis };

    char entropy_letter(entropy_kind e) noexcept;
    std::optional<entropy_kind> parse_entropy_kind(std::string_view text) noexcept;

    /// |q - 1| at or below this is treated as q = 1 and answered by Shannon.
    inline constexpr double q_one_tolerance = 1e-8;

    /// One fingerprint parameterisation [E, q, l, c]. Entropies are in bits.
    struct entropy_spec {
        entropy_kind kind{entropy_kind::shannon};
        double q{1.0};
        std::uint32_t l{1};
        char_type c{char_type::f};

        friend bool operator==(const entropy_spec&, const entropy_spec&) = default;
    };

    /// Normalises a spec: Shannon, and extended kinds at q = 1, collapse to
    /// (S, 1, l, c). Throws InvalidConfig on q < 0, non-finite q or l == 0.
    entropy_spec make_spec(entropy_kind kind, double q, std::uint32_t l, char_type c);

    /// Parses "E,q,l,c", e.g. "L,1e-5,3,FTD" or "S,-,1,F".
    entropy_spec parse_spec(std::string_view text);
    std::string to_string(const entropy_spec& s);

    /// ln Q(P; q) with Q = sum p_i^q, evaluated by log-sum-exp over q ln p_i.
    double log_q_moment(std::span<const double> probs, double q);
    double q_moment(std::span<const double> probs, double q);

    double shannon(std::span<const double> probs);

    /// Landsberg-Vedral, Renyi or Tsallis. At q = 1 returns Shannon (bits)
    /// for all three. Landsberg-Vedral saturates to +inf when 1/Q overflows.
    double extended(std::span<const double> probs, entropy_kind kind, double q);

    /// Closed forms without the q = 1 dispatch; divides by (1 - q).
    double extended_raw(std::span<const double> probs, entropy_kind kind, double q);

    double entropy(std::span<const double> probs, entropy_kind kind, double q);

    /// H_E[alpha(t; l, c); q]. Throws TraceTooShort when t has fewer than l records.
    double fingerprint(const trace& t, const entropy_spec& spec);

}  // namespace traceent
