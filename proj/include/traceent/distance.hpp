#pragma once

#include "traceent/entropy.hpp"
#include "traceent/grid.hpp"
#include "traceent/trace.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace traceent {

    /// Entropy values of one trace, aligned to a grid's spec order.
    /// Components may be +inf when an entropy saturated.
    struct fingerprint_vector {
        std::uint64_t grid_hash{0};
        std::vector<double> values{};
        std::string trace_id{};

        bool saturated() const noexcept;
    };

    /// Per-component maxima over a trace set; the denominators of the
    /// normalised multi-spec distance.
    struct norm_maxima {
        std::uint64_t grid_hash{0};
        std::vector<double> maxima{};

        static norm_maxima zeros(std::uint64_t grid_hash, std::size_t size);
        void absorb(std::span<const double> values);
    };

    /// Computes every spec of the grid, sharing one distribution per (l, c).
    /// Throws TraceTooShort when the trace is shorter than the largest l.
    fingerprint_vector compute_fingerprints(const trace& t, const grid& g);

    /// |z_i - z_j|. Throws NonFinite on saturated inputs.
    double distance_single(double z_i, double z_j);

    /// (sum_k |(v_i[k] - v_j[k]) / max_k|^w)^(1/w). Components whose maximum
    /// is 0 or +inf are skipped. Throws GridMismatch, NonFinite, InvalidConfig (w < 1).
    double distance_multi(const fingerprint_vector& v_i, const fingerprint_vector& v_j, const norm_maxima& norms,
                          double w = 1.0);

    /// Unchecked kernel behind distance_multi; the spans must be equally sized.
    double normalized_distance(std::span<const double> a, std::span<const double> b,
                               std::span<const double> maxima, double w);

    /// A = sum_k ln p_k over the dictionary.
    double log_surprise_sum(std::span<const double> probs);

    /// First-order small-q estimate of the single-spec distance for two
    /// traces with (approximately) equal dictionary size n.
    double approx_distance_small_q(double a_i, double a_j, std::uint32_t n, entropy_kind kind, double q);

}  // namespace traceent
