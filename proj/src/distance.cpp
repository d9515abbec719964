#include "traceent/distance.hpp"

#include "traceent/error.hpp"
#include "traceent/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

namespace traceent {

    bool fingerprint_vector::saturated() const noexcept {
        return std::any_of(values.begin(), values.end(), [](double v) { return !std::isfinite(v); });
    }

    norm_maxima norm_maxima::zeros(std::uint64_t grid_hash, std::size_t size) {
        return norm_maxima{grid_hash, std::vector<double>(size, 0.0)};
    }

    void norm_maxima::absorb(std::span<const double> values) {
        for (std::size_t k = 0; k < maxima.size() && k < values.size(); ++k)
            maxima[k] = std::max(maxima[k], values[k]);
    }

    fingerprint_vector compute_fingerprints(const trace& t, const grid& g) {
        fingerprint_vector out;
        out.grid_hash = g.hash();
        out.trace_id = t.id;
        out.values.assign(g.size(), 0.0);

        std::map<std::pair<int, std::uint32_t>, std::vector<std::size_t>> groups;
        for (std::size_t k = 0; k < g.size(); ++k)
            groups[{static_cast<int>(g.specs[k].c), g.specs[k].l}].push_back(k);

        int encoded_as = -1;
        symbol_sequence seq;
        for (const auto& [key, members] : groups) {
            if (key.first != encoded_as) {
                seq = encode(t, static_cast<char_type>(key.first));
                encoded_as = key.first;
            }
            auto d = word_distribution(seq, key.second, static_cast<char_type>(key.first));
            for (auto k : members)
                out.values[k] = entropy(d.probs, g.specs[k].kind, g.specs[k].q);
        }
        return out;
    }

    double distance_single(double z_i, double z_j) {
        if (!std::isfinite(z_i) || !std::isfinite(z_j))
            throw error(errc::non_finite, "fingerprint value is not finite");
        return std::abs(z_i - z_j);
    }

    double normalized_distance(std::span<const double> a, std::span<const double> b,
                               std::span<const double> maxima, double w) {
        double acc = 0.0;
        if (w == 1.0) {
            for (std::size_t k = 0; k < maxima.size(); ++k) {
                const double m = maxima[k];
                if (m > 0.0 && std::isfinite(m))
                    acc += std::abs((a[k] - b[k]) / m);
            }
            return acc;
        }
        for (std::size_t k = 0; k < maxima.size(); ++k) {
            const double m = maxima[k];
            if (m > 0.0 && std::isfinite(m))
                acc += std::pow(std::abs((a[k] - b[k]) / m), w);
        }
        return std::pow(acc, 1.0 / w);
    }

    double distance_multi(const fingerprint_vector& v_i, const fingerprint_vector& v_j, const norm_maxima& norms,
                          double w) {
        if (v_i.grid_hash != v_j.grid_hash || v_i.grid_hash != norms.grid_hash ||
            v_i.values.size() != v_j.values.size() || v_i.values.size() != norms.maxima.size())
            throw error(errc::grid_mismatch, "fingerprint vectors and maxima do not share a grid");
        if (!(w >= 1.0) || !std::isfinite(w))
            throw error(errc::invalid_config, fmt::format("norm exponent w must be >= 1, got {}", w));
        for (std::size_t k = 0; k < norms.maxima.size(); ++k) {
            const double m = norms.maxima[k];
            if (m > 0.0 && std::isfinite(m) && (!std::isfinite(v_i.values[k]) || !std::isfinite(v_j.values[k])))
                throw error(errc::non_finite, fmt::format("component {} is saturated", k));
        }
        return normalized_distance(v_i.values, v_j.values, norms.maxima, w);
    }

    double log_surprise_sum(std::span<const double> probs) {
        double acc = 0.0;
        for (double p : probs)
            acc += std::log(p);
        return acc;
    }

    double approx_distance_small_q(double a_i, double a_j, std::uint32_t n, entropy_kind kind, double q) {
        if (n == 0)
            throw error(errc::invalid_config, "dictionary size must be >= 1");
        const double diff = std::abs(a_i - a_j);
        const double nd = static_cast<double>(n);
        switch (kind) {
            case entropy_kind::landsberg:
                return q / (nd * nd) * diff;
            case entropy_kind::renyi:
                return q / (std::log(2.0) * nd) * diff;
            case entropy_kind::tsallis:
                return q * diff;
            case entropy_kind::shannon:
                break;
        }
        throw error(errc::invalid_config, "small-q approximation is defined for L, R and T only");
    }

}  // namespace traceent
