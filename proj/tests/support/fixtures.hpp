#pragma once

#include "traceent/corpus.hpp"
#include "traceent/trace.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

    inline constexpr const char* figure1_text =
            "1 f1 entry\n"
            "2 | f2 entry\n"
            "3 | | f2 entry\n"
            "4 | | f2 exit\n"
            "5 | f2 exit\n"
            "6 f1 exit\n";

    inline traceent::trace figure1() { return traceent::parse_trace(figure1_text, traceent::parse_mode::strict, "fig1"); }

    /// `main` calling `extra` distinct leaf functions: n = extra + 1 symbols
    /// under F with l = 1, so Tsallis at q = 0 evaluates to `extra`.
    inline traceent::trace fan_trace(const std::string& id, int extra) {
        traceent::trace t;
        t.id = id;
        t.records.push_back({"main", traceent::record_kind::entry, 1});
        for (int i = 0; i < extra; ++i) {
            const auto name = id + "_g" + std::to_string(i);
            t.records.push_back({name, traceent::record_kind::entry, 2});
            t.records.push_back({name, traceent::record_kind::exit, 2});
        }
        t.records.push_back({"main", traceent::record_kind::exit, 1});
        return t;
    }

    /// The five-trace, four-defect example: under (T, 0, 1, F) the query is
    /// at distances t2:0, t1:7, t4:7, t3:9, t5:9.
    inline traceent::entropy_spec ranking_example_spec() {
        return traceent::make_spec(traceent::entropy_kind::tsallis, 0.0, 1, traceent::char_type::f);
    }

    inline traceent::corpus_index ranking_example_index(bool retain_raw = false) {
        traceent::corpus_index index{traceent::single_spec_grid(ranking_example_spec()), retain_raw};
        index.ingest(fan_trace("t1", 8), "d2");
        index.ingest(fan_trace("t2", 1), "d4");
        index.ingest(fan_trace("t3", 10), "d2");
        index.ingest(fan_trace("t4", 8), "d3");
        index.ingest(fan_trace("t5", 10), "d1");
        return index;
    }

    inline traceent::trace ranking_example_query() { return fan_trace("t", 1); }

    /// Random probability vector with n entries, drawn with varying skew.
    inline std::vector<double> random_distribution(std::mt19937_64& rng, std::size_t n) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double skew = 0.2 + 4.0 * u(rng);
        std::vector<double> p(n);
        double sum = 0.0;
        for (auto& v : p) {
            v = std::pow(u(rng), skew) + 1e-6;
            sum += v;
        }
        for (auto& v : p)
            v /= sum;
        return p;
    }

    /// Random balanced trace over a small function pool.
    inline traceent::trace random_trace(std::mt19937_64& rng, std::size_t target, int pool = 8,
                                        const std::string& id = {}) {
        traceent::trace t;
        t.id = id;
        std::vector<std::string> stack;
        std::uniform_int_distribution<int> fn(0, pool - 1);
        std::bernoulli_distribution push(0.55);
        while (t.records.size() + stack.size() < target || t.records.empty()) {
            if (stack.empty() || (push(rng) && stack.size() < 6)) {
                auto name = "f" + std::to_string(fn(rng));
                stack.push_back(name);
                t.records.push_back({name, traceent::record_kind::entry, static_cast<std::uint32_t>(stack.size())});
            } else {
                t.records.push_back({stack.back(), traceent::record_kind::exit, static_cast<std::uint32_t>(stack.size())});
                stack.pop_back();
            }
        }
        while (!stack.empty()) {
            t.records.push_back({stack.back(), traceent::record_kind::exit, static_cast<std::uint32_t>(stack.size())});
            stack.pop_back();
        }
        return t;
    }

}  // namespace fixtures
