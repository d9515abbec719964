#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace traceent {

    /// Seeded generator with platform-independent derived draws
    /// (std distributions differ between standard libraries).
    class seeded_rng {
      public:
        explicit seeded_rng(std::uint64_t seed) : engine_(seed) {}

        /// Independent stream for a (seed, a, b) triple.
        static seeded_rng derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
            std::uint64_t s = seed ^ 0x9e3779b97f4a7c15ULL;
            for (std::uint64_t v : {a, b}) {
                s ^= v + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
                s = splitmix(s);
            }
            return seeded_rng{s};
        }

        std::uint64_t next() { return engine_(); }

        /// Uniform in [0, n); n must be > 0.
        std::uint64_t below(std::uint64_t n) {
            const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
            std::uint64_t v;
            do {
                v = engine_();
            } while (v >= limit);
            return v % n;
        }

        /// Uniform in [0, 1).
        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        bool chance(double p) { return uniform() < p; }

        template <typename T>
        void shuffle(std::vector<T>& v) {
            for (std::size_t i = v.size(); i > 1; --i)
                std::swap(v[i - 1], v[below(i)]);
        }

      private:
        static std::uint64_t splitmix(std::uint64_t z) {
            z += 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }

        std::mt19937_64 engine_;
    };

}  // namespace traceent
