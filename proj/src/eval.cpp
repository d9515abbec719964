#include "traceent/eval.hpp"

#include "traceent/baseline.hpp"
#include "traceent/error.hpp"
#include "traceent/parallel.hpp"
#include "traceent/random.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

namespace traceent {

    std::vector<std::vector<std::size_t>> kfold_partition(std::size_t count, std::uint32_t k, std::uint64_t seed) {
        if (k < 2)
            throw error(errc::invalid_config, fmt::format("need at least 2 folds, got {}", k));
        if (count < k)
            throw error(errc::too_few_traces, fmt::format("{} traces cannot fill {} folds", count, k));

        std::vector<std::size_t> order(count);
        std::iota(order.begin(), order.end(), std::size_t{0});
        seeded_rng rng{seed};
        rng.shuffle(order);

        std::vector<std::vector<std::size_t>> bins(k);
        const std::size_t base = count / k;
        const std::size_t extra = count % k;
        std::size_t pos = 0;
        for (std::uint32_t b = 0; b < k; ++b) {
            const std::size_t size = base + (b < extra ? 1 : 0);
            bins[b].assign(order.begin() + static_cast<std::ptrdiff_t>(pos),
                           order.begin() + static_cast<std::ptrdiff_t>(pos + size));
            pos += size;
        }
        return bins;
    }

    std::vector<std::vector<std::string>> kfold_partition(std::span<const std::string> ids, std::uint32_t k,
                                                          std::uint64_t seed) {
        auto bins = kfold_partition(ids.size(), k, seed);
        std::vector<std::vector<std::string>> out(bins.size());
        for (std::size_t b = 0; b < bins.size(); ++b)
            for (auto i : bins[b])
                out[b].push_back(ids[i]);
        return out;
    }

    double t_quantile_975(std::uint32_t df) {
        if (df == 0)
            throw error(errc::invalid_config, "t quantile needs df >= 1");
        if (df == 9)
            return 2.262157163;
        return boost::math::quantile(boost::math::students_t_distribution<double>(df), 0.975);
    }

    double topx_table::top(std::uint32_t x) const {
        if (rows.empty())
            return 0.0;
        x = std::clamp<std::uint32_t>(x, 1, static_cast<std::uint32_t>(rows.size()));
        return rows[x - 1].avg;
    }

    std::uint32_t true_class_rank(std::span<const double> distances, std::span<const std::uint32_t> classes,
                                  std::uint32_t true_class, std::uint32_t num_classes) {
        std::vector<double> best(num_classes, std::numeric_limits<double>::infinity());
        std::vector<char> present(num_classes, 0);
        for (std::size_t i = 0; i < distances.size(); ++i) {
            const auto c = classes[i];
            present[c] = 1;
            best[c] = std::min(best[c], distances[i]);
        }
        if (true_class >= num_classes || !present[true_class])
            return 0;
        std::uint32_t rank = 0;
        for (std::uint32_t c = 0; c < num_classes; ++c)
            if (present[c] && best[c] <= best[true_class])
                ++rank;
        return rank;
    }

    topx_table crossval(const corpus_index& index, const distance_config& config, std::uint32_t k,
                        std::uint64_t seed, unsigned threads) {
        const auto& entries = index.entries();
        const auto class_names = index.classes();
        const auto num_classes = static_cast<std::uint32_t>(class_names.size());
        std::vector<std::uint32_t> class_of(entries.size());
        for (std::size_t i = 0; i < entries.size(); ++i)
            class_of[i] = static_cast<std::uint32_t>(
                    std::lower_bound(class_names.begin(), class_names.end(), entries[i].class_id) -
                    class_names.begin());
        for (auto c : config.components)
            if (c >= index.spec_grid().size())
                throw error(errc::invalid_config, fmt::format("component {} outside grid", c));
        if (!(config.w >= 1.0))
            throw error(errc::invalid_config, "norm exponent w must be >= 1");

        const auto bins = kfold_partition(entries.size(), k, seed);
        std::vector<std::uint32_t> fold_of(entries.size());
        for (std::uint32_t f = 0; f < k; ++f)
            for (auto i : bins[f])
                fold_of[i] = f;

        topx_table table;
        table.folds = k;
        table.description = config.describe(index.spec_grid());
        table.fold_fractions.assign(k, std::vector<double>(num_classes, 0.0));

        const std::size_t m = index.spec_grid().size();
        for (std::uint32_t f = 0; f < k; ++f) {
            std::vector<std::size_t> training;
            training.reserve(entries.size());
            for (std::size_t i = 0; i < entries.size(); ++i)
                if (fold_of[i] != f)
                    training.push_back(i);
            std::vector<std::uint32_t> training_classes(training.size());
            for (std::size_t j = 0; j < training.size(); ++j)
                training_classes[j] = class_of[training[j]];

            std::vector<double> training_max(m, 0.0);
            if (config.normalize)
                for (auto i : training)
                    for (std::size_t c = 0; c < m; ++c)
                        training_max[c] = std::max(training_max[c], entries[i].values[c]);

            const auto& bin = bins[f];
            std::vector<std::uint32_t> ranks(bin.size());
            parallel_for(bin.size(), threads, [&](std::size_t b) {
                const auto& query = entries[bin[b]].values;
                std::vector<double> maxima;
                if (config.normalize) {
                    std::vector<double> merged(training_max);
                    for (std::size_t c = 0; c < m; ++c)
                        merged[c] = std::max(merged[c], query[c]);
                    maxima = effective_maxima(config, merged);
                }
                std::vector<double> distances(training.size());
                for (std::size_t j = 0; j < training.size(); ++j)
                    distances[j] = config_distance(config, query, entries[training[j]].values, maxima);
                ranks[b] = true_class_rank(distances, training_classes, class_of[bin[b]], num_classes);
            });

            for (auto r : ranks) {
                if (r == 0) {
                    ++table.unclassified;
                    continue;
                }
                for (std::uint32_t x = r; x <= num_classes; ++x)
                    table.fold_fractions[f][x - 1] += 1.0;
            }
            for (auto& v : table.fold_fractions[f])
                v /= static_cast<double>(bin.size());
        }

        const double t = t_quantile_975(k - 1);
        for (std::uint32_t x = 1; x <= num_classes; ++x) {
            double mean = 0.0;
            for (std::uint32_t f = 0; f < k; ++f)
                mean += table.fold_fractions[f][x - 1];
            mean /= k;
            double ss = 0.0;
            for (std::uint32_t f = 0; f < k; ++f) {
                const double d = table.fold_fractions[f][x - 1] - mean;
                ss += d * d;
            }
            const double sd = std::sqrt(ss / (k - 1));
            table.rows.push_back(topx_row{x, mean, t / std::sqrt(static_cast<double>(k)) * sd});
        }
        return table;
    }

    std::vector<w_sweep_row> w_sweep(const corpus_index& index, const distance_config& base,
                                     std::span<const double> w_values, std::uint32_t k, std::uint64_t seed,
                                     unsigned threads) {
        std::vector<w_sweep_row> out;
        for (double w : w_values) {
            auto cfg = base;
            cfg.w = w;
            auto table = crossval(index, cfg, k, seed, threads);
            out.push_back(w_sweep_row{w, table.top(1), table.top(5)});
        }
        return out;
    }

    namespace {

        template <typename Fn>
        double median_seconds(std::uint32_t repetitions, Fn&& fn) {
            std::vector<double> samples;
            samples.reserve(repetitions);
            for (std::uint32_t r = 0; r < repetitions; ++r) {
                auto start = std::chrono::steady_clock::now();
                fn();
                auto stop = std::chrono::steady_clock::now();
                samples.push_back(std::chrono::duration<double>(stop - start).count());
            }
            std::sort(samples.begin(), samples.end());
            const auto n = samples.size();
            return n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
        }

    }  // namespace

    bench_result timing_bench(const corpus_index& index, std::span<const bench_reference> refs,
                              const bench_options& options) {
        if (index.empty())
            throw error(errc::empty_corpus, "corpus index has no entries");
        if (options.repetitions < 5 || options.entropy_repetitions < 5)
            throw error(errc::invalid_config, "timing cells need at least 5 repetitions");
        const auto encoded = encode_corpus(index, options.diff_char_type);
        const auto single = distance_config::single(options.single_component);
        const auto full = distance_config::full(index.spec_grid());

        bench_result result;
        bench_row diff{"difference", {}};
        bench_row one{"individual entropy", {}};
        bench_row all{"complete set of entropies", {}};
        for (const auto& ref : refs) {
            result.labels.push_back(ref.label);
            result.lengths.push_back(ref.t.size());
            const auto fp = compute_fingerprints(ref.t, index.spec_grid());

            std::size_t sink = 0;
            diff.seconds.push_back(median_seconds(options.repetitions, [&] {
                sink += baseline_rank_all(ref.t, index, encoded, options.diff_char_type, options.threads).size();
            }));
            // warm-up so the first timed entropy run does not pay for cold caches
            sink += rank_all(fp, index, single).size();
            one.seconds.push_back(median_seconds(options.entropy_repetitions, [&] {
                sink += rank_all(fp, index, single, std::nullopt, options.threads).size();
            }));
            all.seconds.push_back(median_seconds(options.entropy_repetitions, [&] {
                sink += rank_all(fp, index, full, std::nullopt, options.threads).size();
            }));
            if (sink == 0)
                throw error(errc::empty_corpus, "ranking produced no classes");
        }
        result.rows = {std::move(diff), std::move(one), std::move(all)};
        return result;
    }

    namespace {

        struct call_node {
            std::uint32_t function{0};
            std::uint32_t repeat{1};
            std::vector<call_node> children{};
        };

        std::string function_name(std::uint32_t id) { return fmt::format("fn{:02}", id); }

        call_node random_subtree(seeded_rng& rng, std::uint32_t depth, std::uint32_t max_depth,
                                 std::uint32_t branching, std::uint32_t pool) {
            call_node node;
            node.function = static_cast<std::uint32_t>(rng.below(pool));
            node.repeat = 1 + static_cast<std::uint32_t>(rng.below(3));
            if (depth < max_depth) {
                auto kids = rng.below(branching + 1);
                if (depth == 0 && kids == 0)
                    kids = 1;
                for (std::uint64_t i = 0; i < kids; ++i)
                    node.children.push_back(random_subtree(rng, depth + 1, max_depth, branching, pool));
            }
            return node;
        }

        std::size_t linear_size(const call_node& node) {
            std::size_t inner = 0;
            for (const auto& child : node.children)
                inner += child.repeat * linear_size(child);
            return 2 + inner;
        }

        void linearize(const call_node& node, std::uint32_t depth, trace& out) {
            out.records.push_back(trace_record{function_name(node.function), record_kind::entry, depth});
            for (const auto& child : node.children)
                for (std::uint32_t r = 0; r < child.repeat; ++r)
                    linearize(child, depth + 1, out);
            out.records.push_back(trace_record{function_name(node.function), record_kind::exit, depth});
        }

        void mutate(call_node& node, seeded_rng& rng, double rate, std::uint32_t pool, bool root = false) {
            std::vector<call_node> kept;
            kept.reserve(node.children.size());
            for (auto& child : node.children) {
                if (!rng.chance(rate)) {
                    mutate(child, rng, rate, pool);
                    kept.push_back(std::move(child));
                    continue;
                }
                switch (rng.below(3)) {
                    case 0:  // drop the call's entry/exit pair; its callees move up a level
                        if (!root || !child.children.empty()) {
                            mutate(child, rng, rate, pool);
                            for (std::uint32_t r = 0; r < child.repeat; ++r)
                                for (auto& grandchild : child.children)
                                    kept.push_back(grandchild);
                            break;
                        }
                        // a leaf directly under the root is renamed instead, so no trace collapses
                        [[fallthrough]];
                    case 1:  // rename the callee
                        child.function = static_cast<std::uint32_t>(rng.below(pool));
                        mutate(child, rng, rate, pool);
                        kept.push_back(std::move(child));
                        break;
                    default: {  // insert an extra leaf call next to it
                        mutate(child, rng, rate, pool);
                        kept.push_back(std::move(child));
                        call_node extra;
                        extra.function = static_cast<std::uint32_t>(rng.below(pool));
                        kept.push_back(std::move(extra));
                        break;
                    }
                }
            }
            node.children = std::move(kept);
        }

        constexpr std::size_t min_archetype_records = 80;
        constexpr std::size_t max_archetype_records = 1500;

        call_node make_archetype(const synth_config& cfg, std::uint32_t cls) {
            auto rng = seeded_rng::derive(cfg.seed, 0xa4c4e7bULL, cls);
            call_node best;
            std::size_t best_gap = std::numeric_limits<std::size_t>::max();
            for (int attempt = 0; attempt < 64; ++attempt) {
                auto node = random_subtree(rng, 0, cfg.archetype_depth, cfg.branching, cfg.function_pool);
                node.repeat = 1;
                const auto size = linear_size(node);
                if (size >= min_archetype_records && size <= max_archetype_records)
                    return node;
                const auto gap = size < min_archetype_records ? min_archetype_records - size
                                                              : size - max_archetype_records;
                if (gap < best_gap) {
                    best_gap = gap;
                    best = std::move(node);
                }
            }
            return best;
        }

    }  // namespace

    std::vector<labeled_trace> synth_corpus(const synth_config& config) {
        if (config.num_classes == 0 || config.traces_per_class == 0 || config.function_pool == 0 ||
            config.branching == 0)
            throw error(errc::invalid_config, "synthetic corpus needs classes, traces, functions and branching");
        if (!(config.mutation_rate >= 0.0 && config.mutation_rate < 1.0))
            throw error(errc::invalid_config, "mutation rate must lie in [0, 1)");

        std::vector<labeled_trace> out;
        out.reserve(static_cast<std::size_t>(config.num_classes) * config.traces_per_class);
        for (std::uint32_t cls = 0; cls < config.num_classes; ++cls) {
            const auto archetype = make_archetype(config, cls);
            const auto class_id = fmt::format("class_{:02}", cls);
            for (std::uint32_t i = 0; i < config.traces_per_class; ++i) {
                auto rng = seeded_rng::derive(config.seed, cls + 1, i);
                auto copy = archetype;
                mutate(copy, rng, config.mutation_rate, config.function_pool, true);
                labeled_trace lt;
                lt.class_id = class_id;
                lt.t.id = fmt::format("{}/trace_{:03}", class_id, i);
                linearize(copy, 1, lt.t);
                out.push_back(std::move(lt));
            }
        }
        return out;
    }

    void synth_generate(const synth_config& config, const std::filesystem::path& out_dir) {
        auto corpus = synth_corpus(config);
        std::filesystem::create_directories(out_dir);
        std::ofstream manifest(out_dir / "manifest.csv", std::ios::binary | std::ios::trunc);
        if (!manifest)
            throw error(errc::io_error, "cannot write manifest in " + out_dir.string());
        manifest << "trace_file,class_id\n";
        for (const auto& lt : corpus) {
            const auto rel = std::filesystem::path{lt.t.id + ".trace"};
            std::filesystem::create_directories(out_dir / rel.parent_path());
            write_trace_file(out_dir / rel, lt.t);
            manifest << rel.generic_string() << ',' << lt.class_id << '\n';
        }
    }

    trace synth_reference_trace(std::size_t target_records, std::uint64_t seed, std::uint32_t function_pool) {
        if (function_pool == 0)
            throw error(errc::invalid_config, "function pool must be non-empty");
        auto rng = seeded_rng::derive(seed, 0x5eedULL, target_records);
        call_node root;
        root.function = static_cast<std::uint32_t>(rng.below(function_pool));
        std::size_t size = 2;
        while (size < target_records) {
            auto child = random_subtree(rng, 1, 4, 3, function_pool);
            child.repeat = 1;
            auto add = linear_size(child);
            if (size + add > target_records + target_records / 10 && add > 2) {
                child.children.clear();
                add = 2;
            }
            size += add;
            root.children.push_back(std::move(child));
        }
        trace t;
        t.id = fmt::format("reference_{}", target_records);
        linearize(root, 1, t);
        return t;
    }

}  // namespace traceent
