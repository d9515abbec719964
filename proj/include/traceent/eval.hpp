#pragma once

#include "traceent/corpus.hpp"
#include "traceent/ranking.hpp"
#include "traceent/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace traceent {

    // ---- cross-validation ------------------------------------------------

    /// Seeded shuffle of [0, count) cut into k contiguous bins whose sizes
    /// differ by at most one. Throws InvalidConfig (k < 2), TooFewTraces.
    std::vector<std::vector<std::size_t>> kfold_partition(std::size_t count, std::uint32_t k, std::uint64_t seed);

    std::vector<std::vector<std::string>> kfold_partition(std::span<const std::string> ids, std::uint32_t k,
                                                          std::uint64_t seed);

    /// Two-sided 95% Student-t quantile q(0.975, df).
    double t_quantile_975(std::uint32_t df);

    struct topx_row {
        std::uint32_t x{1};
        double avg{0.0};  // mean over folds of the fraction with true-class rank <= x
        double ci{0.0};   // q(0.975, k-1) / sqrt(k) * sample standard deviation
    };

    struct topx_table {
        std::vector<topx_row> rows{};  // x = 1 .. number of classes
        std::uint32_t folds{0};
        std::string description{};
        std::size_t unclassified{0};  // ClassMissingFromTraining events
        std::vector<std::vector<double>> fold_fractions{};  // [fold][x-1]

        double top(std::uint32_t x) const;
    };

    /// Rank of `true_class` among classes by their closest member, with
    /// modified competition ranking; 0 if no candidate has that class.
    /// Equivalent to locating the class in rank_scored output.
    std::uint32_t true_class_rank(std::span<const double> distances, std::span<const std::uint32_t> classes,
                                  std::uint32_t true_class, std::uint32_t num_classes);

    /// k-fold cross-validation over the index entries. Each validation trace
    /// is ranked against the training bins; normalisation maxima come from
    /// the training bins plus that trace only.
    topx_table crossval(const corpus_index& index, const distance_config& config, std::uint32_t k,
                        std::uint64_t seed, unsigned threads = 0);

    struct w_sweep_row {
        double w{1.0};
        double top1{0.0};
        double top5{0.0};
    };

    /// Runs crossval once per w over the given components.
    std::vector<w_sweep_row> w_sweep(const corpus_index& index, const distance_config& base,
                                     std::span<const double> w_values, std::uint32_t k, std::uint64_t seed,
                                     unsigned threads = 0);

    // ---- timing -----------------------------------------------------------

    struct bench_reference {
        std::string label{};
        trace t{};
    };

    struct bench_options {
        char_type diff_char_type{char_type::f};
        std::size_t single_component{0};
        std::uint32_t repetitions{5};
        std::uint32_t entropy_repetitions{21};
        unsigned threads{1};
    };

    struct bench_row {
        std::string algorithm{};
        std::vector<double> seconds{};  // one median per reference
    };

    struct bench_result {
        std::vector<std::string> labels{};
        std::vector<std::size_t> lengths{};
        std::vector<bench_row> rows{};  // difference, single entropy, complete set
    };

    /// Median wall-clock time to rank the full corpus against each reference
    /// with the edit-distance baseline, one entropy spec and the whole grid.
    /// Reference fingerprints and corpus encodings are prepared outside the
    /// timed region. Throws RawTracesUnavailable.
    bench_result timing_bench(const corpus_index& index, std::span<const bench_reference> refs,
                              const bench_options& options = {});

    // ---- synthetic corpora ----------------------------------------------

    struct synth_config {
        std::uint32_t num_classes{20};
        std::uint32_t traces_per_class{50};
        std::uint32_t archetype_depth{5};
        std::uint32_t branching{4};
        std::uint32_t function_pool{24};
        double mutation_rate{0.05};  // fraction of calls perturbed, in [0, 1)
        std::uint64_t seed{1};
    };

    struct labeled_trace {
        trace t{};
        std::string class_id{};
    };

    /// One archetype call tree per class; every trace is a linearisation of
    /// its archetype with calls deleted, renamed or inserted at mutation_rate.
    /// A deleted call loses its own entry/exit records but keeps its callees.
    std::vector<labeled_trace> synth_corpus(const synth_config& config);

    /// Writes `<class>/<trace>.trace` files plus `manifest.csv` under out_dir.
    void synth_generate(const synth_config& config, const std::filesystem::path& out_dir);

    /// A balanced trace of roughly target_records records.
    trace synth_reference_trace(std::size_t target_records, std::uint64_t seed, std::uint32_t function_pool = 24);

}  // namespace traceent
