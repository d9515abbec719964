#include "support/fixtures.hpp"
#include "traceent/error.hpp"
#include "traceent/eval.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

using namespace traceent;
namespace fs = std::filesystem;

namespace {

    errc code_of(auto&& fn) {
        try {
            fn();
        }
        catch (const error& e) {
            return e.code();
        }
        return errc::io_error;
    }

    corpus_index index_from(const std::vector<labeled_trace>& traces, grid g) {
        corpus_index index{std::move(g)};
        for (const auto& lt : traces)
            index.ingest(lt.t, lt.class_id);
        return index;
    }

    std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    synth_config small_synth(double rate, std::uint64_t seed) {
        synth_config cfg;
        cfg.num_classes = 6;
        cfg.traces_per_class = 10;
        cfg.mutation_rate = rate;
        cfg.seed = seed;
        return cfg;
    }

}  // namespace

TEST_CASE("fold partitions") {
    auto ten = kfold_partition(10, 10, 3);
    REQUIRE(ten.size() == 10);
    for (const auto& b : ten)
        CHECK(b.size() == 1);

    auto big = kfold_partition(4266, 10, 1);
    std::set<std::size_t> all;
    for (const auto& b : big) {
        CHECK((b.size() == 426 || b.size() == 427));
        all.insert(b.begin(), b.end());
    }
    CHECK(all.size() == 4266);
    CHECK(*all.rbegin() == 4265);

    CHECK(kfold_partition(4266, 10, 1) == big);
    CHECK(kfold_partition(4266, 10, 2) != big);

    std::vector<std::string> ids{"a", "b", "c", "d", "e"};
    auto named = kfold_partition(ids, 2, 9);
    CHECK(named[0].size() + named[1].size() == 5);

    CHECK(code_of([] { kfold_partition(3, 4, 1); }) == errc::too_few_traces);
    CHECK(code_of([] { kfold_partition(3, 1, 1); }) == errc::invalid_config);
}

TEST_CASE("student t quantiles") {
    CHECK(t_quantile_975(9) == 2.262157163);
    CHECK(t_quantile_975(1) == doctest::Approx(12.706204736).epsilon(1e-9));
    CHECK(t_quantile_975(4) == doctest::Approx(2.776445105).epsilon(1e-9));
    CHECK(t_quantile_975(29) == doctest::Approx(2.045229642).epsilon(1e-9));
    CHECK(code_of([] { t_quantile_975(0); }) == errc::invalid_config);
}

TEST_CASE("true class rank on the five-trace example") {
    // classes: d1=0, d2=1, d3=2, d4=3; traces t1..t5
    const std::vector<double> d{7, 0, 9, 7, 9};
    const std::vector<std::uint32_t> cls{1, 3, 1, 2, 0};
    CHECK(true_class_rank(d, cls, 3, 4) == 1);
    CHECK(true_class_rank(d, cls, 1, 4) == 3);
    CHECK(true_class_rank(d, cls, 2, 4) == 3);
    CHECK(true_class_rank(d, cls, 0, 4) == 4);
    const std::vector<double> d3{7, 0, 9};
    const std::vector<std::uint32_t> c3{1, 3, 1};
    CHECK(true_class_rank(d3, c3, 0, 4) == 0);
}

TEST_CASE("identical traces per class classify perfectly") {
    auto traces = synth_corpus(small_synth(0.0, 4));
    auto index = index_from(traces, default_grid());
    for (auto config : {distance_config::full(index.spec_grid()), distance_config::single(100)}) {
        auto table = crossval(index, config, 5, 11, 2);
        REQUIRE(table.rows.size() == 6);
        CHECK(table.top(1) == 1.0);
        CHECK(table.unclassified == 0);
    }
}

TEST_CASE("cross-validation table properties") {
    auto index = index_from(synth_corpus(small_synth(0.2, 5)), default_grid());
    auto config = distance_config::full(index.spec_grid());
    auto a = crossval(index, config, 10, 7, 1);
    auto b = crossval(index, config, 10, 7, 3);
    REQUIRE(a.rows.size() == 6);
    CHECK(a.folds == 10);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].avg == b.rows[i].avg);
        CHECK(a.rows[i].ci == b.rows[i].ci);
        CHECK(a.rows[i].ci >= 0.0);
        if (i > 0)
            CHECK(a.rows[i].avg >= a.rows[i - 1].avg);
    }
    CHECK(a.rows.back().avg == doctest::Approx(1.0).epsilon(1e-12));

    // CI half-width from the per-fold fractions
    const auto& col = a.fold_fractions;
    double mean = 0;
    for (const auto& f : col)
        mean += f[0];
    mean /= 10;
    double ss = 0;
    for (const auto& f : col)
        ss += (f[0] - mean) * (f[0] - mean);
    CHECK(a.rows[0].avg == doctest::Approx(mean).epsilon(1e-14));
    CHECK(a.rows[0].ci == doctest::Approx(2.262157163 / std::sqrt(10.0) * std::sqrt(ss / 9)).epsilon(1e-12));
}

TEST_CASE("classes missing from training count as unclassified") {
    auto traces = synth_corpus(small_synth(0.0, 6));
    std::mt19937_64 rng{1};
    labeled_trace lonely;
    lonely.t = fixtures::random_trace(rng, 80, 8, "lonely");
    lonely.class_id = "solo";
    traces.push_back(lonely);
    auto index = index_from(traces, default_grid());
    auto table = crossval(index, distance_config::full(index.spec_grid()), 5, 1);
    CHECK(table.unclassified == 1);
    CHECK(table.rows.back().avg < 1.0);
}

TEST_CASE("w sweep") {
    auto index = index_from(synth_corpus(small_synth(0.1, 8)), default_grid());
    const std::vector<double> ws{1, 2, 3};

    auto single = w_sweep(index, distance_config{{42}, true, 1.0}, ws, 5, 3);
    REQUIRE(single.size() == 3);
    for (const auto& r : single) {
        CHECK(r.top1 == single[0].top1);
        CHECK(r.top5 == single[0].top5);
    }
    auto full = w_sweep(index, distance_config::full(index.spec_grid()), ws, 5, 3);
    CHECK(full[1].w == 2.0);
    CHECK(full[0].top1 == crossval(index, distance_config::full(index.spec_grid(), 1.0), 5, 3).top(1));
}

TEST_CASE("synthetic corpora") {
    auto zero = synth_corpus(small_synth(0.0, 2));
    REQUIRE(zero.size() == 60);
    for (std::size_t i = 0; i < zero.size(); i += 10)
        for (std::size_t j = 1; j < 10; ++j)
            CHECK(zero[i].t.records == zero[i + j].t.records);
    for (const auto& lt : zero)
        CHECK(lt.t.size() >= 8);

    auto mutated = synth_corpus(small_synth(0.05, 2));
    CHECK(mutated.front().class_id == "class_00");
    CHECK(mutated.back().t.id == "class_05/trace_009");

    CHECK(code_of([] { synth_corpus(small_synth(1.0, 1)); }) == errc::invalid_config);
}

TEST_CASE("synthetic corpus on disk is byte-reproducible") {
    const auto base = fs::temp_directory_path() / "traceent_synth_test";
    fs::remove_all(base);
    synth_config cfg;
    cfg.num_classes = 20;
    cfg.traces_per_class = 50;
    synth_generate(cfg, base / "a");
    synth_generate(cfg, base / "b");

    std::size_t files = 0;
    for (const auto& entry : fs::recursive_directory_iterator(base / "a")) {
        if (!entry.is_regular_file())
            continue;
        ++files;
        const auto rel = fs::relative(entry.path(), base / "a");
        CHECK(slurp(entry.path()) == slurp(base / "b" / rel));
    }
    CHECK(files == 1001);
    auto rows = read_manifest(base / "a" / "manifest.csv");
    CHECK(rows.size() == 1000);
    CHECK(rows[0].label == "class_00/trace_000.trace");
    fs::remove_all(base);
}

TEST_CASE("reference traces") {
    for (std::size_t n : {500U, 2500U, 20000U}) {
        auto t = synth_reference_trace(n, 3);
        CHECK(t.size() >= n);
        CHECK(t.size() <= n + n / 5);
        CHECK(parse_trace(render(t)).records == t.records);
    }
}

TEST_CASE("timing bench shape on a small corpus") {
    auto traces = synth_corpus(small_synth(0.05, 9));
    corpus_index raw{default_grid(), true};
    for (const auto& lt : traces)
        raw.ingest(lt.t, lt.class_id);
    std::vector<bench_reference> refs{{"s", synth_reference_trace(200, 1)}, {"m", synth_reference_trace(400, 1)}};
    auto result = timing_bench(raw, refs);
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].algorithm == "difference");
    for (const auto& row : result.rows) {
        REQUIRE(row.seconds.size() == 2);
        for (double s : row.seconds)
            CHECK(s > 0.0);
    }

    auto no_raw = index_from(traces, default_grid());
    CHECK(code_of([&] { timing_bench(no_raw, refs); }) == errc::raw_traces_unavailable);
    bench_options few;
    few.repetitions = 3;
    CHECK(code_of([&] { timing_bench(raw, refs, few); }) == errc::invalid_config);
}
