#include "traceent/cli.hpp"

#include "traceent/baseline.hpp"
#include "traceent/corpus.hpp"
#include "traceent/error.hpp"
#include "traceent/eval.hpp"
#include "traceent/ranking.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace traceent::cli {

    namespace {

        /// Bad flag combinations detected after CLI11 parsing; exit code 2.
        struct usage_error : std::runtime_error {
            using std::runtime_error::runtime_error;
        };

        enum class output_format { table, csv };

        output_format parse_format(const std::string& text) {
            if (text == "table")
                return output_format::table;
            if (text == "csv")
                return output_format::csv;
            throw usage_error("--format must be table or csv");
        }

        std::string exact(double v) { return fmt::format("{:.17g}", v); }
        std::string fixed(double v) { return fmt::format("{:.6f}", v); }

        struct options {
            unsigned threads{0};
            std::string index_path{};
            std::vector<std::string> specs{};
            std::string grid_name{};
            std::string format{"table"};
            bool lenient{false};

            // ingest
            std::string manifest{};
            bool keep_raw{false};

            // fingerprint / query
            std::string trace_path{};
            std::uint32_t top{5};
            std::string prefilter{"intersect"};
            double w{1.0};

            // crossval
            std::uint32_t folds{10};
            std::uint64_t seed{1};
            std::vector<double> w_values{};

            // bench
            std::vector<std::string> refs{};
            std::uint32_t repetitions{5};
            std::string char_type_name{"F"};

            // synth
            synth_config synth{};
            std::string out_dir{};
        };

        std::string resolve_index(const options& o) {
            if (!o.index_path.empty())
                return o.index_path;
            if (const char* env = std::getenv(index_env_var); env && *env)
                return env;
            return default_index_path;
        }

        /// Specs from --spec and --grid; at most one source may be given.
        grid select_grid(const options& o, bool default_to_full) {
            if (!o.specs.empty() && !o.grid_name.empty())
                throw usage_error("--spec and --grid are mutually exclusive");
            if (!o.grid_name.empty()) {
                if (o.grid_name != "default")
                    throw usage_error("unknown grid '" + o.grid_name + "' (only 'default' is built in)");
                return default_grid();
            }
            if (o.specs.empty()) {
                if (default_to_full)
                    return default_grid();
                throw usage_error("one of --spec or --grid is required");
            }
            grid g;
            g.name = o.specs.size() == 1 ? "single" : "custom";
            for (const auto& s : o.specs)
                g.specs.push_back(parse_spec(s));
            std::sort(g.specs.begin(), g.specs.end(), spec_less);
            g.specs.erase(std::unique(g.specs.begin(), g.specs.end()), g.specs.end());
            return g;
        }

        /// Distance configuration for a loaded index: one --spec (or a one-spec
        /// index) uses the plain difference, otherwise the normalised w-norm.
        distance_config select_distance(const options& o, const corpus_index& index, double w) {
            if (!o.grid_name.empty() && !o.specs.empty())
                throw usage_error("--spec and --grid are mutually exclusive");
            if (!o.grid_name.empty() && o.grid_name != "default")
                throw usage_error("unknown grid '" + o.grid_name + "'");
            if (o.grid_name == "default" && index.spec_grid().hash() != default_grid().hash())
                throw error(errc::grid_mismatch, "index was not built over the default grid");
            if (o.specs.size() > 1)
                throw usage_error("queries accept a single --spec");
            if (o.specs.empty() && index.spec_grid().size() == 1)
                return distance_config::single(0);
            if (o.specs.size() == 1) {
                const auto spec = parse_spec(o.specs.front());
                auto k = index.spec_grid().index_of(spec);
                if (!k)
                    throw error(errc::grid_mismatch, "spec " + to_string(spec) + " is not part of the index grid");
                return distance_config::single(*k);
            }
            return distance_config::full(index.spec_grid(), w);
        }

        parse_mode mode_of(const options& o) { return o.lenient ? parse_mode::lenient : parse_mode::strict; }

        int cmd_ingest(const options& o, std::ostream& out, std::ostream& err) {
            const auto path = resolve_index(o);
            corpus_index index{select_grid(o, true), o.keep_raw};
            auto report = ingest_manifest(o.manifest, index, mode_of(o), o.threads);
            for (const auto& w : report.warnings)
                fmt::print(err, "warning: {}\n", w);
            save(index, path);
            fmt::print(out, "ingested {} traces ({} classes, {} specs) into {}\n", report.ingested,
                       index.classes().size(), index.spec_grid().size(), path);
            return 0;
        }

        int cmd_fingerprint(const options& o, std::ostream& out) {
            const auto fmt_kind = parse_format(o.format);
            const auto t = read_trace_file(o.trace_path, mode_of(o));
            const auto g = select_grid(o, false);
            const auto fp = compute_fingerprints(t, g);
            if (fmt_kind == output_format::csv) {
                fmt::print(out, "entropy,q,l,c,value\n");
                for (std::size_t k = 0; k < g.size(); ++k) {
                    const auto& s = g.specs[k];
                    fmt::print(out, "{},{},{},{},{}\n", entropy_letter(s.kind), exact(s.q), s.l, to_string(s.c),
                               exact(fp.values[k]));
                }
                return 0;
            }
            if (g.size() == 1) {
                fmt::print(out, "{}\n", fixed(fp.values.front()));
                return 0;
            }
            for (std::size_t k = 0; k < g.size(); ++k)
                fmt::print(out, "{:<20} {}\n", to_string(g.specs[k]), fixed(fp.values[k]));
            return 0;
        }

        void print_ranking(const std::vector<ranked_class>& ranked, output_format f, std::ostream& out) {
            if (f == output_format::csv) {
                fmt::print(out, "rank,class,trace,distance\n");
                for (const auto& r : ranked)
                    fmt::print(out, "{},{},{},{}\n", r.rank, r.class_id, r.nearest_trace_id, exact(r.distance));
                return;
            }
            std::size_t class_w = 5;
            std::size_t trace_w = 5;
            for (const auto& r : ranked) {
                class_w = std::max(class_w, r.class_id.size());
                trace_w = std::max(trace_w, r.nearest_trace_id.size());
            }
            fmt::print(out, "{:>4}  {:<{}}  {:<{}}  {:>14}\n", "rank", "class", class_w, "trace", trace_w, "distance");
            for (const auto& r : ranked)
                fmt::print(out, "{:>4}  {:<{}}  {:<{}}  {:>14}\n", r.rank, r.class_id, class_w, r.nearest_trace_id,
                           trace_w, fixed(r.distance));
        }

        int cmd_query(const options& o, std::ostream& out) {
            const auto f = parse_format(o.format);
            if (o.top < 1)
                throw usage_error("--top must be at least 1");
            const auto policy = parse_prefilter_policy(o.prefilter);
            if (!policy)
                throw usage_error("--prefilter must be off, intersect or superset");
            const auto index = load(resolve_index(o));
            const auto config = select_distance(o, index, o.w);
            const auto t = read_trace_file(o.trace_path, mode_of(o));
            print_ranking(rank_classes(t, index, config, o.top, *policy, o.threads), f, out);
            return 0;
        }

        int cmd_crossval(const options& o, std::ostream& out) {
            const auto f = parse_format(o.format);
            const auto index = load(resolve_index(o));
            if (o.w_values.size() > 1) {
                const auto base = select_distance(o, index, 1.0);
                auto rows = w_sweep(index, base, o.w_values, o.folds, o.seed, o.threads);
                if (f == output_format::csv) {
                    fmt::print(out, "w,top1,top5\n");
                    for (const auto& r : rows)
                        fmt::print(out, "{},{},{}\n", exact(r.w), exact(r.top1), exact(r.top5));
                } else {
                    fmt::print(out, "{:>8}  {:>8}  {:>8}\n", "w", "Top-1", "Top-5");
                    for (const auto& r : rows)
                        fmt::print(out, "{:>8}  {:>8}  {:>8}\n", r.w, fixed(r.top1), fixed(r.top5));
                }
                return 0;
            }
            const double w = o.w_values.empty() ? 1.0 : o.w_values.front();
            const auto config = select_distance(o, index, w);
            const auto table = crossval(index, config, o.folds, o.seed, o.threads);
            if (f == output_format::csv) {
                fmt::print(out, "x,avg,ci\n");
                for (const auto& r : table.rows)
                    fmt::print(out, "{},{},{}\n", r.x, exact(r.avg), exact(r.ci));
                return 0;
            }
            fmt::print(out, "{}; {} folds, seed {}\n", table.description, table.folds, o.seed);
            if (table.unclassified)
                fmt::print(out, "unclassified traces: {}\n", table.unclassified);
            fmt::print(out, "{:>5}  {:>8}  {:>8}\n", "Top", "avg", "ci95");
            for (const auto& r : table.rows)
                fmt::print(out, "{:>5}  {:>8}  {:>8}\n", r.x, fixed(r.avg), fixed(r.ci));
            return 0;
        }

        /// small / medium / large name synthetic references of about 500, 2500
        /// and 20000 records; a number gives that size; anything else is a file.
        bench_reference make_reference(const std::string& text, const options& o) {
            std::size_t size = 0;
            if (text == "small")
                size = 500;
            else if (text == "medium")
                size = 2500;
            else if (text == "large")
                size = 20000;
            else {
                auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), size);
                if (ec != std::errc{} || ptr != text.data() + text.size())
                    size = 0;
            }
            if (size > 0)
                return bench_reference{text, synth_reference_trace(size, o.seed)};
            return bench_reference{text, read_trace_file(text, mode_of(o))};
        }

        int cmd_bench(const options& o, std::ostream& out, bool threads_given) {
            const auto f = parse_format(o.format);
            const auto c = parse_char_type(o.char_type_name);
            if (!c)
                throw usage_error("--char-type must be F, FT or FTD");
            const auto index = load(resolve_index(o));
            std::vector<bench_reference> refs;
            for (const auto& r : o.refs)
                refs.push_back(make_reference(r, o));

            bench_options opts;
            opts.diff_char_type = *c;
            opts.repetitions = o.repetitions;
            opts.entropy_repetitions = std::max<std::uint32_t>(o.repetitions, 15);
            opts.threads = threads_given ? o.threads : 1;
            if (o.specs.size() == 1) {
                auto k = index.spec_grid().index_of(parse_spec(o.specs.front()));
                if (!k)
                    throw error(errc::grid_mismatch, "spec is not part of the index grid");
                opts.single_component = *k;
            }
            const auto result = timing_bench(index, refs, opts);

            if (f == output_format::csv) {
                fmt::print(out, "algorithm");
                for (std::size_t i = 0; i < result.labels.size(); ++i)
                    fmt::print(out, ",{}", result.labels[i]);
                fmt::print(out, "\n");
                for (const auto& row : result.rows) {
                    fmt::print(out, "{}", row.algorithm);
                    for (double s : row.seconds)
                        fmt::print(out, ",{}", exact(s));
                    fmt::print(out, "\n");
                }
                return 0;
            }
            fmt::print(out, "{:<26}", "algorithm");
            for (std::size_t i = 0; i < result.labels.size(); ++i)
                fmt::print(out, "  {:>14}", fmt::format("{} ({})", result.labels[i], result.lengths[i]));
            fmt::print(out, "\n");
            for (const auto& row : result.rows) {
                fmt::print(out, "{:<26}", row.algorithm);
                for (double s : row.seconds)
                    fmt::print(out, "  {:>14.3e}", s);
                fmt::print(out, "\n");
            }
            return 0;
        }

        int cmd_synth(const options& o, std::ostream& out) {
            synth_generate(o.synth, o.out_dir);
            fmt::print(out, "wrote {} traces in {} classes to {}\n",
                       static_cast<std::size_t>(o.synth.num_classes) * o.synth.traces_per_class,
                       o.synth.num_classes, o.out_dir);
            return 0;
        }

    }  // namespace

    int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
        CLI::App app{"Execution-trace fingerprinting with word entropies", "traceent"};
        app.require_subcommand(1);
        options o;
        auto* threads_opt = app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");

        auto add_index = [&](CLI::App* sub) {
            sub->add_option("--index", o.index_path,
                            fmt::format("Index file (default ${} or {})", index_env_var, default_index_path));
        };
        auto add_format = [&](CLI::App* sub) {
            sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"table", "csv"}));
        };

        auto* ingest = app.add_subcommand("ingest", "Fingerprint a manifest of labelled traces into an index");
        ingest->add_option("manifest", o.manifest, "CSV of trace_file,class_id")->required();
        add_index(ingest);
        ingest->add_option("--spec", o.specs, "Spec E,q,l,c (repeatable) instead of the default grid");
        ingest->add_option("--grid", o.grid_name, "Named grid (default)");
        ingest->add_flag("--keep-raw", o.keep_raw, "Store trace text for the edit-distance baseline");
        ingest->add_flag("--lenient", o.lenient, "Tolerate unbalanced exits");

        auto* fingerprint = app.add_subcommand("fingerprint", "Print entropy fingerprints of one trace");
        fingerprint->add_option("trace", o.trace_path, "Trace file")->required();
        fingerprint->add_option("--spec", o.specs, "Spec E,q,l,c (repeatable)");
        fingerprint->add_option("--grid", o.grid_name, "Named grid (default)");
        fingerprint->add_flag("--lenient", o.lenient, "Tolerate unbalanced exits");
        add_format(fingerprint);

        auto* query = app.add_subcommand("query", "Rank indexed classes by distance to a trace");
        query->add_option("trace", o.trace_path, "Trace file")->required();
        add_index(query);
        query->add_option("--top", o.top, "Report classes ranked <= X")->check(CLI::PositiveNumber);
        query->add_option("--prefilter", o.prefilter, "off, intersect or superset")
                ->check(CLI::IsMember({"off", "intersect", "superset"}));
        query->add_option("--w", o.w, "Norm exponent for the grid distance")->check(CLI::Range(1.0, 1e6));
        query->add_option("--spec", o.specs, "Use only this spec of the index grid");
        query->add_option("--grid", o.grid_name, "Require the index grid to be this named grid");
        query->add_flag("--lenient", o.lenient, "Tolerate unbalanced exits");
        add_format(query);

        auto* cv = app.add_subcommand("crossval", "k-fold cross-validation with Top-X statistics");
        add_index(cv);
        cv->add_option("--folds", o.folds, "Number of folds")->check(CLI::Range(2U, 1000000U));
        cv->add_option("--seed", o.seed, "Shuffle seed");
        cv->add_option("--spec", o.specs, "Use only this spec of the index grid");
        cv->add_option("--grid", o.grid_name, "Require the index grid to be this named grid");
        cv->add_option("--w", o.w_values, "Norm exponent; several values run a sweep")
                ->delimiter(',')
                ->check(CLI::Range(1.0, 1e6));
        add_format(cv);

        auto* bench = app.add_subcommand("bench", "Time edit distance against entropy queries");
        add_index(bench);
        bench->add_option("--refs", o.refs, "small, medium, large, a record count or a trace file")
                ->delimiter(',')
                ->required();
        bench->add_option("--reps", o.repetitions, "Repetitions per cell (median reported)")
                ->check(CLI::Range(5U, 100000U));
        bench->add_option("--char-type", o.char_type_name, "Encoding for the edit distance")
                ->check(CLI::IsMember({"F", "FT", "FTD"}));
        bench->add_option("--spec", o.specs, "Spec used for the single-entropy row");
        bench->add_option("--seed", o.seed, "Seed for synthetic references");
        bench->add_flag("--lenient", o.lenient, "Tolerate unbalanced exits");
        add_format(bench);

        auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic labelled corpus");
        synth->add_option("--classes", o.synth.num_classes, "Number of classes")->check(CLI::PositiveNumber);
        synth->add_option("--per-class", o.synth.traces_per_class, "Traces per class")->check(CLI::PositiveNumber);
        synth->add_option("--rate", o.synth.mutation_rate, "Mutation rate in [0, 1)")->check(CLI::Range(0.0, 0.999999));
        synth->add_option("--seed", o.synth.seed, "Generator seed");
        synth->add_option("--depth", o.synth.archetype_depth, "Archetype call-tree depth");
        synth->add_option("--branching", o.synth.branching, "Maximum callees per call")->check(CLI::PositiveNumber);
        synth->add_option("--functions", o.synth.function_pool, "Function pool size")->check(CLI::PositiveNumber);
        synth->add_option("--out", o.out_dir, "Output directory")->required();

        try {
            app.parse(argc, argv);
        }
        catch (const CLI::CallForHelp& e) {
            return app.exit(e, out, err);
        }
        catch (const CLI::CallForAllHelp& e) {
            return app.exit(e, out, err);
        }
        catch (const CLI::ParseError& e) {
            fmt::print(err, "traceent: usage: {}\n", e.what());
            return 2;
        }

        try {
            if (ingest->parsed())
                return cmd_ingest(o, out, err);
            if (fingerprint->parsed())
                return cmd_fingerprint(o, out);
            if (query->parsed())
                return cmd_query(o, out);
            if (cv->parsed())
                return cmd_crossval(o, out);
            if (bench->parsed())
                return cmd_bench(o, out, threads_opt->count() > 0);
            if (synth->parsed())
                return cmd_synth(o, out);
        }
        catch (const usage_error& e) {
            fmt::print(err, "traceent: usage: {}\n", e.what());
            return 2;
        }
        catch (const error& e) {
            fmt::print(err, "traceent: {}\n", e.what());
            return 1;
        }
        catch (const std::exception& e) {
            fmt::print(err, "traceent: IoError: {}\n", e.what());
            return 1;
        }
        return 2;
    }

}  // namespace traceent::cli
