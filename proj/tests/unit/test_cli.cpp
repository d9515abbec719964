#include "support/fixtures.hpp"
#include "traceent/cli.hpp"
#include "traceent/corpus.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <tuple>

using namespace traceent;
namespace fs = std::filesystem;

namespace {

    struct result {
        int code;
        std::string out;
        std::string err;
    };

    result call(std::vector<std::string> args) {
        args.insert(args.begin(), "traceent");
        std::vector<const char*> argv;
        for (const auto& a : args)
            argv.push_back(a.c_str());
        std::ostringstream out;
        std::ostringstream err;
        int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return {code, out.str(), err.str()};
    }

    struct workspace {
        fs::path dir;
        workspace() : dir(fs::temp_directory_path() / "traceent_cli_test") {
            fs::remove_all(dir);
            fs::create_directories(dir);
            write_trace_file(dir / "fig1.trace", fixtures::figure1());
            std::ofstream manifest(dir / "toy.csv");
            manifest << "trace_file,class_id\n";
            for (const auto& [id, extra, cls] : {std::tuple{"t1", 8, "d2"}, std::tuple{"t2", 1, "d4"},
                                                 std::tuple{"t3", 10, "d2"}, std::tuple{"t4", 8, "d3"},
                                                 std::tuple{"t5", 10, "d1"}}) {
                write_trace_file(dir / (std::string{id} + ".trace"), fixtures::fan_trace(id, extra));
                manifest << id << ".trace," << cls << "\n";
            }
            write_trace_file(dir / "t.trace", fixtures::ranking_example_query());
        }
        ~workspace() { fs::remove_all(dir); }
        std::string operator/(const std::string& name) const { return (dir / name).string(); }
    };

    std::string fmt_fixed(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", v);
        return buf;
    }

    std::vector<std::string> lines(const std::string& text) {
        std::vector<std::string> out;
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line))
            out.push_back(line);
        return out;
    }

}  // namespace

TEST_CASE("fingerprint subcommand") {
    workspace ws;
    auto r = call({"fingerprint", ws / "fig1.trace", "--spec", "S,1,1,F"});
    CHECK(r.code == 0);
    CHECK(r.out == "0.918296\n");

    auto csv = call({"fingerprint", ws / "fig1.trace", "--spec", "R,0,1,FTD", "--format", "csv"});
    CHECK(csv.code == 0);
    auto rows = lines(csv.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0] == "entropy,q,l,c,value");
    CHECK(std::stod(rows[1].substr(rows[1].rfind(',') + 1)) == std::log2(6.0));

    auto multi = call({"fingerprint", ws / "fig1.trace", "--spec", "T,0,2,F", "--spec", "S,-,1,F"});
    CHECK(lines(multi.out).size() == 2);
}

TEST_CASE("query subcommand on the five-trace example") {
    workspace ws;
    auto ingest = call({"ingest", ws / "toy.csv", "--index", ws / "toy.idx", "--spec", "T,0,1,F"});
    REQUIRE(ingest.code == 0);

    auto q = call({"query", ws / "t.trace", "--index", ws / "toy.idx", "--top", "3", "--format", "csv"});
    CHECK(q.code == 0);
    auto csv = lines(q.out);
    REQUIRE(csv.size() == 4);
    CHECK(csv[0] == "rank,class,trace,distance");
    CHECK(csv[1] == "1,d4,t2.trace,0");
    CHECK(csv[2].rfind("3,d2,t1.trace,", 0) == 0);
    CHECK(csv[3].rfind("3,d3,t4.trace,", 0) == 0);
    CHECK(std::stod(csv[2].substr(csv[2].rfind(',') + 1)) == doctest::Approx(7.0).epsilon(1e-14));

    auto table = call({"query", ws / "t.trace", "--index", ws / "toy.idx", "--top", "3"});
    auto rows = lines(table.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].find("d4") != std::string::npos);
    CHECK(rows[2].find("7.000000") != std::string::npos);

    auto top1 = call({"query", ws / "t.trace", "--index", ws / "toy.idx", "--top", "1", "--format", "csv"});
    CHECK(lines(top1.out).size() == 2);
}

TEST_CASE("index path from the environment") {
    workspace ws;
    REQUIRE(call({"ingest", ws / "toy.csv", "--index", ws / "env.idx", "--spec", "T,0,1,F"}).code == 0);
    ::setenv(cli::index_env_var, (ws / "env.idx").c_str(), 1);
    auto q = call({"query", ws / "t.trace", "--top", "1", "--format", "csv"});
    ::unsetenv(cli::index_env_var);
    CHECK(q.code == 0);
    CHECK(q.out.find("1,d4,t2.trace,0") != std::string::npos);
}

TEST_CASE("exit codes") {
    workspace ws;
    CHECK(call({}).code == 2);
    CHECK(call({"nonsense"}).code == 2);
    CHECK(call({"query"}).code == 2);
    CHECK(call({"query", ws / "t.trace", "--top", "0"}).code == 2);
    CHECK(call({"fingerprint", ws / "fig1.trace"}).code == 2);
    CHECK(call({"fingerprint", ws / "fig1.trace", "--spec", "S,1,1,F", "--grid", "default"}).code == 2);

    auto short_trace = call({"fingerprint", ws / "fig1.trace", "--grid", "default"});
    CHECK(short_trace.code == 1);
    CHECK(short_trace.err.find("TraceTooShort") != std::string::npos);

    auto bad_spec = call({"fingerprint", ws / "fig1.trace", "--spec", "Q,1,1,F"});
    CHECK(bad_spec.code == 1);
    CHECK(bad_spec.err.find("InvalidConfig") != std::string::npos);

    auto missing = call({"query", ws / "t.trace", "--index", ws / "none.idx"});
    CHECK(missing.code == 1);
    CHECK(lines(missing.err).size() == 1);

    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("synth is reproducible and crossval runs on its output") {
    workspace ws;
    auto a = call({"synth", "--classes", "2", "--per-class", "1", "--rate", "0", "--seed", "7", "--out", ws / "a"});
    auto b = call({"synth", "--classes", "2", "--per-class", "1", "--rate", "0", "--seed", "7", "--out", ws / "b"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    for (const auto& entry : fs::recursive_directory_iterator(ws.dir / "a")) {
        if (!entry.is_regular_file())
            continue;
        std::ifstream x(entry.path()), y(ws.dir / "b" / fs::relative(entry.path(), ws.dir / "a"));
        std::stringstream sx, sy;
        sx << x.rdbuf();
        sy << y.rdbuf();
        CHECK(sx.str() == sy.str());
    }

    REQUIRE(call({"synth", "--classes", "4", "--per-class", "5", "--rate", "0.05", "--out", ws / "c"}).code == 0);
    REQUIRE(call({"ingest", ws / "c/manifest.csv", "--index", ws / "c.idx"}).code == 0);
    auto table = call({"crossval", "--index", ws / "c.idx", "--folds", "5", "--seed", "3"});
    auto csv = call({"crossval", "--index", ws / "c.idx", "--folds", "5", "--seed", "3", "--format", "csv"});
    REQUIRE(table.code == 0);
    REQUIRE(csv.code == 0);
    auto csv_rows = lines(csv.out);
    REQUIRE(csv_rows.size() == 5);
    // same numbers in both renderings
    const auto first = csv_rows[1];
    const double avg = std::stod(first.substr(2, first.find(',', 2) - 2));
    CHECK(table.out.find(fmt_fixed(avg)) != std::string::npos);

    auto sweep = call({"crossval", "--index", ws / "c.idx", "--folds", "5", "--w", "1,2", "--format", "csv"});
    CHECK(sweep.code == 0);
    CHECK(lines(sweep.out).size() == 3);

    auto single = call({"crossval", "--index", ws / "c.idx", "--folds", "5", "--spec", "L,1e-5,3,FTD"});
    CHECK(single.code == 0);
    auto absent = call({"crossval", "--index", ws / "c.idx", "--folds", "5", "--spec", "L,0.5,3,FTD"});
    CHECK(absent.code == 1);
    CHECK(absent.err.find("GridMismatch") != std::string::npos);
}

TEST_CASE("bench needs raw traces") {
    workspace ws;
    REQUIRE(call({"ingest", ws / "toy.csv", "--index", ws / "toy.idx", "--spec", "T,0,1,F"}).code == 0);
    auto r = call({"bench", "--index", ws / "toy.idx", "--refs", "small"});
    CHECK(r.code == 1);
    CHECK(r.err.find("RawTracesUnavailable") != std::string::npos);

    REQUIRE(call({"ingest", ws / "toy.csv", "--index", ws / "raw.idx", "--spec", "T,0,1,F", "--keep-raw"}).code == 0);
    auto ok = call({"bench", "--index", ws / "raw.idx", "--refs", "60,120", "--format", "csv"});
    CHECK(ok.code == 0);
    CHECK(lines(ok.out).size() == 4);
}
