#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "gepkit/io.hpp"
#include "gepkit/matrix.hpp"
#include "gepkit/rng.hpp"

using namespace gepkit;
namespace fs = std::filesystem;

namespace {

const fs::path& work_dir() {
    static const fs::path d = [] {
        fs::path p = fs::temp_directory_path() / "gepkit_io_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return d;
}

std::string write_text(const std::string& name, const std::string& body) {
    const fs::path p = work_dir() / name;
    std::ofstream out(p);
    out << body;
    return p.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class F>
std::string parse_error_of(F&& fn) {
    try {
        fn();
    } catch (const ParseError& e) {
        return e.what();
    }
    return "(no error)";
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(GEP_CLI_PATH) + " " + args;
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string strip_timing(const std::string& s) {
    std::istringstream in(s);
    std::string line, out;
    while (std::getline(in, line))
        if (line.find("wall_time_ms") == std::string::npos) out += line + '\n';
    return out;
}

}  // namespace

TEST_CASE("fmt17 round-trips doubles exactly") {
    const double vals[] = {0.0,
                           -0.0,
                           1.0,
                           0.1,
                           1.0 / 3.0,
                           3.141592653589793,
                           -2.5e17,
                           1e-300,
                           5e-324,
                           1.7976931348623157e308};
    for (double v : vals) {
        const std::string s = fmt17(v);
        const double back = std::strtod(s.c_str(), nullptr);
        CHECK(back == v);
        CHECK(std::signbit(back) == std::signbit(v));
    }
    CHECK(fmt17(1.0) == "1");
    CHECK(fmt17(-0.5) == "-0.5");
}

TEST_CASE("matrix files round-trip bit for bit") {
    RngStream rng(7);
    Matrix m = rng.matrix(3, 4, 1e3);
    m(0, 0) = 1.0 / 3.0;
    m(1, 2) = 1e-17;
    m(2, 3) = -3.141592653589793;

    const std::string path = (work_dir() / "roundtrip.txt").string();
    write_matrix(path, m, "test fixture");
    const Matrix back = read_matrix(path);
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 4);
    CHECK(max_abs_diff(m, back) == 0.0);

    const std::string body = slurp(path);
    CHECK(body.rfind("# test fixture\n", 0) == 0);
}

TEST_CASE("matrix reader accepts comments and blank lines") {
    const std::string path = write_text("commented.txt",
                                        "# full line comment\n"
                                        "\n"
                                        "2 2   # trailing comment\n"
                                        "1 2\n"
                                        "# interior comment\n"
                                        "3 4.5\n");
    const Matrix m = read_matrix(path);
    CHECK(m(0, 0) == 1.0);
    CHECK(m(0, 1) == 2.0);
    CHECK(m(1, 0) == 3.0);
    CHECK(m(1, 1) == 4.5);
}

TEST_CASE("matrix reader names the file and line in errors") {
    CHECK(parse_error_of([] { read_matrix("no_such_file.txt"); })
              .find("cannot open") != std::string::npos);

    const std::string empty = write_text("empty.txt", "");
    CHECK(parse_error_of([&] { read_matrix(empty); })
              .find("missing 'rows cols' header") != std::string::npos);

    const std::string one_tok = write_text("one_tok.txt", "2\n1 2\n");
    const std::string m1 = parse_error_of([&] { read_matrix(one_tok); });
    CHECK(m1.find(one_tok + ":1:") != std::string::npos);
    CHECK(m1.find("header") != std::string::npos);

    const std::string zero = write_text("zero.txt", "0 2\n");
    CHECK(parse_error_of([&] { read_matrix(zero); }).find("header") !=
          std::string::npos);

    const std::string neg = write_text("neg.txt", "2 -1\n");
    CHECK(parse_error_of([&] { read_matrix(neg); }).find("header") !=
          std::string::npos);

    const std::string short_row = write_text("short_row.txt", "2 2\n1 2\n3\n");
    const std::string m2 = parse_error_of([&] { read_matrix(short_row); });
    CHECK(m2.find(short_row + ":3:") != std::string::npos);
    CHECK(m2.find("expected 2 values, got 1") != std::string::npos);

    const std::string bad_num = write_text("bad_num.txt", "2 2\n1 bogus\n3 4\n");
    const std::string m3 = parse_error_of([&] { read_matrix(bad_num); });
    CHECK(m3.find(bad_num + ":2:") != std::string::npos);
    CHECK(m3.find("bad number 'bogus'") != std::string::npos);

    const std::string truncated = write_text("truncated.txt", "2 2\n1 2\n");
    CHECK(parse_error_of([&] { read_matrix(truncated); })
              .find("file ends after 1 of 2 rows") != std::string::npos);

    const std::string extra = write_text("extra.txt", "1 1\n5\n6\n");
    const std::string m4 = parse_error_of([&] { read_matrix(extra); });
    CHECK(m4.find(extra + ":3:") != std::string::npos);
    CHECK(m4.find("unexpected content after last row") != std::string::npos);

    CHECK_THROWS_AS(write_matrix("/no_such_dir_gepkit/x.txt", Matrix(1, 1)),
                    Error);
}

TEST_CASE("json writer produces stable formatted output") {
    std::ostringstream os;
    JsonWriter w(os);
    w.begin_object();
    w.key("alpha").value(1.5);
    w.key("items").begin_array();
    w.value(std::uint64_t{1});
    w.value("two");
    w.value(false);
    w.end_array();
    w.key("empty").begin_array();
    w.end_array();
    w.key("nested").begin_object();
    w.key("q\"t").value(std::string("a\nb"));
    w.end_object();
    w.end_object();
    w.finish();

    const std::string expected =
        "{\n"
        "  \"alpha\": 1.5,\n"
        "  \"items\": [\n"
        "    1,\n"
        "    \"two\",\n"
        "    false\n"
        "  ],\n"
        "  \"empty\": [],\n"
        "  \"nested\": {\n"
        "    \"q\\\"t\": \"a\\nb\"\n"
        "  }\n"
        "}\n";
    CHECK(os.str() == expected);
}

TEST_CASE("json writer quotes non-finite numbers") {
    std::ostringstream os;
    JsonWriter w(os);
    w.begin_array();
    w.value(std::numeric_limits<double>::infinity());
    w.value(std::numeric_limits<double>::quiet_NaN());
    w.end_array();
    w.finish();
    CHECK(os.str().find("\"inf\"") != std::string::npos);
    CHECK(os.str().find("\"nan\"") != std::string::npos);
}

TEST_CASE("command line pipeline and exit codes") {
    const std::string base = (work_dir() / "inst").string();
    const std::string gen_out = (work_dir() / "gen.json").string();
    REQUIRE(run_cli("gen --d 4 --spectrum gap:0.6 --b-cond 5 --seed 3 --out " +
                    base + " > " + gen_out) == 0);

    const Matrix a = read_matrix(base + "_a.txt");
    const Matrix b = read_matrix(base + "_b.txt");
    REQUIRE(a.rows() == 4);
    REQUIRE(b.rows() == 4);
    CHECK(is_symmetric(a));
    CHECK(is_symmetric(b));
    CHECK(slurp(gen_out).find("\"command\": \"gen\"") != std::string::npos);

    SECTION("solve converges and reports the oracle gap") {
        const std::string run1 = (work_dir() / "run1.json").string();
        REQUIRE(run_cli("solve --a " + base + "_a.txt --b " + base +
                        "_b.txt --k 2 --seed 1 --max-iters 200000 --out " +
                        run1) == 0);
        const std::string body = slurp(run1);
        CHECK(body.find("\"converged\": true") != std::string::npos);
        CHECK(body.find("\"exit_code\": 0") != std::string::npos);
        CHECK(body.find("\"principal_angles\"") != std::string::npos);

        const std::string run2 = (work_dir() / "run2.json").string();
        REQUIRE(run_cli("solve --a " + base + "_a.txt --b " + base +
                        "_b.txt --k 2 --seed 1 --max-iters 200000 --out " +
                        run2) == 0);
        CHECK(strip_timing(slurp(run1)) == strip_timing(slurp(run2)));
    }

    SECTION("check works on files and on random batches") {
        REQUIRE(run_cli("check --suite vonneumann --a " + base + "_a.txt --b " +
                        base + "_b.txt > " +
                        (work_dir() / "chk1.json").string()) == 0);
        const std::string chk = (work_dir() / "chk2.json").string();
        REQUIRE(run_cli("check --suite all --random 5 --seed 7 --out " + chk) ==
                0);
        const std::string body = slurp(chk);
        CHECK(body.find("\"checks_failed\": 0") != std::string::npos);
    }

    SECTION("failure exit codes") {
        const std::string asym =
            write_text("asym.txt", "4 4\n0 1 0 0\n0 0 0 0\n0 0 0 0\n0 0 0 0\n");
        CHECK(run_cli("solve --a " + asym + " --b " + base +
                      "_b.txt --k 1 2> /dev/null") == 1);

        const std::string mangled = write_text("mangled.txt", "2 2\n1 oops\n");
        CHECK(run_cli("solve --a " + mangled + " --b " + mangled +
                      " --k 1 2> /dev/null") == 1);

        CHECK(run_cli("solve --a " + base + "_a.txt --b " + base +
                      "_b.txt --k 2 --max-iters 3 > /dev/null") == 2);

        CHECK(run_cli("--help > /dev/null") == 0);
        CHECK(run_cli("solve --no-such-flag 2> /dev/null") == 1);
        CHECK(run_cli("check --suite nonsense --random 2 2> /dev/null") == 1);
    }
}
