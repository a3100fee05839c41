#include "flrd/io.hpp"

#include "flrd/errors.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace flrd;
namespace fs = std::filesystem;

namespace {

#ifndef FLRD_CLI_PATH
#define FLRD_CLI_PATH ""
#endif

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("flrd_test_" + std::to_string(std::rand()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args, const TempDir& dir, std::string* stdout_text = nullptr,
            std::string* stderr_text = nullptr) {
    const std::string out = dir.file("stdout.txt"), err = dir.file("stderr.txt");
    const std::string cmd =
        std::string(FLRD_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
    const int status = std::system(cmd.c_str());
    auto slurp = [](const std::string& p) {
        std::ifstream in(p);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    if (stdout_text) *stdout_text = slurp(out);
    if (stderr_text) *stderr_text = slurp(err);
    return WEXITSTATUS(status);
}

std::string slurp_file(const std::string& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

}  // namespace

TEST_CASE("format_double: 17-digit round trip") {
    for (double v : {0.1, 1.0 / 3.0, 1e-30, -123456.789, 0.07}) {
        CHECK(std::stod(io::format_double(v)) == v);
    }
}

TEST_CASE("csv: curves and responses round-trip") {
    TempDir dir;
    io::CurveTable table;
    table.abscissae = Eigen::VectorXd::LinSpaced(5, 1100.0, 2400.0);
    oracle::Rng rng(5);
    table.values = rng.matrix(3, 5);
    io::write_curves_csv(dir.file("c.csv"), table);
    const io::CurveTable back = io::read_curves_csv(dir.file("c.csv"));
    CHECK(back.abscissae == table.abscissae);
    CHECK(back.values == table.values);

    const Eigen::VectorXd y = rng.vector(4);
    io::write_responses_csv(dir.file("y.csv"), y);
    CHECK(io::read_responses_csv(dir.file("y.csv")) == y);
}

TEST_CASE("csv: malformed input reports row and column") {
    TempDir dir;
    write_file(dir.file("bad.csv"), "1,2,3\n4,oops,6\n");
    try {
        io::read_curves_csv(dir.file("bad.csv"));
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == "parse");
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
        CHECK(std::string(e.what()).find("column 2") != std::string::npos);
    }
    write_file(dir.file("ragged.csv"), "1,2,3\n4,5\n");
    CHECK_THROWS_AS(io::read_curves_csv(dir.file("ragged.csv")), Error);
}

TEST_CASE("config: key=value parsing") {
    TempDir dir;
    write_file(dir.file("run.cfg"),
               "# comment\nk = 8\nalpha=0.1\n  beta = 0.2  # trailing\n\ncurves=a.csv\n");
    const auto cfg = io::read_config(dir.file("run.cfg"));
    CHECK(cfg.at("k") == "8");
    CHECK(cfg.at("alpha") == "0.1");
    CHECK(cfg.at("beta") == "0.2");
    CHECK(cfg.at("curves") == "a.csv");
    write_file(dir.file("bad.cfg"), "not a key value line\n");
    CHECK_THROWS_AS(io::read_config(dir.file("bad.cfg")), Error);
}

TEST_CASE("cli: simulate is byte-identical for a fixed seed") {
    TempDir dir;
    const std::string base = "simulate --n 12 --k 6 --seed 42 --sigma_eps 0.2 --out ";
    CHECK(run_cli(base + dir.file("a"), dir) == 0);
    CHECK(run_cli(base + dir.file("b"), dir) == 0);
    for (const char* suffix : {"_curves.csv", "_responses.csv", "_oracle.csv", "_manifest.txt"}) {
        CHECK(slurp_file(dir.file("a") + suffix) == slurp_file(dir.file("b") + suffix));
    }
    const std::string manifest = slurp_file(dir.file("a") + "_manifest.txt");
    CHECK(manifest.find("n=12") != std::string::npos);
    CHECK(manifest.find("lambda=") != std::string::npos);
}

TEST_CASE("cli: fit -> predict -> eval pipeline on simulated data") {
    TempDir dir;
    REQUIRE(run_cli("simulate --n 40 --k 6 --seed 9 --sigma_eps 0 --out " + dir.file("s"), dir) == 0);
    std::string fit_out;
    REQUIRE(run_cli("fit --curves " + dir.file("s_curves.csv") + " --responses " +
                        dir.file("s_responses.csv") + " --k 6 --alpha 1e-8 --beta 1e-8 --model " +
                        dir.file("m.flrd"),
                    dir, &fit_out) == 0);
    CHECK(fit_out.find("n=40 k=6 degree=3") != std::string::npos);

    // noiseless pipeline with tiny penalties reproduces the responses
    std::string eval_out;
    REQUIRE(run_cli("predict --model " + dir.file("m.flrd") + " --curves " +
                        dir.file("s_curves.csv") + " --out " + dir.file("p.csv"),
                    dir) == 0);
    REQUIRE(run_cli("eval --predictions " + dir.file("p.csv") + " --responses " +
                        dir.file("s_responses.csv"),
                    dir, &eval_out) == 0);
    const double msep_value = std::stod(eval_out.substr(eval_out.find('=') + 1));
    CHECK(msep_value <= 1e-6);

    // model file round-trips: re-predicting gives identical bytes
    REQUIRE(run_cli("predict --model " + dir.file("m.flrd") + " --curves " +
                        dir.file("s_curves.csv") + " --out " + dir.file("p2.csv"),
                    dir) == 0);
    CHECK(slurp_file(dir.file("p.csv")) == slurp_file(dir.file("p2.csv")));
}

TEST_CASE("cli: fit accepts the paper's k=100 setup and echoes it") {
    TempDir dir;
    REQUIRE(run_cli("simulate --n 120 --k 100 --seed 3 --samples 256 --domain_a 1100 "
                    "--domain_b 2400 --out " +
                        dir.file("s"),
                    dir) == 0);
    std::string out;
    REQUIRE(run_cli("fit --curves " + dir.file("s_curves.csv") + " --responses " +
                        dir.file("s_responses.csv") + " --k 100 --degree 3 --alpha 0.07 "
                        "--beta 0.15 --model " +
                        dir.file("m.flrd"),
                    dir, &out) == 0);
    CHECK(out.find("k=100 degree=3") != std::string::npos);
}

TEST_CASE("cli: cv writes the surface with one row per cell") {
    TempDir dir;
    REQUIRE(run_cli("simulate --n 16 --k 5 --seed 11 --out " + dir.file("s"), dir) == 0);
    std::string out;
    REQUIRE(run_cli("cv --curves " + dir.file("s_curves.csv") + " --responses " +
                        dir.file("s_responses.csv") + " --k 5 --alpha_grid 0.05,0.1,0.2 "
                        "--beta_grid 0.1,0.3 --out " +
                        dir.file("surf.csv"),
                    dir, &out) == 0);
    CHECK(out.find("cells=6") != std::string::npos);
    const std::string surface = slurp_file(dir.file("surf.csv"));
    CHECK(surface.rfind("alpha,beta,cvmsep\n", 0) == 0);
    CHECK(std::count(surface.begin(), surface.end(), '\n') == 7);

    // a 1x1 grid selects its only cell
    std::string single;
    REQUIRE(run_cli("cv --curves " + dir.file("s_curves.csv") + " --responses " +
                        dir.file("s_responses.csv") + " --k 5 --alpha_grid 0.25 --beta_grid 0.5 "
                        "--out " +
                        dir.file("one.csv"),
                    dir, &single) == 0);
    CHECK(single.find("best_alpha=0.25") != std::string::npos);
    CHECK(single.find("best_beta=0.5") != std::string::npos);
}

TEST_CASE("cli: config file drives a run and flags win") {
    TempDir dir;
    REQUIRE(run_cli("simulate --n 20 --k 6 --seed 5 --out " + dir.file("s"), dir) == 0);
    write_file(dir.file("run.cfg"), "curves=" + dir.file("s_curves.csv") +
                                        "\nresponses=" + dir.file("s_responses.csv") +
                                        "\nk=6\nalpha=0.1\nbeta=0.1\nmodel=" + dir.file("cfg.flrd") +
                                        "\n");
    std::string out;
    REQUIRE(run_cli("fit --config " + dir.file("run.cfg"), dir, &out) == 0);
    CHECK(out.find("alpha=0.1") != std::string::npos);
    // the flag overrides the config value
    REQUIRE(run_cli("fit --config " + dir.file("run.cfg") + " --alpha 0.25", dir, &out) == 0);
    CHECK(out.find("alpha=0.25") != std::string::npos);
}

TEST_CASE("cli: errors carry the machine-parsable prefix and nonzero exit") {
    TempDir dir;
    std::string err;

    CHECK(run_cli("fit --curves missing.csv --responses missing.csv --k 5 --alpha 0.1 --beta 0.1",
                  dir, nullptr, &err) != 0);
    CHECK(err.rfind("error:io:", 0) == 0);

    write_file(dir.file("bad.csv"), "1,2\n3,nope\n");
    write_file(dir.file("y.csv"), "1\n");
    CHECK(run_cli("fit --curves " + dir.file("bad.csv") + " --responses " + dir.file("y.csv") +
                      " --k 2 --degree 1 --alpha 0.1 --beta 0.1",
                  dir, nullptr, &err) != 0);
    CHECK(err.rfind("error:parse:", 0) == 0);

    // dimension mismatch between curves and responses
    REQUIRE(run_cli("simulate --n 8 --k 5 --seed 2 --out " + dir.file("s"), dir) == 0);
    write_file(dir.file("short.csv"), "1\n2\n");
    CHECK(run_cli("fit --curves " + dir.file("s_curves.csv") + " --responses " +
                      dir.file("short.csv") + " --k 5 --alpha 0.1 --beta 0.1",
                  dir, nullptr, &err) != 0);
    CHECK(err.rfind("error:invalid-dimension:", 0) == 0);

    // model/basis mismatch on predict
    REQUIRE(run_cli("fit --curves " + dir.file("s_curves.csv") + " --responses " +
                        dir.file("s_responses.csv") + " --k 5 --alpha 0.1 --beta 0.1 --model " +
                        dir.file("m.flrd"),
                    dir) == 0);
    CHECK(run_cli("predict --model " + dir.file("m.flrd") + " --curves " +
                      dir.file("s_curves.csv") + " --k 7",
                  dir, nullptr, &err) != 0);
    CHECK(err.rfind("error:basis-mismatch:", 0) == 0);

    // missing required option
    CHECK(run_cli("fit --curves " + dir.file("s_curves.csv"), dir, nullptr, &err) != 0);
    CHECK(err.rfind("error:config:", 0) == 0);

    // invalid penalty reaches the CLI surface
    CHECK(run_cli("fit --curves " + dir.file("s_curves.csv") + " --responses " +
                      dir.file("s_responses.csv") + " --k 5 --alpha -1 --beta 0.1",
                  dir, nullptr, &err) != 0);
    CHECK(err.rfind("error:invalid-penalty:", 0) == 0);
}

TEST_CASE("cli: plot grid emission") {
    TempDir dir;
    REQUIRE(run_cli("simulate --n 10 --k 5 --seed 6 --out " + dir.file("s"), dir) == 0);
    REQUIRE(run_cli("fit --curves " + dir.file("s_curves.csv") + " --responses " +
                        dir.file("s_responses.csv") + " --k 5 --alpha 0.1 --beta 0.1 --model " +
                        dir.file("m.flrd") + " --plot_out " + dir.file("grid.csv"),
                    dir) == 0);
    const std::string grid = slurp_file(dir.file("grid.csv"));
    CHECK(grid.rfind("t,phi_hat,psi_hat\n", 0) == 0);
    CHECK(std::count(grid.begin(), grid.end(), '\n') == 513);
}
