#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "dhrg/dhrg.hpp"

using namespace dhrg;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status;
    std::string out;
};

Run run(const std::string& args, const char* redirect = " 2>/dev/null") {
    const std::string cmd = std::string(DHRG_CLI_PATH) + " " + args + redirect;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string out;
    char buf[4096];
    while (std::size_t k = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, k);
    const int raw = pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

Run run_stderr(const std::string& args) {
    return run(args, " 2>&1 >/dev/null");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("dhrg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()) + "_" +
                std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

double field_after(const std::string& text, const std::string& key) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(key + " ", 0) == 0) return std::stod(line.substr(key.size() + 1));
    throw std::runtime_error("no line starting with " + key);
}

}  // namespace

TEST_F(Cli, Version) {
    const auto r = run("--version");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find(kVersion), std::string::npos);
}

TEST_F(Cli, RingsMatchLibrary) {
    const auto r = run("rings g710 --dmax 5");
    ASSERT_EQ(r.status, 0);
    EXPECT_EQ(r.out, "0 1\n1 7\n2 21\n3 56\n4 147\n5 385\n");
    const auto r8 = run("rings g810 --dmax 3");
    ASSERT_EQ(r8.status, 0);
    EXPECT_EQ(r8.out, "0 1\n1 8\n2 32\n3 120\n");
}

TEST_F(Cli, GenerateIsDeterministicAndReadable) {
    for (const char* model : {"dhrg", "hrg"}) {
        const std::string base = std::string("generate --model ") + model + " --n 300 ";
        ASSERT_EQ(run(base + "--seed 17 --graph " + path("g1") + " --embedding " + path("e1")).status, 0);
        ASSERT_EQ(run(base + "--seed 17 --graph " + path("g2") + " --embedding " + path("e2")).status, 0);
        EXPECT_EQ(slurp(path("g1")), slurp(path("g2")));
        EXPECT_EQ(slurp(path("e1")), slurp(path("e2")));
        ASSERT_EQ(run(base + "--seed 18 --graph " + path("g3") + " --embedding " + path("e3")).status, 0);
        EXPECT_NE(slurp(path("g1")), slurp(path("g3")));

        const auto ll = run("loglik --graph " + path("g1") + " --embedding " + path("e1"));
        ASSERT_EQ(ll.status, 0);
        EXPECT_LT(field_after(ll.out, "loglik"), 0);
    }
}

TEST_F(Cli, GenerateEchoesSeedAndDefaultRadius) {
    const auto r = run("generate --n 1000 --seed 5 --graph " + path("g") + " --embedding " + path("e"));
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("seed 5"), std::string::npos);
    // round((2 ln 1000 - 1) / c1) = 13
    EXPECT_NE(r.out.find("R 13 "), std::string::npos);
    std::ifstream in(path("e"));
    const auto de = read_discrete(in);
    EXPECT_EQ(de.params.R, 13);
    EXPECT_EQ(de.params.n, 1000u);
}

TEST_F(Cli, LoglikMatchesLibrary) {
    ASSERT_EQ(run("generate --n 200 --seed 2 --graph " + path("g") + " --embedding " + path("e")).status, 0);
    const auto r = run("loglik --graph " + path("g") + " --embedding " + path("e") + " --fit --pointwise --histograms " +
                       path("h"));
    ASSERT_EQ(r.status, 0);
    std::ifstream ein(path("e")), gin(path("g")), hin(path("h"));
    const auto de = read_discrete(ein);
    const auto g = read_graph(gin, de.params.n);
    const auto h = compute_histograms(g, de);
    EXPECT_EQ(read_histograms(hin), h);
    EXPECT_NEAR(field_after(r.out, "loglik"), loglik_logistic(h, de.params.R, de.params.T), 1e-9);
    EXPECT_NEAR(field_after(r.out, "pointwise"), loglik_pointwise_mle(h), 1e-9);
    // fit line: "fit R x T y loglik z"
    const auto pos = r.out.find("fit R ");
    ASSERT_NE(pos, std::string::npos);
    std::istringstream fit(r.out.substr(pos));
    std::string w;
    double R, T, best;
    fit >> w >> w >> R >> w >> T >> w >> best;
    EXPECT_GE(best, field_after(r.out, "loglik") - 1e-9);
    EXPECT_GE(field_after(r.out, "pointwise"), best - 1e-9);
}

TEST_F(Cli, ContinuousLoglikFitImproves) {
    ASSERT_EQ(run("generate --model hrg --n 300 --seed 4 --graph " + path("g") + " --embedding " + path("e")).status, 0);
    const auto r = run("loglik --graph " + path("g") + " --embedding " + path("e") + " --fit");
    ASSERT_EQ(r.status, 0);
    const double given = field_after(r.out, "loglik");
    const auto pos = r.out.find("fit R ");
    ASSERT_NE(pos, std::string::npos);
    const double best = std::stod(r.out.substr(r.out.rfind(' ') + 1));
    EXPECT_GE(best, given - 1e-9);
}

TEST_F(Cli, ImproveWithZeroIterationsKeepsEmbedding) {
    ASSERT_EQ(run("generate --n 200 --seed 9 --graph " + path("g") + " --embedding " + path("e")).status, 0);
    ASSERT_EQ(run("improve --graph " + path("g") + " --embedding " + path("e") + " --iters 0 --output " + path("o")).status,
              0);
    std::ifstream a(path("e")), b(path("o"));
    const auto ea = read_discrete(a), eb = read_discrete(b);
    ASSERT_EQ(ea.tiles.size(), eb.tiles.size());
    for (std::size_t v = 0; v < ea.tiles.size(); ++v)
        EXPECT_EQ(ea.tessellation->encode_address(ea.tiles[v]), eb.tessellation->encode_address(eb.tiles[v]));
}

TEST_F(Cli, ImproveHistoryIsMonotone) {
    ASSERT_EQ(run("generate --n 300 --seed 9 --graph " + path("g") + " --embedding " + path("e")).status, 0);
    for (const char* obj : {"logistic", "pointwise"}) {
        ASSERT_EQ(run("improve --graph " + path("g") + " --embedding " + path("e") + " --objective " + obj +
                      " --output " + path("o") + " --history " + path("h"))
                      .status,
                  0);
        std::ifstream in(path("h"));
        int it;
        double value, prev = -1e300;
        std::size_t moves;
        int rows = 0;
        while (in >> it >> value >> moves) {
            EXPECT_GE(value, prev);
            prev = value;
            ++rows;
        }
        EXPECT_GE(rows, 1);
    }
}

TEST_F(Cli, DiscretizeDediscretizeRoundtrip) {
    ASSERT_EQ(run("generate --model hrg --n 200 --seed 3 --graph " + path("g") + " --embedding " + path("c")).status, 0);
    ASSERT_EQ(run("discretize --input " + path("c") + " --output " + path("d")).status, 0);
    ASSERT_EQ(run("dediscretize --input " + path("d") + " --output " + path("c2")).status, 0);
    std::ifstream a(path("c")), b(path("c2"));
    const auto ca = read_continuous(a), cb = read_continuous(b);
    EXPECT_NEAR(ca.params.T, cb.params.T, 1e-12);
    EXPECT_NEAR(ca.params.alpha, cb.params.alpha, 1e-12);
    EXPECT_LE(std::abs(ca.params.R - cb.params.R), kC1 / 2 + 1e-12);
}

TEST_F(Cli, RouteReportsRate) {
    ASSERT_EQ(run("generate --n 200 --seed 1 --graph " + path("g") + " --embedding " + path("e")).status, 0);
    const auto r = run("route --graph " + path("g") + " --embedding " + path("e") + " --pairs 500 --seed 3");
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("seed 3"), std::string::npos);
    const auto again = run("route --graph " + path("g") + " --embedding " + path("e") + " --pairs 500 --seed 3");
    EXPECT_EQ(r.out, again.out);
}

TEST_F(Cli, CalibrateSmall) {
    const auto r = run("calibrate g710 --dmax 8 --samples 50");
    ASSERT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("c1 "), std::string::npos);
    EXPECT_GT(field_after(r.out, "c1"), 0.5);
}

TEST_F(Cli, TilingFromEnvironment) {
    const auto e = run("rings --dmax 1");
    EXPECT_EQ(e.out, "0 1\n1 7\n");
    const std::string cmd = std::string("DHRG_TILING=g810 ") + DHRG_CLI_PATH + " rings --dmax 1";
    FILE* pipe = popen(cmd.c_str(), "r");
    ASSERT_NE(pipe, nullptr);
    char buf[256] = {};
    const std::size_t k = std::fread(buf, 1, sizeof buf - 1, pipe);
    pclose(pipe);
    EXPECT_EQ(std::string(buf, k), "0 1\n1 8\n");
}

TEST_F(Cli, ErrorsExitNonzeroWithOneLine) {
    const auto missing = run_stderr("loglik --graph " + path("none") + " --embedding " + path("none"));
    EXPECT_NE(missing.status, 0);
    EXPECT_EQ(missing.out.rfind("dhrg: error: ", 0), 0u);
    EXPECT_EQ(std::count(missing.out.begin(), missing.out.end(), '\n'), 1);

    {
        std::ofstream(path("bad")) << "3 5 0.1 0.75 g710\n0 \n1 9/9\n2 0\n";
        std::ofstream(path("g")) << "0 1\n";
    }
    const auto bad = run_stderr("loglik --graph " + path("g") + " --embedding " + path("bad"));
    EXPECT_NE(bad.status, 0);
    EXPECT_NE(bad.out.find(":3:"), std::string::npos) << bad.out;  // names the offending line

    EXPECT_NE(run("rings g999").status, 0);
    EXPECT_NE(run("generate --n 10").status, 0);
    EXPECT_NE(run("frobnicate").status, 0);
    EXPECT_NE(run("improve --graph " + path("g") + " --embedding " + path("bad") + " --iters -1 --output x").status, 0);
}
