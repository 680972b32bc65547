#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = steinlil::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
    CHECK(invoke({}).code == 1);
    CHECK(invoke({"no-such-command"}).code == 1);
    CHECK(invoke({"variance-table", "--format", "xml"}).code == 1);
    CHECK(invoke({"variance-table", "--config", "/nonexistent.cfg"}).code == 1);
    CHECK(invoke({"variance-table", "--set", "colour=red"}).code == 1);
    CHECK(invoke({"variance-table", "--set", "noequals"}).code == 1);
    CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("audit verdicts map to exit codes") {
    const auto pass = invoke({"variance-table", "--set", "n_max_log2=12", "--set", "regime=critical"});
    CHECK(pass.code == 0);
    CHECK(pass.out.rfind("check,label,scale,measured,target,std_error,fitted,aux,pass\n", 0) == 0);
    const auto fail = invoke({"variance-table", "--set", "hurst=0.9", "--set", "regime=critical", "--set", "n_min_log2=16",
                              "--set", "n_max_log2=17"});
    CHECK(fail.code == 2);
    CHECK(fail.err.find("FAIL") != std::string::npos);
    const auto regime = invoke({"variance-table", "--set", "hurst=0.9", "--set", "regime=breuer-major"});
    CHECK(regime.code == 1);
}

TEST_CASE("config file, seed flag and output directory") {
    const auto dir = fs::temp_directory_path() / "steinlil_test_cli";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "run.cfg");
        cfg << "# small run\nn = 8\nreplicates = 3\nhurst = 0.6\n";
    }
    const auto a = invoke({"simulate", "--config", (dir / "run.cfg").string(), "--seed", "5", "--out", (dir / "a").string()});
    CHECK(a.code == 0);
    CHECK(a.out.empty());
    const auto text = slurp(dir / "a" / "simulate.csv");
    CHECK(text.rfind("seed,replicate,n,Z_0,", 0) == 0);
    CHECK(text.find("\n5,2,8,") != std::string::npos);

    const auto j = invoke({"simulate", "--config", (dir / "run.cfg").string(), "--format", "json"});
    CHECK(j.code == 0);
    CHECK(j.out.find("\"paths\"") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("thread count does not change output") {
    const std::vector<std::string> base{"distance-decay", "--set", "n_list=64,128", "--set", "replicates=100", "--format", "json"};
    auto one = base, four = base;
    one.insert(one.end(), {"--threads", "1"});
    four.insert(four.end(), {"--threads", "4"});
    const auto r1 = invoke(one), r4 = invoke(four);
    CHECK(r1.out == r4.out);
    CHECK(r1.code == r4.code);
}
