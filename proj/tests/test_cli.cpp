#include <doctest.h>

#include "xxmis/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace xxmis;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "xxmis");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int rc = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {rc, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("xxmis_cli_" + name + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789, 0.0}) {
        auto s = format_double(v);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == v);
    }
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("bounds report") {
    auto dir = scratch("bounds");
    auto r = call({"bounds", "--m", "3", "--mr", "2", "--mg", "5", "--nc", "9", "--gamma2", "3", "--jzz", "3",
                   "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("window      [3.6, 4]") != std::string::npos);
    CHECK(fs::exists(dir / "bounds.csv"));
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    CHECK(call({}).code == 2);
    CHECK(call({"nonsense"}).code == 2);
    CHECK(call({"spectrum", "--cliques", "9,9,9", "--mr", "2", "--jxx", "4", "--alpha", "1"}).code == 2);
    CHECK(call({"spectrum", "--cliques", "0", "--mr", "2"}).code == 2);
    CHECK(call({"spectrum", "--instance", "/nonexistent/instance.txt"}).code == 2);
    CHECK(call({"bounds", "--m", "3", "--mr", "2", "--mg", "5", "--nc", "1", "--gamma2", "3", "--jzz", "3"}).code == 2);
    auto e = call({"spectrum", "--cliques", "9,9,9", "--mr", "-1"});
    CHECK(e.code == 2);
    CHECK_FALSE(e.err.empty());
    CHECK(call({"--help"}).code == 0);
}

TEST_CASE("spectrum output is byte identical across runs") {
    auto a = scratch("spec_a"), b = scratch("spec_b");
    std::vector<std::string> args{"spectrum", "--structure", "shared", "--cliques", "4,4", "--mr", "2",
                                  "--jxx", "1.5", "--grid", "41", "--k", "3"};
    auto ra = args, rb = args;
    ra.insert(ra.end(), {"--out", a.string()});
    rb.insert(rb.end(), {"--out", b.string()});
    REQUIRE(call(ra).code == 0);
    REQUIRE(call(rb).code == 0);
    for (auto f : {"spectrum.csv", "bare.csv"}) {
        auto x = slurp(a / f), y = slurp(b / f);
        CHECK(!x.empty());
        CHECK(x == y);
    }
    CHECK(first_line(slurp(a / "spectrum.csv")) == "t,E0,E1,E2,tag0,tag1,tag2");
    CHECK(first_line(slurp(a / "bare.csv")) == "t,x,jxx,bare_LM,bare_GM,AS0");
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("instance files drive the analyses") {
    auto dir = scratch("inst");
    {
        std::ofstream f(dir / "g.txt");
        f << "structure = shared\ncliques = 3,3,3\nm_r = 2\nw = 1\njzz = 2\n";
    }
    auto inst = (dir / "g.txt").string();
    CHECK(call({"negativity", "--instance", inst, "--jxx", "2", "--grid", "11", "--out", dir.string()}).code == 0);
    CHECK(first_line(slurp(dir / "negativity.csv")) == "t,fraction");
    CHECK(call({"steering", "--instance", inst, "--jxx", "2", "--grid", "11", "--depth", "2", "--out", dir.string()})
              .code == 0);
    CHECK(first_line(slurp(dir / "localization.csv")) == "t,wL0,wR_cum_1,wR_cum_2");
    CHECK(call({"v3", "--nc", "9", "--jxx", "0.6", "--grid", "11", "--out", dir.string()}).code == 0);
    CHECK(first_line(slurp(dir / "v3.csv")).rfind("t,x,jxx,alpha,beta,", 0) == 0);
    CHECK(call({"iterate", "--groups", "2x4,1x3", "--mr", "2", "--grid", "21", "--out", dir.string()}).code == 0);
    CHECK(fs::exists(dir / "iterate.csv"));
    auto st = call({"stage0", "--structure", "shared", "--cliques", "2", "--mr", "1", "--grid", "11", "--out", dir.string()});
    CHECK(st.code == 0);
    CHECK(first_line(slurp(dir / "stage0.csv")) == "t,gap");
    fs::remove_all(dir);
}

TEST_CASE("standalone binary") {
    const char* bin = std::getenv("XXMIS_BIN");
    if (!bin) return;
    auto dir = scratch("bin");
    std::string base = std::string(bin) + " ";
    auto code = [](int status) { return WEXITSTATUS(status); };
    CHECK(code(std::system((base + "bounds --m 3 --mr 2 --mg 5 --nc 9 --gamma2 3 --jzz 3 --out " + dir.string() +
                            " > /dev/null").c_str())) == 0);
    CHECK(code(std::system((base + "spectrum --mr -3 > /dev/null 2>&1").c_str())) == 2);
    fs::remove_all(dir);
}
