#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nplace/cli.hpp"
#include "nplace/io.hpp"
#include "oracles.hpp"

using namespace nplace;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    Run r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class TempDir {
public:
    TempDir() {
        std::random_device rd;
        path_ = fs::temp_directory_path() / ("nplace_test_" + std::to_string(rd()) + std::to_string(rd()));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    fs::path file(const std::string& name) const { return path_ / name; }
    std::string write(const std::string& name, const std::string& content) const {
        std::ofstream(path_ / name) << content;
        return (path_ / name).string();
    }
    std::size_t entries() const { return static_cast<std::size_t>(std::distance(fs::directory_iterator(path_), fs::directory_iterator())); }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<double>> csv_rows(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

int tool_exit(const std::string& args) {
    const std::string cmd = std::string(NPLACE_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* request70 = R"({"plant":{"nu":1,"mu":2},"roots":[-7,-8,-9],"controller":"PD"})";

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("design reports the (-7,-8,-9) gains and a strict certificate") {
        TempDir dir;
        const std::string req = dir.write("req.json", request70);
        const Run r = run({"design", req});
        REQUIRE(r.code == exit_ok);
        const Json j = Json::parse(r.out);
        CHECK(j["tool"]["name"] == "nplace");
        CHECK(j["design"]["tau"].get<double>() == doctest::Approx(std::log(1.25)).epsilon(1e-14));
        CHECK(j["design"]["kd"].get<double>() == doctest::Approx(0.16777216).epsilon(1e-12));
        CHECK(j["design"]["kp"].get<double>() == doctest::Approx(2.85212672).epsilon(1e-12));
        CHECK(j["design"]["certificate"]["verdict"] == "certified_strict");
        CHECK(j.contains("estimate"));
        CHECK(j.contains("simulation"));
        CHECK(j["simulation"]["fitted_rate"].get<double>() == doctest::Approx(-7.0).epsilon(0.05));
    }

    TEST_CASE("design of the delayed proportional law") {
        TempDir dir;
        const std::string req = dir.write("p.json", R"({"plant":{"nu":1,"mu":2},"roots":[-7,-8],"controller":"P"})");
        const Run r = run({"design", req});
        REQUIRE(r.code == exit_ok);
        const Json j = Json::parse(r.out);
        CHECK(j["design"]["kp"].get<double>() == doctest::Approx(3.508).epsilon(1e-3));
        CHECK(j["design"]["kd"].get<double>() == 0.0);
    }

    TEST_CASE("unreachable rate exits with code 3") {
        TempDir dir;
        const std::string req = dir.write("u.json", R"({"plant":{"nu":9,"mu":1},"roots":[-7,-8,-9],"controller":"PD"})");
        const Run r = run({"design", req});
        CHECK(r.code == exit_unreachable);
        CHECK(r.err.find("prescribed rate unreachable") != std::string::npos);
    }

    TEST_CASE("malformed requests exit with code 1 and a diagnostic") {
        TempDir dir;
        const Run a = run({"design", dir.write("a.json", "{\"plant\": {\"nu\": 1,\n \"mu\": }")});
        CHECK(a.code == exit_input_error);
        CHECK(a.err.find("line") != std::string::npos);
        const Run b = run({"design", dir.write("b.json", R"({"plant":{"nu":1},"roots":[-7,-8,-9]})")});
        CHECK(b.code == exit_input_error);
        CHECK(b.err.find("plant.mu") != std::string::npos);
        const Run c = run({"design", dir.write("c.json", R"({"plant":{"nu":1,"mu":2},"roots":[-7,-9,-8]})")});
        CHECK(c.code == exit_input_error);
        const Run d = run({"design", dir.write("d.json", R"({"plant":{"nu":1,"mu":2},"roots":[-7,-8],"controller":"PD"})")});
        CHECK(d.code == exit_input_error);
        CHECK(run({"design", (dir.file("missing.json")).string()}).code == exit_input_error);
        CHECK(run({"nonsense"}).code == exit_input_error);
        CHECK(run({}).code == exit_input_error);
    }

    TEST_CASE("a report re-runs to the same numbers") {
        TempDir dir;
        const std::string req = dir.write("req.json", request70);
        const fs::path report = dir.file("report.json");
        REQUIRE(run({"design", req, "--out", report.string()}).code == exit_ok);
        const fs::path again = dir.file("again.json");
        REQUIRE(run({"design", report.string(), "--out", again.string()}).code == exit_ok);
        CHECK(slurp(report) == slurp(again));
        const Json j = Json::parse(slurp(report));
        CHECK(j["request"]["options"]["im_limit"].is_number());
        CHECK(j["request"]["options"]["step"].is_number());
    }

    TEST_CASE("numbers are written at full precision") {
        TempDir dir;
        const Run r = run({"design", dir.write("req.json", request70)});
        const Json j = Json::parse(r.out);
        const std::string kd_text = j["design"]["kd"].dump();
        CHECK(std::stod(kd_text) == j["design"]["kd"].get<double>());
        CHECK(format_double(0.1) == "0.10000000000000001");
        CHECK(format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    }

    TEST_CASE("spectrum lists the assigned roots and chain pairs") {
        TempDir dir;
        const std::string req = dir.write("req.json", R"({"plant":{"nu":1,"mu":2},"roots":[-5,-6,-7],"controller":"PD"})");
        const Run r = run({"spectrum", "--design", req, "--window", "-10,1,-60,60"});
        REQUIRE(r.code == exit_ok);
        const auto rows = csv_rows(r.out);
        auto near = [&](double re, double im) {
            for (const auto& row : rows) {
                if (std::abs(row[0] - re) < 1e-8 && std::abs(row[1] - im) < 1e-8) return true;
            }
            return false;
        };
        CHECK(near(-5, 0));
        CHECK(near(-6, 0));
        CHECK(near(-7, 0));
        int complex_rows = 0;
        for (const auto& row : rows) {
            CHECK(row[2] < 1e-9 * (1.0 + std::hypot(row[0], row[1])));
            if (std::abs(row[1]) > 1e-6) ++complex_rows;
        }
        CHECK(complex_rows >= 2);
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i - 1][0] >= rows[i][0]);
        CHECK(r.out.find("# chain_abscissa=") != std::string::npos);
    }

    TEST_CASE("spectrum of an ordinary differential equation") {
        const Run r = run({"spectrum", "--coeffs", "3,0,0,1"});
        REQUIRE(r.code == exit_ok);
        const auto rows = csv_rows(r.out);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0][0] == doctest::Approx(-3.0).epsilon(1e-14));
        CHECK(rows[0][1] == 0.0);
    }

    TEST_CASE("spectrum of an equidistributed design sits on one vertical line") {
        TempDir dir;
        const std::string req = dir.write("req.json", request70);
        const Run r = run({"spectrum", "--design", req, "--window", "-12,-4,-60,60"});
        REQUIRE(r.code == exit_ok);
        for (const auto& row : csv_rows(r.out)) {
            if (std::abs(row[1]) > 1e-6) CHECK(std::abs(row[0] + 8.0) < 1e-7);
        }
    }

    TEST_CASE("spectrum rejects malformed coefficients") {
        CHECK(run({"spectrum", "--coeffs", "1,2,3"}).code == exit_input_error);
        CHECK(run({"spectrum", "--coeffs", "1,0,0,-1"}).code == exit_input_error);
        CHECK(run({"spectrum", "--coeffs", "1,0,0,1", "--window", "1,0,0,1"}).code == exit_input_error);
        CHECK(run({"spectrum"}).code == exit_input_error);
    }

    TEST_CASE("simulate writes the trajectory and the fitted rate") {
        TempDir dir;
        const std::string req = dir.write("req.json",
                                          R"({"plant":{"nu":1,"mu":1},"roots":[-3,-4,-6],"controller":"PD"})");
        const fs::path csv = dir.file("traj.csv");
        const fs::path svg = dir.file("traj.svg");
        const Run r = run({"simulate", "--design", req, "--history", "1+sin(t)", "--out", csv.string(), "--plot", svg.string()});
        REQUIRE(r.code == exit_ok);
        const Json summary = Json::parse(r.out);
        CHECK(summary["fitted_rate"].get<double>() == doctest::Approx(-3.0).epsilon(0.05));
        const std::string text = slurp(csv);
        CHECK(text.rfind("t,y,ydot\n", 0) == 0);
        CHECK(text.find("# fitted_decay_rate=") != std::string::npos);
        CHECK(csv_rows(text).size() > 100);
        CHECK(slurp(svg).find("<svg") != std::string::npos);
    }

    TEST_CASE("simulate the open-loop plant") {
        const Run r = run({"simulate", "--nu", "1", "--mu", "2", "--tau", "0.2", "--history", "1", "--horizon", "20"});
        REQUIRE(r.code == exit_ok);
        const auto rows = csv_rows(r.out);
        CHECK(std::abs(rows.back()[1] - oracle::hopfield_fixed_point(1.0, 2.0)) < 1e-3);
        const Run z = run({"simulate", "--nu", "1", "--mu", "2", "--history", "0", "--horizon", "3"});
        REQUIRE(z.code == exit_ok);
        for (const auto& row : csv_rows(z.out)) CHECK(row[1] == 0.0);
    }

    TEST_CASE("simulate rejects a grammar violation") {
        const Run r = run({"simulate", "--nu", "1", "--mu", "2", "--history", "1+sin(t"});
        CHECK(r.code == exit_input_error);
        CHECK(r.err.find("column") != std::string::npos);
    }

    TEST_CASE("compare reports both designs and the inequalities") {
        const Run r = run({"compare", "--nu", "1", "--mu", "2", "--triple", "-7,-8,-9", "--pair", "-7,-8"});
        REQUIRE(r.code == exit_ok);
        const Json j = Json::parse(r.out);
        CHECK(j["pd"]["tau"].get<double>() > j["p"]["tau"].get<double>());
        CHECK(j["inequalities"]["tau_pd_gt_tau_p"] == true);
        CHECK(j["inequalities"]["kp_prime_gt_gain_sum"] == true);
        CHECK(j["inequalities"]["kp_prime_gt_euclidean_gain"] == true);
        CHECK(j["tau_star"]["pd"].get<double>() == doctest::Approx(std::log(9.0 / 7.0)));
        CHECK(j["tau_star"]["p"].get<double>() == doctest::Approx(std::log(8.0 / 7.0)));
        CHECK(j["simulation"]["pd"]["fitted_rate"].get<double>() == doctest::Approx(-7.0).epsilon(0.05));
        CHECK(j["simulation"]["p"]["fitted_rate"].get<double>() == doctest::Approx(-7.0).epsilon(0.05));
    }

    TEST_CASE("compare with a double root flags its sensitivity") {
        const Run r = run({"compare", "--nu", "1", "--mu", "2", "--triple", "-7,-8,-9", "--pair", "-7,-7"});
        REQUIRE(r.code == exit_ok);
        const Json j = Json::parse(r.out);
        CHECK(j["p"]["tau"].get<double>() == doctest::Approx(0.125));
        CHECK(j["p"]["kp"].get<double>() == doctest::Approx(3.335).epsilon(1e-3));
        CHECK(j["p_note"] == "non-semi-simple: sensitive to perturbation");
    }

    TEST_CASE("compare rejects mismatched s1") {
        CHECK(run({"compare", "--nu", "1", "--mu", "2", "--triple", "-7,-8,-9", "--pair", "-6,-8"}).code == exit_input_error);
    }

    TEST_CASE("tau-star values") {
        const Json a = Json::parse(run({"tau-star", "--roots", "-7,-8,-9"}).out);
        CHECK(a["tau_star"].get<double>() == doctest::Approx(std::log(9.0 / 7.0)).epsilon(1e-12));
        const Json b = Json::parse(run({"tau-star", "--roots", "-7,-8"}).out);
        CHECK(b["tau_star"].get<double>() == doctest::Approx(std::log(8.0 / 7.0)).epsilon(1e-12));
        CHECK(run({"tau-star", "--roots", "1,-1,-2"}).code == exit_input_error);
    }

    TEST_CASE("regions subcommand modes") {
        const Json l = Json::parse(run({"regions", "--pair", "-1,-2", "--a", "0", "--tau", "1"}).out);
        CHECK(l["region"] == "R3");
        const Run t = run({"regions", "--phi-table", "0.5,2,4"});
        REQUIRE(t.code == exit_ok);
        CHECK(csv_rows(t.out).size() == 4);
        const Run g = run({"regions", "--grid", "W", "--u-range", "0.5,2,3", "--v-range", "-1,0,2"});
        REQUIRE(g.code == exit_ok);
        CHECK(csv_rows(g.out).size() == 6);
        const Json w = Json::parse(run({"regions", "--witness", "1"}).out);
        CHECK(w["A1"].get<double>() <= w["A2"].get<double>());
        CHECK(run({"regions"}).code == exit_input_error);
        CHECK(run({"regions", "--witness", "1", "--phi-table", "0.5,2,4"}).code == exit_input_error);
        CHECK(run({"regions", "--grid", "Z", "--u-range", "0.5,2,3", "--v-range", "-1,0,2"}).code == exit_input_error);
    }

    TEST_CASE("estimate-k returns k of at least one") {
        TempDir dir;
        const Json j = Json::parse(run({"estimate-k", "--design", dir.write("req.json", request70), "--epsilon", "0.1"}).out);
        CHECK(j["k"].get<double>() >= 1.0);
        CHECK(j["rate"].get<double>() == doctest::Approx(-6.9));
        CHECK(run({"estimate-k", "--design", dir.write("r2.json", request70), "--epsilon", "0"}).code == exit_input_error);
    }

    TEST_CASE("atomic writes leave no partial files on failure") {
        TempDir dir;
        const std::string req = dir.write("u.json", R"({"plant":{"nu":9,"mu":1},"roots":[-7,-8,-9],"controller":"PD"})");
        const std::size_t before = dir.entries();
        CHECK(run({"design", req, "--out", dir.file("out.json").string()}).code == exit_unreachable);
        CHECK_FALSE(fs::exists(dir.file("out.json")));
        CHECK(dir.entries() == before);
        write_atomic(dir.file("x.txt"), "hello");
        CHECK(slurp(dir.file("x.txt")) == "hello");
        write_atomic(dir.file("x.txt"), "bye");
        CHECK(slurp(dir.file("x.txt")) == "bye");
        CHECK(dir.entries() == before + 1);
        CHECK_THROWS((void)write_atomic(dir.file("no/such/dir/x.txt"), "z"));
    }

    TEST_CASE("the installed tool honours the exit-code contract") {
        TempDir dir;
        const std::string ok = dir.write("ok.json", request70);
        const std::string bad = dir.write("bad.json", "{");
        const std::string unreachable = dir.write("u.json", R"({"plant":{"nu":9,"mu":1},"roots":[-7,-8,-9],"controller":"PD"})");
        CHECK(tool_exit("design " + ok) == 0);
        CHECK(tool_exit("design " + bad) == 1);
        CHECK(tool_exit("design " + unreachable) == 3);
        CHECK(tool_exit("--version") == 0);
    }
}
