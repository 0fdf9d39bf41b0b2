#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "bfp/cli.hpp"

using namespace bfp;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

// Replays the resolved-configuration block (between the first two blank
// lines of the human output) as command-line flags.
std::vector<std::string> echo_to_args(const std::string& subcommand,
                                      const std::string& output) {
    static const std::set<std::string> flags = {"exact", "minus-root"};
    std::vector<std::string> args{subcommand};
    std::istringstream stream(output);
    std::string line;
    int blanks = 0;
    while (std::getline(stream, line) && blanks < 2) {
        if (line.empty()) {
            ++blanks;
            continue;
        }
        if (blanks != 1) continue;  // config block only
        const auto eq = line.find(" = ");
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(' ');
            return a == std::string::npos ? std::string() : s.substr(a);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = line.substr(eq + 3);
        if (flags.count(key) && value == "1") {
            args.push_back("--" + key);
        } else {
            args.push_back("--" + key);
            args.push_back(value);
        }
    }
    return args;
}

}  // namespace

TEST_CASE("sample size subcommand reproduces the reference designs") {
    const auto r = run_cli({"n", "--prior", "point:-6", "--null", "0", "--usd-kind",
                            "meandiff", "--sigma", "15", "--design", "point:-6", "--k",
                            "1/10", "--power", "0.8"});
    CHECK(r.code == cli::kExitOk);
    CHECK(contains(r.out, "n_integer = 124"));
    CHECK(contains(r.out, "Sample size per group"));

    const auto r2 = run_cli({"n", "--prior", "normal:0,0.70710678118654746", "--null",
                             "0", "--usd", "2", "--design", "point:0.5", "--k", "1/6",
                             "--power", "0.95"});
    CHECK(r2.code == cli::kExitOk);
    CHECK(contains(r2.out, "n_integer = 153"));
    CHECK(contains(r2.out, "method = root search"));
}

TEST_CASE("power subcommand") {
    const auto r = run_cli({"power", "--prior", "normal:0,0.7071068", "--null", "0",
                            "--usd", "2", "--design", "point:0.5", "--k", "1/6", "--n",
                            "153"});
    CHECK(r.code == cli::kExitOk);
    CHECK(contains(r.out, "power = 0.950016"));
    CHECK(contains(r.out, "limiting_power = 1"));
}

TEST_CASE("bf subcommand, estimate and t paths") {
    const auto r = run_cli({"bf", "--prior", "point:-6", "--estimate", "-1.74", "--se",
                            "2.77", "--null", "0"});
    CHECK(r.code == cli::kExitOk);
    CHECK(contains(r.out, "bf01 = 2.67"));

    const auto usd = run_cli({"bf", "--prior", "normal:0,1", "--estimate", "0.3",
                              "--usd", "2", "--n", "50"});
    CHECK(usd.code == cli::kExitOk);

    const auto t = run_cli({"bf", "--prior", "t:0,0.7071068,1,0,inf", "--tstat", "2.6",
                            "--n1", "30"});
    CHECK(t.code == cli::kExitOk);
    CHECK(contains(t.out, "t-test Bayes factor"));
    CHECK(contains(t.out, "log_bf01 = -"));
}

TEST_CASE("presets subcommand lists the eight rows") {
    const auto human = run_cli({"presets"});
    CHECK(human.code == cli::kExitOk);
    for (const char* id : {"mean", "meandiff", "smd", "zcorr", "arcsine", "logor",
                           "loghr", "logrr"})
        CHECK(contains(human.out, id));

    const auto csv = run_cli({"--csv", "presets"});
    CHECK(csv.code == cli::kExitOk);
    int rows = 0;
    std::istringstream stream(csv.out);
    std::string line;
    while (std::getline(stream, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 9);  // header + eight presets
    CHECK(contains(csv.out, "smd,Continuous,Standardized mean difference,"
                            "Sample size per group,2"));
}

TEST_CASE("exit codes: usage, infeasible, numerical") {
    CHECK(run_cli({"nonsense"}).code == cli::kExitUsage);
    CHECK(run_cli({"n", "--prior", "banana:1", "--design", "point:0.5", "--usd", "2",
                   "--k", "1/10", "--power", "0.8"})
              .code == cli::kExitUsage);
    CHECK(run_cli({"power", "--prior", "point:0.5", "--design", "point:0.5", "--usd",
                   "2", "--k", "1/10", "--direction", "h0", "--n", "10"})
              .code == cli::kExitUsage);

    const auto infeasible =
        run_cli({"n", "--prior", "point:0.3", "--design", "normal:0.3,0.2", "--usd",
                 "2", "--k", "1/10", "--power", "0.8"});
    CHECK(infeasible.code == cli::kExitInfeasible);
    CHECK(contains(infeasible.err, "limiting power"));
    CHECK(contains(infeasible.err, "0.773"));

    const auto numerical =
        run_cli({"bf", "--prior", "t:0,1,50,100000000,100000001", "--tstat", "1.0",
                 "--n1", "20"});
    CHECK(numerical.code == cli::kExitNumerical);

    CHECK(run_cli({"--help"}).code == cli::kExitOk);
}

TEST_CASE("csv output is byte-stable across runs") {
    const std::vector<std::string> args{"--csv",  "n",       "--prior", "point:-6",
                                        "--null", "0",       "--usd",   "450",
                                        "--design", "point:-6", "--k",  "1/10",
                                        "--power", "0.8"};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    CHECK(a.code == cli::kExitOk);
    CHECK(a.out == b.out);
    CHECK(contains(a.out, "n_real,n_integer,method,achieved_power"));
    CHECK(contains(a.out, "# k = 1/10"));

    const std::vector<std::string> sim{"simulate", "--prior", "normal:0,1", "--design",
                                       "normal:0.4,0.1", "--k", "1/10", "--usd", "2",
                                       "--n", "80", "--reps", "2000", "--seed", "7"};
    const auto s1 = run_cli(sim);
    const auto s2 = run_cli(sim);
    CHECK(s1.code == cli::kExitOk);
    CHECK(s1.out == s2.out);
    CHECK(contains(s1.out, "# generator = philox4x32-10"));
    CHECK(contains(s1.out, "empirical_power,mc_se,analytic_power"));
}

TEST_CASE("curve emits one row per grid point") {
    const auto r = run_cli({"curve", "--prior", "normal:0,1", "--design", "point:0.5",
                            "--k", "1/10", "--usd", "2", "--n-from", "10", "--n-to",
                            "100", "--n-points", "10", "--k0", "10"});
    CHECK(r.code == cli::kExitOk);
    std::istringstream stream(r.out);
    std::string line;
    int data_rows = 0;
    bool header_seen = false;
    double prev_power = -1.0;
    while (std::getline(stream, line)) {
        if (line.rfind("#", 0) == 0) continue;
        if (!header_seen) {
            CHECK(line == "n,power,power_h0");
            header_seen = true;
            continue;
        }
        ++data_rows;
        const auto c1 = line.find(',');
        const auto c2 = line.find(',', c1 + 1);
        const double p = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
        CHECK(p >= prev_power);  // monotone for this configuration
        prev_power = p;
    }
    CHECK(data_rows == 10);
}

TEST_CASE("config file supplies defaults and flags override it") {
    const std::string path = "/tmp/bfp_cli_test_config.txt";
    {
        std::ofstream f(path);
        f << "# reference design\n";
        f << "prior = point:-6\n";
        f << "design = point:-6\n";
        f << "usd = 450\n";
        f << "k = 1/10\n";
        f << "power = 0.8\n";
    }
    const auto r = run_cli({"n", "--config", path});
    CHECK(r.code == cli::kExitOk);
    CHECK(contains(r.out, "n_integer = 124"));

    // command line wins over the file
    const auto r2 = run_cli({"n", "--config", path, "--power", "0.9"});
    CHECK(r2.code == cli::kExitOk);
    CHECK(contains(r2.out, "n_integer = 164"));
    std::remove(path.c_str());
}

TEST_CASE("resolved configuration echo round-trips") {
    const std::vector<std::vector<std::string>> cases = {
        {"n", "--prior", "point:-6", "--null", "0", "--usd-kind", "meandiff",
         "--sigma", "15", "--design", "normal:-6,2", "--k", "1/10", "--power", "0.8"},
        {"power", "--prior", "nm:0.35355339059327379", "--design", "point:0.5",
         "--k", "1/6", "--usd", "4", "--n", "302"},
        {"power", "--prior", "t:0,0.7071068,1,0,inf", "--design", "point:0.5", "--k",
         "1/6", "--n", "60", "--type", "twosample"},
        {"bf", "--prior", "normal:0.25,1.5", "--estimate", "0.4", "--se", "0.125",
         "--null", "0.1"},
    };
    for (const auto& args : cases) {
        const auto first = run_cli(args);
        REQUIRE(first.code == cli::kExitOk);
        const auto replay = echo_to_args(args[0], first.out);
        const auto second = run_cli(replay);
        CHECK(second.code == cli::kExitOk);
        CHECK(second.out == first.out);
    }
}

TEST_CASE("threshold fractions are accepted everywhere") {
    const auto a = run_cli({"power", "--prior", "normal:0,1", "--design", "point:0.5",
                            "--k", "1/3", "--usd", "2", "--n", "40"});
    const auto b = run_cli({"power", "--prior", "normal:0,1", "--design", "point:0.5",
                            "--k", "0.33333333333333331", "--usd", "2", "--n", "40"});
    CHECK(a.code == cli::kExitOk);
    CHECK(a.out.substr(a.out.find("power =")) == b.out.substr(b.out.find("power =")));
}
