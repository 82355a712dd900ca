#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

#include "cli_runner.hpp"

namespace fs = std::filesystem;
using cli::run;

namespace {

std::string data(const char* name) { return std::string(NEARCORR_TEST_DATA) + "/" + name; }

double field(const std::string& text, const std::string& key) {
    const std::string needle = key + ": ";
    const auto at = text.find(needle);
    REQUIRE_MESSAGE(at != std::string::npos, "missing key " << key);
    return std::stod(text.substr(at + needle.size()));
}

}  // namespace

TEST_CASE("corr reproduces the distorted matrix and exits 2") {
    const auto r = run("corr " + cli::quote(data("aex_panel.csv")) +
                       " --precision 3 --override 'Wolters Kluwer,Euro/US dollar,1:5'");
    CHECK(r.status == 2);
    CHECK(r.out.rfind("1.000,0.896,0.785,0.684,-0.179\n", 0) == 0);
    CHECK(field(r.out, "min_eigenvalue") == doctest::Approx(-0.089).epsilon(0.02));
    CHECK(r.out.find("is_psd: false") != std::string::npos);

    const auto clean = run("corr " + cli::quote(data("aex_panel.csv")));
    CHECK(clean.status == 0);
}

TEST_CASE("corr with a single instrument") {
    const fs::path dir = cli::scratch_dir();
    const fs::path panel = dir / "single.csv";
    std::ofstream(panel) << "date,A\nd1,1\nd2,2\nd3,4\n";
    const auto r = run("corr " + cli::quote(panel.string()));
    CHECK(r.status == 0);
    CHECK(r.out.rfind("1.000000\n", 0) == 0);
}

TEST_CASE("corr error handling") {
    CHECK(run("corr /nonexistent/panel.csv").status == 1);
    CHECK(run("corr " + cli::quote(data("aex_panel.csv")) + " --override 'A,B'").status == 1);
    CHECK(run("corr " + cli::quote(data("aex_panel.csv")) + " --policy sometimes").status == 1);
}

TEST_CASE("check exit codes") {
    CHECK(run("check " + cli::quote(data("distorted.csv"))).status == 2);
    const auto ok = run("check " + cli::quote(data("corrected.csv")));
    CHECK(ok.status == 0);
    CHECK(ok.out.find("is_correlation: true") != std::string::npos);
}

TEST_CASE("repair on a 2x2 with off-diagonal 1.1") {
    const fs::path dir = cli::scratch_dir();
    const fs::path in = dir / "two.csv";
    std::ofstream(in) << "1,1.1\n1.1,1\n";
    const auto r = run("repair " + cli::quote(in.string()) + " --epsilon 0.001");
    CHECK(r.status == 0);
    CHECK(r.out.rfind("1.000000,0.999048\n0.999048,1.000000\n", 0) == 0);
    CHECK(field(r.out, "clipped_count") == 1.0);
}

TEST_CASE("repair reproduces the corrected example") {
    const auto r = run("repair " + cli::quote(data("distorted.csv")) + " --epsilon 0.001 --precision 3");
    CHECK(r.status == 0);
    CHECK(r.out.rfind("1.000,0.888,0.779,0.672,-0.175\n", 0) == 0);
    CHECK(field(r.out, "max") <= 0.06);
}

TEST_CASE("repair JSON output is valid") {
    const auto r = run("repair " + cli::quote(data("distorted.csv")) + " --method apd --format json");
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["method"] == "apd");
    CHECK(j["iterations"].get<int>() > 0);
    CHECK(j["matrix"].size() == 5);
    CHECK(j["shifts"].size() == 5);
}

TEST_CASE("repair convergence failure exits 3") {
    const auto r = run("repair " + cli::quote(data("distorted.csv")) + " --method apd --max-iter 1");
    CHECK(r.status == 3);
    CHECK(r.err.find("residual") != std::string::npos);
}

TEST_CASE("repair --output writes atomically and leaves nothing on error") {
    const fs::path dir = cli::scratch_dir();
    const fs::path out = dir / "repaired.csv";
    const auto ok = run("repair " + cli::quote(data("distorted.csv")) + " --header --output " + cli::quote(out.string()));
    CHECK(ok.status == 0);
    REQUIRE(fs::exists(out));
    std::ifstream in(out);
    std::string first;
    std::getline(in, first);
    CHECK(first == ",V1,V2,V3,V4,V5");

    const fs::path bad_in = dir / "bad.csv";
    std::ofstream(bad_in) << "1,0.5\n0.9,1\n";
    const fs::path bad_out = dir / "never.csv";
    const auto bad = run("repair " + cli::quote(bad_in.string()) + " --output " + cli::quote(bad_out.string()));
    CHECK(bad.status == 1);
    CHECK_FALSE(fs::exists(bad_out));
    std::size_t leftovers = 0;
    for ([[maybe_unused]] const auto& entry : fs::directory_iterator(dir)) {
        ++leftovers;
    }
    CHECK(leftovers == 2);
}

TEST_CASE("compare") {
    const auto same = run("compare " + cli::quote(data("distorted.csv")) + " " + cli::quote(data("distorted.csv")));
    CHECK(same.status == 0);
    CHECK(field(same.out, "frobenius") == 0.0);
    CHECK(field(same.out, "max") == 0.0);

    const fs::path dir = cli::scratch_dir();
    std::ofstream(dir / "i.csv") << "1,0\n0,1\n";
    std::ofstream(dir / "z.csv") << "0,0\n0,0\n";
    const auto unit = run("compare " + cli::quote((dir / "i.csv").string()) + " " + cli::quote((dir / "z.csv").string()) +
                          " --precision 12");
    CHECK(field(unit.out, "frobenius") == doctest::Approx(1.4142135623731));
    CHECK(field(unit.out, "max") == 1.0);
    CHECK(field(unit.out, "scaled_max") == 2.0);

    const auto printed = run("compare " + cli::quote(data("distorted.csv")) + " " + cli::quote(data("corrected.csv")));
    CHECK(field(printed.out, "max") <= 0.06);

    std::ofstream(dir / "three.csv") << "1,0,0\n0,1,0\n0,0,1\n";
    CHECK(run("compare " + cli::quote((dir / "i.csv").string()) + " " + cli::quote((dir / "three.csv").string())).status ==
          1);
}

TEST_CASE("bench is deterministic and meets its targets") {
    const std::string cmd = "bench --size 10 --trials 50 --seed 42 --format json";
    const auto a = run(cmd);
    const auto b = run(cmd);
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["apd_dominates"].get<int>() == 50);
    CHECK(j["clip_max_within_3x"].get<int>() >= 45);

    const auto zero = run("bench --size 5 --trials 3 --noise 0");
    CHECK(zero.status == 0);
    CHECK(field(zero.out, "apd_dominates") == 3.0);

    CHECK(run("bench --size 1").status == 1);
}

TEST_CASE("usage errors exit 1") {
    CHECK(run("").status == 1);
    CHECK(run("frobnicate").status == 1);
    CHECK(run("repair").status == 1);
}
