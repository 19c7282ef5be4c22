#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr
};

std::string binary() {
    const char* env = std::getenv("PROCDISC_BIN");
    REQUIRE_MESSAGE(env != nullptr, "PROCDISC_BIN must point at the procdisc binary");
    return env;
}

RunResult run(const std::string& args) {
    fs::path log = fs::temp_directory_path() / "procdisc_cli_out.txt";
    std::string cmd = binary() + " " + args + " > " + log.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    RunResult res;
    res.exit_code = WEXITSTATUS(rc);
    std::ifstream in(log);
    std::stringstream ss;
    ss << in.rdbuf();
    res.output = ss.str();
    return res;
}

fs::path write_config(const std::string& name, const std::string& text) {
    fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config errors exit with code 1 and name the offender") {
    auto bad_key = write_config("bad_key.cfg",
                                "ensemble.family = cpf\n"
                                "tolerence = 1e-8\n");
    auto r = run("bounds --config " + bad_key.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("tolerence") != std::string::npos);

    auto bad_priors = write_config("bad_priors.cfg",
                                   "ensemble.family = cpf\n"
                                   "ensemble.m = 2\n"
                                   "ensemble.priors = 0.5, 0.6\n");
    r = run("validate --config " + bad_priors.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("priors must sum to 1") != std::string::npos);

    r = run("bounds --config /nonexistent/path.cfg");
    CHECK(r.exit_code == 1);

    auto ok = write_config("ok.cfg", "ensemble.family = cpf\nensemble.m = 2\n");
    r = run("bounds --config " + ok.string() + " --set bad.key=1");
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("bad.key") != std::string::npos);
}

TEST_CASE("validate reports a clean ensemble") {
    auto cfg = write_config("validate.cfg",
                            "ensemble.family = gad\n"
                            "ensemble.nu0 = 0.3\n");
    auto r = run("validate --config " + cfg.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("validation passed") != std::string::npos);
}

TEST_CASE("bounds on identical processes all equal the best prior") {
    auto cfg = write_config("identical.cfg",
                            "ensemble.family = cpf\n"
                            "ensemble.m = 2\n"
                            "ensemble.t = 1\n"
                            "ensemble.q_b = 0.3\n"
                            "ensemble.q_t = 0.3\n"
                            "bounds.list = ub1, ub2, exact, bayes, pgm, choistate\n");
    fs::path out = fs::temp_directory_path() / "identical.csv";
    auto r = run("bounds --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    std::string csv = slurp(out);
    CHECK(csv.find("bound,value,status,seconds") == 0);
    CHECK(csv.find("consistent,1") != std::string::npos);
    for (const char* name : {"ub1", "ub2", "exact", "bayes", "pgm", "choistate"}) {
        size_t pos = csv.find(std::string(name) + ",");
        REQUIRE(pos != std::string::npos);
        double v = std::stod(csv.substr(pos + std::string(name).size() + 1));
        CHECK(v == doctest::Approx(0.5).epsilon(1e-6));
    }
}

TEST_CASE("sweeps are byte-stable and order-stable under --jobs") {
    auto cfg = write_config("sweep.cfg",
                            "ensemble.family = cpf\n"
                            "ensemble.m = 2\n"
                            "ensemble.t = 1\n"
                            "sweep.start = 0.1\n"
                            "sweep.stop = 0.5\n"
                            "sweep.points = 3\n"
                            "bounds.list = ub1, bayes\n");
    fs::path out1 = fs::temp_directory_path() / "sweep1.csv";
    fs::path out2 = fs::temp_directory_path() / "sweep2.csv";
    CHECK(run("sweep-cpf --config " + cfg.string() + " --out " + out1.string()).exit_code == 0);
    CHECK(run("sweep-cpf --config " + cfg.string() + " --out " + out2.string() + " --jobs 3")
              .exit_code == 0);
    std::string a = slurp(out1), b = slurp(out2);
    CHECK(a == b);
    CHECK(a.find("q_t,ub1,bayes,status_ub1,status_bayes,consistent\n") == 0);
    CHECK(a.find("\r") == std::string::npos);  // LF endings only
    // Rows ordered by the swept parameter.
    CHECK(a.find("\n0.1,") != std::string::npos);
    CHECK(a.find("\n0.3,") < a.find("\n0.5,"));
}

TEST_CASE("--set overrides reach the computation") {
    auto cfg = write_config("override.cfg",
                            "ensemble.family = cpf\n"
                            "ensemble.m = 2\n"
                            "ensemble.t = 1\n"
                            "ensemble.q_b = 0.3\n"
                            "ensemble.q_t = 0.3\n"
                            "bounds.list = exact\n");
    fs::path out = fs::temp_directory_path() / "override.csv";
    CHECK(run("bounds --config " + cfg.string() + " --out " + out.string() +
              " --set ensemble.q_t=0.1")
              .exit_code == 0);
    double v = std::stod(slurp(out).substr(std::string("bound,value,status,seconds\nexact,").size()));
    CHECK(v > 0.5 + 1e-3);  // distinguishable once q_t differs from q_b
}

TEST_CASE("oversized exact computations are refused") {
    auto cfg = write_config("toobig.cfg",
                            "ensemble.family = cpf\n"
                            "ensemble.m = 3\n"
                            "ensemble.t = 2\n"
                            "bounds.list = exact\n");
    auto r = run("bounds --config " + cfg.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("complexity table") != std::string::npos);
}

TEST_CASE("export-sdpa writes a well-formed sparse file") {
    auto cfg = write_config("export.cfg",
                            "ensemble.family = cpf\n"
                            "ensemble.m = 2\n"
                            "ensemble.t = 1\n");
    fs::path out = fs::temp_directory_path() / "export.dat-s";
    auto r = run("export-sdpa --config " + cfg.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    std::ifstream in(out);
    int m = 0, nblocks = 0;
    in >> m >> nblocks;
    CHECK(m > 0);
    CHECK(nblocks == 2);

    // Re-export is byte-identical.
    fs::path out2 = fs::temp_directory_path() / "export2.dat-s";
    CHECK(run("export-sdpa --config " + cfg.string() + " --out " + out2.string()).exit_code == 0);
    CHECK(slurp(out) == slurp(out2));
}
