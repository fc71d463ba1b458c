// End-to-end checks of the command line tool, driven through the real binary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#ifndef RSAPLUS_CLI_PATH
#error "RSAPLUS_CLI_PATH must be defined"
#endif

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string output;  // stdout only
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(RSAPLUS_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t got = fread(buf, 1, sizeof(buf), pipe)) out.append(buf, got);
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("rsaplus_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("keygen is deterministic under --seed") {
    TempDir dir;
    auto k1 = (dir.path / "k1").string();
    auto k2 = (dir.path / "k2").string();
    CHECK(run("keygen --scheme rsaplus --bits 64 --seed 7 --out " + k1).exit_code == 0);
    CHECK(run("keygen --scheme rsaplus --bits 64 --seed 7 --out " + k2).exit_code == 0);
    CHECK(slurp(k1 + ".pub") == slurp(k2 + ".pub"));
    CHECK(slurp(k1 + ".priv") == slurp(k2 + ".priv"));
    CHECK(slurp(k1 + ".pub").find("scheme = rsaplus") == 0);
}

TEST_CASE("encrypt/decrypt round trip of m=2 for every scheme at --bits 64") {
    TempDir dir;
    spit(dir.path / "msg", "2\n");
    for (std::string scheme : {"rsa", "rabin", "rsaplus"}) {
        auto key = (dir.path / scheme).string();
        CHECK(run("keygen --scheme " + scheme + " --bits 64 --seed 5 --out " + key).exit_code == 0);
        CHECK(run("encrypt --key " + key + ".pub --in " + (dir.path / "msg").string() + " --out " +
                  (dir.path / "ct").string() + " --seed 9 --profile toy")
                  .exit_code == 0);
        auto dec = run("decrypt --key " + key + ".priv --in " + (dir.path / "ct").string());
        CHECK(dec.exit_code == 0);
        CHECK(dec.output.find("candidate 1/") != std::string::npos);
        bool found = false;
        std::istringstream lines(dec.output);
        std::string line;
        while (std::getline(lines, line))
            if (line.find(": 2") == line.size() - 3) found = true;
        CHECK(found);
    }
}

TEST_CASE("encryption under a fixed seed is reproducible, and differs across seeds") {
    TempDir dir;
    spit(dir.path / "msg", "2\n");
    auto key = (dir.path / "k").string();
    REQUIRE(run("keygen --scheme rsaplus --bits 64 --seed 3 --out " + key).exit_code == 0);
    auto base = "encrypt --key " + key + ".pub --in " + (dir.path / "msg").string() +
                " --profile toy --out ";
    run(base + (dir.path / "a").string() + " --seed 1");
    run(base + (dir.path / "b").string() + " --seed 1");
    run(base + (dir.path / "c").string() + " --seed 2");
    CHECK(slurp(dir.path / "a") == slurp(dir.path / "b"));
    CHECK(slurp(dir.path / "a") != slurp(dir.path / "c"));
}

TEST_CASE("analyze multiplicity on the 7*19 fixture key") {
    TempDir dir;
    spit(dir.path / "toy.priv",
         "scheme = rsaplus\nkind = private\nn = 85\nell1 = 5\np = 7\nq = 13\n");
    auto r = run("analyze multiplicity --key " + (dir.path / "toy.priv").string() +
                 " --trials 2000 --seed 4");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"predicted_num\": 1, \"predicted_den\": 3") != std::string::npos);
    CHECK(r.output.find("\"trials\": 2000") != std::string::npos);
    // no private material on stdout
    CHECK(r.output.find("p = ") == std::string::npos);
    CHECK(r.output.find("q = ") == std::string::npos);
}

TEST_CASE("analyze jacobi and reductions") {
    TempDir dir;
    auto key = (dir.path / "k").string();
    REQUIRE(run("keygen --scheme rsaplus --bits 16 --seed 11 --out " + key).exit_code == 0);
    auto jac = run("analyze jacobi --key " + key + ".pub --trials 200 --seed 12");
    CHECK(jac.exit_code == 0);
    CHECK(jac.output.find("200 of 200") != std::string::npos);

    auto red = run("analyze reductions --trials 20 --seed 13");
    CHECK(red.exit_code == 0);
    CHECK(red.output.find("factor_from_two_roots: 20/20") != std::string::npos);
    CHECK(red.output.find("rsa_break_via_rsaplus_oracle: 20/20") != std::string::npos);
}

TEST_CASE("bench smoke run emits the table") {
    auto r = run("bench --bits 16 --keys 1 --msgs 2 --seed 14 --profile toy --format csv");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("bit_length,scheme,mean_ms,keys,msgs_per_key") != std::string::npos);
    CHECK(r.output.find("16,rsaplus,") != std::string::npos);
    // private material never reaches stdout
    CHECK(r.output.find("kind = private") == std::string::npos);
}

TEST_CASE("selftest passes") {
    auto r = run("selftest");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("selftest ok") != std::string::npos);
}

TEST_CASE("exit codes: domain errors are 1, usage errors are 2") {
    TempDir dir;
    spit(dir.path / "bad.priv", "scheme = rsaplus\nkind = private\nn = 86\n");
    auto domain = run("analyze multiplicity --key " + (dir.path / "bad.priv").string() +
                      " --trials 10");
    CHECK(domain.exit_code == 1);

    auto usage = run("keygen --scheme nonsense --bits 8 --out " + (dir.path / "x").string());
    CHECK(usage.exit_code == 2);
    CHECK(run("frobnicate").exit_code == 2);
}
