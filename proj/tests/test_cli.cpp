#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

using nlohmann::json;

namespace {

#ifndef SPECAGG_CLI
#error "SPECAGG_CLI must point at the built binary"
#endif
#ifndef SPECAGG_CONFIG_DIR
#error "SPECAGG_CONFIG_DIR must point at the repo config directory"
#endif

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    std::string cmd = std::string(SPECAGG_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string cfg(const std::string& name) {
    return std::string(SPECAGG_CONFIG_DIR) + "/" + name;
}

std::filesystem::path tmp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("params subcommand reproduces the worked trade-off examples") {
    RunResult r = run("params --variant product --n0 10 --n1 13 --alpha 1/2 --beta 1/4 "
                      "--delta0 1/10 --delta1 1/10");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["derived"]["s_count"] == 26);
    CHECK(j["derived"]["t_count"] == 13);
    CHECK(j["derived"]["d_count"] == 12);
    CHECK(j["q"] == 131);

    RunResult row = run("params --variant row --n0 10 --n1 13 --alpha 1/2 --beta 1/2 --delta0 1/10");
    REQUIRE(row.exit_code == 0);
    json jr = json::parse(row.out);
    CHECK(jr["derived"]["s_count"] == 29);
    CHECK(jr["derived"]["t_count"] == 29);
    CHECK(jr["derived"]["d_count"] == 13);
}

TEST_CASE("params rejects out-of-range fractions with exit 1") {
    RunResult r = run("params --variant product --n0 10 --n1 13 --beta 3/5");
    CHECK(r.exit_code == 1);
}

TEST_CASE("share then recon round-trips through the file format") {
    auto shares = tmp_file("cli_shares.bin");
    RunResult s = run("share --params " + cfg("params_n130.json") + " --secrets 7,11,13 --seed 3 --out " +
                      shares.string());
    REQUIRE(s.exit_code == 0);

    RunResult r = run("recon --params " + cfg("params_n130.json") + " --shares " + shares.string());
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["ok"] == true);
    std::vector<long> sec = j["secrets"];
    REQUIRE(sec.size() == 26);
    CHECK(sec[0] == 7);
    CHECK(sec[1] == 11);
    CHECK(sec[2] == 13);
    CHECK(sec[3] == 0);

    // a 2x2 grid rectangle of erasures is a stopping set: exit 2
    RunResult stuck = run("recon --params " + cfg("params_n130.json") + " --shares " +
                          shares.string() + " --drop 1,2,41,92");
    CHECK(stuck.exit_code == 2);
    std::filesystem::remove(shares);
}

TEST_CASE("row-layout share files round trip too") {
    auto shares = tmp_file("cli_row_shares.bin");
    RunResult s = run("share --params " + cfg("params_n130_row.json") +
                      " --random 29 --seed 8 --out " + shares.string());
    REQUIRE(s.exit_code == 0);
    RunResult r = run("recon --params " + cfg("params_n130_row.json") + " --shares " +
                      shares.string() + " --drop 3,17");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["ok"] == true);
    CHECK(json::parse(s.out)["secrets"] == j["secrets"]);
    std::filesystem::remove(shares);
}

TEST_CASE("simulate single trial and identical reruns") {
    RunResult a = run("simulate --config " + cfg("sim_n130.json") + " --trials 1 --seed 5 --dropouts r1:2");
    REQUIRE(a.exit_code == 0);
    RunResult b = run("simulate --config " + cfg("sim_n130.json") + " --trials 1 --seed 5 --dropouts r1:2");
    json ja = json::parse(a.out), jb = json::parse(b.out);
    ja.erase("round_ms");
    jb.erase("round_ms");
    CHECK(ja == jb);
    CHECK(ja["match"] == true);

    RunResult heavy = run("simulate --config " + cfg("sim_n130.json") + " --trials 1 --dropouts r1:0.5");
    CHECK(heavy.exit_code == 2);
}

TEST_CASE("audit subcommand exit codes") {
    RunResult r = run("audit --params " + cfg("params_n30.json") + " --subsets 50 --exhaustive 2 --seed 1");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j["failed"] == false);
    CHECK(j["rank_audit"]["failures"] == 0);
    CHECK(j["exhaustive_rank_audit"]["failures"] == 0);
}

TEST_CASE("simulate writes a decodable binary trace") {
    auto trace = tmp_file("cli_trace.bin");
    RunResult r = run("simulate --config " + cfg("sim_n130.json") +
                      " --trials 1 --seed 4 --dropouts r1:1 --trace " + trace.string());
    REQUIRE(r.exit_code == 0);
    REQUIRE(std::filesystem::exists(trace));
    CHECK(std::filesystem::file_size(trace) > 1000);
    std::filesystem::remove(trace);
}

TEST_CASE("search finds the worked-example fractions") {
    RunResult r = run("search --variant product --n0 10 --n1 13 --target-s 26 --target-t 13 "
                      "--target-d 12 --top 1");
    REQUIRE(r.exit_code == 0);
    json j = json::parse(r.out);
    REQUIRE(j["candidates"].size() == 1);
    CHECK(j["candidates"][0]["score"] == 0);
    CHECK(j["candidates"][0]["alpha"] == "1/2");
    CHECK(j["candidates"][0]["beta"] == "1/4");
}

TEST_CASE("unknown config fields exit 1 with a pointed message") {
    auto bad = tmp_file("cli_bad_params.json");
    std::ofstream out(bad);
    out << R"({"schema":"specagg-params/1","variant":"product","n0":5,"n1":6,"q":31,)"
        << R"("alpha":"1/2","beta":"1/4","delta0":"1/5","delta1":"1/6","surprise":1})";
    out.close();
    RunResult r = run("share --params " + bad.string() + " --secrets 1");
    CHECK(r.exit_code == 1);
    std::filesystem::remove(bad);
}
