#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

std::string cli() {
    const char* p = std::getenv("CVP_CLI");
    REQUIRE(p != nullptr);
    return p;
}

std::string workdir() {
    const char* p = std::getenv("CVP_WORKDIR");
    return p ? p : ".";
}

int run(const std::string& args) {
    std::string cmd = cli() + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

nlohmann::json run_json(const std::string& args, const std::string& tag) {
    std::string out = workdir() + "/cli_" + tag + ".json";
    REQUIRE(run(args + " --out " + out) == 0);
    std::ifstream in(out);
    REQUIRE(in.good());
    nlohmann::json j;
    in >> j;
    return j;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("cli distance on the disk", "[cli]") {
    nlohmann::json j = run_json("distance --domain disk --x 0,0 --y 0.5,0", "dist");
    REQUIRE(j["command"] == "distance");
    REQUIRE(j["hilbert_distance"].get<double>() ==
            Catch::Approx(0.5 * std::log(3.0)).margin(1e-9));
    REQUIRE(j["cross_ratio"].get<double>() == Catch::Approx(3.0).margin(1e-9));
}

TEST_CASE("cli classify reports translation and verdict", "[cli]") {
    nlohmann::json j =
        run_json("classify --domain disk --aut boost_x_1 --samples 300", "cls");
    REQUIRE(j["is_biproximal"] == true);
    REQUIRE(j["translation"]["formula_value"].get<double>() ==
            Catch::Approx(1.0).margin(1e-9));
    REQUIRE(j["rank_one"]["verdict"] == "RankOneIsometry");
}

TEST_CASE("cli orbit and pingpong", "[cli]") {
    nlohmann::json jo =
        run_json("orbit --domain simplex2 --aut diag_pow2 --x 1,1,1 --n 10", "orb");
    REQUIRE(jo["trajectory"].size() == 11);
    REQUIRE(jo.contains("limit_point"));

    nlohmann::json jp = run_json(
        "pingpong --domain simplex2 --phi 9,0,0,0,3,0,0,0,1 "
        "--psi 20,-16,5,14,-7,2,9,0,0 --n 20",
        "pp");
    REQUIRE(jp["steps"].size() == 20);
    REQUIRE(jp["steps"].back()["is_proximal"] == true);
}

TEST_CASE("cli nscheck finds a threshold on the disk", "[cli]") {
    nlohmann::json j = run_json(
        "nscheck --domain disk --aut boost_x_1 --ra 0.2 --rb 0.2 --nmax 20 --mesh 200",
        "ns");
    REQUIRE(j["N"].is_number_integer());
    REQUIRE(j["N"].get<int>() <= 20);
}

TEST_CASE("cli exit codes", "[cli]") {
    REQUIRE(run("distance --domain disk --x 0,0 --y 0.5,0") == 0);
    // user errors: bad domain, exterior point, non-automorphism, bad hypothesis
    REQUIRE(run("distance --domain frisbee --x 0,0 --y 0.5,0") == 2);
    REQUIRE(run("distance --domain disk --x 2,0 --y 0,0") == 2);
    REQUIRE(run("classify --domain disk --matrix 1,0,0,0,2,0,0,0,1") == 2);
    REQUIRE(run("nscheck --domain simplex2 --aut diag_pow2") == 2);
    // malformed flags are caught by the parser
    REQUIRE(run("distance --domain disk") != 0);
    REQUIRE(run("") != 0);
}

TEST_CASE("cli rankreport is byte-identical across runs", "[cli]") {
    std::string base = "rankreport --domain psd3 --pairs 60 --samples 60 --seed 5";
    std::string out1 = workdir() + "/rank1.json", out2 = workdir() + "/rank2.json";
    std::string csv1 = workdir() + "/rank1.csv", csv2 = workdir() + "/rank2.csv";
    REQUIRE(run(base + " --out " + out1 + " --csv " + csv1) == 0);
    REQUIRE(run(base + " --out " + out2 + " --csv " + csv2) == 0);
    REQUIRE(slurp(out1) == slurp(out2));
    REQUIRE(slurp(csv1) == slurp(csv2));

    nlohmann::json j = nlohmann::json::parse(slurp(out1));
    REQUIRE(j["schema"] == "rankreport/1");
    REQUIRE(j["verdict"] == "HigherRankEvidence");

    // CSV carries the per-pair s values and per-element taus
    std::string csv = slurp(csv1);
    REQUIRE(csv.rfind("record,key,value\n", 0) == 0);
    REQUIRE(csv.find("s_pair,0,") != std::string::npos);
    REQUIRE(csv.find("tau,cong_diag,") != std::string::npos);
}
