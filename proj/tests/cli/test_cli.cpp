#include "cli.hpp"

#include <catch_amalgamated.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using Catch::Matchers::WithinAbs;
using Json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cmmb::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("cmmb_test_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("pmf command", "[cli]") {
    const auto r = run({"pmf", "--d", "4", "--r", "0.5", "--nu", "2"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"k", "probability"});
    const double expect[] = {1, 16, 36, 16, 1};
    for (int k = 0; k <= 4; ++k) CHECK_THAT(std::stod(rows[static_cast<std::size_t>(k) + 1][1]), WithinAbs(expect[k] / 70.0, 5e-9));

    const auto uni = csv_rows(run({"pmf", "--d", "3", "--r", "0.5", "--nu", "0"}).out);
    for (std::size_t k = 1; k < uni.size(); ++k) CHECK(uni[k][1] == "0.25000000");

    const auto bin = run({"pmf", "--d", "9", "--r", "0.3333333", "--nu", "1", "--format", "json"});
    const auto j = Json::parse(bin.out);
    CHECK_THAT(j["pmf"][0].get<double>(), WithinAbs(0.02601229, 1e-7));
    CHECK(j["pmf"].size() == 10);

    CHECK(run({"pmf", "--d", "4", "--r", "1.5", "--nu", "2"}).code == 2);
    CHECK(run({"pmf", "--d", "4", "--nu", "2"}).code == 2);
    CHECK(run({"pmf", "--d", "four", "--r", "0.5", "--nu", "2"}).code == 2);
    CHECK(run({"pmf", "--d", "4", "--r", "0.5", "--nu", "2", "--format", "xml"}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({}).code == 2);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("precision precedence", "[cli]") {
    const std::vector<std::string> base{"pmf", "--d", "4", "--r", "0.5", "--nu", "2"};
    auto with = base;
    with.insert(with.begin(), {"--precision", "3"});
    CHECK(csv_rows(run(with).out)[1][1] == "0.014");
    ::setenv("CMMB_PRECISION", "5", 1);
    CHECK(csv_rows(run(base).out)[1][1] == "0.01429");
    CHECK(csv_rows(run(with).out)[1][1] == "0.014");
    ::setenv("CMMB_PRECISION", "x", 1);
    CHECK(run(base).code == 2);
    ::unsetenv("CMMB_PRECISION");
    CHECK(csv_rows(run(base).out)[1][1] == "0.01428571");
}

TEST_CASE("chain command", "[cli]") {
    const auto r = run({"chain", "--d", "9", "--p", "0.333333333", "--nu-list", "2,3,4,5"});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(r.out);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"nu", "r", "mean", "variance"});
    const double rp[] = {0.21367747, 0.12810820, 0.07352747, 0.04105203};
    const double vp[] = {1.0748125, 0.7319828, 0.5547126, 0.4452527};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK_THAT(std::stod(rows[i + 1][1]), WithinAbs(rp[i], 5e-7));
        CHECK_THAT(std::stod(rows[i + 1][3]), WithinAbs(vp[i], 5e-7));
    }
    const auto one = csv_rows(run({"chain", "--d", "9", "--p", "1/3", "--nu-list", "1"}).out);
    CHECK(one[1][1] == "0.33333333");
    const auto half = csv_rows(run({"chain", "--d", "9", "--p", "0.5", "--nu-list", "2"}).out);
    CHECK(half[1][1] == "0.50000000");
    CHECK(run({"chain", "--d", "9", "--p", "1/0", "--nu-list", "2"}).code == 2);
    CHECK(run({"chain", "--d", "9", "--p", "1.5", "--nu-list", "2"}).code == 2);
    // Unreachable target mean within the r range: solver failure.
    CHECK(run({"chain", "--d", "9", "--p", "0.999999999999999", "--nu-list", "2", "--tol", "1e-20"}).code == 3);
}

TEST_CASE("sr-check command", "[cli]") {
    auto j = Json::parse(run({"sr-check", "--d", "4", "--nu", "1.1"}).out);
    CHECK(j["is_sr"] == false);
    CHECK(j.contains("witness"));
    j = Json::parse(run({"sr-check", "--d", "7", "--nu", "3", "--exact"}).out);
    CHECK(j["is_sr"] == true);
    CHECK(j["method"] == "exact_sturm");
    j = Json::parse(run({"sr-check", "--d", "4", "--threshold", "--lo", "1.01", "--hi", "2"}).out);
    CHECK_THAT(j["threshold"].get<double>(), WithinAbs(1.14772, 1e-5));
    j = Json::parse(run({"sr-check", "--d", "4", "--nu", "1.1", "--r", "0.3"}).out);
    CHECK(j["is_sr"] == false);
    j = Json::parse(run({"sr-check", "--law", "upper:d=3,p=0.5"}).out);
    CHECK(j["is_sr"] == false);
    CHECK(j["method"] == "closed_form_d3");
    j = Json::parse(run({"sr-check", "--law", "thinned:nu=2,p=0.2;0.3;0.5"}).out);
    CHECK(j["is_sr"] == true);
    j = Json::parse(run({"sr-check", "--law", "cmb:d=4,r=0.5,nu=1.1"}).out);
    CHECK(j["is_sr"] == false);

    CHECK(run({"sr-check", "--d", "4", "--threshold", "--lo", "1.2", "--hi", "2"}).code == 2);
    CHECK(run({"sr-check", "--d", "4", "--nu", "1.5", "--exact"}).code == 2);
    CHECK(run({"sr-check", "--d", "4", "--nu", "1.5", "--exact", "--numeric"}).code == 2);
    CHECK(run({"sr-check", "--d", "4"}).code == 2);
}

TEST_CASE("hist command", "[cli]") {
    const auto path = temp_path("hist.csv");
    const auto r = run({"hist", "--d", "9", "--p", "1/3", "--nu-list", "1,2,3,4,5", "--out", path});
    REQUIRE(r.code == 0);
    const auto rows = csv_rows(slurp(path));
    REQUIRE(rows.size() == 51);
    CHECK(rows[0] == std::vector<std::string>{"nu", "k", "probability"});
    const auto j = Json::parse(r.out);
    for (const auto& m : j["modes"]) CHECK(m["mode"] == 3);
    // Mass near the mean grows with nu.
    double prev = 0.0;
    for (int nu = 1; nu <= 5; ++nu) {
        const double at3 = std::stod(rows[static_cast<std::size_t>((nu - 1) * 10 + 4)][2]);
        CHECK(at3 > prev);
        prev = at3;
    }
    std::remove(path.c_str());
    CHECK(run({"hist", "--d", "9", "--p", "1/3", "--nu-list", "1", "--out", "/nonexistent/dir/x.csv"}).code == 2);
}

TEST_CASE("order-check command", "[cli]") {
    auto j = Json::parse(run({"order-check", "--mode", "cx", "--first", "cmb:d=9,p=1/3,nu=2", "--second", "cmb:d=9,p=1/3,nu=5"}).out);
    CHECK(j["holds"] == true);
    CHECK(j["reverse_holds"] == false);
    CHECK(j["relation"] == "second <=_cx first");

    j = Json::parse(run({"order-check", "--mode", "cx", "--first", "cmb:d=9,p=1/3,nu=5", "--second", "cmb:d=9,p=1/3,nu=2"}).out);
    CHECK(j["holds"] == false);
    CHECK(j.contains("witness"));

    j = Json::parse(run({"order-check", "--mode", "na", "--first", "upper:d=3,p=0.5"}).out);
    CHECK(j["holds"] == false);
    CHECK(j["violation"]["block1"] == Json::array({1}));
    CHECK(j["violation"]["block2"] == Json::array({2}));
    CHECK(j["violation"]["h1"]["true_on"] == Json::array({"1"}));

    j = Json::parse(run({"order-check", "--mode", "sm", "--first", "cmb:d=3,r=0.5,nu=2", "--second", "cmb:d=3,r=0.5,nu=2"}).out);
    CHECK(j["holds"] == true);
    j = Json::parse(run({"order-check", "--mode", "sm", "--first", "indep:d=3,p=0.5", "--second", "upper:d=3,p=0.5"}).out);
    CHECK(j["holds"] == false);
    CHECK(j.contains("witness"));

    const auto mismatch = run({"order-check", "--mode", "cx", "--first", "cmb:d=9,r=0.3,nu=2", "--second", "cmb:d=9,r=0.5,nu=2"});
    CHECK(mismatch.code == 2);
    CHECK(mismatch.err.find("equal means") != std::string::npos);
    const auto sm_mismatch = run({"order-check", "--mode", "sm", "--first", "indep:d=3,p=0.3", "--second", "indep:d=3,p=0.5"});
    CHECK(sm_mismatch.code == 2);
    CHECK(sm_mismatch.err.find("margins") != std::string::npos);
    CHECK(run({"order-check", "--mode", "xx", "--first", "indep:d=3,p=0.3", "--second", "indep:d=3,p=0.5"}).code == 2);
    CHECK(run({"order-check", "--mode", "cx", "--first", "indep:d=3,p=0.3"}).code == 2);
    CHECK(run({"order-check", "--mode", "na", "--first", "nope:d=3"}).code == 2);
}

TEST_CASE("JSON law files", "[cli]") {
    const auto sum_path = temp_path("sum.json");
    const auto joint_path = temp_path("joint.json");
    std::ofstream(sum_path) << R"({"d": 3, "weights": [0.5, 0, 0, 0.5]})";
    std::ofstream(joint_path) << R"({"d": 3, "table": {"000": 0.5, "111": 0.5}})";
    auto j = Json::parse(run({"order-check", "--mode", "na", "--first", sum_path}).out);
    CHECK(j["holds"] == false);
    j = Json::parse(run({"order-check", "--mode", "sm", "--first", joint_path, "--second", sum_path}).out);
    CHECK(j["relation"] == "equivalent");

    // Coordinate 1 is the leftmost character.
    std::ofstream(joint_path) << R"({"d": 2, "table": {"10": 1.0}})";
    j = Json::parse(run({"order-check", "--mode", "na", "--first", joint_path}).out);
    CHECK(j["holds"] == true);

    std::ofstream(sum_path) << R"({"d": 3, "weights": [0.5, 0.5]})";
    CHECK(run({"order-check", "--mode", "na", "--first", sum_path}).code == 2);
    std::ofstream(sum_path) << R"({"d": 3, "weights": [0.5, 0.5, 0.5, 0.5]})";
    CHECK(run({"order-check", "--mode", "na", "--first", sum_path}).code == 2);
    std::ofstream(joint_path) << R"({"d": 2, "table": {"102": 1.0}})";
    CHECK(run({"order-check", "--mode", "na", "--first", joint_path}).code == 2);
    std::ofstream(joint_path) << "not json";
    CHECK(run({"order-check", "--mode", "na", "--first", joint_path}).code == 2);
    CHECK(run({"order-check", "--mode", "na", "--first", temp_path("missing.json")}).code == 2);
    std::remove(sum_path.c_str());
    std::remove(joint_path.c_str());
}

TEST_CASE("sample command", "[cli]") {
    const auto path = temp_path("w.csv");
    const auto r = run({"sample", "--what", "w", "--d", "9", "--r", "0.0410520", "--nu", "5", "--n", "200000", "--seed", "7", "--out", path});
    REQUIRE(r.code == 0);
    const auto j = Json::parse(r.out);
    CHECK_THAT(j["variance"].get<double>(), WithinAbs(0.4452527, 0.01));
    CHECK(csv_rows(slurp(path)).size() == 200001);
    const auto again = run({"sample", "--what", "w", "--d", "9", "--r", "0.0410520", "--nu", "5", "--n", "200000", "--seed", "7", "--out", path});
    CHECK(again.out == r.out);
    std::remove(path.c_str());

    const auto ex = Json::parse(run({"sample", "--what", "exch", "--d", "3", "--nu", "1", "--r", "0.5", "--n", "100000", "--seed", "3"}).out);
    CHECK(std::abs(ex["covariance"][0][1].get<double>()) < 0.01);
    CHECK(ex["covariance"].size() == 3);

    const auto th = Json::parse(run({"sample", "--what", "thinned", "--p", "0.2,0.3,0.5", "--nu", "2", "--n", "100000", "--seed", "4"}).out);
    CHECK_THAT(th["mean"][0].get<double>(), WithinAbs(0.2, 0.01));
    CHECK_THAT(th["mean"][1].get<double>(), WithinAbs(0.3, 0.01));
    CHECK_THAT(th["mean"][2].get<double>(), WithinAbs(0.5, 0.01));

    std::string many = "0.1";
    for (int i = 0; i < 21; ++i) many += ",0.1";
    CHECK(run({"sample", "--what", "thinned", "--p", many, "--nu", "2", "--n", "10"}).code == 2);
    CHECK(run({"sample", "--what", "w", "--d", "9", "--r", "0.3", "--n", "0"}).code == 2);
    CHECK(run({"sample", "--what", "w", "--d", "9", "--r", "0.3", "--n", "1000000000"}).code == 2);
    CHECK(run({"sample", "--what", "z", "--n", "10"}).code == 2);
}

TEST_CASE("decompose command", "[cli]") {
    auto rows = csv_rows(run({"decompose", "--d", "3", "--nu", "1"}).out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[1] == std::vector<std::string>{"0", "0.25000000", "0|3"});
    CHECK(rows[2] == std::vector<std::string>{"1", "0.75000000", "1|2"});
    rows = csv_rows(run({"decompose", "--d", "3", "--nu", "2"}).out);
    CHECK(rows[1][1] == "0.10000000");
    for (int d = 1; d <= 12; ++d) {
        for (double nu : {-2.0, 0.0, 1.5, 3.0}) {
            const auto j = Json::parse(run({"decompose", "--d", std::to_string(d), "--nu", std::to_string(nu), "--format", "json"}).out);
            CHECK(j["residual"].get<double>() <= 1e-12);
        }
    }
}

TEST_CASE("identical invocations give identical output", "[cli]") {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"chain", "--d", "9", "--p", "1/3", "--nu-list", "1,2,3"},
             {"sr-check", "--d", "5", "--nu", "1.3"},
             {"sample", "--what", "exch", "--d", "4", "--r", "0.4", "--nu", "2", "--n", "5000", "--seed", "11"}}) {
        CHECK(run(args).out == run(args).out);
    }
}
