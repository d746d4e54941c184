#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "rmhd/cli.hpp"
#include "rmhd/json_io.hpp"

using namespace rmhd;
using Catch::Approx;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream f(p);
  f << body;
  return p;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("state json parsing") {
  SECTION("primitive record") {
    const auto j = io::json::parse(R"({"rho":1.0,"v":[0.1,0,0],"B":[1,0,0],"p":0.5})");
    const auto st = io::parse_state(j);
    REQUIRE(st.primitive.has_value());
    CHECK_FALSE(st.conserved.has_value());
    CHECK(st.primitive->rho == 1.0);
    CHECK(st.primitive->v.x == Approx(0.1));
    CHECK(st.primitive->p == 0.5);
  }
  SECTION("conserved record") {
    const auto j = io::json::parse(R"({"D":1.0,"m":[0,0,0],"B":[1,0,0],"E":2.5})");
    const auto st = io::parse_state(j);
    REQUIRE(st.conserved.has_value());
    CHECK(st.conserved->E == 2.5);
  }
  SECTION("malformed records throw") {
    CHECK_THROWS(io::parse_state(io::json::parse(R"({"x":1})")));
    CHECK_THROWS(io::parse_state(
        io::json::parse(R"({"rho":1.0,"v":[0.1,0],"B":[1,0,0],"p":0.5})")));
  }
}

TEST_CASE("report json round trip") {
  RecoveryReport rep;
  rep.status = RecoveryStatus::Converged;
  rep.xi = 3.0;
  rep.iterations = 2;
  rep.initial_kind = InitialKind::XiD;
  rep.trace = {{2.41, -0.29}, {3.0, 0.0}};
  const auto j = io::report_to_json(rep, true);
  CHECK(j.at("status") == "converged");
  CHECK(j.at("xi") == 3.0);
  CHECK(j.at("trace").size() == 2);
  const auto j2 = io::report_to_json(rep, false);
  CHECK_FALSE(j2.contains("trace"));
}

TEST_CASE("cli recover: conserved and primitive inputs") {
  const auto pc =
      write_temp("c2p_state_cons.json",
                 R"({"D":1.0,"m":[0,0,0],"B":[1,0,0],"E":2.5})");
  auto r = run({"recover", "--input", pc.string(), "--eos", "gamma", "--gamma",
                "2"});
  CHECK(r.code == 0);
  auto j = io::json::parse(r.out);
  CHECK(j.at("status") == "converged");
  CHECK(j.at("xi").get<double>() == Approx(3.0));
  CHECK(j.at("primitive").at("p").get<double>() == Approx(1.0));
  CHECK(j.at("primitive").at("v")[0].get<double>() == 0.0);

  const auto pp = write_temp("c2p_state_prim.json",
                             R"({"rho":1.0,"v":[0,0,0],"B":[1,0,0],"p":1.0})");
  r = run({"recover", "--input", pp.string(), "--eos", "gamma", "--gamma", "2",
           "--trace"});
  CHECK(r.code == 0);
  j = io::json::parse(r.out);
  CHECK(j.at("error_v").get<double>() == 0.0);
  CHECK(j.at("trace").size() >= 1);
}

TEST_CASE("cli recover: inadmissible input exits 2") {
  const auto p = write_temp("c2p_state_bad.json",
                            R"({"D":-1.0,"m":[0,0,0],"B":[0,0,0],"E":2.0})");
  const auto r =
      run({"recover", "--input", p.string(), "--eos", "gamma", "--gamma", "2"});
  CHECK(r.code == 2);
  CHECK(io::json::parse(r.out).at("status") == "inadmissible_input");
}

TEST_CASE("cli validation errors exit 1") {
  CHECK(run({"recover"}).code == 1);                       // missing --input
  const auto p = write_temp("c2p_state_v.json",
                            R"({"D":1.0,"m":[0,0,0],"B":[0,0,0],"E":2.0})");
  CHECK(run({"recover", "--input", p.string()}).code == 1);  // gamma missing
  CHECK(run({"recover", "--input", p.string(), "--eos", "gamma", "--gamma",
             "rand"})
            .code == 1);  // rand not allowed here
  CHECK(run({"recover", "--input", p.string(), "--eos", "mathews", "--gamma",
             "2"})
            .code == 1);  // gamma with non-gamma eos
  CHECK(run({"bench", "--suite", "3", "--trials", "10", "--eos", "mathews"})
            .code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("cli bench: csv shape and determinism") {
  const std::vector<std::string> args = {
      "bench", "--suite", "1",      "--trials", "2000", "--seed",
      "42",    "--eos",   "gamma",  "--gamma",  "rand", "--solver",
      "pcp-hybrid"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  std::istringstream is(a.out);
  std::string meta, header, row;
  std::getline(is, meta);
  std::getline(is, header);
  std::getline(is, row);
  CHECK(meta.find("rng=splitmix64") != std::string::npos);
  CHECK(header ==
        "solver,suite,eos,trials,non_pcp,failures,iter_mean,iter_max,err_mean,"
        "err_max,xid_branch_rate,wall_time_s");
  CHECK(row.find("pcp-hybrid,1,gamma:rand,2000,0,0,") == 0);
  // identical up to the wall-time column
  const auto cut = [](const std::string& s) {
    return s.substr(0, s.rfind(','));
  };
  CHECK(cut(row) == cut(b.out.substr(b.out.rfind("pcp-hybrid"))));
}

TEST_CASE("cli bench: per-trial dump") {
  const auto p = std::filesystem::temp_directory_path() / "c2p_per_trial.csv";
  const auto r = run({"bench", "--suite", "2", "--trials", "50", "--seed", "7",
                      "--eos", "mathews", "--per-trial", p.string(), "--out",
                      (std::filesystem::temp_directory_path() / "c2p_stats.csv")
                          .string()});
  REQUIRE(r.code == 0);
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  CHECK(line.find("trial,status,") == 0);
  long rows = 0;
  while (std::getline(f, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 50);
}

TEST_CASE("cli profile: emits the requested grid") {
  const auto r = run({"profile", "--D", "1", "--E", "1e8", "--m2",
                      "9.999999999e15", "--B", "1e4", "--tau", "1", "--eos",
                      "gamma", "--gamma", "1.6666666666666667", "--points",
                      "50"});
  REQUIRE(r.code == 0);
  std::istringstream is(r.out);
  std::string line;
  std::getline(is, line);
  CHECK(line == "xi,f_stable,f_naive,w_stable,w_naive,fb_sign");
  long rows = 0;
  while (std::getline(is, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 50);
}

TEST_CASE("cli verify: clean report exits 0") {
  const auto r = run({"verify", "--suite", "1", "--trials", "10", "--seed",
                      "3", "--eos", "gamma", "--gamma", "rand",
                      "--grid-points", "64"});
  REQUIRE(r.code == 0);
  const auto j = io::json::parse(r.out);
  CHECK(j.at("ok") == true);
  CHECK(j.at("states") == 10);
  CHECK(j.at("rng") == "splitmix64");
}
