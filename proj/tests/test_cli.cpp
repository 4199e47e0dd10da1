#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "asep/distribution.hpp"
#include "cli.hpp"

using namespace asep;
using namespace asep::cli;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& csv) {
  std::vector<std::string> lines;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  return lines;
}

std::string without_timestamp(const std::string& csv) {
  std::string s;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# timestamp:", 0) != 0) s += line + "\n";
  return s;
}

}  // namespace

TEST_CASE("integer grids and real lists") {
  CHECK(parse_int_grid("-4:4") == std::vector<long>{-4, -3, -2, -1, 0, 1, 2, 3, 4});
  CHECK(parse_int_grid("-3:-1") == std::vector<long>{-3, -2, -1});
  CHECK(parse_int_grid("1,3,-5") == std::vector<long>{1, 3, -5});
  CHECK(parse_int_grid("7") == std::vector<long>{7});
  CHECK_THROWS(parse_int_grid("3:1"));
  CHECK_THROWS(parse_int_grid("a"));
  CHECK_THROWS(parse_int_grid("1,,2"));
  CHECK(parse_real_list("10,25,50") == std::vector<double>{10, 25, 50});
  CHECK_THROWS(parse_real_list("1.5x"));
}

TEST_CASE("emit_table with no rows writes manifest and header only") {
  Table t;
  t.columns = {"x", "value"};
  RunManifest m;
  m.command = "cdf";
  const std::string s = emit_table(t, m, Format::csv);
  const auto lines = data_lines(s);
  REQUIRE(lines.size() == 1);
  CHECK(lines[0] == "x,value");
  CHECK(s.find("# schema_version: 1") != std::string::npos);
  CHECK(s.find("# hash: ") != std::string::npos);
}

TEST_CASE("determinism hash ignores the timestamp only") {
  RunManifest a;
  a.command = "cdf";
  a.params["p"] = 0.3;
  RunManifest b = a;
  b.timestamp = "1999-01-01T00:00:00Z";
  CHECK(a.determinism_hash() == b.determinism_hash());
  b.params["p"] = 0.31;
  CHECK(a.determinism_hash() != b.determinism_hash());
  CHECK(fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("cdf subcommand") {
  const auto r = run({"cdf", "--p", "0.3", "--x", "-4:4", "--t", "1", "--no-error-estimate"});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 10);
  CHECK(lines[0] == "x,t,value,method,err_estimate,residue,cross_check");
  for (int i = 0; i < 9; ++i) CHECK(lines[static_cast<std::size_t>(i) + 1].rfind(std::to_string(i - 4) + ",", 0) == 0);

  // 17 significant digits round-trip exactly
  const std::string row = lines[5];  // x = 0
  const auto c1 = row.find(',', row.find(',') + 1);
  const double printed = std::strtod(row.c_str() + c1 + 1, nullptr);
  CdfOptions opt;
  opt.estimate_error = false;
  CHECK(printed == cdf_contour(ModelParams(0.3), 1, 0, 1, opt).value);
}

TEST_CASE("json output round-trips values") {
  const auto r = run({"cdf", "--x", "-1,0", "--t", "0.5", "--format", "json", "--no-error-estimate"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["columns"][0] == "x");
  CHECK(j["manifest"]["command"] == "cdf");
  CHECK(j["rows"].size() == 2);
  CdfOptions opt;
  opt.estimate_error = false;
  CHECK(j["rows"][1][2].get<double>() == cdf_contour(ModelParams(0.3), 1, 0, 0.5, opt).value);
}

TEST_CASE("reruns are byte-identical apart from the timestamp") {
  const std::vector<std::string> args{"simulate", "--x", "-2:2", "--t", "1", "--trials", "2000", "--seed", "4"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(without_timestamp(a.out) == without_timestamp(b.out));
  CHECK(a.out.find("# seed: 4") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run({"cdf", "--p", "1.5", "--x", "0", "--t", "1"}).code == ExitCode::bad_arguments);
  const auto regime = run({"cdf", "--p", "0.3", "--t", "500", "--m", "1", "--x", "0"});
  CHECK(regime.code == ExitCode::numerical_failure);
  CHECK(regime.err.find("precision-regime") != std::string::npos);
  const auto unknown = run({"cdf", "--x", "0", "--t", "1", "--bogus"});
  CHECK(unknown.code == ExitCode::bad_arguments);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == ExitCode::bad_arguments);
  CHECK(run({"cdf", "--x", "5:1", "--t", "1"}).code == ExitCode::bad_arguments);
  CHECK(run({"series", "--m", "2", "--x", "0", "--k-max", "1"}).code == ExitCode::bad_arguments);
  CHECK(run({"--help"}).code == ExitCode::ok);
}

TEST_CASE("environment precision override is recorded") {
  setenv("ASEP_FREDHOLM_PRECISION", "extended", 1);
  const auto r = run({"cdf", "--x", "0", "--t", "0.5", "--nodes", "32", "--no-error-estimate"});
  unsetenv("ASEP_FREDHOLM_PRECISION");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("\"precision\":\"extended\"") != std::string::npos);
}

TEST_CASE("other subcommands produce tables") {
  const auto e = run({"eigen", "--count", "3"});
  REQUIRE(e.code == 0);
  CHECK(data_lines(e.out).size() == 4);
  const auto s = run({"series", "--x", "1", "--t", "0.3", "--k-max", "2"});
  REQUIRE(s.code == 0);
  CHECK(data_lines(s.out).size() == 3);
  const auto tr = run({"traces", "--n", "1:2", "--y", "0", "--t", "4"});
  REQUIRE(tr.code == 0);
  CHECK(data_lines(tr.out).size() == 3);
  const auto sc = run({"scaling", "--y", "0", "--t", "4"});
  REQUIRE(sc.code == 0);
  CHECK(data_lines(sc.out).size() == 2);
  CHECK(run({"verify", "--suite", "identities", "--seed", "7"}).code == ExitCode::ok);
}
