#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

#include "test_paths.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Run run(const std::string& args) {
  const std::string cmd = cli_binary().string() + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path dir() {
  const auto d = fs::temp_directory_path() / "mdlgbc_cli_test";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string iris() { return test_data("iris.csv").string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("train writes a conserving model and a trace") {
  const auto model = dir() / "m.json";
  const auto trace = dir() / "trace.jsonl";
  const auto r = run("train --data " + iris() + " --label-col class --model " + model.string() +
                     " --trace " + trace.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("classes: 3") != std::string::npos);
  CHECK(r.out.find("train seconds") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(model));
  std::size_t total = 0;
  for (const auto& c : j["classes"])
    for (const auto& b : c["balls"]) total += b["n"].get<std::size_t>();
  CHECK(total == 150);
  std::istringstream lines(slurp(trace));
  std::string line;
  std::size_t records = 0;
  while (std::getline(lines, line)) {
    const auto rec = nlohmann::json::parse(line);
    CHECK(rec.contains("L1"));
    CHECK(rec.contains("model"));
    ++records;
  }
  CHECK(records >= 3);
}

TEST_CASE("train rejects a missing label column with exit code 2") {
  const auto r = run("train --data " + iris() + " --label-col species --model " + (dir() / "x.json").string());
  CHECK(r.code == 2);
  CHECK(r.out.find("species") != std::string::npos);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run("").code == 1);
  CHECK(run("train --data " + iris()).code == 1);
  CHECK(run("frobnicate").code == 1);
}

TEST_CASE("predict, with and without scores, and dimension errors") {
  const auto model = dir() / "p.json";
  REQUIRE(run("train --data " + iris() + " --label-col class --model " + model.string()).code == 0);
  const auto out = dir() / "pred.csv";
  auto r = run("predict --model " + model.string() + " --data " + iris() + " --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("accuracy") != std::string::npos);
  std::istringstream rows(slurp(out));
  std::string line;
  std::size_t n = 0;
  std::getline(rows, line);
  CHECK(line == "predicted");
  while (std::getline(rows, line)) ++n;
  CHECK(n == 150);

  r = run("predict --scores --model " + model.string() + " --data " + iris() + " --out " + out.string());
  REQUIRE(r.code == 0);
  std::istringstream scored(slurp(out));
  std::getline(scored, line);
  CHECK(std::count(line.begin(), line.end(), ',') == 3);
  std::getline(scored, line);
  CHECK(std::count(line.begin(), line.end(), ',') == 3);

  const auto narrow = dir() / "narrow.csv";
  std::ofstream(narrow) << "a,b\n1,2\n3,4\n";
  r = run("predict --model " + model.string() + " --data " + narrow.string() + " --out " + out.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("4") != std::string::npos);
  CHECK(r.out.find("2") != std::string::npos);
}

TEST_CASE("predict without a label column") {
  const auto model = dir() / "q.json";
  REQUIRE(run("train --data " + iris() + " --label-col class --model " + model.string()).code == 0);
  const auto bare = dir() / "bare.csv";
  std::ofstream(bare) << "a,b,c,d\n5.1,3.5,1.4,0.2\n6.7,3.0,5.2,2.3\n";
  const auto out = dir() / "bare_pred.csv";
  const auto r = run("predict --model " + model.string() + " --data " + bare.string() + " --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(slurp(out) == "predicted\nsetosa\nvirginica\n");
}

TEST_CASE("crossval reports are byte-identical across runs") {
  const auto a = dir() / "a.json";
  const auto b = dir() / "b.json";
  REQUIRE(run("crossval --data " + iris() + " --label-col class --folds 10 --seed 2035 --report " + a.string()).code == 0);
  REQUIRE(run("crossval --data " + iris() + " --label-col class --report " + b.string() + " --threads 4").code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(dir() / "a.txt") == slurp(dir() / "b.txt"));
  CHECK(fs::exists(dir() / "a.timings.json"));
}

TEST_CASE("crossval with two folds on four samples") {
  const auto four = dir() / "four.csv";
  std::ofstream(four) << "x,class\n0.1,a\n0.2,a\n0.8,b\n0.9,b\n";
  const auto report = dir() / "four.json";
  const auto r = run("crossval --data " + four.string() + " --label-col class --folds 2 --report " + report.string());
  REQUIRE(r.code == 0);
  CHECK(nlohmann::json::parse(slurp(report))["folds"].size() == 2);
}

TEST_CASE("inspect lists classes and honours the filter") {
  const auto model = dir() / "i.json";
  REQUIRE(run("train --data " + iris() + " --label-col class --model " + model.string()).code == 0);
  auto r = run("inspect --model " + model.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("class setosa") != std::string::npos);
  CHECK(r.out.find("class versicolor") != std::string::npos);
  CHECK(r.out.find("class virginica") != std::string::npos);
  CHECK(r.out.find("L_total") != std::string::npos);
  r = run("inspect --model " + model.string() + " --class versicolor");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("class setosa") == std::string::npos);
  CHECK(r.out.find("class versicolor") != std::string::npos);

  auto j = nlohmann::json::parse(slurp(model));
  j["classes"][0]["balls"][0]["weight"] = 0.999;
  const auto tampered = dir() / "tampered.json";
  std::ofstream(tampered) << j.dump();
  r = run("inspect --model " + tampered.string());
  CHECK(r.code == 2);
  CHECK(r.out.find("sum to 1") != std::string::npos);
}

}
