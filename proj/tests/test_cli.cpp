#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"

#include "../tools/cli.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using belief::cli::dispatch;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("belief-cli-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
            std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  return nlohmann::json::parse(f);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("gen writes data and ground truth") {
  TempDir dir;
  const std::string data = dir / "parity.csv";
  const Run r = run({"gen", "parity33", "-o", data, "--seed", "3"});
  CHECK(r.code == 0);
  CHECK(fs::exists(data));
  const auto truth = read_json(data + ".truth.json");
  CHECK(truth["relevant"] == nlohmann::json({0, 1, 2}));
  CHECK(run({"gen", "parity33", "-o", dir / "p.svm", "--format", "libsvm"}).code == 0);
  CHECK(fs::exists(dir / "p.svm"));
  CHECK(run({"gen", "nosuch", "-o", dir / "x"}).code == 1);
}

TEST_CASE("select, rank and mrmr on a generated file") {
  TempDir dir;
  const std::string data = dir / "parity.csv";
  REQUIRE(run({"gen", "parity33", "-o", data}).code == 0);
  const std::vector<std::string> nominal = {"--nominal", "0,1,2,3,4,5,6,7,8,9,10,11"};

  std::vector<std::string> args = {"select", "-i", data, "--k", "3", "--sample-rate", "1",
                                   "--nfeat", "3", "-o", dir / "sel.json",
                                   "--dump-redundancy", dir / "red.json"};
  args.insert(args.end(), nominal.begin(), nominal.end());
  const Run sel = run(args);
  CHECK(sel.code == 0);
  const auto doc = read_json(dir / "sel.json");
  REQUIRE(doc["selected"].size() == 3);
  std::set<int> picked;
  for (const auto& s : doc["selected"]) picked.insert(s["feature"].get<int>());
  CHECK(picked == std::set<int>{0, 1, 2});
  CHECK(read_json(dir / "red.json").contains("pairs"));

  const Run ev = run({"eval", "--truth", data + ".truth.json", "--selection", dir / "sel.json"});
  CHECK(ev.code == 0);
  CHECK(nlohmann::json::parse(ev.out)["success"] == 1.0);

  const Run rank = run({"rank", "-i", data, "--k", "3", "--sample-rate", "1", "--text"});
  CHECK(rank.code == 0);
  CHECK(std::count(rank.out.begin(), rank.out.end(), '\n') == 12);

  const Run mrmr = run({"mrmr", "--dataset", "parity33", "--nfeat", "4"});
  CHECK(mrmr.code == 0);
  CHECK(nlohmann::json::parse(mrmr.out)["selected"].size() == 4);
}

TEST_CASE("bench reports locators within their bound") {
  const Run r = run({"bench", "--dataset", "madelon", "--k", "5", "--sample-rate", "0.01",
                     "--partitions", "4", "--nfeat", "5"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["locator_count"].get<std::uint64_t>() <= doc["locator_bound"].get<std::uint64_t>());
  CHECK(doc["locator_bytes"].get<std::uint64_t>() < doc["full_instance_bytes"].get<std::uint64_t>());
  CHECK(doc["scores"].contains("success"));
}

TEST_CASE("eval cross-validation") {
  const Run r = run({"eval", "--dataset", "parity33", "--folds", "4", "--k", "3",
                     "--sample-rate", "1", "--nfeat", "3", "--method", "belief+mcr"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["cross_validation"]["folds"].size() == 4);
  CHECK(doc["cross_validation"]["accuracy"]["mean"].get<double>() > 0.9);
}

TEST_CASE("errors map to exit codes and leave no output") {
  TempDir dir;
  const std::string out = dir / "out.json";
  const Run missing = run({"select", "-i", dir / "absent.csv", "-o", out});
  CHECK(missing.code == 2);
  CHECK_FALSE(fs::exists(out));
  CHECK_FALSE(fs::exists(out + ".partial"));
  CHECK(missing.err.find("error") != std::string::npos);

  {
    std::ofstream bad(dir / "bad.svm");
    bad << "1 3:1 2:1\n";
  }
  CHECK(run({"rank", "-i", dir / "bad.svm", "--format", "libsvm", "-o", out}).code == 2);
  CHECK_FALSE(fs::exists(out));

  CHECK(run({"explode"}).code == 1);
  CHECK(run({}).code == 1);
  CHECK(run({"select", "--dataset", "parity33", "--bogus"}).code == 1);
  CHECK(run({"select", "--dataset", "parity33", "--k", "0"}).code == 1);
  CHECK(run({"select", "--dataset", "parity33", "--nfeat", "40"}).code == 1);
  CHECK(run({"eval", "--dataset", "parity33"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

}
