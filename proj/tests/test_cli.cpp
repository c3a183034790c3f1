#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "doctest.h"
#include "spectralab/cli.hpp"
#include "spectralab/io.hpp"

using namespace spectralab;
using io::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
  json report() const { return json::parse(out); }
};

Result call(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST_CASE("usage and exit codes") {
  auto r = call({});
  CHECK(r.code == 2);
  CHECK(r.err.find("Subcommands") != std::string::npos);
  r = call({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(r.err.find("spectrum") != std::string::npos);
  CHECK(call({"--help"}).code == 0);
  CHECK(call({"--version"}).out == cli::version() + "\n");
  CHECK(call({"spectrum", "--k", "3"}).code == 2);  // no mesh source
  CHECK(call({"spectrum", "--builtin", "sphere:2", "--mesh", "x.off"}).code == 2);
  CHECK(call({"spectrum", "--builtin", "cylinder:3"}).code == 2);
  CHECK(call({"spectrum", "--builtin", "sphere:0", "--k", "20"}).code == 2);
  CHECK(call({"spectrum", "--mesh", "/nonexistent.off"}).code == 2);
  CHECK(call({"spectrum", "--builtin", "sphere:3", "--k", "3", "--tol", "1e-14"}).code == 3);
}

TEST_CASE("spectrum report schema") {
  auto r = call({"spectrum", "--builtin", "sphere:3", "--k", "4"});
  REQUIRE(r.code == 0);
  auto j = r.report();
  for (const char* key : {"scenario", "eigenvalues", "area", "normalized", "counting", "bound", "margin", "index",
                          "nullity", "band", "version", "inputs", "tolerances", "seed"})
    CHECK(j.contains(key));
  CHECK(j["version"] == cli::version());
  CHECK(j["scenario"] == "sphere:3");
  CHECK(j["inputs"]["builtin:sphere:3"] == io::fnv1a("sphere:3"));
  CHECK(j["tolerances"]["solver"] == 1e-8);
  CHECK(j["eigenvalues"].size() == 5);
  const double l1 = j["normalized"][1];
  CHECK(std::abs(l1 - 8 * std::numbers::pi) < 0.01 * 8 * std::numbers::pi);
  CHECK(j["counting"]["N"] == 1);
  CHECK(j["bound"] == doctest::Approx(8 * std::numbers::pi));

  auto b = call({"spectrum", "--builtin", "sphere:3", "--k", "4", "--band", "0.1", "--lambda", "2.5"}).report();
  CHECK(b["index"] == 1);
  CHECK(b["nullity"] == 3);
  CHECK(b["counting"]["N"] == 4);
}

TEST_CASE("yy-check gates on the margin") {
  // The r3 polyhedral sphere overshoots 8 pi by about 0.1%.
  CHECK(call({"yy-check", "--builtin", "sphere:3"}).code == 0);
  auto strict = call({"yy-check", "--builtin", "sphere:3", "--mesh-tol", "0"});
  CHECK(strict.code == 1);
  CHECK(strict.report()["pass"] == false);
  auto t = call({"yy-check", "--builtin", "torus-hex:18"}).report();
  CHECK(t["yang_yau"]["genus"] == 1);
  CHECK(t["margin"].get<double>() > 0);
}

TEST_CASE("index and the index bound") {
  auto r = call({"index", "--builtin", "sphere:3", "--band", "0.1"});
  REQUIRE(r.code == 0);
  auto j = r.report();
  CHECK(j["index"] == 1);
  CHECK(j["nullity"] == 3);
  CHECK(j["routes_agree"] == true);
  CHECK(call({"index", "--builtin", "cover-cube:4", "--band", "0.1", "--h0", "3"}).code == 0);
  auto bad = call({"index", "--builtin", "cover-cube:4", "--band", "0.1", "--h0", "4"});
  CHECK(bad.code == 1);
  CHECK(bad.report()["index_bound"]["bound"] == doctest::Approx(5.0 / 3));
  CHECK(call({"index", "--builtin", "torus-hex:12"}).code == 2);  // no projection
}

TEST_CASE("rr and pencil") {
  TempDir dir("spectralab_cli_rr");
  write(dir / "g2.json", R"({"model": "hyperelliptic-odd", "coeffs": ["0", "-1", "0", "0", "0", "1"]})");
  write(dir / "d.json", R"([{"place": {"x": "0", "sheet": "branch"}, "mult": 3}, {"place": {"x": "inf0"}, "mult": -1}])");
  auto r = call({"rr", "--curve", dir / "g2.json", "--divisor", dir / "d.json"});
  REQUIRE(r.code == 0);
  auto j = r.report();
  CHECK(j["riemann_roch"]["ok"] == true);
  CHECK(j["riemann_roch"]["rhs"] == 2 - 2 + 1);
  CHECK(j["inputs"][dir / "g2.json"] == io::fnv1a_file(dir / "g2.json"));

  write(dir / "bad.json", R"({"model": "hyperelliptic-odd", "coeffs": ["0", "0", "1"]})");
  CHECK(call({"rr", "--curve", dir / "bad.json", "--divisor", dir / "d.json"}).code == 2);
  CHECK(call({"rr", "--curve", dir / "g2.json"}).code == 2);

  write(dir / "f.json", R"({"a": ["0", "1"]})");
  auto p = call({"pencil", "--curve", dir / "g2.json", "--function", dir / "f.json"}).report();
  CHECK(p["pencil"]["degree"] == 2);
  CHECK(p["pencil"]["base_point_free"] == true);
  CHECK(p["h0_doubled_g12"] == 3);

  auto a = call({"pencil", "--curve", dir / "g2.json", "--probe", "2", "--samples", "12", "--seed", "9"});
  auto b = call({"pencil", "--curve", dir / "g2.json", "--probe", "2", "--samples", "12", "--seed", "9"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.report()["seed"] == 9);
  CHECK(a.report()["probe"]["label"] == "probe: randomized evidence, not a proof");
  CHECK(call({"pencil", "--curve", dir / "g2.json"}).code == 2);
}

TEST_CASE("weierstrass and periods") {
  TempDir dir("spectralab_cli_w");
  REQUIRE(call({"catalog", "--out-dir", dir.path.string(), "--refinement", "2"}).code == 0);
  auto g3 = call({"weierstrass", "--data", dir / "weierstrass/genus3_x7m1.json", "--index", "1"});
  REQUIRE(g3.code == 0);
  CHECK(g3.report()["branching"]["B"]["degree"] == 0);
  CHECK(g3.report()["h0_k_minus_b"] == 3);
  CHECK(call({"weierstrass", "--data", dir / "weierstrass/genus3_x7m1.json", "--index", "0"}).code == 1);

  auto en = call({"weierstrass", "--data", dir / "weierstrass/enneper.json", "--grid", "10"});
  CHECK(en.code == 0);
  CHECK(en.report()["local"]["failures"] == 0);
  CHECK(call({"weierstrass", "--data", dir / "weierstrass/enneper.json", "--index", "1"}).code == 2);

  // phi = x on genus 2 has deg(K - 2 P_phi) < 0.
  write(dir / "g2w.json",
        R"({"domain": {"model": "hyperelliptic-odd", "coeffs": ["0", "-1", "0", "0", "0", "1"]}, "phi": "x", "omega": {"a": ["1"]}})");
  CHECK(call({"weierstrass", "--data", dir / "g2w.json"}).code == 2);

  auto h = call({"periods", "--data", dir / "weierstrass/helicoid.json", "--circle", "0,0,1", "--circle", "0.2,0.1,3"});
  REQUIRE(h.code == 0);
  for (auto& p : h.report()["periods"]) {
    CHECK(std::abs(p["period"][2].get<double>() + 4 * std::numbers::pi) < 1e-8);
    CHECK(p["agrees"] == true);
  }
  write(dir / "loops.json", R"([{"circle": {"center": [0, 0], "radius": 2}}, {"polygon": [[1, 1], [-1, 1], [-1, -1], [1, -1]]}])");
  auto c = call({"periods", "--data", dir / "weierstrass/catenoid.json", "--loops", dir / "loops.json"});
  REQUIRE(c.code == 0);
  for (auto& p : c.report()["periods"])
    for (int k = 0; k < 3; ++k) CHECK(std::abs(p["period"][k].get<double>()) < 1e-8);
  CHECK(call({"periods", "--data", dir / "weierstrass/catenoid.json"}).code == 2);
  CHECK(call({"periods", "--data", dir / "weierstrass/catenoid.json", "--circle", "1,0,1"}).code == 2);  // through the pole
}

TEST_CASE("branching-audit") {
  TempDir dir("spectralab_cli_audit");
  auto all = call({"branching-audit", "--catalog"});
  REQUIRE(all.code == 0);
  CHECK(all.report()["count"] == 12);

  json rec = io::record_to_json(ledger::power_map_record(3));
  io::write_json(rec, dir / "z3.json");
  CHECK(call({"branching-audit", "--records", dir / "z3.json"}).code == 0);
  rec["total_branching"] = 5;
  io::write_json(json::array({io::record_to_json(ledger::veronese_record()), rec}), dir / "bad.json");
  auto bad = call({"branching-audit", "--records", dir / "bad.json"});
  CHECK(bad.code == 1);
  CHECK(bad.report()["records"][0]["pass"] == true);
  CHECK(bad.report()["records"][1]["pass"] == false);
  rec["target_dim"] = 3;
  io::write_json(rec, dir / "invalid.json");
  CHECK(call({"branching-audit", "--records", dir / "invalid.json"}).code == 2);
  CHECK(call({"branching-audit"}).code == 2);
}

TEST_CASE("maximize writes trace and density") {
  TempDir dir("spectralab_cli_max");
  auto r = call({"maximize", "--builtin", "sphere:2", "--amplitude", "0.4", "--seed", "4", "--max-iters", "4",
                 "--trace", dir / "t.csv", "--density-out", dir / "rho.json"});
  REQUIRE(r.code == 0);
  auto j = r.report();
  CHECK(j["seed"] == 4);
  CHECK(j["monotone"] == true);
  CHECK(j["stationarity"]["label"] == "locally maximal candidate");
  std::ifstream csv(dir / "t.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("iter,lambda1_bar", 0) == 0);
  auto again = call({"spectrum", "--builtin", "sphere:2", "--density", dir / "rho.json", "--k", "3"}).report();
  CHECK(again["normalized"][1].get<double>() == doctest::Approx(j["lambda1_bar"].get<double>()).epsilon(1e-8));

  write(dir / "cfg.json", R"({"max_iters": 2, "band": 0.02})");
  auto c = call({"maximize", "--builtin", "sphere:2", "--config", dir / "cfg.json", "--amplitude", "0.3"}).report();
  CHECK(c["config"]["band"] == 0.02);
  CHECK(c["iterations"].get<int>() <= 2);
  write(dir / "cfg.json", R"({"max_iter": 2})");
  CHECK(call({"maximize", "--builtin", "sphere:2", "--config", dir / "cfg.json"}).code == 2);
}

TEST_CASE("catalog contents") {
  TempDir dir("spectralab_cli_catalog");
  auto r = call({"catalog", dir.path.string(), "--refinement", "2"});
  REQUIRE(r.code == 0);
  auto manifest = io::read_json(dir / "manifest.json");
  std::set<std::string> paths;
  for (auto& f : manifest["files"]) {
    paths.insert(f["path"]);
    CHECK(!f["provenance"].get<std::string>().empty());
    CHECK(f["fnv1a"] == io::fnv1a_file(dir / f["path"].get<std::string>()));
  }
  for (const char* p : {"covers/octahedral.json", "weierstrass/catenoid.json", "weierstrass/helicoid.json",
                        "records/catalog.json", "meshes/sphere_r2.off", "curves/genus3_x7m1.json"})
    CHECK(paths.count(p) == 1);
  auto recs = io::records_from_json(io::read_json(dir / "records/catalog.json"));
  int powers = 0;
  for (auto& rec : recs) powers += rec.name.rfind("z^", 0) == 0;
  CHECK(powers == 6);
  auto s = call({"spectrum", "--mesh", dir / "meshes/cover_octahedral_r2.off", "--pullback", "--k", "3"});
  CHECK(s.code == 0);
  CHECK(s.report()["mesh"]["genus"] == 2);
  auto spec = call({"spectrum", "--cover-spec", dir / "covers/octahedral.json", "--pullback", "--k", "3"});
  CHECK(spec.report()["normalized"] == s.report()["normalized"]);

  write(dir / "file", "x");
  CHECK(call({"catalog", "--out-dir", dir / "file/sub"}).code == 2);
}

TEST_CASE("batch runs in the worker pool") {
  TempDir dir("spectralab_cli_batch");
  json runs = json::array({json::array({"spectrum", "--builtin", "sphere:2", "--k", "3"}),
                           json::array({"yy-check", "--builtin", "sphere:3", "--mesh-tol", "0"}),
                           json::array({"branching-audit", "--catalog", "--refinement", "2"})});
  io::write_json(runs, dir / "runs.json");
  ::setenv("SPECTRALAB_THREADS", "1", 1);
  auto one = call({"batch", "--scenarios", dir / "runs.json"});
  ::setenv("SPECTRALAB_THREADS", "3", 1);
  auto three = call({"batch", "--scenarios", dir / "runs.json"});
  ::unsetenv("SPECTRALAB_THREADS");
  CHECK(one.code == 1);
  CHECK(three.code == 1);
  CHECK(three.report()["threads"] == 3);
  for (int i = 0; i < 3; ++i) CHECK(one.report()["runs"][i] == three.report()["runs"][i]);
  CHECK(one.report()["runs"][1]["exit_code"] == 1);
}
