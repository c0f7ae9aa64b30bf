#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hardylab/experiment.hpp"

using namespace hardylab;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& tag) {
  fs::path p = fs::temp_directory_path() / ("hardylab_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(HARDY_LAB_BIN) + " " + args + " 2>/dev/null";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

const char* kSquare =
    R"({"domain": {"kind": "polygon", "vertices": [[0,0],[1,0],[1,1],[0,1]]}, "j_max": 5})";

}  // namespace

TEST_CASE("cli whitney task writes cubes and a summary") {
  fs::path dir = fresh_dir("whitney");
  write(dir / "cfg.json", kSquare);
  int rc = run_cli("whitney --config " + (dir / "cfg.json").string() +
                   " --out " + (dir / "out").string());
  CHECK(rc == 0);
  std::string csv = slurp(dir / "out" / "cubes_j5.csv");
  CHECK(csv.rfind("level,index_x,index_y,dist_center", 0) == 0);
  std::string summary = slurp(dir / "out" / "summary.json");
  CHECK(summary.find("\"violations\": 0") != std::string::npos);
  CHECK(summary.find("config_hash") != std::string::npos);
  CHECK(summary.find("wall_clock_sec") != std::string::npos);
}

TEST_CASE("cli reruns are byte-identical and independent of --jobs") {
  fs::path dir = fresh_dir("determinism");
  write(dir / "cfg.json",
        R"({"domain": {"kind": "koch", "level": 3}, "j_max": 6, "s": [0.3],
           "p": [2.0], "chain_kind": "john"})");
  std::string cfg = (dir / "cfg.json").string();
  CHECK(run_cli("chains --config " + cfg + " --out " + (dir / "a").string() +
                " --jobs 1") == 0);
  CHECK(run_cli("chains --config " + cfg + " --out " + (dir / "b").string() +
                " --jobs 2") == 0);
  CHECK(slurp(dir / "a" / "john_chains_j6.csv") ==
        slurp(dir / "b" / "john_chains_j6.csv"));

  // homogeneity exercises the norm machinery end to end
  write(dir / "hom.json",
        R"({"domain": {"kind": "polygon", "vertices": [[0,0],[1,0],[1,1],[0,1]]},
           "s": [0.5], "p": [2.0], "q": [2.0], "j_max": 6,
           "radii": [1.0, 0.5, 0.25]})");
  std::string hom = (dir / "hom.json").string();
  CHECK(run_cli("homogeneity --config " + hom + " --out " +
                (dir / "h1").string() + " --jobs 1") == 0);
  CHECK(run_cli("homogeneity --config " + hom + " --out " +
                (dir / "h2").string() + " --jobs 2") == 0);
  CHECK(slurp(dir / "h1" / "homogeneity.csv") ==
        slurp(dir / "h2" / "homogeneity.csv"));
}

TEST_CASE("cli configuration errors exit with status 1") {
  fs::path dir = fresh_dir("config_errors");
  write(dir / "bad_key.json",
        R"({"domain": {"kind": "koch", "level": 2}, "zmax": 4})");
  CHECK(run_cli("whitney --config " + (dir / "bad_key.json").string() +
                " --out " + (dir / "o1").string()) == 1);

  write(dir / "bad_kind.json", R"({"domain": {"kind": "moebius"}})");
  CHECK(run_cli("whitney --config " + (dir / "bad_kind.json").string() +
                " --out " + (dir / "o2").string()) == 1);

  write(dir / "conflict.json",
        R"({"domain": {"kind": "koch", "level": 2}, "task": "dimension"})");
  CHECK(run_cli("whitney --config " + (dir / "conflict.json").string() +
                " --out " + (dir / "o3").string()) == 1);

  write(dir / "bad_grid.json",
        R"({"domain": {"kind": "koch", "level": 2}, "s": [1.3], "p": [2.0]})");
  CHECK(run_cli("chains --config " + (dir / "bad_grid.json").string() +
                " --out " + (dir / "o4").string()) == 1);

  CHECK(run_cli("whitney --config " + (dir / "missing.json").string() +
                " --out " + (dir / "o5").string()) == 1);
}

TEST_CASE("cli invariant violations exit with status 2") {
  fs::path dir = fresh_dir("invariant");
  // a sliver thinner than the finest cube: resolution failure mid-run
  write(dir / "sliver.json",
        R"({"domain": {"kind": "polygon",
            "vertices": [[0,0],[1,0],[1,0.004]]}, "j_max": 2})");
  CHECK(run_cli("whitney --config " + (dir / "sliver.json").string() +
                " --out " + (dir / "out").string()) == 2);
}

TEST_CASE("run_experiment as a library call") {
  fs::path dir = fresh_dir("lib_call");
  std::string diag;
  int rc = run_experiment(kSquare, (dir / "out").string(), 1, {}, &diag,
                          "whitney");
  CHECK(rc == 0);
  CHECK(diag.empty());
  CHECK(fs::exists(dir / "out" / "summary.json"));

  rc = run_experiment("{not json", (dir / "bad").string(), 1, {}, &diag);
  CHECK(rc == 1);
  CHECK(!diag.empty());
}

TEST_CASE("field and domain JSON factories") {
  ScalarField bump = field_from_json(
      R"({"kind":"bump","center":[0.5,0.5],"radius":0.25,"amplitude":2.0})");
  CHECK(bump(Vec2{0.5, 0.5}) == doctest::Approx(2.0));
  CHECK(bump(Vec2{0.9, 0.9}) == 0.0);

  ScalarField poly = field_from_json(R"({"kind":"poly","coeffs":[[1,1,3.0]]})");
  CHECK(poly(Vec2{2.0, 0.5}) == doctest::Approx(3.0));

  ScalarField coord = field_from_json(R"({"kind":"coordinate","axis":1})");
  CHECK(coord(Vec2{0.3, 0.8}) == doctest::Approx(0.8));

  Domain dust = domain_from_json(
      R"({"kind":"cantor_complement","ratio":0.25,"level":2})");
  CHECK(dust.complement_null());
  CHECK_THROWS_AS(domain_from_json(R"({"kind":"nope"})"), Error);
}
