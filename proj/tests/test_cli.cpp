#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "earnshaw/cli.hpp"
#include "earnshaw/config.hpp"
#include "earnshaw/csv.hpp"
#include "earnshaw/errors.hpp"
#include "json.hpp"

using namespace earnshaw;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

class Workspace {
 public:
  Workspace() : dir_(fs::temp_directory_path() / ("earnshaw_cli_" + std::to_string(counter_++))) {
    fs::create_directories(dir_);
  }
  ~Workspace() { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto p = (dir_ / name).string();
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  static inline int counter_ = 0;
  fs::path dir_;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "earnshaw");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kPecPair = R"({
  "objects": [
    {"label": "A", "radius": 1.0, "eps": "pec"},
    {"label": "B", "center": [0, 0, 4], "radius": 1.0, "eps": "pec"}
  ],
  "energy": {"l_max": 6, "adapt_lmax": false, "fixed_nodes": 24},
  "stability": {"l_max": 5, "nodes": 16, "decomposition": false}
})";

}  // namespace

TEST_CASE("classify: two perfect-conductor spheres") {
  Workspace w;
  const auto r = run({"classify", w.write("c.json", kPecPair)});
  REQUIRE(r.code == 0);
  const auto t = csv::parse_csv(r.out);
  REQUIRE(t.rows.size() == 2);
  for (const auto& row : t.rows) {
    CHECK(std::get<std::string>(row[1]) == "ClassI");
    CHECK(std::get<double>(row[2]) == 1.0);
    CHECK(std::get<double>(row[3]) == 1.0);
  }
  CHECK(t.comments.at(0).find("length unit") != std::string::npos);
}

TEST_CASE("plates: PEC/PEC at unit gap") {
  Workspace w;
  const auto r = run({"plates", w.write("p.json", R"({"plates": {"plate1": {"eps": "pec"}, "plate2": {"eps": "pec"}, "gaps": [1.0]}})")});
  REQUIRE(r.code == 0);
  const auto t = csv::parse_csv(r.out);
  REQUIRE(t.rows.size() == 1);
  const double e = std::get<double>(t.rows[0][2]);
  const double exact = -std::pow(std::numbers::pi, 2) / 720.0;
  CHECK(std::abs(e / exact - 1.0) < 1e-6);
}

TEST_CASE("energy and force subcommands") {
  Workspace w;
  const auto cfg = w.write("c.json", kPecPair);
  const auto e = run({"energy", cfg});
  REQUIRE(e.code == 0);
  const auto te = csv::parse_csv(e.out);
  CHECK(std::get<double>(te.rows.at(0)[0]) < 0.0);
  CHECK(std::get<double>(te.rows.at(0)[2]) == 6.0);
  const auto f = run({"force", cfg});
  REQUIRE(f.code == 0);
  const auto tf = csv::parse_csv(f.out);
  REQUIRE(tf.rows.size() == 2);
  // Attraction: A is pulled toward +z, B toward -z.
  CHECK(std::get<double>(tf.rows[0][3]) > 0.0);
  CHECK(std::get<double>(tf.rows[1][3]) < 0.0);
}

TEST_CASE("--lmax and --tol override the config") {
  Workspace w;
  const auto r = run({"energy", w.write("c.json", kPecPair), "--lmax", "3"});
  REQUIRE(r.code == 0);
  CHECK(std::get<double>(csv::parse_csv(r.out).rows.at(0)[2]) == 3.0);
  CHECK(run({"energy", w.path("c.json"), "--tol", "-1"}).code == 2);
}

TEST_CASE("sweep output and the empty sweep list") {
  Workspace w;
  nlohmann::json j = nlohmann::json::parse(kPecPair);
  j["sweep"] = {{"target", "B"}, {"offsets", {0.0, 1.0}}};
  const auto r = run({"sweep", w.write("s.json", j.dump())});
  REQUIRE(r.code == 0);
  const auto t = csv::parse_csv(r.out);
  REQUIRE(t.rows.size() == 2);
  CHECK(std::get<double>(t.rows[0][1]) == doctest::Approx(2.0));
  CHECK(std::get<double>(t.rows[1][2]) > std::get<double>(t.rows[0][2]));  // energy rises toward zero with distance

  j["sweep"]["offsets"] = nlohmann::json::array();
  const auto empty = run({"sweep", w.write("e.json", j.dump())});
  CHECK(empty.code == 2);
  CHECK(nlohmann::json::parse(empty.err.substr(0, empty.err.find('\n')))["kind"] == "ValidationError");

  j["sweep"]["offsets"] = {-2.5};  // would push B into A
  CHECK(run({"sweep", w.write("o.json", j.dump())}).code == 2);
}

TEST_CASE("validation errors exit with 2 before any computation") {
  Workspace w;
  nlohmann::json j = nlohmann::json::parse(kPecPair);
  auto code_for = [&](const nlohmann::json& cfg, const char* sub = "energy") {
    return run({sub, w.write("v.json", cfg.dump())}).code;
  };
  auto bad = j;
  bad["objects"][0]["colour"] = "red";
  CHECK(code_for(bad) == 2);
  bad = j;
  bad["surprise"] = 1;
  CHECK(code_for(bad) == 2);
  bad = j;
  bad["objects"][1]["center"] = {0, 0, 1.5};
  CHECK(code_for(bad) == 2);
  bad = j;
  bad["objects"][1]["center"] = {0, 0, 2.0};  // touching: zero gap
  CHECK(code_for(bad) == 2);
  bad = j;
  bad["objects"][0]["eps"] = {{"model", "drude"}, {"omega_p", 1.0}};  // missing gamma
  CHECK(code_for(bad) == 2);
  CHECK(code_for(j, "plates") == 2);  // no plates section
  CHECK(run({"energy", w.write("x.json", "{not json")}).code == 2);
  CHECK(run({"energy", w.path("does_not_exist.json")}).code == 2);
  CHECK(run({"frobnicate", w.path("v.json")}).code == 2);
  CHECK(run({"energy", w.write("c.json", kPecPair), "-o", w.path("no/such/dir/out.csv")}).code == 2);
}

TEST_CASE("a convergence budget failure exits with 3 and reports the partial value") {
  Workspace w;
  nlohmann::json j = nlohmann::json::parse(kPecPair);
  j["energy"] = {{"tol", 1e-14}, {"l_max", 4}, {"adapt_lmax", false}, {"initial_nodes", 4}, {"max_nodes", 8}};
  const auto r = run({"energy", w.write("c.json", j.dump())});
  CHECK(r.code == 3);
  const auto d = nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
  CHECK(d["kind"] == "ConvergenceError");
  CHECK(d["partial_value"].get<double>() < 0.0);
}

TEST_CASE("library errors map to exit codes") {
  CHECK(cli::exit_code_for(TruncationError("x")) == 4);
  CHECK(cli::exit_code_for(ConvergenceError("x", 0.0, 0.0)) == 3);
  CHECK(cli::exit_code_for(PrecisionError("x")) == 3);
  CHECK(cli::exit_code_for(GeometryError("x")) == 2);
  CHECK(cli::exit_code_for(ValidationError("x")) == 2);
  CHECK(cli::error_kind(TruncationError("x")) == "TruncationError");
}

TEST_CASE("output is byte-identical across runs and thread counts") {
  Workspace w;
  const auto cfg = w.write("c.json", kPecPair);
  REQUIRE(run({"stability", cfg, "-o", w.path("a.csv"), "--threads", "1"}).code == 0);
  REQUIRE(run({"stability", cfg, "-o", w.path("b.csv"), "--threads", "4"}).code == 0);
  CHECK(slurp(w.path("a.csv")) == slurp(w.path("b.csv")));
  CHECK(!slurp(w.path("a.csv")).empty());

  const char* mc = R"({"seed": 3, "classical": {"target": "A", "containers": [
      {"label": "A", "shape": "box", "half_extent": [0.5, 0.5, 0.5], "mobile": [{"q": 2, "tether": {"k": 4}}]},
      {"label": "B", "shape": "sphere", "center": [0, 0, 2], "radius": 0.5, "mobile": [{"q": -2, "tether": {"k": 4}}]}],
      "mc": {"steps": 200000, "step_size": 0.4}, "quadrature": {"enabled": false}}})";
  const auto mcfg = w.write("m.json", mc);
  const auto m1 = run({"mc", mcfg});
  const auto m2 = run({"mc", mcfg});
  REQUIRE(m1.code == 0);
  CHECK(m1.out == m2.out);
  const auto m3 = run({"mc", mcfg, "--seed", "4"});
  CHECK(m3.out != m1.out);
  const auto t = csv::parse_csv(m1.out);
  CHECK(std::get<double>(t.rows.at(0)[1]) <= 0.0);
  CHECK(std::isnan(std::get<double>(t.rows.at(0)[6])));
}

TEST_CASE("config parser fills defaults and applies materials") {
  const auto rc = config::parse_run_config(R"({
    "length_unit": "nm", "tau": 0.5,
    "medium": {"eps": 2.0},
    "objects": [{"label": "A", "radius": 1, "eps": {"model": "lorentz", "oscillators": [{"strength": 1, "resonance": 2}]}},
                {"label": "B", "center": [3, 0, 0], "radius": 1, "eps": {"model": "plasma", "omega_p": 5}, "mu": 1.5}]})");
  REQUIRE(rc.casimir);
  CHECK(rc.length_unit == "nm");
  CHECK(rc.casimir->tau == 0.5);
  CHECK(rc.casimir->medium.epsilon(1.0) == 2.0);
  CHECK(materials::eval_epsilon(rc.casimir->objects[1].mu, 1.0) == 1.5);
  CHECK(rc.output == "-");
  CHECK(rc.energy.tol == casimir::EnergyOptions{}.tol);
}
