#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "cvlearn/config.hpp"
#include "cvlearn/io.hpp"
#include "cvlearn/runner.hpp"

using namespace cvlearn;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CVLEARN_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

/// Drops the wall-clock column so reruns compare byte-identically.
std::string strip_wall(const std::string& csv) {
  std::stringstream in(csv), out;
  std::string line;
  while (std::getline(in, line)) {
    const auto pos = line.rfind(',');
    out << line.substr(0, pos) << "\n";
  }
  return out.str();
}

}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = parse_config_text(
      "kind = \"prob\"\n"
      "# comment\n"
      "[prob]\n"
      "state = \"vacuum\"\n"
      "n = 1\n"
      "outcome = [0.0, 0.0]\n");
  CHECK(cfg.text("", "kind") == "prob");
  CHECK(cfg.text("prob", "state") == "vacuum");
  CHECK(cfg.number("prob", "n") == 1.0);
  CHECK(cfg.numbers("prob", "outcome").size() == 2);
  CHECK_NOTHROW(validate_config_schema(cfg));
  CHECK(cfg.hash() == parse_config_text(cfg.canonical()).hash());

  CHECK_THROWS_AS(parse_config_text("kind = \n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("a = 1\na = 2\n"), ConfigError);
  const auto bad = parse_config_text("kind = \"prob\"\n[prob]\nbogus_key = 1\n");
  CHECK_THROWS_AS(validate_config_schema(bad), ConfigError);
  const auto wrong_section = parse_config_text("kind = \"prob\"\n[learn]\nT = 10\n");
  CHECK_THROWS_AS(validate_config_schema(wrong_section), ConfigError);
}

TEST_CASE("minimal prob config produces the unit probability row") {
  const std::string cfg_path = "/tmp/cvlearn_prob_cfg.txt";
  const std::string csv_path = "/tmp/cvlearn_prob_out.csv";
  spit(cfg_path,
       "kind = \"prob\"\n[prob]\nstate = \"vacuum\"\nchannel = \"identity\"\n"
       "effect = \"heterodyne\"\nn = 1\nout_csv = \"" + csv_path + "\"\n");
  CHECK(run_config(cfg_path) == 0);
  const std::string csv = slurp(csv_path);
  CHECK(csv.find("kind,n,probability,density") != std::string::npos);
  CHECK(csv.find("prob,1,1,") != std::string::npos);

  // Re-running produces identical bytes.
  const std::string again = csv_path + ".2";
  spit(cfg_path,
       "kind = \"prob\"\n[prob]\nstate = \"vacuum\"\nchannel = \"identity\"\n"
       "effect = \"heterodyne\"\nn = 1\nout_csv = \"" + again + "\"\n");
  CHECK(run_config(cfg_path) == 0);
  CHECK(slurp(csv_path) == slurp(again));
}

TEST_CASE("schema errors exit with code 2") {
  const std::string cfg_path = "/tmp/cvlearn_bad_cfg.txt";
  spit(cfg_path, "kind = \"prob\"\n[prob]\nnot_a_key = 3\n");
  CHECK(run_config(cfg_path) == 2);
  spit(cfg_path, "no_kind_here = 1\n");
  CHECK(run_config(cfg_path) == 2);
}

TEST_CASE("sweep config yields the full grid with deterministic metrics") {
  const std::string cfg_path = "/tmp/cvlearn_sweep_cfg.txt";
  const std::string csv_path = "/tmp/cvlearn_sweep_out.csv";
  std::ostringstream cfg;
  cfg << "kind = \"sweep\"\n[sweep]\nn = [1]\nT = [40, 80, 160]\nseeds = [1, 2]\n"
      << "evals = 500\nn_test = 150\nout_csv = \"" << csv_path << "\"\n";
  spit(cfg_path, cfg.str());
  CHECK(run_config(cfg_path) == 0);
  const std::string first = slurp(csv_path);
  // Header plus 1 * 3 * 2 rows.
  CHECK(std::count(first.begin(), first.end(), '\n') == 7);
  CHECK(run_config(cfg_path) == 0);
  const std::string second = slurp(csv_path);
  CHECK(strip_wall(first) == strip_wall(second));
}

TEST_CASE("scaling summary from synthetic rows") {
  // Gap falling exactly as T^{-1/2} and threshold T* growing as n^2.
  std::vector<SweepRow> rows;
  for (int n : {1, 2, 3}) {
    for (int t : {100, 400, 1600}) {
      for (std::uint64_t s : {1ULL, 2ULL}) {
        SweepRow r;
        r.setting = "synthetic";
        r.n = n;
        r.train_count = t;
        r.seed = s;
        r.eta = 0.9 * n / std::sqrt(static_cast<double>(t));
        rows.push_back(r);
      }
    }
  }
  const auto summary = sweep_scaling(rows, 0.05, 200, 5);
  CHECK(summary.gap_vs_t.slope == doctest::Approx(-0.5).epsilon(0.02));
  // T* solves 0.9 n / sqrt(T) = target -> T* = (0.9 n / 0.05)^2 ~ n^2.
  CHECK(summary.t_needed_vs_n.slope == doctest::Approx(2.0).epsilon(0.05));

  std::vector<SweepRow> tiny(rows.begin(), rows.begin() + 2);
  CHECK_THROWS_AS(sweep_scaling(tiny, 0.05, 10, 1), ConfigError);
}

TEST_CASE("cli binary round trips") {
  SUBCASE("make then validate a cat state") {
    CHECK(run_cli("make cat --alpha 1.2 --sign minus --out /tmp/cvlearn_cat.json") == 0);
    CHECK(run_cli("validate --in /tmp/cvlearn_cat.json") == 0);
  }
  SUBCASE("make then validate a grid state") {
    CHECK(run_cli("make gkp --eps 0.1 --L 2 --out /tmp/cvlearn_gkp.json") == 0);
    CHECK(run_cli("validate --in /tmp/cvlearn_gkp.json") == 0);
  }
  SUBCASE("bound subcommand runs") {
    CHECK(run_cli("bound --setting gg --n 2 --eps 0.1 --delta 0.01 --b1 2 --b2 3 --b3 0.5") == 0);
  }
  SUBCASE("sample requires a target file") {
    const json doc = to_json(vacuum_state(1));
    write_json_file("/tmp/cvlearn_vac.json", doc);
    CHECK(run_cli("sample --target /tmp/cvlearn_vac.json --T 20 --seed 3 "
                  "--out /tmp/cvlearn_samples.json") == 0);
    const json samples = load_json_file("/tmp/cvlearn_samples.json");
    CHECK(samples.at("samples").size() == 20);
  }
  SUBCASE("unknown flags exit nonzero") {
    CHECK(run_cli("bound --no-such-flag 1") != 0);
  }
}

TEST_CASE("golden configs keep parsing") {
  for (const char* name : {"prob_minimal.cfg", "sweep_small.cfg", "bound_gg.cfg",
                           "dims_fg.cfg", "task_binary.cfg"}) {
    const std::string path = std::string(GOLDEN_CONFIG_DIR) + "/" + name;
    ExperimentConfig cfg;
    CHECK_NOTHROW(cfg = parse_config_file(path));
    CHECK_NOTHROW(validate_config_schema(cfg));
  }
}

TEST_CASE("runtime failures exit with code 1") {
  // A state document that parses but whose covariance is so ill-conditioned
  // that the inversion guard trips at run time.
  const std::string state_path = "/tmp/cvlearn_singular_state.json";
  spit(state_path,
       "{\"n\": 1, \"mean\": [0.0, 0.0], \"cov\": [[1.0e14, 0.0], [0.0, 0.01]]}");
  const std::string cfg_path = "/tmp/cvlearn_runtime_cfg.txt";
  spit(cfg_path,
       "kind = \"prob\"\n[prob]\nstate = \"" + state_path +
           "\"\nchannel = \"identity\"\neffect = \"heterodyne\"\nn = 1\n");
  CHECK(run_config(cfg_path) == 1);
}

TEST_CASE("json round trips") {
  const auto st = vacuum_state(2);
  const auto back = gaussian_state_from_json(to_json(st));
  CHECK((back.mean - st.mean).norm() == 0.0);
  CHECK((back.cov - st.cov).norm() == 0.0);

  const auto cat = make_cat_state({1.1, -0.2}, CatSign::minus);
  const auto cat_back = gg_state_from_json(to_json(cat));
  REQUIRE(cat_back.components.size() == cat.components.size());
  for (std::size_t i = 0; i < cat.components.size(); ++i) {
    CHECK(std::abs(cat_back.components[i].coeff - cat.components[i].coeff) == 0.0);
    CHECK((cat_back.components[i].mean - cat.components[i].mean).norm() == 0.0);
  }

  PhotoCountEffect eff;
  eff.cutoff = 3;
  eff.weights[{0}] = 0.25;
  eff.weights[{2}] = 0.5;
  const auto eff_back = photocount_effect_from_json(to_json(eff));
  CHECK(eff_back.cutoff == 3);
  CHECK(eff_back.weights.at({2}) == 0.5);

  const Target t = target_from_json(to_json(Target::from_gg(cat)));
  CHECK(t.is_gg);
}
