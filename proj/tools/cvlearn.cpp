#include <CLI11.hpp>

#include <complex>
#include <iostream>

#include "cvlearn/bounds.hpp"
#include "cvlearn/io.hpp"
#include "cvlearn/learn.hpp"
#include "cvlearn/runner.hpp"

using namespace cvlearn;

namespace {

int cmd_validate(const std::string& path, double tol) {
  const json doc = load_json_file(path);
  json out;
  if (doc.contains("components")) {
    const GGState st = gg_state_from_json(doc);
    const auto d = validate_gg_state(st, std::max(tol, 1e-7));
    out = {{"type", "gg-state"},
           {"ok", d.ok},
           {"coeff_sum_error", d.coeff_sum_error},
           {"min_re_cov_eigenvalue", d.min_re_cov_eigenvalue},
           {"uncertainty_min_eigenvalue", d.uncertainty_min_eigenvalue}};
  } else if (doc.contains("branches")) {
    const GGChannel ch = gg_channel_from_json(doc);
    out = {{"type", "gg-channel"}, {"ok", validate_gg_channel(ch)}};
  } else if (doc.contains("x_mat")) {
    const auto d = validate_channel(gaussian_channel_from_json(doc), tol);
    out = {{"type", "channel"}, {"ok", d.ok}, {"min_eigenvalue", d.min_eigenvalue}};
  } else if (doc.contains("outcome")) {
    const auto d = validate_effect(general_dyne_effect_from_json(doc), tol);
    out = {{"type", "effect"}, {"ok", d.ok}, {"min_eigenvalue", d.min_eigenvalue}};
  } else if (doc.contains("weights")) {
    out = {{"type", "photocount-effect"},
           {"ok", validate_photocount_effect(photocount_effect_from_json(doc))}};
  } else {
    const auto d = validate_state(gaussian_state_from_json(doc), tol);
    out = {{"type", "state"}, {"ok", d.ok}, {"min_eigenvalue", d.min_eigenvalue}};
  }
  std::cout << out.dump(2) << "\n";
  return out.at("ok").get<bool>() ? 0 : 1;
}

int cmd_sample(const std::string& target_path, const std::string& dist_name, int count,
               std::uint64_t seed, double sigma, const std::string& out_path) {
  const Target target = target_from_json(load_json_file(target_path));
  SampleDistribution dist;
  dist.kind = sample_kind_from_name(dist_name);
  dist.n = target.modes();
  dist.seed = seed;
  dist.outcome_sigma = sigma;
  const auto samples = draw_training_set(target, dist, count);
  json arr = json::array();
  for (const auto& s : samples) {
    json rec = {{"bit", s.outcome_bit}};
    rec["channel"] = to_json(s.channel);
    if (s.is_photo) {
      rec["photons"] = s.photo_k.k;
    } else {
      rec["effect"] = to_json(s.effect);
    }
    arr.push_back(std::move(rec));
  }
  const json doc = {{"dist", dist_name}, {"seed", seed}, {"samples", arr}};
  if (!out_path.empty()) {
    write_json_file(out_path, doc);
  } else {
    std::cout << doc.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"continuous-variable circuit probabilities and learning experiments"};
  app.require_subcommand(1);

  // validate
  std::string in_path;
  double tol = 1e-9;
  auto* validate = app.add_subcommand("validate", "check a serialized object");
  validate->add_option("--in", in_path, "JSON file")->required();
  validate->add_option("--tol", tol, "positivity tolerance");

  // prob
  auto* prob = app.add_subcommand("prob", "acceptance probability of a circuit");
  std::string p_state = "vacuum", p_channel = "identity", p_effect = "heterodyne", p_out;
  int p_n = 1;
  double p_alpha_re = 1.0, p_alpha_im = 0.0;
  std::vector<double> p_outcome;
  prob->add_option("--state", p_state, "vacuum | coherent | state.json");
  prob->add_option("--channel", p_channel, "identity | channel.json");
  prob->add_option("--effect", p_effect, "heterodyne | effect.json");
  prob->add_option("--n", p_n, "mode count for named objects");
  prob->add_option("--alpha-re", p_alpha_re);
  prob->add_option("--alpha-im", p_alpha_im);
  prob->add_option("--outcome", p_outcome, "heterodyne outcome coordinates");
  prob->add_option("--out", p_out, "CSV output path");

  // make
  auto* make = app.add_subcommand("make", "construct a state file");
  make->require_subcommand(1);
  auto* make_cat = make->add_subcommand("cat", "coherent-superposition state");
  double c_alpha = 1.0, c_alpha_im = 0.0;
  std::string c_sign = "plus", c_out;
  make_cat->add_option("--alpha", c_alpha)->required();
  make_cat->add_option("--alpha-im", c_alpha_im);
  make_cat->add_option("--sign", c_sign, "plus | minus");
  make_cat->add_option("--out", c_out, "output JSON path");
  auto* make_gkp = make->add_subcommand("gkp", "grid state");
  double g_eps = 0.1;
  int g_lat = 2;
  std::string g_out;
  make_gkp->add_option("--eps", g_eps)->required();
  make_gkp->add_option("--L", g_lat)->required();
  make_gkp->add_option("--out", g_out);
  auto* make_fock = make->add_subcommand("fock", "photon-number approximant");
  int f_k = 1;
  double f_r = 0.2;
  std::string f_out;
  make_fock->add_option("--K", f_k)->required();
  make_fock->add_option("--r", f_r)->required();
  make_fock->add_option("--out", f_out);

  // sample
  auto* sample = app.add_subcommand("sample", "draw training bits from a target");
  std::string s_target, s_dist = "heterodyne", s_out;
  int s_count = 100;
  std::uint64_t s_seed = 1;
  double s_sigma = 1.5;
  sample->add_option("--target", s_target, "target JSON")->required();
  sample->add_option("--dist", s_dist);
  sample->add_option("--T", s_count);
  sample->add_option("--seed", s_seed);
  sample->add_option("--sigma", s_sigma);
  sample->add_option("--out", s_out);

  // learn-state
  auto* learn = app.add_subcommand("learn-state", "fit a state to sampled bits");
  std::string l_target = "vacuum", l_dist = "heterodyne", l_csv, l_json;
  int l_count = 1000, l_n = 1, l_ntest = 400;
  std::vector<std::uint64_t> l_seeds = {1};
  long long l_evals = 4000;
  double l_gamma = 0.1, l_sigma = 1.5, l_alpha = 1.0;
  learn->add_option("--target", l_target, "vacuum | coherent | cat-plus | cat-minus | file.json");
  learn->add_option("--dist", l_dist);
  learn->add_option("--T", l_count);
  learn->add_option("--n", l_n);
  learn->add_option("--seed", l_seeds);
  learn->add_option("--evals", l_evals);
  learn->add_option("--gamma", l_gamma);
  learn->add_option("--n-test", l_ntest);
  learn->add_option("--sigma", l_sigma);
  learn->add_option("--target-alpha", l_alpha);
  learn->add_option("--out", l_json, "JSON report path");
  learn->add_option("--out-csv", l_csv);

  // learn-task
  auto* task = app.add_subcommand("learn-task", "fit a channel for a discrimination task");
  double t_alpha = 0.6;
  int t_count = 2000;
  std::vector<std::uint64_t> t_seeds = {1};
  long long t_evals = 3000;
  std::string t_class = "gaussian-channel-iso", t_csv, t_json, t_file;
  task->add_option("--task", t_file, "task JSON file (overrides --alpha)");
  task->add_option("--alpha", t_alpha);
  task->add_option("--T", t_count);
  task->add_option("--seed", t_seeds);
  task->add_option("--evals", t_evals);
  task->add_option("--class", t_class);
  task->add_option("--out", t_json);
  task->add_option("--out-csv", t_csv);

  // bound
  auto* bound = app.add_subcommand("bound", "sample-complexity bound calculator");
  std::string b_setting = "g", b_json;
  int b_n = 1, b_K = 1, b_ell = 1;
  double b_eps = 0.1, b_gamma = 0.05, b_delta = 0.01, b_nu = 1.0, b_b1 = 1.0, b_b2 = 1.0,
         b_b3 = 1.0;
  bound->add_option("--setting", b_setting, "g | gp | gg | gp-measurement | task-*");
  bound->add_option("--n", b_n);
  bound->add_option("--K", b_K);
  bound->add_option("--ell", b_ell);
  bound->add_option("--eps", b_eps);
  bound->add_option("--gamma", b_gamma);
  bound->add_option("--delta", b_delta);
  bound->add_option("--nu", b_nu);
  bound->add_option("--b1", b_b1);
  bound->add_option("--b2", b_b2);
  bound->add_option("--b3", b_b3);
  bound->add_option("--out", b_json);

  // dims
  auto* dims = app.add_subcommand("dims", "shattering certificates and covers");
  std::string d_class = "f_g", d_json, d_csv;
  int d_n = 1, d_kmax = 4, d_k = 8, d_samples = 400;
  double d_gamma = 0.1, d_budget = 2e5, d_eps = 0.0;
  std::uint64_t d_seed = 1;
  dims->add_option("--class", d_class, "constant | f_g | f_g_disp | f_gg_cat | f_gp");
  dims->add_option("--n", d_n);
  dims->add_option("--gamma", d_gamma);
  dims->add_option("--kmax", d_kmax);
  dims->add_option("--budget", d_budget);
  dims->add_option("--seed", d_seed);
  dims->add_option("--eps", d_eps, "also estimate a cover at this radius");
  dims->add_option("--k", d_k, "cover scale");
  dims->add_option("--samples", d_samples, "cover sample budget");
  dims->add_option("--out", d_json);
  dims->add_option("--out-csv", d_csv);

  // run / sweep
  auto* run = app.add_subcommand("run", "execute a config file");
  std::string run_path;
  run->add_option("config", run_path, "config file")->required();
  auto* sweep = app.add_subcommand("sweep", "execute a sweep config");
  std::string sweep_path;
  sweep->add_option("config", sweep_path, "config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(in_path, tol);

    if (*prob) {
      ExperimentConfig cfg;
      cfg.sections[""]["kind"] = std::string("prob");
      auto& sec = cfg.sections["prob"];
      sec["state"] = p_state;
      sec["channel"] = p_channel;
      sec["effect"] = p_effect;
      sec["n"] = static_cast<double>(p_n);
      sec["alpha_re"] = p_alpha_re;
      sec["alpha_im"] = p_alpha_im;
      if (!p_outcome.empty()) sec["outcome"] = p_outcome;
      if (!p_out.empty()) sec["out_csv"] = p_out;
      return run_experiment(cfg);
    }

    if (*make) {
      GGState st;
      std::string out_path;
      if (*make_cat) {
        st = make_cat_state({c_alpha, c_alpha_im},
                            c_sign == "minus" ? CatSign::minus : CatSign::plus);
        out_path = c_out;
      } else if (*make_gkp) {
        st = make_gkp_state(g_eps, g_lat);
        out_path = g_out;
      } else {
        st = make_fock_approx(f_k, f_r);
        out_path = f_out;
      }
      const json doc = to_json(st);
      if (!out_path.empty()) {
        write_json_file(out_path, doc);
        std::cout << "wrote " << out_path << " (" << st.components.size() << " components)\n";
      } else {
        std::cout << doc.dump(2) << "\n";
      }
      return 0;
    }

    if (*sample) return cmd_sample(s_target, s_dist, s_count, s_seed, s_sigma, s_out);

    if (*learn) {
      ExperimentConfig cfg;
      cfg.sections[""]["kind"] = std::string("learn");
      auto& sec = cfg.sections["learn"];
      sec["target"] = l_target;
      sec["dist"] = l_dist;
      sec["T"] = static_cast<double>(l_count);
      sec["n"] = static_cast<double>(l_n);
      std::vector<double> seeds;
      for (auto s : l_seeds) seeds.push_back(static_cast<double>(s));
      sec["seeds"] = seeds;
      sec["evals"] = static_cast<double>(l_evals);
      sec["gamma"] = l_gamma;
      sec["n_test"] = static_cast<double>(l_ntest);
      sec["outcome_sigma"] = l_sigma;
      sec["target_alpha"] = l_alpha;
      if (!l_json.empty()) sec["out_json"] = l_json;
      if (!l_csv.empty()) sec["out_csv"] = l_csv;
      return run_experiment(cfg);
    }

    if (*task) {
      ExperimentConfig cfg;
      cfg.sections[""]["kind"] = std::string("task");
      auto& sec = cfg.sections["task"];
      sec["alpha"] = t_alpha;
      if (!t_file.empty()) sec["file"] = t_file;
      sec["T"] = static_cast<double>(t_count);
      std::vector<double> seeds;
      for (auto s : t_seeds) seeds.push_back(static_cast<double>(s));
      sec["seeds"] = seeds;
      sec["evals"] = static_cast<double>(t_evals);
      sec["class"] = t_class;
      if (!t_json.empty()) sec["out_json"] = t_json;
      if (!t_csv.empty()) sec["out_csv"] = t_csv;
      return run_experiment(cfg);
    }

    if (*bound) {
      ExperimentConfig cfg;
      cfg.sections[""]["kind"] = std::string("bound");
      auto& sec = cfg.sections["bound"];
      sec["setting"] = b_setting;
      sec["n"] = static_cast<double>(b_n);
      sec["K"] = static_cast<double>(b_K);
      sec["ell"] = static_cast<double>(b_ell);
      sec["eps"] = b_eps;
      sec["gamma"] = b_gamma;
      sec["delta"] = b_delta;
      sec["nu"] = b_nu;
      sec["b1"] = b_b1;
      sec["b2"] = b_b2;
      sec["b3"] = b_b3;
      if (!b_json.empty()) sec["out_json"] = b_json;
      return run_experiment(cfg);
    }

    if (*dims) {
      ExperimentConfig cfg;
      cfg.sections[""]["kind"] = std::string("dims");
      auto& sec = cfg.sections["dims"];
      sec["class"] = d_class;
      sec["n"] = static_cast<double>(d_n);
      sec["gamma"] = d_gamma;
      sec["kmax"] = static_cast<double>(d_kmax);
      sec["budget"] = d_budget;
      sec["seed"] = static_cast<double>(d_seed);
      if (d_eps > 0.0) {
        sec["eps"] = d_eps;
        sec["k"] = static_cast<double>(d_k);
        sec["samples"] = static_cast<double>(d_samples);
      }
      if (!d_json.empty()) sec["out_json"] = d_json;
      if (!d_csv.empty()) sec["out_csv"] = d_csv;
      return run_experiment(cfg);
    }

    if (*run) return run_config(run_path);
    if (*sweep) {
      const auto cfg = parse_config_file(sweep_path);
      validate_config_schema(cfg);
      if (cfg.text_or("", "kind", "") != "sweep") {
        std::cerr << "config error: sweep subcommand needs kind = \"sweep\"\n";
        return 2;
      }
      return run_experiment(cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
