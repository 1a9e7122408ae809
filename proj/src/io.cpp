#include "cvlearn/io.hpp"

#include <cstdio>
#include <fstream>

namespace cvlearn {

namespace {

json matrix_to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json complex_to_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json cvector_to_json(const VectorXcd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
  return out;
}

json cmatrix_to_json(const MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a matrix");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    if (static_cast<int>(j[r].size()) != cols) {
      throw ConfigError(std::string(what) + ": ragged matrix rows");
    }
    for (int c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected a vector");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Complex complex_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) {
    throw ConfigError(std::string(what) + ": complex values are [re, im] pairs");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

VectorXcd cvector_from_json(const json& j, const char* what) {
  VectorXcd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i], what);
  }
  return v;
}

MatrixXcd cmatrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + ": expected a matrix");
  const int rows = static_cast<int>(j.size());
  const int cols = static_cast<int>(j[0].size());
  MatrixXcd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = complex_from_json(j[r][c], what);
  }
  return m;
}

std::vector<GGComponent> components_from_json(const json& j) {
  std::vector<GGComponent> comps;
  for (const auto& cj : j) {
    GGComponent c;
    c.coeff = complex_from_json(cj.at("coeff"), "coeff");
    c.mean = cvector_from_json(cj.at("mean"), "mean");
    c.cov = cmatrix_from_json(cj.at("cov"), "cov");
    comps.push_back(std::move(c));
  }
  return comps;
}

json components_to_json(const std::vector<GGComponent>& comps) {
  json out = json::array();
  for (const auto& c : comps) {
    out.push_back({{"coeff", complex_to_json(c.coeff)},
                   {"mean", cvector_to_json(c.mean)},
                   {"cov", cmatrix_to_json(c.cov)}});
  }
  return out;
}

}  // namespace

json to_json(const GaussianState& st) {
  return {{"n", st.modes()}, {"mean", vector_to_json(st.mean)}, {"cov", matrix_to_json(st.cov)}};
}

json to_json(const GaussianChannel& ch) {
  return {{"n", ch.modes()},
          {"disp", vector_to_json(ch.disp)},
          {"x_mat", matrix_to_json(ch.x_mat)},
          {"y_mat", matrix_to_json(ch.y_mat)}};
}

json to_json(const GeneralDyneEffect& eff) {
  return {{"n", eff.modes()},
          {"outcome", vector_to_json(eff.outcome)},
          {"cov", matrix_to_json(eff.cov)}};
}

json to_json(const GGState& st) {
  return {{"n", st.n}, {"components", components_to_json(st.components)}};
}

json to_json(const GGEffect& eff) {
  return {{"n", eff.n}, {"components", components_to_json(eff.components)}, {"effect", true}};
}

json to_json(const GGChannel& ch) {
  json branches = json::array();
  for (const auto& b : ch.branches) {
    branches.push_back({{"coeff", complex_to_json(b.coeff)},
                        {"disp", cvector_to_json(b.disp)},
                        {"x_mat", cmatrix_to_json(b.x_mat)},
                        {"y_mat", cmatrix_to_json(b.y_mat)}});
  }
  return {{"n", ch.n}, {"branches", std::move(branches)}};
}

json to_json(const PhotoCountEffect& eff) {
  json weights = json::array();
  for (const auto& [k, q] : eff.weights) {
    weights.push_back({{"k", k}, {"q", q}});
  }
  return {{"cutoff", eff.cutoff}, {"weights", std::move(weights)}};
}

json to_json(const LearningReport& rep) {
  return {{"eta_max", rep.eta_max},   {"eta_mean", rep.eta_mean}, {"objective", rep.objective},
          {"evals", rep.evals},       {"converged", rep.converged}, {"wall_ms", rep.wall_ms},
          {"seed", rep.seed},         {"trace", rep.trace}};
}

json to_json(const GapStatistics& gs) {
  json grid = json::array();
  for (const auto& [gamma, frac] : gs.exceedance) {
    grid.push_back({{"gamma", gamma}, {"exceed_frac", frac}});
  }
  return {{"n_test", gs.n_test}, {"q50", gs.q50},   {"q90", gs.q90},
          {"q95", gs.q95},       {"mean", gs.mean}, {"exceedance", std::move(grid)}};
}

json to_json(const BoundBreakdown& b) {
  return {{"total", b.total},
          {"dim_part", b.dim_part},
          {"conf_part", b.conf_part},
          {"d_value", b.d_value},
          {"formula", b.formula}};
}

json to_json(const Target& t) {
  if (t.is_gg) return to_json(t.gg);
  return to_json(t.gaussian);
}

namespace {

json encoding_to_json(const EncodingPoly& e) {
  return {{"order", e.order}, {"coeffs", e.coeffs}};
}

EncodingPoly encoding_from_json(const json& j) {
  EncodingPoly e;
  e.order = j.at("order").get<int>();
  e.coeffs = j.at("coeffs").get<std::vector<std::vector<double>>>();
  if (!e.valid()) throw ConfigError("encoding polynomial has inconsistent coefficients");
  return e;
}

}  // namespace

json to_json(const TaskSpec& task) {
  return {{"n", task.n},
          {"state_mean", encoding_to_json(task.state_mean)},
          {"effect_outcome", encoding_to_json(task.effect_outcome)},
          {"labels", task.labels}};
}

TaskSpec task_spec_from_json(const json& j) {
  TaskSpec task;
  task.n = j.at("n").get<int>();
  task.state_mean = encoding_from_json(j.at("state_mean"));
  task.effect_outcome = encoding_from_json(j.at("effect_outcome"));
  task.labels = j.at("labels").get<std::vector<double>>();
  if (task.labels.empty()) throw ConfigError("task needs a nonempty label set");
  return task;
}

GaussianState gaussian_state_from_json(const json& j) {
  GaussianState st;
  st.mean = vector_from_json(j.at("mean"), "mean");
  st.cov = matrix_from_json(j.at("cov"), "cov");
  if (j.contains("n") && j.at("n").get<int>() * 2 != st.mean.size()) {
    throw ConfigError("declared mode count does not match the mean length");
  }
  return st;
}

GaussianChannel gaussian_channel_from_json(const json& j) {
  GaussianChannel ch;
  ch.disp = vector_from_json(j.at("disp"), "disp");
  ch.x_mat = matrix_from_json(j.at("x_mat"), "x_mat");
  ch.y_mat = matrix_from_json(j.at("y_mat"), "y_mat");
  return ch;
}

GeneralDyneEffect general_dyne_effect_from_json(const json& j) {
  GeneralDyneEffect eff;
  eff.outcome = vector_from_json(j.at("outcome"), "outcome");
  eff.cov = matrix_from_json(j.at("cov"), "cov");
  return eff;
}

GGState gg_state_from_json(const json& j) {
  GGState st;
  st.n = j.at("n").get<int>();
  st.components = components_from_json(j.at("components"));
  return st;
}

GGEffect gg_effect_from_json(const json& j) {
  GGEffect eff;
  eff.n = j.at("n").get<int>();
  eff.components = components_from_json(j.at("components"));
  return eff;
}

GGChannel gg_channel_from_json(const json& j) {
  GGChannel ch;
  ch.n = j.at("n").get<int>();
  for (const auto& bj : j.at("branches")) {
    GGBranch b;
    b.coeff = complex_from_json(bj.at("coeff"), "coeff");
    b.disp = cvector_from_json(bj.at("disp"), "disp");
    b.x_mat = cmatrix_from_json(bj.at("x_mat"), "x_mat");
    b.y_mat = cmatrix_from_json(bj.at("y_mat"), "y_mat");
    ch.branches.push_back(std::move(b));
  }
  return ch;
}

PhotoCountEffect photocount_effect_from_json(const json& j) {
  PhotoCountEffect eff;
  eff.cutoff = j.at("cutoff").get<int>();
  for (const auto& wj : j.at("weights")) {
    eff.weights[wj.at("k").get<std::vector<int>>()] = wj.at("q").get<double>();
  }
  return eff;
}

Target target_from_json(const json& j) {
  if (j.contains("components")) return Target::from_gg(gg_state_from_json(j));
  return Target::from_gaussian(gaussian_state_from_json(j));
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace cvlearn
