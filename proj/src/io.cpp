#include "qhinf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qhinf::io {

namespace {

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

bool inline_array(const Json& j) {
  if (!j.is_array()) return false;
  for (const auto& e : j)
    if (e.is_object() || (e.is_array() && !inline_array(e))) return false;
  return true;
}

void write_number(std::ostream& out, const Json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      out << "null";
      return;
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
  } else {
    out << j.dump();
  }
}

void write_value(std::ostream& out, const Json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  const std::string inner(static_cast<std::size_t>(indent + 2), ' ');
  if (is_scalar(j)) {
    if (j.is_number()) {
      write_number(out, j);
    } else {
      out << j.dump();
    }
  } else if (j.is_array()) {
    if (j.empty()) {
      out << "[]";
    } else if (inline_array(j)) {
      out << '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out << ", ";
        write_value(out, e, 0);
        first = false;
      }
      out << ']';
    } else {
      out << "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out << ",\n";
        out << inner;
        write_value(out, e, indent + 2);
        first = false;
      }
      out << '\n' << pad << ']';
    }
  } else {
    if (j.empty()) {
      out << "{}";
      return;
    }
    out << "{\n";
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      if (!first) out << ",\n";
      out << inner << Json(key).dump() << ": ";
      write_value(out, value, indent + 2);
      first = false;
    }
    out << '\n' << pad << '}';
  }
}

const Json& require(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw InputError(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(path, std::string("missing key \"") + key + "\"");
  return *it;
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path, "expected a number");
  return j.get<double>();
}

Eigen::Index even_count(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw InputError(path, "expected an integer");
  return j.get<Eigen::Index>();
}

CommutationStructure parse_theta(const Json& j, const std::string& path, Eigen::Index n) {
  if (j.is_string()) {
    if (j.get<std::string>() != "canonical")
      throw InputError(path, "theta must be \"canonical\" or a matrix");
    try {
      return canonical_theta(n);
    } catch (const Error& e) {
      throw InputError(path, e.what());
    }
  }
  try {
    return CommutationStructure::from_matrix(real_matrix_from_json(j, path));
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    throw InputError(path, e.what());
  }
}

Json theta_to_json(const CommutationStructure& theta) {
  if (theta.is_canonical()) return "canonical";
  return matrix_to_json(theta.matrix());
}

Json spectrum_to_json(const CVector& v) {
  Json out = Json::array();
  for (const auto& l : v) out.push_back(Json::array({l.real(), l.imag()}));
  return out;
}

Json zeros_to_json(const std::vector<Complex>& v) {
  Json out = Json::array();
  for (const auto& l : v) out.push_back(Json::array({l.real(), l.imag()}));
  return out;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k)
      row.push_back(Json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix real_matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Matrix m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!row.is_array()) throw InputError(row_path, "row must be an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError(row_path, "ragged matrix rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k)
      m(i, k) = number_at(row[static_cast<std::size_t>(k)], row_path + "[" + std::to_string(k) + "]");
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

CMatrix complex_matrix_from_json(const Json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  CMatrix m;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    const std::string row_path = path + "[" + std::to_string(i) + "]";
    if (!row.is_array()) throw InputError(row_path, "row must be an array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw InputError(row_path, "ragged matrix rows");
    }
    for (Eigen::Index k = 0; k < cols; ++k) {
      const Json& e = row[static_cast<std::size_t>(k)];
      const std::string e_path = row_path + "[" + std::to_string(k) + "]";
      if (e.is_number()) {
        m(i, k) = Complex(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(i, k) = Complex(number_at(e[0], e_path + "[0]"), number_at(e[1], e_path + "[1]"));
      } else {
        throw InputError(e_path, "complex entry must be [re, im]");
      }
    }
  }
  if (rows == 0) m.resize(0, 0);
  return m;
}

ModelFile parse_model(const Json& j) {
  if (!j.is_object()) throw InputError("$", "model must be a JSON object");
  ModelFile model;
  if (!j.contains("plant") && !j.contains("slh"))
    throw InputError("$", "model needs a \"plant\" or an \"slh\" section");
  const Json theta_json = j.contains("theta") ? j.at("theta") : Json("canonical");

  if (j.contains("plant")) {
    const Json& p = j.at("plant");
    OpenPlant plant;
    const std::pair<Matrix*, const char*> fields[] = {
        {&plant.A, "A"},     {&plant.B0, "B0"}, {&plant.B1, "B1"},
        {&plant.B2, "B2"},   {&plant.C1, "C1"}, {&plant.D12, "D12"},
        {&plant.C2, "C2"},   {&plant.D20, "D20"}, {&plant.D21, "D21"},
    };
    for (const auto& [dst, key] : fields)
      *dst = real_matrix_from_json(require(p, key, "$.plant"), std::string("$.plant.") + key);
    plant.theta = parse_theta(theta_json, "$.theta", plant.A.rows());
    const Json& u = require(j, "uncertainty", "$");
    plant.uncertainty.E = real_matrix_from_json(require(u, "E", "$.uncertainty"), "$.uncertainty.E");
    try {
      plant.validate();
    } catch (const DimensionError& e) {
      throw InputError("$.plant", e.what());
    }
    model.theta = plant.theta;
    model.plant = std::move(plant);
  }
  if (j.contains("slh")) {
    const Json& s = j.at("slh");
    SLHModel slh;
    slh.R = real_matrix_from_json(require(s, "R", "$.slh"), "$.slh.R");
    slh.Lambda = complex_matrix_from_json(require(s, "Lambda", "$.slh"), "$.slh.Lambda");
    slh.n_y = even_count(require(s, "n_y", "$.slh"), "$.slh.n_y");
    if (!model.plant) model.theta = parse_theta(theta_json, "$.theta", slh.R.rows());
    model.slh = std::move(slh);
  }
  return model;
}

Json model_to_json(const ModelFile& model) {
  Json j = Json::object();
  if (model.plant) {
    const OpenPlant& p = *model.plant;
    j["plant"] = Json{{"A", matrix_to_json(p.A)},     {"B0", matrix_to_json(p.B0)},
                      {"B1", matrix_to_json(p.B1)},   {"B2", matrix_to_json(p.B2)},
                      {"C1", matrix_to_json(p.C1)},   {"D12", matrix_to_json(p.D12)},
                      {"C2", matrix_to_json(p.C2)},   {"D20", matrix_to_json(p.D20)},
                      {"D21", matrix_to_json(p.D21)}};
  }
  j["theta"] = theta_to_json(model.theta);
  if (model.plant) j["uncertainty"] = Json{{"E", matrix_to_json(model.plant->uncertainty.E)}};
  if (model.slh) {
    j["slh"] = Json{{"R", matrix_to_json(model.slh->R)},
                    {"Lambda", matrix_to_json(model.slh->Lambda)},
                    {"n_y", model.slh->n_y}};
  }
  return j;
}

Json controller_to_json(const CoherentController& k) {
  return Json{{"A_K", matrix_to_json(k.A_K)},
              {"B_K1", matrix_to_json(k.B_K1)},
              {"B_K", matrix_to_json(k.B_K)},
              {"C_K", matrix_to_json(k.C_K)},
              {"B_K0", matrix_to_json(k.B_K0)},
              {"theta_K", theta_to_json(k.theta_K)},
              {"dims", Json{{"n_K", k.n_K()}, {"n_vK", k.n_vK()}, {"n_y", k.n_y()}, {"n_u", k.n_u()}}}};
}

namespace {

// Zero-width blocks serialize as rows of empty arrays or as [] and need their shape restored.
Matrix fit_empty(Matrix m, Eigen::Index rows, Eigen::Index cols) {
  if (m.size() == 0) return Matrix::Zero(rows, cols);
  return m;
}

void check_dims(const Json& j, const char* key, Eigen::Index actual) {
  if (!j.contains("dims")) return;
  const Json& dims = j.at("dims");
  if (!dims.contains(key)) return;
  const std::string path = std::string("$.dims.") + key;
  if (even_count(dims.at(key), path) != actual) throw InputError(path, "disagrees with the matrices");
}

}  // namespace

CoherentController parse_controller(const Json& j) {
  if (!j.is_object()) throw InputError("$", "controller must be a JSON object");
  CoherentController k;
  k.A_K = real_matrix_from_json(require(j, "A_K", "$"), "$.A_K");
  k.B_K = real_matrix_from_json(require(j, "B_K", "$"), "$.B_K");
  k.C_K = real_matrix_from_json(require(j, "C_K", "$"), "$.C_K");
  k.B_K1 = real_matrix_from_json(require(j, "B_K1", "$"), "$.B_K1");
  k.B_K0 = real_matrix_from_json(require(j, "B_K0", "$"), "$.B_K0");
  const Eigen::Index nk = k.A_K.rows();
  Eigen::Index nvk = k.B_K1.cols();
  if (j.contains("dims") && j.at("dims").contains("n_vK"))
    nvk = even_count(j.at("dims").at("n_vK"), "$.dims.n_vK");
  k.B_K1 = fit_empty(std::move(k.B_K1), nk, nvk);
  k.B_K0 = fit_empty(std::move(k.B_K0), k.C_K.rows(), nvk);
  k.theta_K = parse_theta(j.contains("theta_K") ? j.at("theta_K") : Json("canonical"), "$.theta_K", nk);
  check_dims(j, "n_K", k.n_K());
  check_dims(j, "n_vK", k.n_vK());
  check_dims(j, "n_y", k.n_y());
  check_dims(j, "n_u", k.n_u());
  try {
    k.validate();
  } catch (const DimensionError& e) {
    throw InputError("$", e.what());
  }
  return k;
}

ControllerTripleFile parse_controller_triple(const Json& j) {
  if (!j.is_object()) throw InputError("$", "controller triple must be a JSON object");
  ControllerTripleFile t;
  t.A_K = real_matrix_from_json(require(j, "A_K", "$"), "$.A_K");
  t.B_K = real_matrix_from_json(require(j, "B_K", "$"), "$.B_K");
  t.C_K = real_matrix_from_json(require(j, "C_K", "$"), "$.C_K");
  const Eigen::Index nk = t.A_K.rows();
  if (t.A_K.cols() != nk || t.B_K.rows() != nk || t.C_K.cols() != nk)
    throw InputError("$", "A_K, B_K, C_K are not conformal");
  check_dims(j, "n_K", nk);
  check_dims(j, "n_y", t.B_K.cols());
  check_dims(j, "n_u", t.C_K.rows());
  t.theta_K = parse_theta(j.contains("theta_K") ? j.at("theta_K") : Json("canonical"), "$.theta_K", nk);
  return t;
}

Json care_solution_to_json(const CareSolution& s) {
  return Json{{"value", matrix_to_json(s.value)},
              {"residual", s.residual},
              {"closed_loop_spectrum", spectrum_to_json(s.closed_loop_spectrum)},
              {"stabilizing", s.stabilizing()},
              {"marginal", s.marginal},
              {"newton_steps", s.newton_steps}};
}

Json assumptions_to_json(const AssumptionReport& a) {
  Json notes = Json::array();
  for (const auto& n : a.notes) notes.push_back(n);
  return Json{{"E1", matrix_to_json(a.E1)},
              {"E2", matrix_to_json(a.E2)},
              {"E1_min_eig", a.E1_min_eig},
              {"E2_min_eig", a.E2_min_eig},
              {"e1_ok", a.e1_ok},
              {"e2_ok", a.e2_ok},
              {"zeros_cond_3", zeros_to_json(a.zeros_cond_3)},
              {"zeros_cond_4", zeros_to_json(a.zeros_cond_4)},
              {"rank_cond_3_ok", a.rank_cond_3_ok},
              {"rank_cond_4_ok", a.rank_cond_4_ok},
              {"stab_1_ok", a.stab_1_ok},
              {"stab_2_ok", a.stab_2_ok},
              {"X_min_eig", a.X_min_eig},
              {"Y_min_eig", a.Y_min_eig},
              {"X_psd_ok", a.X_psd_ok},
              {"Y_psd_ok", a.Y_psd_ok},
              {"rho_XY", a.rho_XY},
              {"rho_ok", a.rho_ok},
              {"all_ok", a.all_ok()},
              {"notes", notes}};
}

Json trace_to_json(const std::vector<EpsEvaluation>& trace) {
  Json out = Json::array();
  for (const auto& e : trace) {
    out.push_back(Json{{"eps", e.eps},
                       {"feasible", e.feasible},
                       {"worst_case_norm", e.worst_case_norm},
                       {"rho_xy", e.rho_xy},
                       {"failure", e.failure}});
  }
  return out;
}

Json report_to_json(const SynthesisReport& r) {
  Json norms = Json::array();
  for (double v : r.per_sample_norms) norms.push_back(v);
  return Json{{"feasible", r.feasible},
              {"g", r.g},
              {"eps_used", r.eps_used},
              {"epsilon_inert", r.epsilon_inert},
              {"X", care_solution_to_json(r.X)},
              {"Y", care_solution_to_json(r.Y)},
              {"assumptions", assumptions_to_json(r.assumptions)},
              {"controller", controller_to_json(r.controller)},
              {"scaled_sbr", r.scaled_sbr},
              {"scaled_norm", r.scaled_norm},
              {"robust_sbr", r.robust_sbr},
              {"per_sample_norms", norms},
              {"worst_case_norm", r.worst_case_norm},
              {"per_eps_trace", trace_to_json(r.per_eps_trace)}};
}

Json manifest_to_json(const RunManifest& m) {
  Json inputs = Json::array();
  for (const auto& p : m.inputs) inputs.push_back(p);
  return Json{{"command", m.command},
              {"inputs", inputs},
              {"config", m.config},
              {"tool_version", m.tool_version},
              {"seed", m.seed}};
}

std::string dump(const Json& j) {
  std::ostringstream out;
  write_value(out, j, 0);
  out << '\n';
  return out.str();
}

Json parse_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source + " (byte " + std::to_string(e.byte) + ")", "malformed JSON");
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str(), path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError(path, "cannot open file for writing");
  out << text;
  if (!out) throw InputError(path, "write failed");
}

}  // namespace qhinf::io
