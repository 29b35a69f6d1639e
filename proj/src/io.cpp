#include "coherence/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace coherence::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ParseError(where + ": " + msg);
}

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing key \"") + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(where, "non-finite value");
  return x;
}

int dim_field(const Json& j, const std::string& where) {
  const Json& d = field(j, "dim", where);
  if (!d.is_number_integer()) fail(where + ".dim", "expected an integer");
  const int dim = d.get<int>();
  if (dim < 2) fail(where + ".dim", "dimension must be >= 2");
  return dim;
}

std::string at(const std::string& base, std::size_t i) {
  return base + "[" + std::to_string(i) + "]";
}

Json rounded(double x) { return Json(round15(x)); }

Json flags_json(const ChannelClassification& c) {
  return Json{{"gio", c.gio}, {"fsio", c.fsio}, {"fio", c.fio},
              {"sio", c.sio}, {"io", c.io},     {"mio", c.mio}};
}

} // namespace

double round15(double x) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

Json complex_to_json(Complex z) {
  return Json::array({rounded(z.real()), rounded(z.imag())});
}

Complex complex_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [re, im] pair");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of rows");
  const std::size_t rows = j.size();
  if (!j[0].is_array()) fail(at(where, 0), "expected an array of entries");
  const std::size_t cols = j[0].size();
  ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const std::string row_at = at(where, i);
    if (!j[i].is_array() || j[i].size() != cols) {
      fail(row_at, "expected " + std::to_string(cols) + " entries");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          complex_from_json(j[i][k], at(row_at, k));
    }
  }
  return m;
}

Json to_json(const PureState& psi) {
  Json amps = Json::array();
  for (int i = 0; i < psi.dim(); ++i) amps.push_back(complex_to_json(psi[i]));
  return Json{{"dim", psi.dim()}, {"amplitudes", std::move(amps)}};
}

Json to_json(const DensityMatrix& rho) {
  return Json{{"dim", rho.dim()}, {"rho", matrix_to_json(rho.matrix())}};
}

Json to_json(const KrausSet& kraus) {
  Json ops = Json::array();
  for (const auto& k : kraus.operators()) ops.push_back(matrix_to_json(k));
  return Json{{"dim", kraus.dim()}, {"kraus", std::move(ops)}};
}

Json to_json(const ChannelClassification& c) {
  Json cert = Json::object();
  const auto& cc = c.certificate;
  if (cc.permutation) {
    Json pi = Json::array();
    for (int v : cc.permutation->map()) pi.push_back(v + 1);
    cert["pi"] = std::move(pi);
    Json diags = Json::array();
    for (const auto& a : cc.diagonal_factors) {
      Json row = Json::array();
      for (Eigen::Index i = 0; i < a.size(); ++i) row.push_back(complex_to_json(a(i)));
      diags.push_back(std::move(row));
    }
    cert["diagonal_factors"] = std::move(diags);
  }
  if (!cc.column_map.empty()) {
    Json map = Json::array();
    for (int v : cc.column_map) map.push_back(v < 0 ? Json(nullptr) : Json(v + 1));
    cert["column_map"] = std::move(map);
  }
  if (!cc.completed_columns.empty()) {
    Json cols = Json::array();
    for (int v : cc.completed_columns) cols.push_back(v + 1);
    cert["completed_columns"] = std::move(cols);
  }
  Json wit = Json::array();
  for (const auto& w : cc.witnesses) {
    Json e{{"class", w.cls}, {"detail", w.detail}};
    if (w.op >= 0) e["op"] = w.op + 1;
    if (w.row >= 0) e["row"] = w.row + 1;
    if (w.col >= 0) e["col"] = w.col + 1;
    wit.push_back(std::move(e));
  }
  cert["witnesses"] = std::move(wit);
  return Json{{"flags", flags_json(c)}, {"most_specific", c.most_specific},
              {"certificate", std::move(cert)}};
}

Json to_json(const RoofResult& r) {
  Json ens = Json::array();
  for (const auto& m : r.ensemble.members) {
    Json psi = Json::array();
    for (int i = 0; i < m.state.dim(); ++i) psi.push_back(complex_to_json(m.state[i]));
    ens.push_back(Json{{"p", rounded(m.p)}, {"psi", std::move(psi)}});
  }
  return Json{{"value", rounded(r.value)},
              {"converged", r.converged},
              {"restarts_used", r.restarts_used},
              {"lower_bound", rounded(r.lower_bound)},
              {"ensemble", std::move(ens)}};
}

Json to_json(const CampaignSummary& s, const CampaignConfig& cfg) {
  auto counts = [](const TheoremSummary& t) {
    return Json{{"pass", t.pass},
                {"fail", t.fail},
                {"inconclusive", t.inconclusive},
                {"max_deviation", round15(t.max_deviation)}};
  };
  Json theorems = Json::object();
  Json probes = Json::object();
  for (const auto& [id, t] : s.theorems) {
    if (t.pass + t.fail + t.inconclusive == 0) continue;
    (is_probe(id) ? probes : theorems)[to_string(id)] = counts(t);
  }
  Json out{{"master_seed", cfg.master_seed},
           {"dims", cfg.dims},
           {"trials_per_dim", cfg.trials_per_dim},
           {"with_roof", cfg.with_roof},
           {"theorems", std::move(theorems)},
           {"in_hypothesis", counts(s.in_hypothesis)},
           {"all_pass", s.all_pass()}};
  if (s.has_probes) {
    probes["total"] = counts(s.probes);
    out["counterexample_probes"] = std::move(probes);
  }
  return out;
}

PureState pure_state_from_json(const Json& j) {
  const int d = dim_field(j, "state");
  const Json& amps = field(j, "amplitudes", "state");
  if (!amps.is_array() || amps.size() != static_cast<std::size_t>(d)) {
    fail("state.amplitudes", "expected " + std::to_string(d) + " amplitudes");
  }
  ComplexVector v(d);
  for (int i = 0; i < d; ++i) {
    v(i) = complex_from_json(amps[static_cast<std::size_t>(i)],
                             at("state.amplitudes", static_cast<std::size_t>(i)));
  }
  try {
    return PureState::from_amplitudes(v);
  } catch (const InvariantError& e) {
    fail("state.amplitudes", e.what());
  }
}

DensityMatrix density_from_json(const Json& j) {
  const int d = dim_field(j, "state");
  const ComplexMatrix m = matrix_from_json(field(j, "rho", "state"), "state.rho");
  if (m.rows() != d || m.cols() != d) {
    fail("state.rho", "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  }
  try {
    return DensityMatrix::from_matrix(m);
  } catch (const InvariantError& e) {
    fail("state.rho", e.what());
  }
}

KrausSet kraus_from_json(const Json& j) {
  const int d = dim_field(j, "kraus_set");
  const Json& ops = field(j, "kraus", "kraus_set");
  if (!ops.is_array() || ops.empty()) fail("kraus_set.kraus", "expected a nonempty list");
  std::vector<ComplexMatrix> mats;
  for (std::size_t n = 0; n < ops.size(); ++n) {
    const std::string where = at("kraus_set.kraus", n);
    ComplexMatrix m = matrix_from_json(ops[n], where);
    if (m.rows() != d || m.cols() != d) {
      fail(where, "expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
    }
    mats.push_back(std::move(m));
  }
  return KrausSet::from_operators(std::move(mats));
}

Ensemble roof_ensemble_from_json(const Json& j) {
  const Json& ens = field(j, "ensemble", "roof");
  if (!ens.is_array() || ens.empty()) fail("roof.ensemble", "expected a nonempty list");
  Ensemble out;
  for (std::size_t k = 0; k < ens.size(); ++k) {
    const std::string where = at("roof.ensemble", k);
    const double p = number(field(ens[k], "p", where), where + ".p");
    if (p < 0.0 || p > 1.0 + 1e-12) fail(where + ".p", "probability outside [0, 1]");
    const Json& psi = field(ens[k], "psi", where);
    if (!psi.is_array() || psi.size() < 2) fail(where + ".psi", "expected amplitudes");
    if (out.dim == 0) out.dim = static_cast<int>(psi.size());
    if (static_cast<int>(psi.size()) != out.dim) fail(where + ".psi", "dimension mismatch");
    ComplexVector v(out.dim);
    for (int i = 0; i < out.dim; ++i) {
      v(i) = complex_from_json(psi[static_cast<std::size_t>(i)],
                               at(where + ".psi", static_cast<std::size_t>(i)));
    }
    try {
      out.members.push_back({p, PureState::from_amplitudes(v, StateTolerances{1e-12})});
    } catch (const InvariantError& e) {
      fail(where + ".psi", e.what());
    }
  }
  if (std::abs(out.total_probability() - 1.0) > 1e-10) {
    fail("roof.ensemble", "probabilities do not sum to 1");
  }
  return out;
}

AnyState state_from_json(const Json& j) {
  if (!j.is_object()) fail("state", "expected an object");
  if (j.contains("amplitudes")) return pure_state_from_json(j);
  if (j.contains("rho")) return density_from_json(j);
  fail("state", "expected key \"amplitudes\" or \"rho\"");
}

DensityMatrix as_density(const AnyState& s) {
  if (const auto* psi = std::get_if<PureState>(&s)) return projector(*psi);
  return std::get<DensityMatrix>(s);
}

Json parse_text(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(source, std::string("malformed JSON (") + e.what() + ")");
  }
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace coherence::io
