#include "sdym/io.hpp"

#include <fstream>
#include <sstream>

namespace sdym {

json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

cplx cplx_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorCode::BadInput, "complex number must be a number or [re, im]");
}

json to_json(const CMat& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

CMat cmat_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw Error(ErrorCode::BadInput, "matrix must be a list of rows");
  const int R = int(j.size()), C = int(j[0].size());
  CMat m(R, C);
  for (int r = 0; r < R; ++r) {
    if (int(j[r].size()) != C) throw Error(ErrorCode::ShapeMismatch, "ragged matrix rows");
    for (int c = 0; c < C; ++c) m(r, c) = cplx_from_json(j[r][c]);
  }
  return m;
}

json to_json(const OneInstantonParams& p) { return {{"lambda", p.lam}, {"alpha", to_json(p.alpha)}, {"beta", to_json(p.beta)}}; }

OneInstantonParams params_from_json(const json& j) {
  OneInstantonParams p;
  p.lam = j.value("lambda", 1.0);
  if (j.contains("alpha")) p.alpha = cplx_from_json(j["alpha"]);
  if (j.contains("beta")) p.beta = cplx_from_json(j["beta"]);
  return p;
}

json to_json(const ADHMData& d) {
  json A = json::array();
  for (const auto& a : d.A) A.push_back(to_json(a));
  return {{"k", d.k}, {"A", A}, {"omega", to_json(d.omega)}, {"JV", to_json(d.JV)}, {"JW", to_json(d.JW)}};
}

ADHMData adhm_from_json(const json& j) {
  try {
    ADHMData d;
    d.k = j.at("k").get<int>();
    const auto& A = j.at("A");
    if (!A.is_array() || A.size() != 4) throw Error(ErrorCode::ShapeMismatch, "A must hold four matrices");
    for (int i = 0; i < 4; ++i) d.A[i] = cmat_from_json(A[i]);
    d.omega = cmat_from_json(j.at("omega"));
    d.JV = cmat_from_json(j.at("JV"));
    d.JW = cmat_from_json(j.at("JW"));
    d.check_shapes();
    return d;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadInput, std::string("ADHM json: ") + e.what());
  }
}

json to_json(const TwistorPoly& T) {
  json terms = json::array();
  for (const auto& t : T.terms) {
    json c = json::array();
    for (int e = 0; e < 4; ++e) c.push_back(to_json(t.coeff(e / 2, e % 2)));
    terms.push_back({{"p", t.p}, {"q", t.q}, {"m", t.m}, {"coeff", c}});
  }
  return terms;
}

TwistorPoly twistor_poly_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::BadInput, "T must be a list of terms");
  TwistorPoly T;
  try {
    for (const auto& e : j) {
      TwistorTerm t;
      t.p = e.at("p").get<int>();
      t.q = e.at("q").get<int>();
      t.m = e.at("m").get<int>();
      if (t.p < 0 || t.q < 0) throw Error(ErrorCode::BadInput, "T exponents p, q must be nonnegative");
      const auto& c = e.at("coeff");
      if (!c.is_array() || c.size() != 4) throw Error(ErrorCode::ShapeMismatch, "coeff must hold four entries");
      for (int k = 0; k < 4; ++k) t.coeff(k / 2, k % 2) = cplx_from_json(c[k]);
      T.terms.push_back(t);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadInput, std::string("T json: ") + e.what());
  }
  return T;
}

ADHMFamily family_from_json(const json& j) {
  std::string type = j.value("type", "");
  if (type == "scaling") {
    double lam0 = j.value("lam0", 1.0), k = j.value("flow_k", j.value("k", 1.0));
    if (!(lam0 > 0)) throw Error(ErrorCode::BadInput, "lam0 must be positive");
    return scaling_family(lam0, k);
  }
  if (type == "affine") {
    OneInstantonParams p0{j.value("lam0", 1.0), 0.0, 0.0};
    if (j.contains("alpha0")) p0.alpha = cplx_from_json(j["alpha0"]);
    if (j.contains("beta0")) p0.beta = cplx_from_json(j["beta0"]);
    OneInstantonRate r{j.value("dlam", 0.0), 0.0, 0.0};
    if (j.contains("dalpha")) r.alpha = cplx_from_json(j["dalpha"]);
    if (j.contains("dbeta")) r.beta = cplx_from_json(j["dbeta"]);
    if (!(p0.lam > 0)) throw Error(ErrorCode::BadInput, "lam0 must be positive");
    return affine_family(p0, r);
  }
  // "remark45" is kept as an alias of "frame" for existing command lines
  if (type == "frame" || type == "remark45") return frame_map_family({j.value("lam0", 1.0), 0.0, 0.0});
  throw Error(ErrorCode::BadInput, "unknown family type '" + type + "'");
}

json family_spec_from_string(const std::string& s) {
  json j;
  auto colon = s.find(':');
  j["type"] = s.substr(0, colon);
  if (colon == std::string::npos) return j;
  std::stringstream ss(s.substr(colon + 1));
  std::string kv;
  while (std::getline(ss, kv, ',')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::BadInput, "family option '" + kv + "' is not key=value");
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "k") key = "flow_k";
    try {
      j[key] = std::stod(val);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadInput, "family option '" + key + "' is not a number");
    }
  }
  return j;
}

json to_json(const LoopMatrix& l) {
  json out = json::array();
  for (const auto& m : l.samples()) {
    json e = json::array();
    for (int k = 0; k < 4; ++k) e.push_back(to_json(m(k / 2, k % 2)));
    out.push_back(e);
  }
  return out;
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::BadInput, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadInput, path + ": " + e.what());
  }
}

}  // namespace sdym
