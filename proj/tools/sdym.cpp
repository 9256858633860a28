#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <regex>
#include <sstream>

#include "sdym/io.hpp"

using namespace sdym;
namespace fs = std::filesystem;

namespace {

// exit codes
constexpr int kOk = 0, kCheckFailed = 1, kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string command;
  std::optional<double> lambda;
  std::string center;  // "alpha,beta" as complex numbers
  std::string adhm;
  std::string grid;     // min,max,n
  std::string annulus;  // eps,n
  std::string family;
  std::string T;
  std::string out;
  std::vector<std::string> tol;
  std::string quadrature = "radial";
  double extent = 2;
  int n = 9;
  std::string x;  // x1,x2,x3,x4
  double t_end = 0.75;
  int steps = 4;
  int samples = 200;
  unsigned seed = 1;
};

cplx parse_cplx(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  static const std::regex re(R"(^([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)?(?:([+-]?(?:[0-9.]+(?:[eE][+-]?[0-9]+)?)?)i)?$)");
  std::smatch m;
  if (s.empty() || !std::regex_match(s, m, re)) throw UsageError("cannot parse complex number '" + s + "'");
  double re_part = m[1].matched ? std::stod(m[1].str()) : 0.0;
  double im_part = 0;
  if (m[2].matched) {
    std::string t = m[2].str();
    im_part = (t.empty() || t == "+") ? 1.0 : t == "-" ? -1.0 : std::stod(t);
  }
  return {re_part, im_part};
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("bad number '" + s + "' in " + what);
  }
}

AnnulusSpec parse_annulus(const std::string& s, AnnulusSpec def) {
  if (s.empty()) return def;
  auto p = split_commas(s);
  if (p.size() != 2) throw UsageError("--annulus expects eps,n");
  AnnulusSpec a{parse_double(p[0], "--annulus"), int(parse_double(p[1], "--annulus"))};
  try {
    a.check();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return a;
}

GridSpec parse_grid(const std::string& s, GridSpec def) {
  if (s.empty()) return def;
  auto p = split_commas(s);
  if (p.size() != 3) throw UsageError("--grid expects min,max,n");
  double lo = parse_double(p[0], "--grid"), hi = parse_double(p[1], "--grid");
  int n = int(parse_double(p[2], "--grid"));
  if (!(hi > lo) || n < 5) throw UsageError("--grid needs max > min and n >= 5");
  return GridSpec::cube(lo, hi, n);
}

OneInstantonParams params_of(const RunConfig& c) {
  OneInstantonParams p;
  if (c.lambda) p.lam = *c.lambda;
  if (!(p.lam > 0)) throw UsageError("--lambda must be positive");
  if (!c.center.empty()) {
    auto parts = split_commas(c.center);
    if (parts.size() != 2) throw UsageError("--center expects alpha,beta");
    p.alpha = parse_cplx(parts[0]);
    p.beta = parse_cplx(parts[1]);
  }
  return p;
}

R4Point point_of(const std::string& s, const R4Point& def) {
  if (s.empty()) return def;
  auto p = split_commas(s);
  if (p.size() != 4) throw UsageError("--x expects x1,x2,x3,x4");
  return {parse_double(p[0], "--x"), parse_double(p[1], "--x"), parse_double(p[2], "--x"), parse_double(p[3], "--x")};
}

// named tolerances with defaults; "--tol v" sets all, "--tol name=v" one
std::map<std::string, double> tolerances(const RunConfig& c, std::map<std::string, double> defaults) {
  for (const auto& t : c.tol) {
    auto eq = t.find('=');
    if (eq == std::string::npos) {
      double v = parse_double(t, "--tol");
      if (!(v > 0)) throw UsageError("tolerances must be positive");
      for (auto& [k, val] : defaults) val = v;
      continue;
    }
    std::string name = t.substr(0, eq);
    double v = parse_double(t.substr(eq + 1), "--tol");
    if (!(v > 0)) throw UsageError("tolerances must be positive");
    if (!defaults.count(name)) throw UsageError("unknown tolerance '" + name + "'");
    defaults[name] = v;
  }
  return defaults;
}

json echo(const RunConfig& c) {
  json j = {{"command", c.command}, {"quadrature", c.quadrature}, {"extent", c.extent}, {"n", c.n},
            {"t_end", c.t_end},     {"steps", c.steps},           {"samples", c.samples}, {"seed", c.seed}};
  if (c.lambda) j["lambda"] = *c.lambda;
  for (auto [k, v] : {std::pair{"center", &c.center}, {"adhm", &c.adhm}, {"grid", &c.grid}, {"annulus", &c.annulus},
                      {"family", &c.family}, {"T", &c.T}, {"x", &c.x}})
    if (!v->empty()) j[k] = *v;
  if (!c.tol.empty()) j["tol"] = c.tol;
  return j;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

void write_file(const RunConfig& c, const std::string& name, const std::string& text) {
  if (c.out.empty()) return;
  fs::create_directories(c.out);
  std::ofstream f(fs::path(c.out) / name);
  if (!f) throw UsageError("cannot write to " + c.out);
  f << text;
}

// the patching field chosen on the command line, plus ADHM data when there is one
struct Source {
  PatchingField field;
  std::optional<ADHMData> data;
  std::optional<OneInstantonParams> params;
};

Source source_of(const RunConfig& c) {
  Source s;
  if (!c.adhm.empty()) {
    if (!fs::exists(c.adhm)) throw UsageError("no such file " + c.adhm);
    try {
      s.data = adhm_from_json(load_json_file(c.adhm));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    s.field = adhm_field(*s.data);
  } else {
    s.params = params_of(c);
    s.data = one_instanton_data(*s.params);
    s.field = closed_form_field(*s.params);
  }
  return s;
}

json check_json(const std::string& name, double residual, double tol) {
  return {{"name", name}, {"residual", residual}, {"tol", tol}, {"pass", residual < tol}};
}

R4Point random_point(std::mt19937_64& g, double radius) {
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(0, 1);
  R4Point x{N(g), N(g), N(g), N(g)};
  double r = radius * std::pow(U(g), 0.25) / std::max(x.norm(), 1e-12);
  return {x.x1 * r, x.x2 * r, x.x3 * r, x.x4 * r};
}

int cmd_build(const RunConfig& c, json& rep) {
  Source s = source_of(c);
  AnnulusSpec spec = parse_annulus(c.annulus, {0.25, 64});
  R4Point x = point_of(c.x, s.params ? instanton_center(*s.params) : R4Point{});
  rep["adhm"] = to_json(*s.data);
  if (s.params) rep["params"] = to_json(*s.params);
  auto v = validate(*s.data);
  rep["valid"] = v.pass();
  if (!v.pass()) return kCheckFailed;
  std::vector<Mat2> G(spec.n_samples);
  for (int j = 0; j < spec.n_samples; ++j) G[j] = s.field(x, SpectralPoint(spec.sample(j)));
  rep["x"] = {x.x1, x.x2, x.x3, x.x4};
  rep["G_samples"] = to_json(LoopMatrix::from_samples(spec, G));
  return kOk;
}

int cmd_verify(const RunConfig& c, json& rep) {
  auto tol = tolerances(c, {{"adhm", 1e-10},
                            {"det_G", 1e-10},
                            {"reality_G", 1e-10},
                            {"closed_form", 1e-10},
                            {"split_reconstruction", 1e-10},
                            {"split_tail", 1e-10},
                            {"J_hermitian", 1e-10},
                            {"J_det", 1e-10}});
  rep["tolerances"] = tol;
  Source s = source_of(c);
  AnnulusSpec spec = parse_annulus(c.annulus, {0.25, 64});
  json checks = json::array();
  bool ok = true;
  auto add = [&](const std::string& name, double r) {
    double t = tol.at(name);
    checks.push_back(check_json(name, r, t));
    ok = ok && r < t;
  };

  auto v = validate(*s.data, 7, tol["adhm"]);
  for (const auto& ch : v.checks) {
    checks.push_back({{"name", "adhm." + ch.name}, {"residual", ch.residual}, {"tol", ch.tol}, {"pass", ch.pass}});
    ok = ok && ch.pass;
  }
  if (!v.pass()) {
    spdlog::warn("ADHM datum invalid; patching checks skipped");
    rep["checks"] = checks;
    return kCheckFailed;
  }

  std::mt19937_64 g(c.seed);
  std::uniform_real_distribution<double> U(0, 2 * std::numbers::pi);
  PatchingField numeric = adhm_field(*s.data);
  double det = 0, real = 0, closed = 0;
  for (int i = 0; i < c.samples; ++i) {
    R4Point x = random_point(g, 3.0);
    SpectralPoint z(std::polar(1.0, U(g)));
    Mat2 G = numeric(x, z);
    det = std::max(det, std::abs(G.determinant() - 1.0));
    real = std::max(real, maxabs(Mat2(numeric(x, sigma_cp1(z)).adjoint() - G)));
    if (s.params) closed = std::max(closed, maxabs(Mat2(G - closed_form_G(*s.params, x, z).G)));
  }
  add("det_G", det);
  add("reality_G", real);
  if (s.params) add("closed_form", closed);

  double rec = 0, tail = 0, herm = 0, jdet = 0;
  const int lines = std::max(1, c.samples / 10);
  for (int i = 0; i < lines; ++i) {
    R4Point x = random_point(g, 3.0);
    Splitting sp = split_at(numeric, x, spec, {24});
    rec = std::max(rec, sp.recon_residual);
    tail = std::max(tail, std::max(sp.analytic_residual, std::max(sp.psi0.tail(), sp.psiInf.tail())));
    Mat2 J = j_function(sp);
    herm = std::max(herm, maxabs(Mat2(J - J.adjoint())));
    jdet = std::max(jdet, std::abs(J.determinant() - 1.0));
  }
  add("split_reconstruction", rec);
  add("split_tail", tail);
  add("J_hermitian", herm);
  add("J_det", jdet);
  rep["checks"] = checks;
  rep["lines"] = lines;
  return ok ? kOk : kCheckFailed;
}

int cmd_split(const RunConfig& c, json& rep) {
  auto tol = tolerances(c, {{"split", 1e-10}});
  rep["tolerances"] = tol;
  Source s = source_of(c);
  AnnulusSpec spec = parse_annulus(c.annulus, {0.25, 64});
  R4Point x = point_of(c.x, s.params ? instanton_center(*s.params) : R4Point{});
  Splitting sp = split_at(s.field, x, spec, {24});
  Mat2 J = j_function(sp);
  rep["x"] = {x.x1, x.x2, x.x3, x.x4};
  rep["J"] = to_json(CMat(J));
  rep["psi0"] = to_json(sp.psi0);
  rep["psiInf"] = to_json(sp.psiInf);
  rep["recon_residual"] = sp.recon_residual;
  rep["analytic_residual"] = sp.analytic_residual;
  rep["reality_residual"] = sp.reality_residual;
  double worst = std::max(sp.recon_residual, sp.analytic_residual);
  return worst < tol["split"] ? kOk : kCheckFailed;
}

int cmd_action(const RunConfig& c, json& rep) {
  bool lattice = c.quadrature == "lattice";
  if (!lattice && c.quadrature != "radial") throw UsageError("--quadrature must be radial or lattice");
  auto tol = tolerances(c, {{"action", lattice ? 0.15 : 0.01}});
  rep["tolerances"] = tol;
  Source s = source_of(c);
  ActionOptions o;
  if (lattice) {
    o.quadrature = Quadrature::Lattice;
    o.extent = c.extent;
    o.n = c.n;
    if (!(o.extent > 0) || o.n < 5) throw UsageError("lattice needs --extent > 0 and --n >= 5");
  } else {
    if (!s.params) throw UsageError("radial quadrature needs one-instanton parameters");
    o.centre = instanton_center(*s.params);
    o.scale = s.params->lam;
  }
  ActionResult r = action_integral(s.field, o);
  const double expected = 8 * std::numbers::pi * std::numbers::pi * s.data->k;
  double rel = std::abs(r.action - expected) / expected;
  rep["action"] = r.action;
  rep["expected"] = expected;
  rep["rel_err"] = rel;
  rep["bulk"] = r.bulk;
  rep["tail"] = r.tail;
  rep["tail_warning"] = r.tail_warning;
  rep["evaluations"] = r.evaluations;
  if (r.tail_warning) spdlog::warn("lattice tail correction {:.4g} is a large part of the result", r.tail);
  return rel < tol["action"] ? kOk : kCheckFailed;
}

// pointwise residuals at the centre and at +-r along each axis
SDResidual sd_probes(const PatchingField& f, const R4Point& centre, double r) {
  SDResidual out;
  std::vector<R4Point> pts{centre};
  for (int a = 0; a < 4; ++a) {
    pts.push_back(centre.shifted(a, r));
    pts.push_back(centre.shifted(a, -r));
  }
  for (const auto& x : pts) {
    auto F = curvature_at(f, x);
    out.r1 = std::max(out.r1, maxabs(F[F_uv]));
    out.r2 = std::max(out.r2, maxabs(Mat2(F[F_uub] + F[F_vvb])));
    out.r3 = std::max(out.r3, maxabs(F[F_ubvb]));
  }
  return out;
}

int cmd_flow(const RunConfig& c, json& rep) {
  if (c.family.empty() == c.T.empty()) throw UsageError("flow needs exactly one of --family or --T");
  if (c.steps < 1 || !(c.t_end > 0)) throw UsageError("flow needs --steps >= 1 and --t-end > 0");
  std::optional<GridSpec> grid;
  if (!c.grid.empty()) grid = parse_grid(c.grid, {});

  std::function<PatchingField(double)> field_at;
  R4Point centre;
  double lam0 = 1;
  if (!c.family.empty()) {
    ADHMFamily fam;
    try {
      fam = family_from_json(family_spec_from_string(c.family));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    PatchingField G0 = fam.field_at(0);
    DeformField d = flow_generator(fam);
    field_at = [=](double t) { return integrate_flow(d, G0, t).field(); };
    auto p0 = fam.is_k1() ? fam.params(0) : OneInstantonParams{};
    centre = instanton_center(p0);
    lam0 = p0.lam;
  } else {
    if (!fs::exists(c.T)) throw UsageError("no such file " + c.T);
    TwistorPoly T;
    try {
      T = twistor_poly_from_json(load_json_file(c.T));
    } catch (const Error& e) {
      throw UsageError(e.what());
    }
    Source s = source_of(c);
    if (!s.params) throw UsageError("--T flows start from one-instanton parameters");
    centre = instanton_center(*s.params);
    lam0 = s.params->lam;
    PatchingField G0 = s.field;
    field_at = [=](double t) { return g_flow_exp(T, t, G0); };
  }

  std::string csv = "t,lambda_eff,action,sd_r1,sd_r2,sd_r3\n";
  json rows = json::array();
  bool truncated = false;
  std::string reason;
  for (int i = 0; i <= c.steps; ++i) {
    double t = c.t_end * i / c.steps;
    try {
      PatchingField f = field_at(t);
      // fixed bracket: a scale that outgrows it ends the trajectory
      auto m = measure_scale(f, centre, 8 * lam0);
      ActionOptions o;
      o.centre = centre;
      o.scale = m.lambda_eff;
      double action = action_integral(f, o).action;
      SDResidual sd = grid ? sd_residual(reconstruct_connection(f, *grid)) : sd_probes(f, centre, 0.5 * lam0);
      spdlog::info("t = {:.4f}  lambda_eff = {:.6f}  action = {:.6f}", t, m.lambda_eff, action);
      rows.push_back({{"t", t}, {"lambda_eff", m.lambda_eff}, {"action", action}, {"sd", {sd.r1, sd.r2, sd.r3}}});
      csv += fmt17(t) + "," + fmt17(m.lambda_eff) + "," + fmt17(action) + "," + fmt17(sd.r1) + "," + fmt17(sd.r2) +
             "," + fmt17(sd.r3) + "\n";
    } catch (const Error& e) {
      if (i == 0) throw;
      truncated = true;
      reason = e.what();
      spdlog::warn("trajectory truncated at t = {}: {}", t, reason);
      break;
    }
  }
  rep["rows"] = rows;
  rep["truncated"] = truncated;
  if (truncated) rep["truncation_reason"] = reason;
  write_file(c, "flow.csv", csv);
  return kOk;
}

int cmd_classify(const RunConfig& c, json& rep) {
  if (c.family.empty()) throw UsageError("classify needs --family");
  ADHMFamily fam;
  try {
    fam = family_from_json(family_spec_from_string(c.family));
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  auto tol = tolerances(c, {{"classify", 1e-8}});
  rep["tolerances"] = tol;
  std::vector<double> ts = {0.0, 0.15, 0.3, 0.45};
  ClassifyOptions opt;
  opt.tol = tol["classify"];
  Verdict v = classify_flow(fam, ts, opt);
  rep["verdict"] = verdict_string(v);
  if (auto* s = std::get_if<Scaling>(&v)) rep["flow_k"] = s->flow_k;
  if (auto* n = std::get_if<NotInduced>(&v)) {
    rep["witness"] = n->witness;
    rep["variation"] = n->variation;
  }
  json d0 = json::array();
  for (double t : ts) {
    auto co = absorb_holomorphic(family_coeffs(fam, t, opt));
    json e = {{"t", t}};
    for (int i : kSingularAtInf) e[kCoeffNames[i]] = to_json(CMat(co[i]));
    d0.push_back(e);
  }
  rep["d0"] = d0;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("sdym"));
  if (const char* lvl = std::getenv("SDYM_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
  else spdlog::set_level(spdlog::level::warn);

  CLI::App app{"self-dual Yang-Mills instantons through twistor patching matrices"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;
  double lambda_flag = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config; flags override its values");
    sub->add_option("--lambda", lambda_flag, "instanton scale");
    sub->add_option("--center", cfg.center, "instanton position alpha,beta (complex, e.g. 1+0i,0+0i)");
    sub->add_option("--adhm", cfg.adhm, "ADHM datum JSON");
    sub->add_option("--annulus", cfg.annulus, "eps,n");
    sub->add_option("--tol", cfg.tol, "name=value or value for all")->take_all();
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--x", cfg.x, "space-time point x1,x2,x3,x4");
  };
  std::map<std::string, CLI::App*> subs;
  const std::pair<const char*, const char*> commands[] = {
      {"build", "ADHM datum, validation and patching matrix samples at --x"},
      {"verify", "ADHM checks, patching-matrix invariants and splitting invariants"},
      {"split", "Birkhoff splitting and Yang J at --x"},
      {"action", "action integral against 8 pi^2 k"},
      {"flow", "flow a family or a generator T and track scale, action and self-duality"},
      {"classify", "decide whether a k = 1 family is induced by a symmetry"},
  };
  for (auto [name, help] : commands) {
    auto* s = app.add_subcommand(name, help);
    add_common(s);
    subs[name] = s;
  }
  subs["verify"]->add_option("--samples", cfg.samples, "random (x, z) points");
  subs["verify"]->add_option("--seed", cfg.seed);
  subs["action"]->add_option("--quadrature", cfg.quadrature, "radial | lattice");
  subs["action"]->add_option("--extent", cfg.extent, "lattice half-width");
  subs["action"]->add_option("--n", cfg.n, "lattice points per axis");
  subs["flow"]->add_option("--family", cfg.family, "family spec, e.g. scaling:lam0=1,k=1");
  subs["flow"]->add_option("--T", cfg.T, "TwistorPoly JSON");
  subs["flow"]->add_option("--grid", cfg.grid, "min,max,n lattice for the self-duality residuals (default: pointwise probes)");
  subs["flow"]->add_option("--t-end", cfg.t_end);
  subs["flow"]->add_option("--steps", cfg.steps);
  subs["classify"]->add_option("--family", cfg.family, "family spec");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  for (auto& [name, s] : subs)
    if (s->parsed()) cfg.command = name;
  CLI::App* sub = subs[cfg.command];

  auto start = std::chrono::steady_clock::now();
  json rep;
  int rc = kOk;
  try {
    if (!config_path.empty()) {
      json f;
      try {
        f = load_json_file(config_path);
      } catch (const Error& e) {
        throw UsageError(e.what());
      }
      // file values fill whatever the command line left unset
      auto take = [&](const char* key, auto& field) {
        if (f.contains(key) && sub->count(std::string("--") + key) == 0) field = f[key].get<std::decay_t<decltype(field)>>();
      };
      try {
        if (f.contains("lambda") && sub->count("--lambda") == 0) lambda_flag = f["lambda"].get<double>();
        take("center", cfg.center);
        take("adhm", cfg.adhm);
        take("annulus", cfg.annulus);
        take("out", cfg.out);
        take("x", cfg.x);
        take("tol", cfg.tol);
        take("quadrature", cfg.quadrature);
        take("extent", cfg.extent);
        take("n", cfg.n);
        take("family", cfg.family);
        take("T", cfg.T);
        take("grid", cfg.grid);
        take("samples", cfg.samples);
        take("seed", cfg.seed);
        if (f.contains("t_end") && sub->count("--t-end") == 0) cfg.t_end = f["t_end"].get<double>();
        if (f.contains("steps") && sub->count("--steps") == 0) cfg.steps = f["steps"].get<int>();
      } catch (const json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
      }
      if (f.contains("lambda") || sub->count("--lambda")) cfg.lambda = lambda_flag;
    } else if (sub->count("--lambda")) {
      cfg.lambda = lambda_flag;
    }

    rep["config"] = echo(cfg);
    if (cfg.command == "build") rc = cmd_build(cfg, rep);
    else if (cfg.command == "verify") rc = cmd_verify(cfg, rep);
    else if (cfg.command == "split") rc = cmd_split(cfg, rep);
    else if (cfg.command == "action") rc = cmd_action(cfg, rep);
    else if (cfg.command == "flow") rc = cmd_flow(cfg, rep);
    else rc = cmd_classify(cfg, rep);
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    bool usage = e.code() == ErrorCode::BadInput || e.code() == ErrorCode::ShapeMismatch;
    std::cerr << "error: " << e.what() << "\n";
    rep["error"] = e.what();
    rc = usage ? kUsage : kCheckFailed;
    if (usage) return rc;
  }
  if (!rep.contains("tolerances")) rep["tolerances"] = json::object();
  rep["pass"] = rc == kOk;
  rep["runtime_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::string text = rep.dump(2) + "\n";
  std::cout << text;
  try {
    write_file(cfg, cfg.command + ".json", text);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return rc;
}
