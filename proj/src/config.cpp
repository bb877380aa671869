#include "routh/config.hpp"

#include "routh/errors.hpp"
#include "routh/reduction.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace routh {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::Config, what); }

double number(const json& j, const char* key) {
  if (!j.contains(key)) fail(std::string("missing key '") + key + "'");
  if (!j[key].is_number()) fail(std::string("'") + key + "' must be a number");
  const double v = j[key].get<double>();
  if (!std::isfinite(v)) fail(std::string("'") + key + "' must be finite");
  return v;
}

Vec vector(const json& j, const char* key, Eigen::Index expected) {
  if (!j.contains(key)) {
    if (expected == 0) return Vec();
    fail(std::string("missing key '") + key + "'");
  }
  const json& a = j[key];
  if (!a.is_array()) fail(std::string("'") + key + "' must be an array");
  if (static_cast<Eigen::Index>(a.size()) != expected) {
    fail(std::string("'") + key + "' must have " + std::to_string(expected) + " entries");
  }
  Vec v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    if (!a[i].is_number()) fail(std::string("'") + key + "' entries must be numbers");
    v[i] = a[i].get<double>();
    if (!std::isfinite(v[i])) fail(std::string("'") + key + "' entries must be finite");
  }
  return v;
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) fail("unknown key '" + item.key() + "' in " + where);
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config must be a JSON object");
  check_keys(j, {"system", "inertia", "potential", "momentum", "energy_target", "t_end", "dt",
                 "integrator", "initial", "custom", "output"},
             "config");

  RunConfig cfg;
  if (!j.contains("system") || !j["system"].is_string()) fail("'system' must be a string");
  const std::string sys = j["system"];
  if (sys == "rigid-body") cfg.system = SystemKind::RigidBody;
  else if (sys == "central-force") cfg.system = SystemKind::CentralForce;
  else if (sys == "custom-matrix") cfg.system = SystemKind::CustomMatrix;
  else fail("unknown system '" + sys + "'");

  if (j.contains("potential")) {
    const json& p = j["potential"];
    if (!p.is_object()) fail("'potential' must be an object");
    check_keys(p, {"type", "coefficient"}, "potential");
    if (!p.contains("type") || !p["type"].is_string()) fail("'potential.type' must be a string");
    cfg.potential.type = p["type"];
    if (cfg.potential.type != "none") cfg.potential.coefficient = number(p, "coefficient");
  }
  const std::string& pt = cfg.potential.type;
  if (pt != "none" && pt != "heavy" && pt != "harmonic") fail("unknown potential '" + pt + "'");
  if (pt == "heavy" && cfg.system != SystemKind::RigidBody) fail("'heavy' needs system rigid-body");
  if (pt == "harmonic" && cfg.system != SystemKind::CentralForce) {
    fail("'harmonic' needs system central-force");
  }

  int n = 0, k = 0, l = 0;
  switch (cfg.system) {
    case SystemKind::RigidBody: {
      const Vec in = vector(j, "inertia", 3);
      cfg.A = in[0];
      cfg.B = in[1];
      cfg.C = in[2];
      n = 2, l = 1;
      break;
    }
    case SystemKind::CentralForce:
      n = 1, l = 1;
      break;
    case SystemKind::CustomMatrix: {
      if (!j.contains("custom") || !j["custom"].is_object()) fail("custom-matrix needs 'custom'");
      const json& c = j["custom"];
      check_keys(c, {"n", "k", "l", "matrix", "potential_constant"}, "custom");
      for (const char* key : {"n", "k", "l"}) {
        if (!c.contains(key) || !c[key].is_number_integer() || c[key].get<int>() < 0 ||
            c[key].get<int>() > 3) {
          fail(std::string("'custom.") + key + "' must be an integer in [0, 3]");
        }
      }
      cfg.custom.n = c["n"];
      cfg.custom.k = c["k"];
      cfg.custom.l = c["l"];
      if (cfg.custom.n < 1) fail("'custom.n' must be >= 1");
      const int d = cfg.custom.n + cfg.custom.k + cfg.custom.l;
      if (!c.contains("matrix") || !c["matrix"].is_array() || static_cast<int>(c["matrix"].size()) != d) {
        fail("'custom.matrix' must have " + std::to_string(d) + " rows");
      }
      cfg.custom.matrix.resize(d, d);
      for (int r = 0; r < d; ++r) {
        const json& row = c["matrix"][r];
        if (!row.is_array() || static_cast<int>(row.size()) != d) {
          fail("'custom.matrix' must be square");
        }
        for (int col = 0; col < d; ++col) {
          if (!row[col].is_number()) fail("'custom.matrix' entries must be numbers");
          cfg.custom.matrix(r, col) = row[col].get<double>();
        }
      }
      if (c.contains("potential_constant")) {
        cfg.custom.potential_constant = number(c, "potential_constant");
      }
      n = cfg.custom.n, k = cfg.custom.k, l = cfg.custom.l;
      break;
    }
  }

  if (j.contains("momentum")) {
    const json& m = j["momentum"];
    if (!m.is_object()) fail("'momentum' must be an object");
    check_keys(m, {"xi", "eta"}, "momentum");
    cfg.momentum = {vector(m, "xi", k), vector(m, "eta", l)};
  } else {
    cfg.momentum = {Vec::Zero(k), Vec::Zero(l)};
  }

  if (j.contains("energy_target") && !j["energy_target"].is_null()) {
    cfg.energy_target = number(j, "energy_target");
  }
  if (j.contains("t_end")) cfg.t_end = number(j, "t_end");
  if (!(cfg.t_end > 0)) fail("'t_end' must be > 0");
  if (j.contains("dt")) cfg.integrator.dt = number(j, "dt");
  if (j.contains("integrator")) {
    const json& ic = j["integrator"];
    if (!ic.is_object()) fail("'integrator' must be an object");
    check_keys(ic, {"method", "abs_tol", "rel_tol", "max_steps"}, "integrator");
    if (ic.contains("method")) {
      if (!ic["method"].is_string()) fail("'integrator.method' must be a string");
      const std::string m = ic["method"];
      if (m == "rk4") cfg.integrator.method = Method::Rk4Fixed;
      else if (m == "rk45") cfg.integrator.method = Method::Rk45Adaptive;
      else fail("unknown integrator method '" + m + "'");
    }
    if (ic.contains("abs_tol")) cfg.integrator.abs_tol = number(ic, "abs_tol");
    if (ic.contains("rel_tol")) cfg.integrator.rel_tol = number(ic, "rel_tol");
    if (ic.contains("max_steps")) {
      if (!ic["max_steps"].is_number_integer()) fail("'integrator.max_steps' must be an integer");
      cfg.integrator.max_steps = ic["max_steps"];
    }
  }
  try {
    cfg.integrator.validate();
  } catch (const Error& e) {
    fail(e.what());
  }

  if (!j.contains("initial") || !j["initial"].is_object()) fail("missing object 'initial'");
  const json& init = j["initial"];
  check_keys(init, {"q", "qdot", "x", "psi"}, "initial");
  cfg.q = vector(init, "q", n);
  cfg.qdot = vector(init, "qdot", n);
  cfg.x = init.contains("x") ? vector(init, "x", k) : Vec::Zero(k);
  cfg.psi = init.contains("psi") ? vector(init, "psi", l) : Vec::Zero(l);

  if (j.contains("output")) {
    if (!j["output"].is_string()) fail("'output' must be a string");
    cfg.output = j["output"];
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

rigidbody::RigidBodyParams rigid_body_params(const RunConfig& cfg) {
  if (cfg.system != SystemKind::RigidBody) fail("command needs system rigid-body");
  rigidbody::RigidBodyParams p;
  p.A = cfg.A;
  p.B = cfg.B;
  p.C = cfg.C;
  p.potential_name = cfg.potential.type;
  p.potential = cfg.potential.type == "heavy" ? rigidbody::heavy_potential(cfg.potential.coefficient)
                                              : rigidbody::free_potential();
  return p;
}

SymmetricSystem make_system(const RunConfig& cfg) {
  switch (cfg.system) {
    case SystemKind::RigidBody:
      return rigidbody::rb_system(rigid_body_params(cfg));
    case SystemKind::CentralForce: {
      SymmetricSystem sys;
      sys.n = 1;
      sys.l = 1;
      sys.mass_matrix = [](const Vec& q) {
        Mat k = Mat::Zero(2, 2);
        k(0, 0) = 1.0;
        k(1, 1) = q[0] * q[0];
        return k;
      };
      const double c = cfg.potential.type == "harmonic" ? cfg.potential.coefficient : 0.0;
      sys.potential = [c](const Vec& q) { return 0.5 * c * q[0] * q[0]; };
      sys.pole_guard = [](const Vec& q) { return q[0]; };
      sys.id = "central-force";
      sys.chart = "polar(r;angle)";
      return sys;
    }
    case SystemKind::CustomMatrix: {
      SymmetricSystem sys;
      sys.n = cfg.custom.n;
      sys.k = cfg.custom.k;
      sys.l = cfg.custom.l;
      sys.mass_matrix = [m = cfg.custom.matrix](const Vec&) { return m; };
      sys.potential = [c = cfg.custom.potential_constant](const Vec&) { return c; };
      sys.id = "custom-matrix";
      sys.chart = "constant";
      return sys;
    }
  }
  fail("unknown system");
}

ReducedState initial_reduced(const SymmetricSystem& sys, const RunConfig& cfg) {
  ReducedState r{cfg.q, cfg.qdot};
  if (!cfg.energy_target || r.qdot.isZero(0.0)) return r;
  const double v = sys.potential(r.q);
  const double kin = reduced_energy(sys, cfg.momentum, r) - v;
  // Only the f = 0 energy is homogeneous of degree two in qdot.
  if (!cfg.momentum.stacked().isZero(0.0)) fail("'energy_target' needs zero momentum");
  if (!(*cfg.energy_target > v)) fail("'energy_target' is below the potential at the initial q");
  r.qdot *= std::sqrt((*cfg.energy_target - v) / kin);
  return r;
}

std::vector<std::string> reduced_columns(const RunConfig& cfg) {
  switch (cfg.system) {
    case SystemKind::RigidBody: return {"phi", "theta", "phidot", "thetadot"};
    case SystemKind::CentralForce: return {"r", "rdot"};
    case SystemKind::CustomMatrix: break;
  }
  std::vector<std::string> out;
  for (int i = 0; i < cfg.custom.n; ++i) out.push_back("q" + std::to_string(i));
  for (int i = 0; i < cfg.custom.n; ++i) out.push_back("qdot" + std::to_string(i));
  return out;
}

std::vector<std::string> full_columns(const RunConfig& cfg) {
  switch (cfg.system) {
    case SystemKind::RigidBody:
      return {"phi", "theta", "psi", "phidot", "thetadot", "psidot"};
    case SystemKind::CentralForce: return {"r", "angle", "rdot", "angledot"};
    case SystemKind::CustomMatrix: break;
  }
  std::vector<std::string> pos, vel;
  auto add = [&](const char* name, int count) {
    for (int i = 0; i < count; ++i) {
      pos.push_back(name + std::to_string(i));
      vel.push_back(std::string(name) + "dot" + std::to_string(i));
    }
  };
  add("q", cfg.custom.n);
  add("x", cfg.custom.k);
  add("psi", cfg.custom.l);
  pos.insert(pos.end(), vel.begin(), vel.end());
  return pos;
}

}  // namespace routh
