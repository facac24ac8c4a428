#include "geopmp/io.hpp"

#include "geopmp/builtin_maps.hpp"
#include "geopmp/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace geopmp {

namespace {

std::string join(const std::string& ptr, const std::string& key) { return ptr + "/" + key; }
std::string join(const std::string& ptr, size_t i) { return ptr + "/" + std::to_string(i); }

[[noreturn]] void fail(const std::string& ptr, const std::string& msg) { throw ParseError(ptr, msg); }

const Json& field(const Json& obj, const std::string& key, const std::string& ptr) {
  if (!obj.is_object()) fail(ptr, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(join(ptr, key), "missing required field '" + key + "'");
  return *it;
}

const Json* optional_field(const Json& obj, const std::string& key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return nullptr;
  return &*it;
}

int get_int(const Json& j, const std::string& ptr) {
  if (!j.is_number_integer()) fail(ptr, "expected an integer");
  return j.get<int>();
}

double get_num(const Json& j, const std::string& ptr) {
  if (!j.is_number()) fail(ptr, "expected a number");
  return j.get<double>();
}

std::string get_str(const Json& j, const std::string& ptr) {
  if (!j.is_string()) fail(ptr, "expected a string");
  return j.get<std::string>();
}

Vec get_vec(const Json& j, const std::string& ptr, int expected = -1) {
  if (!j.is_array()) fail(ptr, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v(i) = get_num(j[i], join(ptr, i));
  if (expected >= 0 && v.size() != expected)
    fail(ptr, "expected length " + std::to_string(expected) + ", got " + std::to_string(v.size()));
  return v;
}

/// Matrices are arrays of rows.
Mat get_mat(const Json& j, const std::string& ptr, int rows = -1, int cols = -1) {
  if (!j.is_array()) fail(ptr, "expected an array of rows");
  const int r = static_cast<int>(j.size());
  if (rows >= 0 && r != rows)
    fail(ptr, "expected " + std::to_string(rows) + " rows, got " + std::to_string(r));
  int c = cols;
  if (r > 0) {
    if (!j[0].is_array()) fail(join(ptr, 0), "expected a row array");
    if (c < 0) c = static_cast<int>(j[0].size());
  }
  if (c < 0) c = 0;
  Mat M(r, c);
  for (int i = 0; i < r; ++i) M.row(i) = get_vec(j[i], join(ptr, i), c).transpose();
  return M;
}

Json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json mat_json(const Mat& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) rows.push_back(vec_json(M.row(i).transpose()));
  return rows;
}

// ---- manifold -------------------------------------------------------------

ManifoldPtr parse_manifold(const Json& j, const std::string& ptr, Json& canon) {
  const std::string kind = get_str(field(j, "kind", ptr), join(ptr, "kind"));
  canon = Json::object();
  canon["kind"] = kind;
  try {
    if (kind == "euclidean") {
      const int n = get_int(field(j, "dim", ptr), join(ptr, "dim"));
      if (n < 1) fail(join(ptr, "dim"), "dim must be >= 1");
      canon["dim"] = n;
      return Manifold::euclidean(n);
    }
    if (kind == "sphere") {
      const int N = get_int(field(j, "ambient_dim", ptr), join(ptr, "ambient_dim"));
      if (N < 2) fail(join(ptr, "ambient_dim"), "ambient_dim must be >= 2");
      canon["ambient_dim"] = N;
      return Manifold::sphere(N);
    }
    if (kind == "so3") return Manifold::so3();
    if (kind == "affine") {
      const Vec o = get_vec(field(j, "origin", ptr), join(ptr, "origin"));
      const Mat B = get_mat(field(j, "basis", ptr), join(ptr, "basis"), static_cast<int>(o.size()));
      canon["origin"] = vec_json(o);
      canon["basis"] = mat_json(B);
      return Manifold::affine_plane(o, B);
    }
    if (kind == "product") {
      const Json& fs = field(j, "factors", ptr);
      if (!fs.is_array() || fs.empty()) fail(join(ptr, "factors"), "expected a non-empty array");
      std::vector<ManifoldPtr> factors;
      canon["factors"] = Json::array();
      for (size_t i = 0; i < fs.size(); ++i) {
        Json c;
        factors.push_back(parse_manifold(fs[i], join(join(ptr, "factors"), i), c));
        canon["factors"].push_back(c);
      }
      return Manifold::product(std::move(factors));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    fail(ptr, e.what());
  }
  fail(join(ptr, "kind"), "unknown manifold kind '" + kind + "'");
}

// ---- per-stage fields -----------------------------------------------------

struct Located {
  const Json* value;
  std::string ptr;
};

std::vector<Located> per_stage(const Json& doc, const std::string& key, int T) {
  const Json& j = field(doc, key, "");
  const std::string ptr = "/" + key;
  std::vector<Located> out;
  if (j.is_array()) {
    if (static_cast<int>(j.size()) != T)
      fail(ptr, "expected one entry per stage (" + std::to_string(T) + "), got " +
                    std::to_string(j.size()));
    for (size_t i = 0; i < j.size(); ++i) out.push_back({&j[i], join(ptr, i)});
  } else {
    for (int t = 0; t < T; ++t) out.push_back({&j, ptr});
  }
  return out;
}

SmoothMap parse_dynamics(const Json& j, const std::string& ptr, int N, int m, Json& canon) {
  const std::string type = get_str(field(j, "type", ptr), join(ptr, "type"));
  canon = Json::object();
  canon["type"] = type;
  if (type == "linear") {
    const Mat A = get_mat(field(j, "A", ptr), join(ptr, "A"), N, N);
    const Mat B = get_mat(field(j, "B", ptr), join(ptr, "B"), N, m);
    Vec c = Vec::Zero(N);
    if (const Json* cj = optional_field(j, "c")) c = get_vec(*cj, join(ptr, "c"), N);
    canon["A"] = mat_json(A);
    canon["B"] = mat_json(B);
    canon["c"] = vec_json(c);
    return builtin::linear_dynamics(A, B, c);
  }
  if (type == "identity") return builtin::linear_dynamics(Mat::Identity(N, N), Mat::Zero(N, m), Vec::Zero(N));
  if (type == "planar_rotation") {
    if (N != 2) fail(ptr, "planar_rotation needs a 2-dimensional ambient state");
    const Vec w = get_vec(field(j, "w", ptr), join(ptr, "w"), m);
    double offset = 0.0;
    if (const Json* o = optional_field(j, "offset")) offset = get_num(*o, join(ptr, "offset"));
    canon["w"] = vec_json(w);
    canon["offset"] = offset;
    return builtin::planar_rotation(w, offset);
  }
  if (type == "so3_attitude") {
    if (N != 9) fail(ptr, "so3_attitude needs the so3 manifold");
    const Mat B = get_mat(field(j, "B", ptr), join(ptr, "B"), 3, m);
    canon["B"] = mat_json(B);
    return builtin::so3_attitude(B);
  }
  fail(join(ptr, "type"), "unknown dynamics type '" + type + "'");
}

SmoothMap parse_cost(const Json& j, const std::string& ptr, int N, int m, bool terminal, Json& canon) {
  const std::string type = get_str(field(j, "type", ptr), join(ptr, "type"));
  canon = Json::object();
  canon["type"] = type;
  auto p = builtin::QuadraticCostParams::zeros(N, m);
  if (type == "zero") return builtin::quadratic_cost(p);
  if (type != "quadratic") fail(join(ptr, "type"), "unknown cost type '" + type + "'");
  if (terminal)
    for (const char* key : {"R", "S", "r", "u_ref"})
      if (optional_field(j, key)) fail(join(ptr, key), "terminal cost cannot depend on the control");
  if (const Json* v = optional_field(j, "Q")) p.Q = get_mat(*v, join(ptr, "Q"), N, N);
  if (const Json* v = optional_field(j, "q")) p.q = get_vec(*v, join(ptr, "q"), N);
  if (const Json* v = optional_field(j, "x_ref")) p.x_ref = get_vec(*v, join(ptr, "x_ref"), N);
  if (const Json* v = optional_field(j, "constant")) p.constant = get_num(*v, join(ptr, "constant"));
  canon["Q"] = mat_json(p.Q);
  canon["q"] = vec_json(p.q);
  canon["x_ref"] = vec_json(p.x_ref);
  if (!terminal) {
    if (const Json* v = optional_field(j, "R")) p.R = get_mat(*v, join(ptr, "R"), m, m);
    if (const Json* v = optional_field(j, "S")) p.S = get_mat(*v, join(ptr, "S"), N, m);
    if (const Json* v = optional_field(j, "r")) p.r = get_vec(*v, join(ptr, "r"), m);
    if (const Json* v = optional_field(j, "u_ref")) p.u_ref = get_vec(*v, join(ptr, "u_ref"), m);
    canon["R"] = mat_json(p.R);
    canon["S"] = mat_json(p.S);
    canon["r"] = vec_json(p.r);
    canon["u_ref"] = vec_json(p.u_ref);
  }
  canon["constant"] = p.constant;
  return builtin::quadratic_cost(p);
}

ControlSet parse_control_set(const Json& j, const std::string& ptr, int m, Json& canon) {
  const std::string type = get_str(field(j, "type", ptr), join(ptr, "type"));
  canon = Json::object();
  canon["type"] = type;
  if (type == "box") {
    const Vec lo = get_vec(field(j, "lower", ptr), join(ptr, "lower"), m);
    const Vec hi = get_vec(field(j, "upper", ptr), join(ptr, "upper"), m);
    for (int i = 0; i < m; ++i)
      if (!(lo(i) <= hi(i))) fail(ptr, "box lower bound exceeds upper bound at coordinate " + std::to_string(i));
    canon["lower"] = vec_json(lo);
    canon["upper"] = vec_json(hi);
    return ControlSet::box(lo, hi);
  }
  if (type == "polytope") {
    const Mat A = get_mat(field(j, "A", ptr), join(ptr, "A"), -1, m);
    const Vec b = get_vec(field(j, "b", ptr), join(ptr, "b"), static_cast<int>(A.rows()));
    canon["A"] = mat_json(A);
    canon["b"] = vec_json(b);
    return ControlSet::polytope(A, b);
  }
  if (type == "ball") {
    const Vec c = get_vec(field(j, "center", ptr), join(ptr, "center"), m);
    const double r = get_num(field(j, "radius", ptr), join(ptr, "radius"));
    if (!(r > 0.0)) fail(join(ptr, "radius"), "radius must be positive");
    canon["center"] = vec_json(c);
    canon["radius"] = r;
    return ControlSet::ball(c, r);
  }
  if (type == "affine") {
    const Mat C = get_mat(field(j, "C", ptr), join(ptr, "C"), -1, m);
    const Vec d = get_vec(field(j, "d", ptr), join(ptr, "d"), static_cast<int>(C.rows()));
    canon["C"] = mat_json(C);
    canon["d"] = vec_json(d);
    return ControlSet::affine(C, d);
  }
  if (type == "full") return ControlSet::full(m);
  fail(join(ptr, "type"), "unknown control set type '" + type + "'");
}

SmoothMap parse_state_constraint(const Json& j, const std::string& ptr, int N, int m, Json& canon) {
  const std::string type = get_str(field(j, "type", ptr), join(ptr, "type"));
  canon["type"] = type;
  if (type == "affine") {
    const Mat G = get_mat(field(j, "G", ptr), join(ptr, "G"), -1, N);
    const Vec h = get_vec(field(j, "h", ptr), join(ptr, "h"), static_cast<int>(G.rows()));
    if (G.rows() == 0) fail(join(ptr, "G"), "at least one constraint row required");
    canon["G"] = mat_json(G);
    canon["h"] = vec_json(h);
    return builtin::affine_constraint(G, h, m);
  }
  if (type == "quadratic") {
    const Json& rows = field(j, "rows", ptr);
    const std::string rptr = join(ptr, "rows");
    if (!rows.is_array() || rows.empty()) fail(rptr, "expected a non-empty array of rows");
    std::vector<builtin::QuadraticRow> qr;
    canon["rows"] = Json::array();
    for (size_t i = 0; i < rows.size(); ++i) {
      const std::string p = join(rptr, i);
      builtin::QuadraticRow row;
      row.P = get_mat(field(rows[i], "P", p), join(p, "P"), N, N);
      row.a = Vec::Zero(N);
      if (const Json* a = optional_field(rows[i], "a")) row.a = get_vec(*a, join(p, "a"), N);
      if (const Json* b = optional_field(rows[i], "b")) row.b = get_num(*b, join(p, "b"));
      canon["rows"].push_back({{"P", mat_json(row.P)}, {"a", vec_json(row.a)}, {"b", row.b}});
      qr.push_back(std::move(row));
    }
    return builtin::quadratic_constraint(qr, N, m);
  }
  fail(join(ptr, "type"), "unknown state constraint type '" + type + "'");
}

}  // namespace

ControlProblem parse_problem(const Json& doc) {
  if (!doc.is_object()) fail("", "problem file must be a JSON object");
  const std::string version = get_str(field(doc, "version", ""), "/version");
  if (version != kProblemVersion)
    fail("/version", "unsupported version '" + version + "' (expected " + kProblemVersion + ")");

  ControlProblem p;
  Json canon = Json::object();
  canon["version"] = kProblemVersion;

  p.horizon = get_int(field(doc, "horizon", ""), "/horizon");
  if (p.horizon < 1) fail("/horizon", "horizon must be \xE2\x89\xA5 1");
  p.control_dim = get_int(field(doc, "control_dim", ""), "/control_dim");
  if (p.control_dim < 1) fail("/control_dim", "control_dim must be \xE2\x89\xA5 1");
  const int T = p.horizon;
  const int m = p.control_dim;
  canon["horizon"] = T;
  canon["control_dim"] = m;

  Json mc;
  p.manifold = parse_manifold(field(doc, "manifold", ""), "/manifold", mc);
  canon["manifold"] = mc;
  const int N = p.manifold->ambient_dim();

  p.x_init = get_vec(field(doc, "x_init", ""), "/x_init", N);
  if (!p.manifold->contains(p.x_init)) fail("/x_init", "x_init is not on the manifold");
  canon["x_init"] = vec_json(p.x_init);

  canon["dynamics"] = Json::array();
  for (const auto& [j, ptr] : per_stage(doc, "dynamics", T)) {
    Json c;
    p.dynamics.push_back(parse_dynamics(*j, ptr, N, m, c));
    canon["dynamics"].push_back(c);
  }
  canon["stage_cost"] = Json::array();
  for (const auto& [j, ptr] : per_stage(doc, "stage_cost", T)) {
    Json c;
    p.stage_costs.push_back(parse_cost(*j, ptr, N, m, false, c));
    canon["stage_cost"].push_back(c);
  }
  {
    Json c;
    p.terminal_cost = parse_cost(field(doc, "terminal_cost", ""), "/terminal_cost", N, m, true, c);
    canon["terminal_cost"] = c;
  }
  canon["control_sets"] = Json::array();
  for (const auto& [j, ptr] : per_stage(doc, "control_sets", T)) {
    Json c;
    p.control_sets.push_back(parse_control_set(*j, ptr, m, c));
    canon["control_sets"].push_back(c);
  }

  // State constraints: entries carry the stages t in 1..T they apply to
  // (all stages when omitted); at most one entry per stage.
  p.state_constraints.assign(T, std::nullopt);
  canon["state_constraints"] = Json::array();
  if (const Json* sc = optional_field(doc, "state_constraints")) {
    if (!sc->is_array()) fail("/state_constraints", "expected an array");
    for (size_t i = 0; i < sc->size(); ++i) {
      const std::string ptr = join("/state_constraints", i);
      const Json& e = (*sc)[i];
      std::vector<int> stages;
      if (const Json* st = optional_field(e, "stages")) {
        if (!st->is_array()) fail(join(ptr, "stages"), "expected an array of stage indices");
        for (size_t k = 0; k < st->size(); ++k) {
          const int t = get_int((*st)[k], join(join(ptr, "stages"), k));
          if (t < 1 || t > T)
            fail(join(join(ptr, "stages"), k), "stage " + std::to_string(t) + " outside 1.." + std::to_string(T));
          stages.push_back(t);
        }
      } else {
        for (int t = 1; t <= T; ++t) stages.push_back(t);
      }
      Json c = Json::object();
      c["stages"] = stages;
      const SmoothMap g = parse_state_constraint(e, ptr, N, m, c);
      for (int t : stages) {
        if (p.state_constraints[t - 1]) fail(ptr, "stage " + std::to_string(t) + " already has a state constraint");
        p.state_constraints[t - 1] = g;
      }
      canon["state_constraints"].push_back(c);
    }
  }

  p.freq = FrequencySpec::unconstrained(T, m);
  if (const Json* fs = optional_field(doc, "freq_support")) {
    if (!fs->is_array() || static_cast<int>(fs->size()) != m)
      fail("/freq_support", "expected one entry per control component (" + std::to_string(m) + ")");
    for (int k = 0; k < m; ++k) {
      const std::string ptr = join("/freq_support", static_cast<size_t>(k));
      const Json& W = (*fs)[k];
      if (W.is_null()) continue;
      if (!W.is_array()) fail(ptr, "expected an array of bins or null");
      std::set<int> bins;
      for (size_t i = 0; i < W.size(); ++i) {
        const int b = get_int(W[i], join(ptr, i));
        if (b < 0 || b >= T)
          fail(join(ptr, i), "freq_support bin " + std::to_string(b) + " out of bounds 0.." +
                                 std::to_string(T - 1));
        bins.insert(b);
      }
      p.freq.allowed_support[k] = bins;
    }
  }
  canon["freq_support"] = Json::array();
  for (const auto& W : p.freq.allowed_support) canon["freq_support"].push_back(std::vector<int>(W.begin(), W.end()));

  try {
    finalize_problem(p);
  } catch (const Error& e) {
    fail("", e.what());
  }
  p.descriptor = canon.dump();
  return p;
}

ControlProblem parse_problem_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail("", std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(doc);
}

ControlProblem parse_problem_file(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    fail("", e.what());
  }
  return parse_problem_text(text);
}

std::string serialize_problem(const ControlProblem& problem) {
  if (problem.descriptor.empty())
    throw Error("serialize_problem: problem was not built from a problem file");
  return Json::parse(problem.descriptor).dump(2);
}

// ---- CSV ------------------------------------------------------------------

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  try {
    size_t pos = 0;
    out = std::stod(t, &pos);
    return pos == t.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::string trajectory_to_csv(const Trajectory& traj) {
  const int T = traj.horizon();
  const Eigen::Index N = traj.states.front().ambient().size();
  const Eigen::Index m = T > 0 ? traj.controls.front().size() : 0;
  std::ostringstream os;
  os << "t";
  for (Eigen::Index i = 0; i < N; ++i) os << ",x" << i;
  for (Eigen::Index i = 0; i < m; ++i) os << ",u" << i;
  os << "\n";
  for (int t = 0; t <= T; ++t) {
    os << t;
    for (Eigen::Index i = 0; i < N; ++i) os << "," << fmt(traj.states[t].ambient()(i));
    for (Eigen::Index i = 0; i < m; ++i) {
      os << ",";
      if (t < T) os << fmt(traj.controls[t](i));
    }
    os << "\n";
  }
  return os.str();
}

Trajectory trajectory_from_csv(const ControlProblem& problem, const std::string& text) {
  const int T = problem.horizon;
  const int N = problem.state_ambient_dim();
  const int m = problem.control_dim;
  std::istringstream is(text);
  std::string line;
  std::vector<Vec> states, controls;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(line);
    double first;
    if (!parse_double(cells[0], first)) continue;  // header
    if (static_cast<int>(cells.size()) != 1 + N + m && static_cast<int>(cells.size()) != 1 + N)
      throw Error("trajectory CSV line " + std::to_string(lineno) + ": expected " +
                  std::to_string(1 + N + m) + " columns");
    Vec x(N);
    for (int i = 0; i < N; ++i)
      if (!parse_double(cells[1 + i], x(i)))
        throw Error("trajectory CSV line " + std::to_string(lineno) + ": bad state value");
    states.push_back(x);
    const bool has_u = static_cast<int>(cells.size()) == 1 + N + m && !trim(cells[1 + N]).empty();
    if (has_u) {
      Vec u(m);
      for (int i = 0; i < m; ++i)
        if (!parse_double(cells[1 + N + i], u(i)))
          throw Error("trajectory CSV line " + std::to_string(lineno) + ": bad control value");
      controls.push_back(u);
    }
  }
  if (static_cast<int>(states.size()) != T + 1 || static_cast<int>(controls.size()) != T)
    throw Error("trajectory CSV needs " + std::to_string(T + 1) + " rows with controls on the first " +
                std::to_string(T));
  return make_trajectory(problem, states, controls);
}

std::vector<std::vector<double>> read_numeric_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream is(text);
  std::string line;
  bool first_line = true;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    std::vector<double> row;
    bool ok = true;
    for (const auto& cell : split(line)) {
      double v;
      if (!parse_double(cell, v)) {
        ok = false;
        break;
      }
      row.push_back(v);
    }
    if (!ok) {
      if (first_line) {
        first_line = false;
        continue;
      }
      throw Error("CSV: non-numeric cell in line '" + line + "'");
    }
    first_line = false;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string dft_to_csv(const CVec& v) {
  std::ostringstream os;
  os << "bin,re,im,abs\n";
  for (Eigen::Index i = 0; i < v.size(); ++i)
    os << i << "," << fmt(v(i).real()) << "," << fmt(v(i).imag()) << "," << fmt(std::abs(v(i))) << "\n";
  return os.str();
}

// ---- JSON reports ---------------------------------------------------------

Json to_json(const PMPCertificate& c) {
  Json j;
  j["nu"] = c.abnormal;
  j["state_multipliers"] = Json::array();
  for (const auto& mu : c.state_multipliers) j["state_multipliers"].push_back(vec_json(mu));
  j["freq_multiplier"] = vec_json(c.freq_multiplier);
  j["adjoints"] = Json::array();
  for (const auto& p : c.adjoints) j["adjoints"].push_back(vec_json(p));
  j["mass"] = c.mass();
  return j;
}

PMPCertificate certificate_from_json(const ControlProblem& problem, const Json& j) {
  PMPCertificate c = zero_certificate(problem);
  const int T = problem.horizon;
  c.abnormal = get_num(field(j, "nu", ""), "/nu");
  const Json& adj = field(j, "adjoints", "");
  if (!adj.is_array() || static_cast<int>(adj.size()) != T)
    fail("/adjoints", "expected " + std::to_string(T) + " adjoints p_1..p_T");
  for (int t = 0; t < T; ++t)
    c.adjoints[t] = get_vec(adj[t], join("/adjoints", static_cast<size_t>(t)), problem.state_ambient_dim());
  if (const Json* sm = optional_field(j, "state_multipliers")) {
    if (!sm->is_array() || static_cast<int>(sm->size()) != T)
      fail("/state_multipliers", "expected " + std::to_string(T) + " entries");
    for (int t = 0; t < T; ++t)
      c.state_multipliers[t] = get_vec((*sm)[t], join("/state_multipliers", static_cast<size_t>(t)),
                                       problem.constraint_rows(t + 1));
  }
  if (const Json* fm = optional_field(j, "freq_multiplier"))
    c.freq_multiplier = get_vec(*fm, "/freq_multiplier", problem.freq_mats.ell);
  return c;
}

Json to_json(const PMPReport& r) {
  Json j;
  j["tolerance"] = r.tolerance;
  j["all_pass"] = r.all_pass();
  j["feasible"] = r.feasible;
  j["feasibility"] = {{"dynamics_defect", r.feasibility.dynamics_defect},
                      {"state_constraint_violation", r.feasibility.state_constraint_violation},
                      {"control_set_violation", r.feasibility.control_set_violation},
                      {"freq_residual_norm", r.feasibility.freq_residual_norm}};
  j["residuals"] = {{"adjoint_dynamics", r.adjoint_dynamics},
                    {"transversality", r.transversality},
                    {"stationarity", r.stationarity},
                    {"complementarity", r.complementarity},
                    {"nonnegativity_violation", r.nonnegativity_violation},
                    {"nontriviality_mass", r.nontriviality_mass}};
  j["verdicts"] = {{"adjoint_dynamics", r.adjoint_ok()},
                   {"transversality", r.transversality_ok()},
                   {"stationarity", r.stationarity_ok()},
                   {"complementarity", r.complementarity_ok()},
                   {"nonnegativity", r.nonnegativity_ok()},
                   {"nontriviality", r.nontriviality_ok()}};
  j["stationarity_checked"] = r.stationarity_checked;
  j["stationarity_per_stage"] = Json::array();
  for (const auto& s : r.stationarity_per_stage)
    j["stationarity_per_stage"].push_back(s ? Json(*s) : Json(nullptr));
  j["notes"] = r.notes;
  return j;
}

Json to_json(const SolveResult& r) {
  Json j;
  j["method"] = to_string(r.method);
  j["status"] = r.status;
  j["converged"] = r.converged;
  j["iterations"] = r.iterations;
  j["objective"] = r.objective;
  j["controls"] = Json::array();
  for (const auto& u : r.trajectory.controls) j["controls"].push_back(vec_json(u));
  j["states"] = Json::array();
  for (const auto& x : r.trajectory.states) j["states"].push_back(vec_json(x.ambient()));
  j["history"] = r.history;
  j["certificate"] = to_json(r.certificate);
  j["pmp_report"] = to_json(r.pmp_report);
  return j;
}

Json to_json(const FrequencyConstraintMatrices& mats) {
  Json j;
  j["ell"] = mats.ell;
  j["horizon"] = mats.horizon;
  j["control_dim"] = mats.control_dim;
  j["E"] = Json::array();
  for (const auto& E : mats.E) j["E"].push_back(mat_json(E));
  return j;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
}

}  // namespace geopmp
