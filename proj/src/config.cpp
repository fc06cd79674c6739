#include "liectrl/config.hpp"

#include "liectrl/catalog.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace liectrl {

using nlohmann::json;

namespace {

Vec to_vec(const json& j) {
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Mat to_mat(const json& j) {
  if (j.empty()) return Mat(0, 0);
  Mat m(j.size(), j[0].size());
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != j[0].size())
      throw Error(ErrorCode::ParseError, "ragged matrix rows in config");
    for (std::size_t c = 0; c < j[r].size(); ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

json from_vec(const Vec& v) {
  json j = json::array();
  for (int i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json from_mat(const Mat& m) {
  json j = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

std::shared_ptr<const LieAlgebra> parse_algebra(const json& j, std::string* name_out,
                                                std::vector<std::string>* errors) {
  if (j.is_string()) {
    *name_out = j.get<std::string>();
    try {
      return catalog(*name_out);
    } catch (const Error& e) {
      errors->push_back(e.what());
      return nullptr;
    }
  }
  if (!j.is_object()) {
    errors->push_back("algebra must be a catalog name or an inline table");
    return nullptr;
  }
  try {
    int dim = j.at("dim").get<int>();
    std::vector<StructureEntry> structure;
    for (const auto& entry : j.value("structure", json::array())) {
      if (entry.size() != 4) throw Error(ErrorCode::ParseError, "structure entries are [i,j,k,c]");
      structure.push_back({entry[0].get<int>() - 1, entry[1].get<int>() - 1,
                           entry[2].get<int>() - 1, entry[3].get<double>()});
    }
    std::vector<Mat> rep;
    for (const auto& flat : j.at("rep_basis")) {
      int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(flat.size()))));
      if (n * n != static_cast<int>(flat.size()))
        throw Error(ErrorCode::ParseError, "rep_basis entries must be square row-major matrices");
      Mat b(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) b(r, c) = flat[r * n + c].get<double>();
      rep.push_back(b);
    }
    std::vector<std::string> names;
    for (const auto& s : j.value("basis_names", json::array())) names.push_back(s.get<std::string>());
    std::optional<int> nil;
    if (j.contains("nilpotency_class")) nil = j["nilpotency_class"].get<int>();
    auto alg = std::make_shared<LieAlgebra>(dim, structure, rep, names,
                                            j.value("exp_global", false), nil);
    ValidationReport report = validate_algebra(*alg);
    if (!report.pass) {
      std::ostringstream os;
      os << "inline algebra fails validation:";
      for (const auto& item : report.items)
        if (!item.pass) os << " " << item.name << " residual " << item.residual << ";";
      errors->push_back(os.str());
    }
    name_out->clear();
    return alg;
  } catch (const json::exception& e) {
    errors->push_back(std::string("algebra block: ") + e.what());
  } catch (const Error& e) {
    errors->push_back(e.what());
  }
  return nullptr;
}

}  // namespace

AffineSystem ExperimentConfig::system() const {
  AffineSystem sys;
  sys.table = table;
  sys.drift = drift;
  sys.control_dirs = controls.dirs;
  sys.range.lo = controls.range_lo;
  sys.range.hi = controls.range_hi;
  return sys;
}

CandidateOptions ExperimentConfig::candidate_options() const {
  CandidateOptions opts;
  opts.levels = controls.levels;
  opts.dt = controls.dt;
  opts.cap = numerics.candidate_cap;
  opts.seed = numerics.seed;
  opts.random_count = controls.random_count;
  opts.anchors = controls.anchors;
  opts.anchor_stride = controls.anchor_stride;
  return opts;
}

NumericsOptions ExperimentConfig::numerics_options() const {
  NumericsOptions opts;
  opts.step = numerics.step;
  opts.thinning = numerics.thinning;
  opts.threads = numerics.threads;
  opts.blowup_norm = numerics.blowup_norm;
  return opts;
}

FlowOptions ExperimentConfig::flow_options() const {
  FlowOptions opts;
  opts.step = numerics.step;
  opts.fd_step = numerics.oracle_fd_step;
  opts.blowup_norm = numerics.blowup_norm;
  return opts;
}

json ExperimentConfig::to_json() const {
  json j;
  if (!algebra_name.empty()) {
    j["algebra"] = algebra_name;
  } else {
    json a;
    a["dim"] = table->dim();
    json st = json::array();
    for (const auto& e : table->structure()) st.push_back({e.i + 1, e.j + 1, e.k + 1, e.c});
    a["structure"] = st;
    json reps = json::array();
    for (const Mat& b : table->rep_basis()) {
      json flat = json::array();
      for (int r = 0; r < b.rows(); ++r)
        for (int c = 0; c < b.cols(); ++c) flat.push_back(b(r, c));
      reps.push_back(flat);
    }
    a["rep_basis"] = reps;
    a["basis_names"] = table->basis_names();
    a["exp_global"] = table->exp_global();
    if (table->nilpotency_class()) a["nilpotency_class"] = *table->nilpotency_class();
    j["algebra"] = a;
  }
  j["drift"]["D"] = from_mat(drift.D);
  j["drift"]["z"] = from_vec(drift.z);
  json dirs = json::array();
  for (const Vec& b : controls.dirs) dirs.push_back(from_vec(b));
  j["controls"] = {{"dirs", dirs},
                   {"range_lo", from_vec(controls.range_lo)},
                   {"range_hi", from_vec(controls.range_hi)},
                   {"dt", controls.dt},
                   {"levels", controls.levels},
                   {"random_count", controls.random_count},
                   {"anchors", controls.anchors},
                   {"anchor_stride", controls.anchor_stride}};
  j["pair"] = {{"k_lo", from_vec(pair.k_lo)},       {"k_hi", from_vec(pair.k_hi)},
               {"k_spacing", from_vec(pair.k_spacing)}, {"q_lo", from_vec(pair.q_lo)},
               {"q_hi", from_vec(pair.q_hi)},       {"eps", pair.eps},
               {"tau", pair.tau}};
  j["numerics"] = {{"step", numerics.step},
                   {"thinning", numerics.thinning},
                   {"tol_zero", numerics.tol_zero},
                   {"blowup_norm", numerics.blowup_norm},
                   {"candidate_cap", numerics.candidate_cap},
                   {"seed", numerics.seed},
                   {"threads", numerics.threads},
                   {"chart_radius", numerics.chart_radius},
                   {"oracle_fd_step", numerics.oracle_fd_step},
                   {"volume_fd_step", numerics.volume_fd_step}};
  return j;
}

ExperimentConfig parse_config_json(const json& j, const std::string& origin) {
  std::vector<std::string> errors;
  ExperimentConfig cfg;

  if (!j.contains("algebra")) {
    errors.push_back("missing required field 'algebra'");
  } else {
    cfg.table = parse_algebra(j["algebra"], &cfg.algebra_name, &errors);
  }

  const int d = cfg.table ? cfg.table->dim() : 1;

  cfg.drift.D = Mat::Zero(d, d);
  cfg.drift.z = Vec::Zero(d);
  if (j.contains("drift")) {
    try {
      const auto& jd = j["drift"];
      if (jd.contains("D")) cfg.drift.D = to_mat(jd["D"]);
      if (jd.contains("z")) cfg.drift.z = to_vec(jd["z"]);
    } catch (const json::exception& e) {
      errors.push_back(std::string("drift block: ") + e.what());
    }
  }
  if (cfg.table) {
    if (cfg.drift.D.rows() != d || cfg.drift.D.cols() != d) {
      errors.push_back("drift.D must be dim x dim");
    } else {
      DerivationCheck dc = is_derivation(*cfg.table, cfg.drift.D);
      if (!dc.ok) {
        std::ostringstream os;
        os << "drift.D is not a derivation (Leibniz residual " << dc.residual << ")";
        errors.push_back(os.str());
      }
    }
    if (cfg.drift.z.size() != d) errors.push_back("drift.z must have length dim");
  }

  cfg.controls.dirs = {Vec::Unit(d, 0)};
  cfg.controls.range_lo = Vec::Constant(1, -1.0);
  cfg.controls.range_hi = Vec::Constant(1, 1.0);
  if (j.contains("controls")) {
    try {
      const auto& jc = j["controls"];
      if (jc.contains("dirs")) {
        cfg.controls.dirs.clear();
        for (const auto& row : jc["dirs"]) cfg.controls.dirs.push_back(to_vec(row));
      }
      if (jc.contains("range_lo")) cfg.controls.range_lo = to_vec(jc["range_lo"]);
      if (jc.contains("range_hi")) cfg.controls.range_hi = to_vec(jc["range_hi"]);
      cfg.controls.dt = jc.value("dt", cfg.controls.dt);
      cfg.controls.levels = jc.value("levels", cfg.controls.levels);
      cfg.controls.random_count = jc.value("random_count", cfg.controls.random_count);
      cfg.controls.anchors = jc.value("anchors", cfg.controls.anchors);
      cfg.controls.anchor_stride = jc.value("anchor_stride", cfg.controls.anchor_stride);
    } catch (const json::exception& e) {
      errors.push_back(std::string("controls block: ") + e.what());
    }
  }
  const int m = static_cast<int>(cfg.controls.dirs.size());
  for (const Vec& b : cfg.controls.dirs)
    if (b.size() != d) errors.push_back("control direction with wrong length");
  if (cfg.controls.range_lo.size() != m || cfg.controls.range_hi.size() != m) {
    errors.push_back("range_lo/range_hi must match the number of control directions");
  } else {
    for (int jch = 0; jch < m; ++jch) {
      if (!(cfg.controls.range_lo(jch) < 0.0) || !(cfg.controls.range_hi(jch) > 0.0)) {
        std::ostringstream os;
        os << "0 not interior to the control range on channel " << jch + 1;
        errors.push_back(os.str());
      }
    }
  }
  if (!(cfg.controls.dt > 0)) errors.push_back("controls.dt must be positive");
  if (cfg.controls.levels < 2) errors.push_back("controls.levels must be at least 2");

  cfg.pair.k_lo = Vec::Constant(d, -0.5);
  cfg.pair.k_hi = Vec::Constant(d, 0.5);
  cfg.pair.k_spacing = Vec::Constant(d, 0.25);
  cfg.pair.q_lo = Vec::Constant(d, -0.5);
  cfg.pair.q_hi = Vec::Constant(d, 0.5);
  cfg.pair.eps = {0.2, 0.1};
  cfg.pair.tau = {1.0, 2.0, 3.0, 4.0};
  if (j.contains("pair")) {
    try {
      const auto& jp = j["pair"];
      if (jp.contains("k_lo")) cfg.pair.k_lo = to_vec(jp["k_lo"]);
      if (jp.contains("k_hi")) cfg.pair.k_hi = to_vec(jp["k_hi"]);
      if (jp.contains("k_spacing")) {
        if (jp["k_spacing"].is_number())
          cfg.pair.k_spacing = Vec::Constant(cfg.pair.k_lo.size(), jp["k_spacing"].get<double>());
        else
          cfg.pair.k_spacing = to_vec(jp["k_spacing"]);
      } else {
        cfg.pair.k_spacing = Vec::Constant(cfg.pair.k_lo.size(), 0.25);
      }
      if (jp.contains("q_lo")) cfg.pair.q_lo = to_vec(jp["q_lo"]);
      if (jp.contains("q_hi")) cfg.pair.q_hi = to_vec(jp["q_hi"]);
      if (jp.contains("eps")) cfg.pair.eps = jp["eps"].get<std::vector<double>>();
      if (jp.contains("tau")) cfg.pair.tau = jp["tau"].get<std::vector<double>>();
    } catch (const json::exception& e) {
      errors.push_back(std::string("pair block: ") + e.what());
    }
  }
  try {
    cfg.pair.validate(d);
  } catch (const Error& e) {
    errors.push_back(e.what());
  }

  if (j.contains("numerics")) {
    try {
      const auto& jn = j["numerics"];
      cfg.numerics.step = jn.value("step", cfg.numerics.step);
      cfg.numerics.thinning = jn.value("thinning", cfg.numerics.thinning);
      cfg.numerics.tol_zero = jn.value("tol_zero", cfg.numerics.tol_zero);
      cfg.numerics.blowup_norm = jn.value("blowup_norm", cfg.numerics.blowup_norm);
      cfg.numerics.candidate_cap = jn.value("candidate_cap", cfg.numerics.candidate_cap);
      cfg.numerics.seed = jn.value("seed", cfg.numerics.seed);
      cfg.numerics.threads = jn.value("threads", cfg.numerics.threads);
      cfg.numerics.chart_radius = jn.value("chart_radius", cfg.numerics.chart_radius);
      cfg.numerics.oracle_fd_step = jn.value("oracle_fd_step", cfg.numerics.oracle_fd_step);
      cfg.numerics.volume_fd_step = jn.value("volume_fd_step", cfg.numerics.volume_fd_step);
    } catch (const json::exception& e) {
      errors.push_back(std::string("numerics block: ") + e.what());
    }
  }
  if (!(cfg.numerics.step > 0)) errors.push_back("numerics.step must be positive");
  if (cfg.numerics.thinning < 1) errors.push_back("numerics.thinning must be at least 1");
  if (cfg.controls.dt > 0 && cfg.numerics.step > 0) {
    long per = std::lround(cfg.controls.dt / cfg.numerics.step);
    if (per < 1 || std::abs(per * cfg.numerics.step - cfg.controls.dt) > 1e-9)
      errors.push_back("numerics.step must divide controls.dt");
  }

  if (!errors.empty()) {
    std::ostringstream os;
    os << origin << ": " << errors.size() << " validation error(s): ";
    for (std::size_t i = 0; i < errors.size(); ++i) os << "\n  [" << i + 1 << "] " << errors[i];
    throw Error(ErrorCode::ValidationError, os.str());
  }
  return cfg;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, origin + ": " + e.what());
  }
  return parse_config_json(j, origin);
}

ExperimentConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

}  // namespace liectrl
