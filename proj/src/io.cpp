#include "ebcred/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "ebcred/errors.hpp"

namespace ebcred {

void to_json(Json& j, const DiagnosticsReport& r) {
  j = Json{{"alpha_grid", r.alpha_grid},
           {"h", r.h},
           {"bias_sq", r.bias_sq},
           {"var_sq", r.var_sq},
           {"alpha_lower", r.alpha_lower},
           {"alpha_upper", r.alpha_upper},
           {"lower_empty", r.lower_empty},
           {"upper_empty", r.upper_empty},
           {"lower_threshold", r.lower_threshold},
           {"upper_threshold", r.upper_threshold},
           {"bounds_vacuous", r.bounds_vacuous},
           {"h_tail_bound", r.h_tail_bound},
           {"oracle_risk", r.oracle_risk},
           {"oracle_alpha", r.oracle_alpha},
           {"minimax_beta", r.minimax_beta},
           {"minimax_m", r.minimax_M},
           {"minimax_linear", r.minimax_linear}};
}

void from_json(const Json& j, DiagnosticsReport& r) {
  j.at("alpha_grid").get_to(r.alpha_grid);
  j.at("h").get_to(r.h);
  j.at("bias_sq").get_to(r.bias_sq);
  j.at("var_sq").get_to(r.var_sq);
  j.at("alpha_lower").get_to(r.alpha_lower);
  j.at("alpha_upper").get_to(r.alpha_upper);
  j.at("lower_empty").get_to(r.lower_empty);
  j.at("upper_empty").get_to(r.upper_empty);
  j.at("lower_threshold").get_to(r.lower_threshold);
  j.at("upper_threshold").get_to(r.upper_threshold);
  j.at("bounds_vacuous").get_to(r.bounds_vacuous);
  j.at("h_tail_bound").get_to(r.h_tail_bound);
  j.at("oracle_risk").get_to(r.oracle_risk);
  j.at("oracle_alpha").get_to(r.oracle_alpha);
  j.at("minimax_beta").get_to(r.minimax_beta);
  j.at("minimax_m").get_to(r.minimax_M);
  j.at("minimax_linear").get_to(r.minimax_linear);
}

void to_json(Json& j, const CoverageResult& r) {
  j = Json{{"n", r.n},
           {"coverage", r.coverage},
           {"covered", r.covered},
           {"mean_radius", r.mean_radius},
           {"infinite_radius", r.infinite_radius},
           {"mean_alpha_hat", r.mean_alpha_hat},
           {"reps", r.reps},
           {"ci_halfwidth", r.ci_halfwidth}};
}

void from_json(const Json& j, CoverageResult& r) {
  j.at("n").get_to(r.n);
  j.at("coverage").get_to(r.coverage);
  j.at("covered").get_to(r.covered);
  j.at("mean_radius").get_to(r.mean_radius);
  j.at("infinite_radius").get_to(r.infinite_radius);
  j.at("mean_alpha_hat").get_to(r.mean_alpha_hat);
  j.at("reps").get_to(r.reps);
  j.at("ci_halfwidth").get_to(r.ci_halfwidth);
}

void to_json(Json& j, const PriorCheckResult& r) {
  j = Json{{"alpha", r.alpha},     {"l0", r.L0}, {"reps", r.reps}, {"passed", r.passed},
           {"pass_fraction", r.pass_fraction}, {"min_n0_histogram", r.min_N0_histogram}};
}

void to_json(Json& j, const MinimaxRow& r) {
  j = Json{{"n", r.n}, {"m", r.M}, {"risk", r.risk}, {"tail_bound", r.tail_bound}, {"rate", r.rate}};
}

void to_json(Json& j, const DiagnoseResult& r) {
  j = Json{{"n", r.n}, {"reps", r.reps}, {"capture_frequency", r.capture_frequency},
           {"alpha_hats", r.alpha_hats}, {"report", r.report}};
}

void to_json(Json& j, const ExperimentSpec& s) {
  j = Json{{"mode", to_string(s.mode)},
           {"truth",
            {{"name", s.truth.name},
             {"amplitude", s.truth.amplitude},
             {"exponent", s.truth.exponent},
             {"beta", s.truth.beta},
             {"m", s.truth.M},
             {"rho", s.truth.rho},
             {"n_seq", s.truth.n_seq},
             {"path", s.truth.path}}},
           {"model",
            {{"kappa", s.model.kappa},
             {"p", s.model.p},
             {"c", s.model.C},
             {"a", s.model.A},
             {"gamma", s.model.gamma},
             {"trunc", s.model.trunc}}},
           {"n_list", s.n_list},
           {"l", s.L},
           {"reps", s.reps},
           {"seed", s.seed},
           {"out", s.out},
           {"threads", s.threads},
           {"band", {{"draws", s.draws}, {"keep", s.keep}, {"grid_points", s.grid_points}}},
           {"prior", {{"alphas", s.prior_alphas}, {"t", s.prior_T}, {"max_n0", s.max_N0}}},
           {"minimax", {{"beta", s.beta}, {"m", s.M}, {"m_list", s.M_list}}},
           {"diagnose", {{"scan_points", s.scan_points}}}};
}

namespace {

// Reads known keys from an object and rejects the rest.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      j_.at(key).get_to(out);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) throw ConfigError(where_ + ": unknown key '" + key + "'");
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

}  // namespace

ExperimentSpec spec_from_json(const Json& j) {
  ExperimentSpec s;
  Reader top(j, "config");
  std::string mode = to_string(s.mode);
  top.get("mode", mode);
  s.mode = parse_mode(mode);
  if (const Json* t = top.child("truth")) {
    Reader r(*t, "config.truth");
    r.get("name", s.truth.name);
    r.get("amplitude", s.truth.amplitude);
    r.get("exponent", s.truth.exponent);
    r.get("beta", s.truth.beta);
    r.get("m", s.truth.M);
    r.get("rho", s.truth.rho);
    r.get("n_seq", s.truth.n_seq);
    r.get("path", s.truth.path);
    r.finish();
  }
  if (const Json* m = top.child("model")) {
    Reader r(*m, "config.model");
    r.get("kappa", s.model.kappa);
    r.get("p", s.model.p);
    r.get("c", s.model.C);
    r.get("a", s.model.A);
    r.get("gamma", s.model.gamma);
    r.get("trunc", s.model.trunc);
    r.finish();
  }
  top.get("n_list", s.n_list);
  top.get("l", s.L);
  top.get("reps", s.reps);
  top.get("seed", s.seed);
  top.get("out", s.out);
  top.get("threads", s.threads);
  if (const Json* b = top.child("band")) {
    Reader r(*b, "config.band");
    r.get("draws", s.draws);
    r.get("keep", s.keep);
    r.get("grid_points", s.grid_points);
    r.finish();
  }
  if (const Json* p = top.child("prior")) {
    Reader r(*p, "config.prior");
    r.get("alphas", s.prior_alphas);
    r.get("t", s.prior_T);
    r.get("max_n0", s.max_N0);
    r.finish();
  }
  if (const Json* m = top.child("minimax")) {
    Reader r(*m, "config.minimax");
    r.get("beta", s.beta);
    r.get("m", s.M);
    r.get("m_list", s.M_list);
    r.finish();
  }
  if (const Json* d = top.child("diagnose")) {
    Reader r(*d, "config.diagnose");
    r.get("scan_points", s.scan_points);
    r.finish();
  }
  top.finish();
  return s;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file " + path.string() + ": " + e.what());
  }
  return spec_from_json(j);
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string format_n(double n) {
  std::ostringstream os;
  if (n == std::floor(n) && n < 1e15) {
    os << static_cast<long long>(n);
  } else {
    os.precision(10);
    os << n;
  }
  return os.str();
}

}  // namespace ebcred
