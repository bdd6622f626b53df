#include "reuse/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace reuse {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!obj.is_object())
    throw config_error(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw config_error("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read_key(const json& obj, const std::string& where, const char* key,
              T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw config_error(where + " key '" + std::string(key) +
                       "': " + e.what());
  }
}

LandscapeKind kind_from_name(const std::string& name, const std::string& where) {
  if (name == "quadratic_bowl") return LandscapeKind::quadratic_bowl;
  if (name == "multi_basin") return LandscapeKind::multi_basin;
  throw config_error(where + ": unknown landscape kind '" + name + "'");
}

const char* kind_name(LandscapeKind kind) {
  return kind == LandscapeKind::quadratic_bowl ? "quadratic_bowl" : "multi_basin";
}

PriorMode mode_from_name(const std::string& name, const std::string& where) {
  if (name == "gaussian") return PriorMode::gaussian;
  if (name == "anchor_mixture") return PriorMode::anchor_mixture;
  throw config_error(where + ": unknown prior mode '" + name + "'");
}

const char* mode_name(PriorMode mode) {
  return mode == PriorMode::gaussian ? "gaussian" : "anchor_mixture";
}

void parse_landscape(const json& obj, const std::string& where,
                     LandscapeSpec& spec) {
  check_keys(obj, where, {"center", "scale", "noise_sigma", "kind"});
  read_key(obj, where, "center", spec.center);
  read_key(obj, where, "scale", spec.scale);
  read_key(obj, where, "noise_sigma", spec.noise_sigma);
  if (obj.contains("kind")) {
    std::string name;
    read_key(obj, where, "kind", name);
    spec.kind = kind_from_name(name, where);
  }
}

json landscape_to_json(const LandscapeSpec& spec) {
  json j;
  j["center"] = spec.center;
  j["scale"] = spec.scale;
  j["noise_sigma"] = spec.noise_sigma;
  j["kind"] = kind_name(spec.kind);
  return j;
}

void parse_prior(const json& obj, const std::string& where, PriorSpec& prior) {
  check_keys(obj, where, {"mode", "sigma", "dim", "anchors"});
  if (obj.contains("mode")) {
    std::string name;
    read_key(obj, where, "mode", name);
    prior.mode = mode_from_name(name, where);
  }
  read_key(obj, where, "sigma", prior.sigma);
  read_key(obj, where, "dim", prior.dim);
  read_key(obj, where, "anchors", prior.anchors);
}

json prior_to_json(const PriorSpec& prior) {
  json j;
  j["mode"] = mode_name(prior.mode);
  j["sigma"] = prior.sigma;
  j["dim"] = prior.dim;
  j["anchors"] = prior.anchors;
  return j;
}

}  // namespace

RunConfigDocument default_run_config() {
  RunConfigDocument doc;
  doc.search = default_config();
  doc.task = default_task(0);
  doc.task.chem_qed_axis.clear();
  doc.task.chem_sa_axis.clear();
  return doc;
}

RunConfigDocument parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw config_error(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, "config", {"search", "task", "funnel", "output"});

  RunConfigDocument doc = default_run_config();

  if (j.contains("search")) {
    const json& s = j.at("search");
    const std::string where = "[search]";
    check_keys(s, where,
               {"B", "B_par", "B_off", "T", "d_z", "alpha_mut", "alpha_cross",
                "alpha_imm", "sigma_mut", "gamma_mut", "n_imm", "M_eval", "L",
                "family_size", "stage_budgets", "N", "tau", "qed_floor",
                "sa_floor", "beta_chem_search", "beta_chem_rerank",
                "beta_div_subset", "beta_bal_subset", "lambda_bal_proxy",
                "eta_aff", "eta_chem", "eta_div", "t_train", "t_infer", "seed"});
    SearchConfig& cfg = doc.search;
    read_key(s, where, "B", cfg.B);
    read_key(s, where, "B_par", cfg.B_par);
    read_key(s, where, "B_off", cfg.B_off);
    read_key(s, where, "T", cfg.T);
    read_key(s, where, "d_z", cfg.d_z);
    read_key(s, where, "alpha_mut", cfg.alpha_mut);
    read_key(s, where, "alpha_cross", cfg.alpha_cross);
    read_key(s, where, "alpha_imm", cfg.alpha_imm);
    read_key(s, where, "sigma_mut", cfg.sigma_mut);
    read_key(s, where, "gamma_mut", cfg.gamma_mut);
    read_key(s, where, "n_imm", cfg.n_imm);
    read_key(s, where, "M_eval", cfg.M_eval);
    read_key(s, where, "L", cfg.L);
    read_key(s, where, "family_size", cfg.family_size);
    read_key(s, where, "stage_budgets", cfg.stage_budgets);
    read_key(s, where, "N", cfg.N);
    read_key(s, where, "tau", cfg.tau);
    read_key(s, where, "qed_floor", cfg.qed_floor);
    read_key(s, where, "sa_floor", cfg.sa_floor);
    read_key(s, where, "beta_chem_search", cfg.beta_chem_search);
    read_key(s, where, "beta_chem_rerank", cfg.beta_chem_rerank);
    read_key(s, where, "beta_div_subset", cfg.beta_div_subset);
    read_key(s, where, "beta_bal_subset", cfg.beta_bal_subset);
    read_key(s, where, "lambda_bal_proxy", cfg.lambda_bal_proxy);
    read_key(s, where, "eta_aff", cfg.eta_aff);
    read_key(s, where, "eta_chem", cfg.eta_chem);
    read_key(s, where, "eta_div", cfg.eta_div);
    read_key(s, where, "t_train", cfg.t_train);
    read_key(s, where, "t_infer", cfg.t_infer);
    read_key(s, where, "seed", cfg.seed);
  }

  if (j.contains("task")) {
    const json& t = j.at("task");
    const std::string where = "[task]";
    check_keys(t, where,
               {"pair_id", "landscape_a", "landscape_b", "prior", "w_a", "w_b",
                "lambda_bal", "invalid_prob"});
    TaskContext& task = doc.task;
    read_key(t, where, "pair_id", task.pair_id);
    if (t.contains("landscape_a"))
      parse_landscape(t.at("landscape_a"), "[task].landscape_a",
                      task.landscape_a);
    if (t.contains("landscape_b"))
      parse_landscape(t.at("landscape_b"), "[task].landscape_b",
                      task.landscape_b);
    if (t.contains("prior")) parse_prior(t.at("prior"), "[task].prior", task.prior);
    read_key(t, where, "w_a", task.w_a);
    read_key(t, where, "w_b", task.w_b);
    read_key(t, where, "lambda_bal", task.lambda_bal);
    read_key(t, where, "invalid_prob", task.invalid_prob);
  }

  if (j.contains("funnel")) {
    const json& f = j.at("funnel");
    if (!f.is_array()) throw config_error("[funnel] must be an array of stages");
    doc.search.funnel.clear();
    int index = 1;
    for (const json& js : f) {
      std::string where = "[funnel][" + std::to_string(index - 1) + "]";
      check_keys(js, where, {"noise_sigma", "cost_units"});
      EvaluatorStage stage;
      stage.stage_index = index++;
      read_key(js, where, "noise_sigma", stage.noise_sigma);
      read_key(js, where, "cost_units", stage.cost_units);
      doc.search.funnel.push_back(stage);
    }
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    check_keys(o, "[output]", {"directory"});
    read_key(o, "[output]", "directory", doc.output.directory);
  }

  return doc;
}

RunConfigDocument load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::string serialize_run_config(const RunConfigDocument& doc) {
  const SearchConfig& cfg = doc.search;
  json s;
  s["B"] = cfg.B;
  s["B_par"] = cfg.B_par;
  s["B_off"] = cfg.B_off;
  s["T"] = cfg.T;
  s["d_z"] = cfg.d_z;
  s["alpha_mut"] = cfg.alpha_mut;
  s["alpha_cross"] = cfg.alpha_cross;
  s["alpha_imm"] = cfg.alpha_imm;
  s["sigma_mut"] = cfg.sigma_mut;
  s["gamma_mut"] = cfg.gamma_mut;
  s["n_imm"] = cfg.n_imm;
  s["M_eval"] = cfg.M_eval;
  s["L"] = cfg.L;
  s["family_size"] = cfg.family_size;
  s["stage_budgets"] = cfg.stage_budgets;
  s["N"] = cfg.N;
  s["tau"] = cfg.tau;
  s["qed_floor"] = cfg.qed_floor;
  s["sa_floor"] = cfg.sa_floor;
  s["beta_chem_search"] = cfg.beta_chem_search;
  s["beta_chem_rerank"] = cfg.beta_chem_rerank;
  s["beta_div_subset"] = cfg.beta_div_subset;
  s["beta_bal_subset"] = cfg.beta_bal_subset;
  s["lambda_bal_proxy"] = cfg.lambda_bal_proxy;
  s["eta_aff"] = cfg.eta_aff;
  s["eta_chem"] = cfg.eta_chem;
  s["eta_div"] = cfg.eta_div;
  s["t_train"] = cfg.t_train;
  s["t_infer"] = cfg.t_infer;
  s["seed"] = cfg.seed;

  json t;
  t["pair_id"] = doc.task.pair_id;
  t["landscape_a"] = landscape_to_json(doc.task.landscape_a);
  t["landscape_b"] = landscape_to_json(doc.task.landscape_b);
  t["prior"] = prior_to_json(doc.task.prior);
  t["w_a"] = doc.task.w_a;
  t["w_b"] = doc.task.w_b;
  t["lambda_bal"] = doc.task.lambda_bal;
  t["invalid_prob"] = doc.task.invalid_prob;

  json f = json::array();
  for (const EvaluatorStage& stage : cfg.funnel) {
    json js;
    js["noise_sigma"] = stage.noise_sigma;
    js["cost_units"] = stage.cost_units;
    f.push_back(std::move(js));
  }

  json o;
  o["directory"] = doc.output.directory;

  json root;
  root["search"] = std::move(s);
  root["task"] = std::move(t);
  root["funnel"] = std::move(f);
  root["output"] = std::move(o);
  return root.dump(2) + "\n";
}

void finalize_run_config(RunConfigDocument& doc, std::uint64_t seed) {
  doc.search.seed = seed;
  std::size_t d = doc.search.d_z;
  doc.task.chem_qed_axis = chemistry_axis(seed, 0, d);
  doc.task.chem_sa_axis = chemistry_axis(seed, 1, d);
  validate(doc.search);
  if (doc.task.landscape_a.center.size() != d ||
      doc.task.landscape_b.center.size() != d)
    throw config_error("[task] landscape centers must have d_z entries");
  if (doc.task.prior.mode == PriorMode::gaussian && doc.task.prior.dim != d)
    throw config_error("[task].prior dim must equal d_z");
  if (doc.task.invalid_prob < 0.0 || doc.task.invalid_prob > 1.0)
    throw config_error("[task].invalid_prob must lie in [0, 1]");
  if (doc.task.lambda_bal < 0.0)
    throw config_error("[task].lambda_bal must be >= 0");
}

}  // namespace reuse
