#include "reuse/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "reuse/analysis.hpp"
#include "reuse/evaluators.hpp"
#include "reuse/scoring.hpp"

namespace reuse {

namespace {

using nlohmann::json;

json num_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double num_from(const json& j) {
  if (j.is_null()) return kNegInf;
  return j.get<double>();
}

std::string fp_to_hex(std::uint64_t bits) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(bits));
  return buf;
}

std::uint64_t fp_from_hex(const std::string& s) {
  return std::stoull(s, nullptr, 16);
}

OriginOp origin_from_name(const std::string& name) {
  for (OriginOp op : {OriginOp::prior_init, OriginOp::mutation,
                      OriginOp::crossover, OriginOp::immigration})
    if (name == origin_op_name(op)) return op;
  throw input_error("unknown offspring op '" + name + "'");
}

void check_write(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw input_error("cannot write " + path.string());
}

}  // namespace

std::string trace_record_to_json(const TraceRecord& rec) {
  json j;
  j["schema_version"] = rec.schema_version;
  j["iteration"] = rec.iteration;
  j["pool_sizes"] = rec.pool_sizes;
  j["survivors"] = rec.survivor_ids;
  j["stage_cost"] = rec.stage_cost;
  j["charged_cost"] = rec.charged_cost;
  j["panel_utility"] =
      rec.panel_utility ? json(*rec.panel_utility) : json(nullptr);
  j["panel_ids"] = rec.panel_ids;
  j["incumbent_utility"] =
      rec.incumbent_utility ? json(*rec.incumbent_utility) : json(nullptr);

  json offspring = json::array();
  for (const OffspringTrace& o : rec.offspring) {
    json jo;
    jo["id"] = o.id;
    jo["op"] = origin_op_name(o.op);
    jo["fitness"] = num_or_null(o.fitness);
    jo["chem_ok"] = o.chem_ok;
    jo["coords"] = o.coords;
    offspring.push_back(std::move(jo));
  }
  j["offspring"] = std::move(offspring);

  json candidates = json::array();
  for (const CandidateTrace& c : rec.candidates) {
    json jc;
    jc["id"] = c.id;
    jc["latent_id"] = c.latent_id;
    jc["valid"] = c.valid;
    jc["qed"] = c.qed;
    jc["sa"] = c.sa;
    jc["fp"] = fp_to_hex(c.fingerprint);
    jc["coords"] = c.coords;
    json stages = json::array();
    for (const StageTraceEntry& e : c.stages) {
      json je;
      je["stage"] = e.stage;
      je["aff_a"] = num_or_null(e.aff_a);
      je["aff_b"] = num_or_null(e.aff_b);
      je["h"] = num_or_null(e.h);
      je["feasible"] = e.feasible;
      stages.push_back(std::move(je));
    }
    jc["stages"] = std::move(stages);
    candidates.push_back(std::move(jc));
  }
  j["candidates"] = std::move(candidates);
  j["population"] = rec.population_ids;
  j["best_fitness"] = num_or_null(rec.best_fitness);
  return j.dump();
}

TraceRecord trace_record_from_json(const std::string& line) {
  json j = json::parse(line);
  TraceRecord rec;
  rec.schema_version = j.at("schema_version").get<int>();
  if (rec.schema_version != kTraceSchemaVersion)
    throw input_error("unsupported schema_version " +
                      std::to_string(rec.schema_version));
  rec.iteration = j.at("iteration").get<std::uint32_t>();
  rec.pool_sizes = j.at("pool_sizes").get<std::vector<std::size_t>>();
  rec.survivor_ids =
      j.at("survivors").get<std::vector<std::vector<CandidateId>>>();
  rec.stage_cost = j.at("stage_cost").get<std::vector<double>>();
  rec.charged_cost = j.at("charged_cost").get<double>();
  if (!j.at("panel_utility").is_null())
    rec.panel_utility = j.at("panel_utility").get<double>();
  rec.panel_ids = j.at("panel_ids").get<std::vector<CandidateId>>();
  if (!j.at("incumbent_utility").is_null())
    rec.incumbent_utility = j.at("incumbent_utility").get<double>();
  for (const json& jo : j.at("offspring")) {
    OffspringTrace o;
    o.id = jo.at("id").get<LatentId>();
    o.op = origin_from_name(jo.at("op").get<std::string>());
    o.fitness = num_from(jo.at("fitness"));
    o.chem_ok = jo.at("chem_ok").get<bool>();
    o.coords = jo.at("coords").get<std::vector<double>>();
    rec.offspring.push_back(std::move(o));
  }
  for (const json& jc : j.at("candidates")) {
    CandidateTrace c;
    c.id = jc.at("id").get<CandidateId>();
    c.latent_id = jc.at("latent_id").get<LatentId>();
    c.valid = jc.at("valid").get<bool>();
    c.qed = jc.at("qed").get<double>();
    c.sa = jc.at("sa").get<double>();
    c.fingerprint = fp_from_hex(jc.at("fp").get<std::string>());
    c.coords = jc.at("coords").get<std::vector<double>>();
    for (const json& je : jc.at("stages")) {
      StageTraceEntry e;
      e.stage = je.at("stage").get<int>();
      e.aff_a = num_from(je.at("aff_a"));
      e.aff_b = num_from(je.at("aff_b"));
      e.h = num_from(je.at("h"));
      e.feasible = je.at("feasible").get<bool>();
      c.stages.push_back(e);
    }
    rec.candidates.push_back(std::move(c));
  }
  rec.population_ids = j.at("population").get<std::vector<LatentId>>();
  rec.best_fitness = num_from(j.at("best_fitness"));
  return rec;
}

void write_trace(const std::filesystem::path& path,
                 std::span<const TraceRecord> trace) {
  std::ofstream out(path, std::ios::binary);
  check_write(out, path);
  for (const TraceRecord& rec : trace) out << trace_record_to_json(rec) << '\n';
  out.flush();
  check_write(out, path);
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot read " + path.string());
  std::vector<TraceRecord> trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      trace.push_back(trace_record_from_json(line));
    } catch (const input_error& e) {
      throw input_error("trace line " + std::to_string(line_no) + ": " +
                        e.what());
    } catch (const std::exception& e) {
      throw input_error("trace line " + std::to_string(line_no) +
                        ": malformed record: " + e.what());
    }
  }
  return trace;
}

std::string panel_to_json(const Panel& panel) {
  json j;
  j["schema_version"] = kTraceSchemaVersion;
  j["empty"] = panel.empty();
  j["utility"] = panel.empty() ? json(nullptr) : num_or_null(panel.utility);
  j["source_iteration"] = panel.source_iteration;
  json members = json::array();
  for (const Candidate& m : panel.members) {
    json jm;
    jm["id"] = m.id;
    jm["latent_id"] = m.origin_latent;
    jm["valid"] = m.valid;
    jm["qed"] = m.qed_like;
    jm["sa"] = m.sa_like;
    jm["fp"] = fp_to_hex(m.features.bits);
    jm["coords"] = m.latent;
    json affinity = json::array();
    for (std::size_t s = 0; s < m.affinity.size(); ++s) {
      if (!m.affinity[s].has(Target::a) && !m.affinity[s].has(Target::b))
        continue;
      json ja;
      ja["stage"] = s + 1;
      ja["a"] = num_or_null(m.affinity[s].a);
      ja["b"] = num_or_null(m.affinity[s].b);
      affinity.push_back(std::move(ja));
    }
    jm["affinity"] = std::move(affinity);
    members.push_back(std::move(jm));
  }
  j["members"] = std::move(members);
  return j.dump(2) + "\n";
}

void write_panel(const std::filesystem::path& path, const Panel& panel) {
  std::ofstream out(path, std::ios::binary);
  check_write(out, path);
  out << panel_to_json(panel);
  out.flush();
  check_write(out, path);
}

std::string format_csv_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string metrics_csv(const RunResult& result, double threshold_a,
                        double threshold_b) {
  analysis::DualHitRates hits = analysis::dual_hit_rates(
      result.incumbent, threshold_a, threshold_b, result.config);
  double best_fitness = kNegInf;
  for (const TraceRecord& rec : result.trace)
    best_fitness = std::max(best_fitness, rec.best_fitness);

  std::ostringstream out;
  out << "seed,iterations,total_cost_units,incumbent_utility,incumbent_size,"
         "incumbent_source_iteration,incumbent_diversity,dual_hit_thr_a,"
         "dual_hit_thr_b,dual_hit,feasible_dual_hit,best_family_utility\n";
  out << result.seed << ',' << result.trace.size() << ','
      << format_csv_number(result.total_cost) << ','
      << format_csv_number(result.incumbent.utility) << ','
      << result.incumbent.members.size() << ','
      << result.incumbent.source_iteration << ','
      << format_csv_number(panel_diversity(result.incumbent.members)) << ','
      << format_csv_number(threshold_a) << ','
      << format_csv_number(threshold_b) << ','
      << format_csv_number(hits.dual_hit) << ','
      << format_csv_number(hits.feasible_dual_hit) << ','
      << format_csv_number(best_fitness) << '\n';
  return out.str();
}

void write_metrics(const std::filesystem::path& path, const RunResult& result,
                   double threshold_a, double threshold_b) {
  std::ofstream out(path, std::ios::binary);
  check_write(out, path);
  out << metrics_csv(result, threshold_a, threshold_b);
  out.flush();
  check_write(out, path);
}

}  // namespace reuse
