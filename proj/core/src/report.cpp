#include "covgen/report.hpp"

#include <limits>
#include <stdexcept>

#include "json.hpp"

namespace covgen {

namespace {

using Json = nlohmann::ordered_json;

Json int_json(const Int& v) {
  if (v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max()) {
    return Json(static_cast<std::int64_t>(v));
  }
  return Json(to_string(v));
}

Int json_int(const Json& j) {
  if (j.is_number_integer()) return Int(j.get<std::int64_t>());
  if (j.is_string()) return Int(j.get<std::string>());
  throw std::invalid_argument("expected an integer, got " + j.dump());
}

Json int_map(const std::map<std::string, Int>& m) {
  Json j = Json::object();
  for (const auto& [k, v] : m) j[k] = int_json(v);
  return j;
}

std::map<std::string, Int> json_int_map(const Json& j) {
  std::map<std::string, Int> out;
  for (const auto& [k, v] : j.items()) out[k] = json_int(v);
  return out;
}

Json config_json(const AnalysisConfig& c) {
  Json j;
  j["input"] = c.input;
  j["entry"] = c.entry;
  j["algorithm"] = to_string(c.algorithm);
  j["k"] = c.k;
  j["max_inline_depth"] = c.max_inline_depth;
  j["mode"] = c.summaries ? "summary" : "inline";
  j["cap"] = c.cap;
  j["rounds"] = c.rounds;
  j["fm_reuse"] = c.fm_reuse;
  j["solver"] = c.solver.command;
  j["logic"] = c.solver.logic;
  j["timeout"] = c.solver.timeout_s;
  j["output"] = c.output;
  j["dump_passive"] = c.dump_passive;
  j["dump_vc"] = c.dump_vc;
  return j;
}

AnalysisConfig json_config(const Json& j) {
  AnalysisConfig c;
  c.input = j.at("input").get<std::string>();
  c.entry = j.at("entry").get<std::string>();
  c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  c.k = j.at("k").get<unsigned>();
  c.max_inline_depth = j.at("max_inline_depth").get<unsigned>();
  c.summaries = j.at("mode").get<std::string>() == "summary";
  c.cap = j.at("cap").get<std::size_t>();
  c.rounds = j.at("rounds").get<unsigned>();
  c.fm_reuse = j.at("fm_reuse").get<bool>();
  c.solver.command = j.at("solver").get<std::string>();
  c.solver.logic = j.at("logic").get<std::string>();
  c.solver.timeout_s = j.at("timeout").get<double>();
  c.output = j.at("output").get<std::string>();
  c.dump_passive = j.at("dump_passive").get<bool>();
  c.dump_vc = j.at("dump_vc").get<bool>();
  return c;
}

Json summary_json(const Summary& s) {
  Json j;
  j["proc"] = s.proc;
  j["params"] = s.params;
  j["returns"] = s.returns ? Json(*s.returns) : Json(nullptr);
  j["visible"] = s.visible;
  j["max_entries"] = s.max_entries;
  Json entries = Json::array();
  for (const auto& e : s.entries) {
    Json je;
    je["pre"] = int_map(e.pre);
    je["post"] = int_map(e.post);
    Json w = Json::array();
    for (const auto& st : e.witness) w.push_back(Json{{"proc", st.proc}, {"label", st.label}, {"site", st.site}});
    je["witness"] = w;
    je["witness_inputs"] = int_map(e.witness_inputs);
    entries.push_back(je);
  }
  j["entries"] = entries;
  return j;
}

Summary json_summary(const Json& j) {
  Summary s;
  s.proc = j.at("proc").get<std::string>();
  s.params = j.at("params").get<std::vector<std::string>>();
  if (!j.at("returns").is_null()) s.returns = j.at("returns").get<std::string>();
  s.visible = j.at("visible").get<std::vector<std::string>>();
  s.max_entries = j.at("max_entries").get<std::size_t>();
  for (const auto& je : j.at("entries")) {
    SummaryEntry e;
    e.pre = json_int_map(je.at("pre"));
    e.post = json_int_map(je.at("post"));
    for (const auto& w : je.at("witness")) {
      e.witness.push_back(Step{w.at("proc").get<std::string>(), w.at("label").get<std::string>(),
                               w.at("site").get<unsigned>()});
    }
    e.witness_inputs = json_int_map(je.at("witness_inputs"));
    s.entries.push_back(std::move(e));
  }
  return s;
}

Json table_json(const SummaryTable& t) {
  Json j = Json::object();
  for (const auto& [name, s] : t) j[name] = summary_json(s);
  return j;
}

}  // namespace

bool ReportDocument::operator==(const ReportDocument& o) const {
  if (version != o.version || !(config == o.config) || covered != o.covered ||
      uncovered != o.uncovered || test_cases != o.test_cases || !(stats == o.stats) ||
      summaries != o.summaries || refinements.size() != o.refinements.size()) {
    return false;
  }
  for (std::size_t i = 0; i < refinements.size(); ++i) {
    const auto& a = refinements[i];
    const auto& b = o.refinements[i];
    if (a.callee != b.callee || a.caller_block != b.caller_block ||
        a.constraints != b.constraints || a.new_entries != b.new_entries) {
      return false;
    }
  }
  return true;
}

ReportDocument make_report(const AnalysisResult& result, const AnalysisConfig& config) {
  ReportDocument doc;
  doc.config = config;
  doc.covered.assign(result.cover.covered.begin(), result.cover.covered.end());
  doc.uncovered.assign(result.cover.uncovered.begin(), result.cover.uncovered.end());
  for (std::size_t i = 0; i < result.cover.test_cases.size(); ++i) {
    const TestCase& tc = result.cover.test_cases[i];
    ReportTestCase rt;
    rt.inputs = tc.inputs;
    rt.path = tc.witness_path;
    rt.r_true = tc.r_true();
    rt.replay = i < result.replays.size() && result.replays[i].feasible() ? "feasible" : "blocked";
    doc.test_cases.push_back(std::move(rt));
  }
  const SolverStats& s = result.cover.stats;
  doc.stats = ReportStats{s.queries, s.sat, s.unsat, s.timeouts, s.time_ms, result.cover.incomplete};
  if (config.summaries) doc.summaries = result.summaries;
  doc.refinements = result.refinements;
  return doc;
}

std::string serialize_report(const ReportDocument& doc) {
  Json j;
  j["version"] = doc.version;
  j["config"] = config_json(doc.config);
  j["covered"] = doc.covered;
  j["uncovered"] = doc.uncovered;
  Json tcs = Json::array();
  for (const auto& tc : doc.test_cases) {
    Json jt;
    jt["inputs"] = int_map(tc.inputs);
    jt["path"] = tc.path;
    jt["r_true"] = tc.r_true;
    jt["replay"] = tc.replay;
    tcs.push_back(jt);
  }
  j["test_cases"] = tcs;
  Json st;
  st["queries"] = doc.stats.queries;
  st["sat"] = doc.stats.sat;
  st["unsat"] = doc.stats.unsat;
  st["timeouts"] = doc.stats.timeouts;
  st["time_ms"] = doc.stats.time_ms;
  st["incomplete"] = doc.stats.incomplete;
  j["stats"] = st;
  if (doc.summaries) {
    j["summaries"] = table_json(*doc.summaries);
    Json refs = Json::array();
    for (const auto& r : doc.refinements) {
      refs.push_back(Json{{"callee", r.callee},
                          {"caller_block", r.caller_block},
                          {"constraints", r.constraints},
                          {"new_entries", r.new_entries}});
    }
    j["refinements"] = refs;
  }
  return j.dump(2) + "\n";
}

ReportDocument parse_report(const std::string& text) {
  try {
    Json j = Json::parse(text);
    ReportDocument doc;
    doc.version = j.at("version").get<std::string>();
    doc.config = json_config(j.at("config"));
    doc.covered = j.at("covered").get<std::vector<std::string>>();
    doc.uncovered = j.at("uncovered").get<std::vector<std::string>>();
    for (const auto& jt : j.at("test_cases")) {
      ReportTestCase tc;
      tc.inputs = json_int_map(jt.at("inputs"));
      tc.path = jt.at("path").get<std::vector<std::string>>();
      tc.r_true = jt.at("r_true").get<std::vector<std::string>>();
      tc.replay = jt.at("replay").get<std::string>();
      doc.test_cases.push_back(std::move(tc));
    }
    const Json& st = j.at("stats");
    doc.stats.queries = st.at("queries").get<std::size_t>();
    doc.stats.sat = st.at("sat").get<std::size_t>();
    doc.stats.unsat = st.at("unsat").get<std::size_t>();
    doc.stats.timeouts = st.at("timeouts").get<std::size_t>();
    doc.stats.time_ms = st.at("time_ms").get<double>();
    doc.stats.incomplete = st.at("incomplete").get<bool>();
    if (j.contains("summaries")) {
      SummaryTable t;
      for (const auto& [name, js] : j.at("summaries").items()) t.emplace(name, json_summary(js));
      doc.summaries = std::move(t);
    }
    if (j.contains("refinements")) {
      for (const auto& jr : j.at("refinements")) {
        RefinementLog r;
        r.callee = jr.at("callee").get<std::string>();
        r.caller_block = jr.at("caller_block").get<std::string>();
        r.constraints = jr.at("constraints").get<std::vector<std::string>>();
        r.new_entries = jr.at("new_entries").get<std::size_t>();
        doc.refinements.push_back(std::move(r));
      }
    }
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed report: ") + e.what());
  }
}

std::string summaries_to_json(const SummaryTable& table) { return table_json(table).dump(2) + "\n"; }

std::string oracle_to_json(const OracleResult& result) {
  Json j;
  j["path_count"] = result.path_count;
  j["incomplete"] = result.incomplete;
  Json paths = Json::array();
  for (const auto& p : result.paths) {
    Json jp;
    jp["path"] = p.path;
    jp["feasible"] = p.feasible;
    jp["inputs"] = int_map(p.inputs);
    paths.push_back(jp);
  }
  j["paths"] = paths;
  j["feasible_block_union"] = result.feasible_block_union;
  return j.dump(2) + "\n";
}

}  // namespace covgen
