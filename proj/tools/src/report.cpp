#include "nigmg_cli/report.hpp"

#include "nigmg/error.hpp"
#include "nigmg_cli/io.hpp"

namespace nigmg::cli {

namespace {

void check_probability(double p, const std::string& what) {
  require(p >= 0.0 && p <= 1.0, ErrorKind::parse, what + " is not a probability");
}

}  // namespace

nlohmann::ordered_json report_to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = r.schema_version;
  j["command"] = r.command;
  j["wavelet"] = r.wavelet;
  j["length"] = r.length;
  j["observations"] = r.observations;
  j["factors"] = nlohmann::ordered_json::array();
  for (std::size_t l = 0; l < r.factors.size(); ++l)
    j["factors"].push_back({{"name", r.factors[l]}, {"levels", r.levels[l]}});
  j["fit"] = {{"mode", r.fit_mode},
              {"hyperparams", hyperparams_to_json(r.hyperparams)},
              {"log_evidence", r.log_evidence},
              {"initial_log_evidence", r.initial_log_evidence},
              {"converged", r.converged}};
  if (r.prior_pjap) j["fit"]["prior_pjap"] = *r.prior_pjap;
  j["seed"] = r.seed;
  j["samples"] = r.samples;
  j["pjap"] = r.pjap;
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& n : r.nodes)
    nodes.push_back({{"j", n.j}, {"k", n.k}, {"baseline", n.baseline}, {"pmap", n.pmap}});
  auto& dec = j["decisions"] = nlohmann::ordered_json::array();
  for (const auto& d : r.decisions) {
    nlohmann::ordered_json called = nlohmann::ordered_json::array();
    for (const auto& [nj, nk] : d.called) called.push_back({nj, nk});
    dec.push_back({{"factor", d.factor},
                   {"pjap", d.pjap},
                   {"target_fdr", d.target_fdr},
                   {"delta", d.delta},
                   {"no_calls", d.no_calls},
                   {"called", called},
                   {"nfp", d.nfp},
                   {"fdr", d.fdr}});
  }
  j["outputs"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.outputs) j["outputs"][k] = v;
  return j;
}

Report report_from_json(const nlohmann::json& j) {
  try {
    Report r;
    r.schema_version = j.at("schema_version").get<int>();
    require(r.schema_version == kReportSchemaVersion, ErrorKind::parse,
            "unsupported report schema version " + std::to_string(r.schema_version));
    r.command = j.at("command").get<std::string>();
    r.wavelet = j.at("wavelet").get<std::string>();
    r.length = j.at("length").get<std::size_t>();
    r.observations = j.at("observations").get<std::size_t>();
    for (const auto& f : j.at("factors")) {
      r.factors.push_back(f.at("name").get<std::string>());
      r.levels.push_back(f.at("levels").get<std::vector<std::string>>());
    }
    const auto& fit = j.at("fit");
    r.fit_mode = fit.at("mode").get<std::string>();
    r.hyperparams = hyperparams_from_json(fit.at("hyperparams"), HyperParams{});
    r.log_evidence = fit.at("log_evidence").get<double>();
    r.initial_log_evidence = fit.at("initial_log_evidence").get<double>();
    r.converged = fit.at("converged").get<bool>();
    if (fit.contains("prior_pjap")) r.prior_pjap = fit.at("prior_pjap").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.samples = j.at("samples").get<std::size_t>();
    r.pjap = j.at("pjap").get<std::vector<double>>();
    for (double p : r.pjap) check_probability(p, "PJAP");
    for (const auto& n : j.at("nodes")) {
      NodeEntry e;
      e.j = n.at("j").get<int>();
      e.k = n.at("k").get<int>();
      e.baseline = n.at("baseline").get<double>();
      e.pmap = n.at("pmap").get<std::vector<double>>();
      check_probability(e.baseline, "baseline probability");
      for (double p : e.pmap) check_probability(p, "PMAP");
      r.nodes.push_back(std::move(e));
    }
    for (const auto& d : j.at("decisions")) {
      FactorDecision f;
      f.factor = d.at("factor").get<std::string>();
      f.pjap = d.at("pjap").get<double>();
      f.target_fdr = d.at("target_fdr").get<double>();
      f.delta = d.at("delta").get<double>();
      f.no_calls = d.at("no_calls").get<bool>();
      for (const auto& c : d.at("called")) f.called.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
      f.nfp = d.at("nfp").get<double>();
      f.fdr = d.at("fdr").get<double>();
      r.decisions.push_back(std::move(f));
    }
    for (const auto& [k, v] : j.at("outputs").items()) r.outputs[k] = v.get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("malformed report: ") + e.what());
  }
}

std::string emit_report(const Report& r) { return report_to_json(r).dump(2) + "\n"; }

Report parse_report(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("report is not valid JSON: ") + e.what());
  }
  return report_from_json(j);
}

}  // namespace nigmg::cli
