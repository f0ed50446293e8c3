#include "nigmg_cli/commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "nigmg/decision.hpp"
#include "nigmg/ebayes.hpp"
#include "nigmg/grove.hpp"
#include "nigmg/parallel.hpp"
#include "nigmg/rng.hpp"
#include "nigmg_cli/io.hpp"
#include "nigmg_cli/report.hpp"

namespace nigmg::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return out;
}

HyperParams initial_hyperparams(const WaveletData& w, const FactorDesign& design,
                                const std::optional<fs::path>& params) {
  HyperParams hp = default_hyperparams(w, design);
  if (params) {
    json j;
    try {
      j = json::parse(read_text(*params));
    } catch (const json::exception& e) {
      fail(ErrorKind::parse, "parameter file is not valid JSON: " + std::string(e.what()));
    }
    hp = hyperparams_from_json(j, hp);
  }
  if (hp.upsilon.size() != design.factors()) {
    // a scalar-like vector from a file is broadcast; anything else is an error
    require(hp.upsilon.size() <= 1 || design.factors() == 0, ErrorKind::domain,
            "parameter file has " + std::to_string(hp.upsilon.size()) + " upsilon values for " +
                std::to_string(design.factors()) + " factors");
    const double u = hp.upsilon.empty() ? hp.tau : hp.upsilon.front();
    hp.upsilon.assign(design.factors(), u);
  }
  hp.validate(design.factors());
  return hp;
}

FitSpec make_spec(FitMode mode, std::size_t restarts, std::uint64_t seed) {
  FitSpec s;
  s.mode = mode;
  s.restarts = restarts;
  s.seed = seed;
  return s;
}

std::vector<NodeEntry> node_entries(const PosteriorMarginals& m, int J, std::size_t L) {
  std::vector<NodeEntry> out;
  for (const NodeIndex n : top_down_order(J)) {
    NodeEntry e;
    e.j = n.j;
    e.k = n.k;
    e.baseline = std::clamp(m.baseline(n), 0.0, 1.0);
    for (std::size_t l = 0; l < L; ++l) e.pmap.push_back(std::clamp(m.pmap(n, l), 0.0, 1.0));
    out.push_back(std::move(e));
  }
  return out;
}

void write_pmap_csv(const fs::path& path, const std::vector<NodeEntry>& nodes,
                    const std::vector<std::string>& factors) {
  std::vector<std::string> header{"j", "k", "baseline"};
  for (const auto& f : factors) header.push_back("pmap_" + f);
  std::vector<std::vector<double>> cols(header.size());
  for (const auto& n : nodes) {
    cols[0].push_back(n.j);
    cols[1].push_back(n.k);
    cols[2].push_back(n.baseline);
    for (std::size_t l = 0; l < n.pmap.size(); ++l) cols[3 + l].push_back(n.pmap[l]);
  }
  write_columns(path, header, cols);
}

std::vector<double> index_column(std::size_t T) {
  std::vector<double> idx(T);
  for (std::size_t i = 0; i < T; ++i) idx[i] = static_cast<double>(i);
  return idx;
}

void write_band(const fs::path& path, const CredibleBand& b) {
  write_columns(path, {"index", "lower", "upper", "mean"},
                {index_column(b.lower.size()), b.lower, b.upper, b.mean});
}

// "[factor:]A-B" with factor a name or 1-based index; labels may contain '-'
Contrast parse_contrast(const std::string& text, const DesignTable& t) {
  std::string body = text;
  std::size_t factor = 0;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const std::string f = text.substr(0, colon);
    body = text.substr(colon + 1);
    const auto it = std::find(t.factor_names.begin(), t.factor_names.end(), f);
    if (it != t.factor_names.end()) {
      factor = static_cast<std::size_t>(it - t.factor_names.begin());
    } else {
      std::size_t idx = 0;
      std::istringstream in(f);
      require(static_cast<bool>(in >> idx) && in.eof() && idx >= 1 && idx <= t.factor_names.size(),
              ErrorKind::domain, "contrast '" + text + "' names an unknown factor");
      factor = idx - 1;
    }
  }
  const auto& names = t.level_names[factor];
  auto level = [&](const std::string& s) {
    const auto it = std::find(names.begin(), names.end(), s);
    return it == names.end() ? -1 : static_cast<int>(it - names.begin());
  };
  for (std::size_t pos = body.find('-'); pos != std::string::npos; pos = body.find('-', pos + 1)) {
    const int a = level(body.substr(0, pos));
    const int b = level(body.substr(pos + 1));
    if (a >= 0 && b >= 0) {
      Contrast c = level_contrast(t.design, factor, a, b);
      c.label = t.factor_names[factor] + ":" + names[static_cast<std::size_t>(a)] + "-" +
                names[static_cast<std::size_t>(b)];
      return c;
    }
  }
  fail(ErrorKind::domain, "contrast '" + text + "' does not name two levels of factor '" +
                              t.factor_names[factor] + "'");
}

double json_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  require(j[key].is_number(), ErrorKind::parse, std::string("scenario '") + key + "' must be a number");
  return j[key].get<double>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  require(j.is_object(), ErrorKind::parse, std::string(where) + " must be a JSON object");
  for (const auto& [k, v] : j.items()) {
    const bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; });
    require(ok, ErrorKind::parse, std::string(where) + ": unknown key '" + k + "'");
  }
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain:
    case ErrorKind::range:
    case ErrorKind::refused:
      return kUsage;
    case ErrorKind::length:
    case ErrorKind::shape:
    case ErrorKind::parse:
    case ErrorKind::design:
      return kData;
    case ErrorKind::initialization:
    case ErrorKind::internal:
      return kNumerical;
  }
  return kNumerical;
}

void cmd_denoise(const DenoiseOptions& o, std::ostream& out) {
  const FitMode mode = parse_fit_mode(o.fit);
  require(mode != FitMode::hybrid, ErrorKind::domain, "denoise supports --fit eb or fixed");
  const WaveletFilter filter = make_filter(parse_filter_name(o.wavelet));
  const DataTable data = read_data_csv(o.input, o.header);
  const WaveletData w = transform_rows(data.rows, filter);
  const FactorDesign design = FactorDesign::replicates(data.rows.size());

  const HyperParams init = initial_hyperparams(w, design, o.params);
  const FitResult fit = mmle_fit(w, design, make_spec(mode, o.restarts, o.seed), init);
  const PosteriorGrove g = upward_pass(w, design, fit.hp);
  const PosteriorMarginals m = downward_marginals(g);
  const std::size_t T = data.rows.front().size();

  fs::create_directories(o.out_dir);
  Report r;
  r.command = "denoise";
  r.wavelet = o.wavelet;
  r.length = T;
  r.observations = data.rows.size();
  r.fit_mode = std::string(to_string(mode));
  r.hyperparams = fit.hp;
  r.log_evidence = g.log_evidence();
  r.initial_log_evidence = fit.initial_log_marginal;
  r.converged = fit.converged;
  r.seed = o.seed;
  r.samples = o.samples;
  r.nodes = node_entries(m, w.J, 0);

  std::vector<std::string> header{"index", "mean"};
  std::vector<std::vector<double>> cols{index_column(T), inverse_dwt(posterior_mean_z(g, m), filter)};
  if (o.samples > 0) {
    const auto draws = sample_posterior(g, o.samples, o.seed);
    const CredibleBand band =
        credible_bands(draws, baseline_contrast(design), o.band_level, true, w.J, filter);
    header.insert(header.end(), {"lower", "upper"});
    cols.push_back(band.lower);
    cols.push_back(band.upper);
  }
  write_columns(o.out_dir / "posterior_mean.csv", header, cols);
  r.outputs["posterior_mean"] = "posterior_mean.csv";
  write_pmap_csv(o.out_dir / "pmap.csv", r.nodes, {});
  r.outputs["pmap"] = "pmap.csv";
  write_text(o.out_dir / "report.json", emit_report(r));

  out << "log evidence " << format_double(r.log_evidence) << "; wrote "
      << (o.out_dir / "report.json").string() << "\n";
}

void cmd_fanova(const FanovaOptions& o, std::ostream& out) {
  const FitMode mode = parse_fit_mode(o.fit);
  require(o.fdr > 0.0 && o.fdr < 1.0, ErrorKind::domain, "--fdr must lie in (0, 1)");
  const WaveletFilter filter = make_filter(parse_filter_name(o.wavelet));
  const DataTable data = read_data_csv(o.input, o.header);
  const DesignTable dt = read_design_csv(o.design, o.design_header, data.rows.size());
  const FactorDesign& design = dt.design;
  const std::size_t L = design.factors();
  const WaveletData w = transform_rows(data.rows, filter);

  std::vector<Contrast> contrasts;
  for (const auto& c : o.contrasts) contrasts.push_back(parse_contrast(c, dt));

  std::optional<double> prior;
  double eta = 0.0;
  if (o.eta_kappa) {
    eta = *o.eta_kappa;
  } else {
    eta = calibrate_sparsity(o.prior_pjap, o.gamma_kappa, w.J, L);
    prior = o.prior_pjap;
  }
  HyperParams init = initial_hyperparams(w, design, o.params);
  if (o.eta_kappa || prior) {
    init.eta_kappa = eta;
    init.gamma_kappa = o.gamma_kappa;
  }
  init.validate(L);
  FitSpec spec = make_spec(mode, o.restarts, o.seed);
  if (mode == FitMode::hybrid) spec.fixed_sparsity = std::make_pair(eta, o.gamma_kappa);
  const FitResult fit = mmle_fit(w, design, spec, init);
  const PosteriorGrove g = upward_pass(w, design, fit.hp);
  const PosteriorMarginals m = downward_marginals(g);
  const std::size_t T = data.rows.front().size();

  fs::create_directories(o.out_dir);
  Report r;
  r.command = "fanova";
  r.wavelet = o.wavelet;
  r.length = T;
  r.observations = data.rows.size();
  r.factors = dt.factor_names;
  r.levels = dt.level_names;
  r.fit_mode = std::string(to_string(mode));
  r.hyperparams = fit.hp;
  r.log_evidence = g.log_evidence();
  r.initial_log_evidence = fit.initial_log_marginal;
  r.converged = fit.converged;
  r.prior_pjap = prior;
  r.seed = o.seed;
  r.samples = o.samples;
  r.nodes = node_entries(m, w.J, L);

  for (std::size_t l = 0; l < L; ++l) {
    const double p = std::clamp(pjap(g, l), 0.0, 1.0);
    r.pjap.push_back(p);
    const std::vector<double> table = m.pmap_table(l);
    std::vector<double> clamped(table.size());
    std::transform(table.begin(), table.end(), clamped.begin(),
                   [](double v) { return std::clamp(v, 0.0, 1.0); });
    const FdrThreshold thr = threshold_for_fdr(clamped, o.fdr);
    FactorDecision d;
    d.factor = dt.factor_names[l];
    d.pjap = p;
    d.target_fdr = o.fdr;
    d.delta = thr.delta;
    d.no_calls = thr.no_calls;
    if (!thr.no_calls) {
      const DecisionReport rep = evaluate(clamped, thr.delta);
      for (std::size_t f : rep.called) {
        const NodeIndex n = NodeIndex::from_flat(f);
        d.called.emplace_back(n.j, n.k);
      }
      d.nfp = rep.nfp;
      d.fdr = rep.fdr;
    }
    r.decisions.push_back(std::move(d));
  }

  const Contrast base = baseline_contrast(design);
  std::vector<std::string> header{"index", "baseline"};
  std::vector<std::vector<double>> cols{index_column(T),
                                        inverse_dwt(posterior_mean(g, m, base, true), filter)};
  for (const auto& c : contrasts) {
    header.push_back(c.label);
    cols.push_back(inverse_dwt(posterior_mean(g, m, c, false), filter));
    if (o.include_father) {
      header.push_back(c.label + "+father");
      cols.push_back(inverse_dwt(posterior_mean(g, m, c, true), filter));
    }
  }
  write_columns(o.out_dir / "posterior_mean.csv", header, cols);
  r.outputs["posterior_mean"] = "posterior_mean.csv";

  if (o.samples > 0) {
    const auto draws = sample_posterior(g, o.samples, o.seed);
    write_band(o.out_dir / "band_baseline.csv",
               credible_bands(draws, base, o.band_level, true, w.J, filter));
    r.outputs["band:baseline"] = "band_baseline.csv";
    for (const auto& c : contrasts) {
      const std::string stem = "band_" + sanitize(c.label);
      write_band(o.out_dir / (stem + ".csv"),
                 credible_bands(draws, c, o.band_level, false, w.J, filter));
      r.outputs["band:" + c.label] = stem + ".csv";
      if (o.include_father) {
        write_band(o.out_dir / (stem + "_father.csv"),
                   credible_bands(draws, c, o.band_level, true, w.J, filter));
        r.outputs["band:" + c.label + "+father"] = stem + "_father.csv";
      }
    }
  }
  write_pmap_csv(o.out_dir / "pmap.csv", r.nodes, dt.factor_names);
  r.outputs["pmap"] = "pmap.csv";
  write_text(o.out_dir / "report.json", emit_report(r));

  for (std::size_t l = 0; l < L; ++l)
    out << dt.factor_names[l] << ": PJAP " << format_double(r.pjap[l]) << ", "
        << r.decisions[l].called.size() << " nodes called at FDR " << format_double(o.fdr) << "\n";
  out << "wrote " << (o.out_dir / "report.json").string() << "\n";
}

void cmd_fit(const FitOptions& o, std::ostream& out) {
  const FitMode mode = parse_fit_mode(o.fit);
  const WaveletFilter filter = make_filter(parse_filter_name(o.wavelet));
  const DataTable data = read_data_csv(o.input, o.header);
  FactorDesign design = FactorDesign::replicates(data.rows.size());
  if (o.design) design = read_design_csv(*o.design, o.design_header, data.rows.size()).design;
  const std::size_t L = design.factors();
  const WaveletData w = transform_rows(data.rows, filter);
  require(mode != FitMode::hybrid || L > 0, ErrorKind::domain,
          "hybrid fitting needs a design with at least one factor");

  HyperParams init = initial_hyperparams(w, design, o.params);
  FitSpec spec = make_spec(mode, o.restarts, o.seed);
  if (L > 0 && (mode == FitMode::hybrid || o.eta_kappa)) {
    const double eta =
        o.eta_kappa ? *o.eta_kappa : calibrate_sparsity(o.prior_pjap, o.gamma_kappa, w.J, L);
    init.eta_kappa = eta;
    init.gamma_kappa = o.gamma_kappa;
    if (mode == FitMode::hybrid) spec.fixed_sparsity = std::make_pair(eta, o.gamma_kappa);
  }
  const FitResult fit = mmle_fit(w, design, spec, init);

  ordered_json j;
  j["mode"] = std::string(to_string(mode));
  j["hyperparams"] = hyperparams_to_json(fit.hp);
  j["log_marginal"] = fit.log_marginal;
  j["initial_log_marginal"] = fit.initial_log_marginal;
  j["converged"] = fit.converged;
  j["evaluations"] = fit.evaluations;
  const std::string text = j.dump(2) + "\n";
  if (o.out)
    write_text(*o.out, text);
  else
    out << text;
}

Scenario scenario_from_json(const json& j) {
  check_keys(j, {"baseline", "effect", "groups", "replicates", "length", "rsnr", "wavelet"},
             "scenario");
  Scenario s;
  if (j.contains("baseline")) s.baseline = parse_test_function(j["baseline"].get<std::string>());
  if (j.contains("effect")) {
    const json& e = j["effect"];
    check_keys(e, {"kind", "function", "scale", "start", "length", "proportion"}, "scenario effect");
    const std::string kind = e.value("kind", std::string("none"));
    if (kind == "none")
      s.effect.kind = EffectKind::none;
    else if (kind == "global")
      s.effect.kind = EffectKind::global;
    else if (kind == "local")
      s.effect.kind = EffectKind::local;
    else
      fail(ErrorKind::parse, "unknown effect kind '" + kind + "'");
    if (e.contains("function")) s.effect.function = parse_test_function(e["function"].get<std::string>());
    s.effect.scale = json_number(e, "scale", s.effect.scale);
    s.effect.start = json_number(e, "start", s.effect.start);
    s.effect.length = json_number(e, "length", s.effect.length);
    s.effect.proportion = json_number(e, "proportion", s.effect.proportion);
  }
  s.groups = static_cast<int>(json_number(j, "groups", s.groups));
  s.replicates = static_cast<int>(json_number(j, "replicates", s.replicates));
  s.T = static_cast<std::size_t>(json_number(j, "length", static_cast<double>(s.T)));
  s.rsnr = json_number(j, "rsnr", s.rsnr);
  if (j.contains("wavelet")) s.filter = parse_filter_name(j["wavelet"].get<std::string>());
  s.validate();
  return s;
}

ordered_json scenario_to_json(const Scenario& s) {
  ordered_json j;
  j["baseline"] = std::string(to_string(s.baseline));
  const char* kinds[] = {"none", "global", "local"};
  j["effect"] = {{"kind", kinds[static_cast<int>(s.effect.kind)]},
                 {"function", std::string(to_string(s.effect.function))},
                 {"scale", s.effect.scale},
                 {"start", s.effect.start},
                 {"length", s.effect.length},
                 {"proportion", s.effect.proportion}};
  j["groups"] = s.groups;
  j["replicates"] = s.replicates;
  j["length"] = s.T;
  j["rsnr"] = s.rsnr;
  j["wavelet"] = std::string(to_string(s.filter));
  return j;
}

void cmd_simulate(const SimulateOptions& o, std::ostream& out) {
  require(o.replicates >= 1, ErrorKind::domain, "--replicates must be >= 1");
  require(!o.methods.empty(), ErrorKind::domain, "no methods requested");
  const std::set<std::string> known{"nigmg", "wfanova", "tanova"};
  for (const auto& m : o.methods)
    require(known.count(m) > 0, ErrorKind::domain, "unknown method '" + m + "'");

  json sj;
  try {
    const std::string text =
        (!o.scenario.empty() && o.scenario.front() == '{') ? o.scenario : read_text(o.scenario);
    sj = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, "scenario is not valid JSON: " + std::string(e.what()));
  }
  const Scenario s = scenario_from_json(sj);
  const WaveletFilter filter = make_filter(s.filter);
  const int J = levels_for_length(s.T);

  FitSpec spec = make_spec(FitMode::hybrid, o.restarts, o.seed);
  spec.fixed_sparsity =
      std::make_pair(calibrate_sparsity(o.prior_pjap, o.gamma_kappa, J, 1), o.gamma_kappa);

  const std::size_t M = o.methods.size();
  // [replicate][0 alt / 1 null][method]
  std::vector<double> stats(o.replicates * 2 * M);
  parallel_for(o.replicates * 2, [&](std::size_t job) {
    const std::size_t r = job / 2;
    const bool null = job % 2 == 1;
    const Dataset d = generate(s, make_stream(o.seed, job)(), null);
    for (std::size_t m = 0; m < M; ++m) {
      double v = 0.0;
      if (o.methods[m] == "nigmg")
        v = nigmg_pjap(d, filter, spec);
      else
        v = pointwise_f_test(d, o.methods[m] == "wfanova" ? TestDomain::wavelet : TestDomain::time)
                .statistic;
      stats[(r * 2 + (null ? 1 : 0)) * M + m] = v;
    }
  });

  std::string csv = "replicate,dataset,method,statistic\n";
  for (std::size_t r = 0; r < o.replicates; ++r)
    for (int null = 0; null < 2; ++null)
      for (std::size_t m = 0; m < M; ++m)
        csv += std::to_string(r) + "," + (null ? "null" : "alt") + "," + o.methods[m] + "," +
               format_double(stats[(r * 2 + null) * M + m]) + "\n";
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  write_text(o.out, csv);

  const fs::path stem = o.out.parent_path() / o.out.stem();
  std::string auc_csv = "method,auc,alt,null\n";
  std::string roc_csv = "method,fpr,tpr\n";
  for (std::size_t m = 0; m < M; ++m) {
    std::vector<double> alt, null;
    for (std::size_t r = 0; r < o.replicates; ++r) {
      alt.push_back(stats[(r * 2) * M + m]);
      null.push_back(stats[(r * 2 + 1) * M + m]);
    }
    const RocCurve c = roc(alt, null);
    auc_csv += o.methods[m] + "," + format_double(c.auc) + "," + std::to_string(alt.size()) + "," +
               std::to_string(null.size()) + "\n";
    for (std::size_t i = 0; i < c.fpr.size(); ++i)
      roc_csv += o.methods[m] + "," + format_double(c.fpr[i]) + "," + format_double(c.tpr[i]) + "\n";
    out << o.methods[m] << " AUC " << format_double(c.auc) << "\n";
  }
  write_text(stem.string() + "_auc.csv", auc_csv);
  write_text(stem.string() + "_roc.csv", roc_csv);
}

void cmd_calibrate(const CalibrateOptions& o, std::ostream& out) {
  require(o.length.has_value() != o.levels.has_value(), ErrorKind::domain,
          "give exactly one of --length or --levels");
  const int J = o.levels ? *o.levels : levels_for_length(*o.length);
  require(J >= 0, ErrorKind::domain, "--levels must be >= 0");
  const double eta = calibrate_sparsity(o.target, o.gamma_kappa, J, o.factors);
  ordered_json j;
  j["eta_kappa"] = eta;
  j["gamma_kappa"] = o.gamma_kappa;
  j["levels"] = J;
  j["factors"] = o.factors;
  j["prior_pjap"] = prior_pjap(eta, o.gamma_kappa, J, o.factors);
  out << j.dump(2) << "\n";
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavelet-domain Bayesian functional ANOVA (NIG Markov trees and groves)", "nigmg"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  const std::vector<std::string> wavelets{"la10", "haar"};

  DenoiseOptions dn;
  auto* den = app.add_subcommand("denoise", "Posterior mean of one function from replicate curves");
  den->add_option("--input", dn.input, "Data CSV, one curve per row")->required();
  den->add_flag("--header", dn.header, "First data row holds location labels");
  den->add_option("--wavelet", dn.wavelet)->check(CLI::IsMember(wavelets))->capture_default_str();
  den->add_option("--fit", dn.fit)->check(CLI::IsMember({"eb", "fixed"}))->capture_default_str();
  den->add_option("--params", dn.params, "JSON hyperparameters (start point or fixed values)");
  den->add_option("--samples", dn.samples, "Posterior draws for the credible band")->capture_default_str();
  den->add_option("--band-level", dn.band_level)->capture_default_str();
  den->add_option("--restarts", dn.restarts)->capture_default_str();
  den->add_option("--seed", dn.seed)->capture_default_str();
  den->add_option("--out-dir", dn.out_dir)->capture_default_str();

  FanovaOptions fa;
  auto* fan = app.add_subcommand("fanova", "Functional ANOVA with factor-effect testing");
  fan->add_option("--input", fa.input, "Data CSV, one curve per row")->required();
  fan->add_option("--design", fa.design, "Design CSV, one label column per factor")->required();
  fan->add_flag("--header", fa.header, "First data row holds location labels");
  fan->add_flag("--design-header", fa.design_header, "First design row holds factor names");
  fan->add_option("--wavelet", fa.wavelet)->check(CLI::IsMember(wavelets))->capture_default_str();
  fan->add_option("--fit", fa.fit)->check(CLI::IsMember({"hybrid", "eb", "fixed"}))->capture_default_str();
  fan->add_option("--params", fa.params, "JSON hyperparameters (start point or fixed values)");
  auto* pp = fan->add_option("--prior-pjap", fa.prior_pjap, "Prior joint alternative probability")
                 ->capture_default_str();
  fan->add_option("--eta-kappa", fa.eta_kappa, "Factor-tree eta (instead of --prior-pjap)")->excludes(pp);
  fan->add_option("--gamma-kappa", fa.gamma_kappa)->capture_default_str();
  fan->add_option("--fdr", fa.fdr, "Target Bayesian FDR for node calls")->capture_default_str();
  fan->add_option("--samples", fa.samples, "Posterior draws for credible bands")->capture_default_str();
  fan->add_option("--band-level", fa.band_level)->capture_default_str();
  fan->add_option("--contrast", fa.contrasts, "[factor:]A-B level contrast; repeatable");
  fan->add_flag("--include-father", fa.include_father, "Also emit contrasts with the father coefficient");
  fan->add_option("--restarts", fa.restarts)->capture_default_str();
  fan->add_option("--seed", fa.seed)->capture_default_str();
  fan->add_option("--out-dir", fa.out_dir)->capture_default_str();

  FitOptions fo;
  auto* fit = app.add_subcommand("fit", "Empirical-Bayes hyperparameters only");
  fit->add_option("--input", fo.input)->required();
  fit->add_option("--design", fo.design, "Design CSV; omit for replicate curves");
  fit->add_flag("--header", fo.header);
  fit->add_flag("--design-header", fo.design_header);
  fit->add_option("--wavelet", fo.wavelet)->check(CLI::IsMember(wavelets))->capture_default_str();
  fit->add_option("--fit", fo.fit)->check(CLI::IsMember({"hybrid", "eb", "fixed"}))->capture_default_str();
  fit->add_option("--params", fo.params);
  auto* fpp = fit->add_option("--prior-pjap", fo.prior_pjap)->capture_default_str();
  fit->add_option("--eta-kappa", fo.eta_kappa)->excludes(fpp);
  fit->add_option("--gamma-kappa", fo.gamma_kappa)->capture_default_str();
  fit->add_option("--restarts", fo.restarts)->capture_default_str();
  fit->add_option("--seed", fo.seed)->capture_default_str();
  fit->add_option("--out", fo.out, "Output JSON (default: stdout)");

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "ROC study on simulated one-way fANOVA data");
  sim->add_option("--scenario", so.scenario, "Scenario JSON text or file")->required();
  sim->add_option("--replicates", so.replicates, "Alternative/null dataset pairs")->capture_default_str();
  sim->add_option("--methods", so.methods)->delimiter(',')->capture_default_str();
  sim->add_option("--prior-pjap", so.prior_pjap)->capture_default_str();
  sim->add_option("--gamma-kappa", so.gamma_kappa)->capture_default_str();
  sim->add_option("--restarts", so.restarts)->capture_default_str();
  sim->add_option("--seed", so.seed)->capture_default_str();
  sim->add_option("--out", so.out, "Per-replicate CSV; _auc.csv and _roc.csv are written beside it")
      ->capture_default_str();

  CalibrateOptions co;
  auto* cal = app.add_subcommand("calibrate", "Factor-tree eta for a prior joint alternative probability");
  cal->add_option("--target", co.target)->capture_default_str();
  cal->add_option("--gamma-kappa", co.gamma_kappa)->capture_default_str();
  cal->add_option("--length", co.length, "Signal length T");
  cal->add_option("--levels", co.levels, "Tree depth J (T = 2^(J+1))");
  cal->add_option("--factors", co.factors)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (den->parsed()) cmd_denoise(dn, out);
    else if (fan->parsed()) cmd_fanova(fa, out);
    else if (fit->parsed()) cmd_fit(fo, out);
    else if (sim->parsed()) cmd_simulate(so, out);
    else if (cal->parsed()) cmd_calibrate(co, out);
    return kOk;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    err << "error (parse): " << e.what() << "\n";
    return kData;
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace nigmg::cli
