#pragma once

// Command-line front end. Every command writes its tables plus a JSON
// manifest holding the full RunConfig, so `lpp replay <manifest>` reproduces
// the outputs byte for byte.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lpp/acceptance.hpp"
#include "lpp/asymptotics.hpp"
#include "lpp/ensemble.hpp"
#include "lpp/growth.hpp"
#include "lpp/io.hpp"
#include "lpp/stats.hpp"
#include "lpp/tracy_widom.hpp"

namespace lpp::cli {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kIoError = 2, kDomainError = 3, kNumericalError = 4 };

struct RunConfig {
  std::string command;
  double q = 0.5;
  double gamma = 1.0;
  int n = 20;
  int m = 0;  // 0 means floor(gamma * n)
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  double t_min = 0.0;
  double t_max = 10.0;
  double t_step = 1.0;  // exponential model only
  std::string s_grid = "-6:4:0.5";
  std::string out = "out";
  double tol = 1.0;  // multiplies every acceptance tolerance
  bool exp = false;
  bool rescaled = false;
  std::vector<int> ladder;
  std::string method = "fredholm";
  double u = 0.0;
  double time = 100.0;
  unsigned threads = default_threads();
  bool samples_set = false;  // validate: --samples given

  int columns() const { return m > 0 ? m : static_cast<int>(std::floor(gamma * n + 1e-9)); }
};

inline json to_json(const RunConfig& c) {
  return {{"command", c.command}, {"q", c.q},           {"gamma", c.gamma},   {"n", c.n},
          {"m", c.m},             {"samples", c.samples}, {"seed", c.seed},   {"t_min", c.t_min},
          {"t_max", c.t_max},     {"t_step", c.t_step}, {"s_grid", c.s_grid}, {"out", c.out},
          {"tol", c.tol},         {"exp", c.exp},       {"rescaled", c.rescaled}, {"ladder", c.ladder},
          {"method", c.method},   {"u", c.u},           {"time", c.time}, {"samples_set", c.samples_set}};
}

inline RunConfig from_json(const json& j) {
  RunConfig c;
  try {
    c.command = j.at("command").get<std::string>();
    c.q = j.at("q");
    c.gamma = j.at("gamma");
    c.n = j.at("n");
    c.m = j.at("m");
    c.samples = j.at("samples");
    c.seed = j.at("seed");
    c.t_min = j.at("t_min");
    c.t_max = j.at("t_max");
    c.t_step = j.at("t_step");
    c.s_grid = j.at("s_grid");
    c.out = j.at("out");
    c.tol = j.at("tol");
    c.exp = j.at("exp");
    c.rescaled = j.at("rescaled");
    c.ladder = j.at("ladder").get<std::vector<int>>();
    c.method = j.at("method");
    c.u = j.at("u");
    c.time = j.at("time");
    c.samples_set = j.value("samples_set", false);
  } catch (const json::exception& e) {
    throw io_error(std::string("malformed manifest: ") + e.what());
  }
  return c;
}

inline std::filesystem::path out_path(const RunConfig& c, const std::string& file) {
  return std::filesystem::path(c.out) / file;
}

inline void write_manifest(const RunConfig& c, const std::string& file, const std::vector<std::string>& outputs,
                           json extra = json::object()) {
  json j = {{"tool", "lpp"}, {"config", to_json(c)}, {"outputs", outputs}};
  for (auto& [k, v] : extra.items()) j[k] = v;
  write_json(out_path(c, file), j);
}

/// "lo:hi:step" or a comma list.
inline std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> v;
  auto num = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double x = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return x;
    } catch (const std::exception&) {
      throw domain_error("bad grid value '" + s + "'");
    }
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw domain_error("grid must be lo:hi:step");
    return uniform_grid(num(parts[0]), num(parts[1]), num(parts[2]));
  }
  std::stringstream ss(spec);
  for (std::string p; std::getline(ss, p, ',');) v.push_back(num(p));
  if (v.empty()) throw domain_error("empty grid");
  return v;
}

inline int cmd_simulate(const RunConfig& c, std::ostream& log) {
  const int M = c.columns();
  const ModelParams p = ModelParams::make(c.q, M, c.n);
  const double g = static_cast<double>(M) / c.n;
  if (!c.exp && (1.0 - c.q) * static_cast<double>(c.samples) < 10.0)
    log << "warning: (1-q)*samples < 10; the sample will be dominated by zero weights\n";
  double om, sg;
  if (c.exp) {
    const ExpConstants e = exp_constants(std::max(g, 1.0));
    om = e.mean;
    sg = e.scale;
  } else {
    const EdgeConstants k = edge_constants(std::max(g, 1.0), c.q);
    om = k.omega;
    sg = k.sigma;
  }
  const SampleBatch b = monte_carlo_batch(p, c.exp ? WeightKind::Exponential : WeightKind::Geometric, c.samples,
                                          c.seed, om, sg, c.threads);
  write_text(out_path(c, "samples.csv"), samples_csv(b));
  write_manifest(c, "samples.json", {"samples.csv"}, {{"meta", samples_meta(b)}});
  log << "wrote " << b.raw.size() << " samples to " << out_path(c, "samples.csv").string() << "\n";
  return kOk;
}

inline int cmd_exact(const RunConfig& c, std::ostream& log) {
  const int M = c.columns();
  require(c.t_max >= c.t_min, "t-max must be >= t-min");
  std::vector<CdfValue> rows;
  json desc;
  if (c.exp) {
    require(c.t_step > 0.0, "t-step must be positive");
    for (double t : uniform_grid(std::max(c.t_min, 0.0), c.t_max, c.t_step)) rows.push_back(exact_cdf_laguerre(M, c.n, t));
    desc = {{"model", "exponential"}, {"M", M}, {"N", c.n}, {"alpha", std::abs(M - c.n)}, {"nystrom_tol", 1e-8},
            {"tail_tol", 1e-13}};
  } else {
    const ModelParams p = ModelParams::make(c.q, M, c.n);
    rows = MeixnerEnsemble(p).table(static_cast<std::int64_t>(std::floor(c.t_min)),
                                    static_cast<std::int64_t>(std::floor(c.t_max)));
    desc = {{"model", "geometric"}, {"M", M}, {"N", c.n}, {"q", c.q}, {"K", p.meixner_K()}, {"tail_tol", 1e-13}};
  }
  std::vector<std::string> outputs{"cdf.csv"};
  write_text(out_path(c, "cdf.csv"), cdf_csv(rows));
  if (c.rescaled && !c.exp) {
    const EdgeConstants k = edge_constants(std::max(1.0, static_cast<double>(M) / c.n), c.q);
    std::string s = "s,p\n";
    const double scale = k.sigma * std::cbrt(double(c.n));
    for (const auto& r : rows) s += fmt((r.t - c.n * k.omega) / scale) + "," + fmt(r.p) + "\n";
    write_text(out_path(c, "cdf_rescaled.csv"), s);
    outputs.push_back("cdf_rescaled.csv");
  }
  write_manifest(c, "cdf.json", outputs, {{"descriptor", desc}});
  log << "wrote " << rows.size() << " rows to " << out_path(c, "cdf.csv").string() << "\n";
  return kOk;
}

inline int cmd_tw(const RunConfig& c, std::ostream& log) {
  TwMethod m;
  if (c.method == "fredholm")
    m = TwMethod::Fredholm;
  else if (c.method == "painleve")
    m = TwMethod::Painleve;
  else
    throw domain_error("unknown method '" + c.method + "'");
  const auto rows = tw_table(parse_grid(c.s_grid), m);
  write_text(out_path(c, "tw.csv"), tw_csv(rows));
  write_manifest(c, "tw.json", {"tw.csv"});
  log << "wrote " << rows.size() << " rows to " << out_path(c, "tw.csv").string() << "\n";
  return kOk;
}

inline int cmd_asymp(const RunConfig& c, std::ostream& log) {
  const EdgeConstants k = edge_constants(c.gamma, c.q);
  json j = constants_json(k);
  j["equilibrium_mass"] = equilibrium_density(c.gamma, c.q).mass();
  j["rate_J_edge_coefficient"] = rate_J_edge_coefficient(c.gamma, c.q);
  std::vector<std::string> outputs{"constants.json"};
  write_json(out_path(c, "constants.json"), j);
  if (!c.ladder.empty()) {
    const auto rows = convergence_ladder(c.gamma, c.q, c.ladder);
    write_text(out_path(c, "convergence.csv"), convergence_csv(rows));
    outputs.push_back("convergence.csv");
  }
  write_manifest(c, "asymp.json", outputs);
  log << "omega=" << fmt(k.omega) << " sigma=" << fmt(k.sigma) << "\n";
  return kOk;
}

inline int cmd_tasep(const RunConfig& c, std::ostream& log) {
  require(c.time > 0.0, "time must be positive");
  const TasepFluct fl = tasep_fluct_params(c.u);
  std::vector<double> y(c.samples);
  parallel_for(y.size(), c.threads,
               [&](std::size_t r) { y[r] = static_cast<double>(current_Y(c.u, c.time, sample_key(c.seed, r))); });
  std::string s = "sample_index,Y,rescaled\n";
  for (std::size_t i = 0; i < y.size(); ++i) s += std::to_string(i) + "," + fmt(y[i]) + "," + fmt(fl.rescale(y[i], c.time)) + "\n";
  write_text(out_path(c, "tasep.csv"), s);
  write_manifest(c, "tasep.json", {"tasep.csv"},
                 {{"center", fl.center(c.time)}, {"scale", fl.scale(c.time)}, {"limit_law", "1-F(-xi)"}});
  log << "wrote " << y.size() << " currents to " << out_path(c, "tasep.csv").string() << "\n";
  return kOk;
}

inline int cmd_validate(const RunConfig& c, std::ostream& log) {
  AcceptanceConfig a;
  a.seed = c.seed;
  a.tol_scale = c.tol;
  a.threads = c.threads;
  if (!c.ladder.empty()) a.ladder = c.ladder;
  if (c.samples_set) {
    a.mc_samples = a.tail_runs = std::max<std::size_t>(c.samples, 1);
    a.tasep_runs = std::min<std::size_t>(a.tasep_runs, a.mc_samples);
  }
  const auto results = run_acceptance(a, [&](const CriterionResult& r) { log << format_result(r) << std::endl; });
  std::string csv = "id,name,pass,measured,threshold,detail\n";
  json arr = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    csv += std::to_string(r.id) + ",\"" + r.name + "\"," + (r.pass ? "1" : "0") + "," + fmt(r.measured) + "," +
           fmt(r.threshold) + ",\"" + r.detail + "\"\n";
    arr.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"measured", r.measured},
                   {"threshold", r.threshold}, {"detail", r.detail}});
  }
  write_text(out_path(c, "validation.csv"), csv);
  write_manifest(c, "validation.json", {"validation.csv"}, {{"results", arr}});
  return all ? kOk : kValidationFailed;
}

inline int dispatch(const RunConfig& c, std::ostream& log) {
  if (c.command == "simulate") return cmd_simulate(c, log);
  if (c.command == "exact") return cmd_exact(c, log);
  if (c.command == "tw") return cmd_tw(c, log);
  if (c.command == "asymp") return cmd_asymp(c, log);
  if (c.command == "tasep") return cmd_tasep(c, log);
  if (c.command == "validate") return cmd_validate(c, log);
  throw domain_error("unknown command '" + c.command + "'");
}

/// Runs a command and maps failures onto exit classes.
inline int run_guarded(const RunConfig& c, std::ostream& log, std::ostream& err) {
  try {
    return dispatch(c, log);
  } catch (const io_error& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const domain_error& e) {
    err << "domain error: " << e.what() << "\n";
    return kDomainError;
  } catch (const not_implemented& e) {
    err << "not implemented: " << e.what() << "\n";
    return kDomainError;
  } catch (const numerical_error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalError;
  }
}

inline int replay(const std::string& manifest, const std::string& out_override, std::ostream& log, std::ostream& err) {
  RunConfig c;
  try {
    c = from_json(read_json(manifest).at("config"));
  } catch (const io_error& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const json::exception& e) {
    err << "io error: malformed manifest: " << e.what() << "\n";
    return kIoError;
  }
  if (!out_override.empty()) c.out = out_override;
  return run_guarded(c, log, err);
}

/// Parses argv and runs. Shared by the executable and the tests.
inline int main(int argc, const char* const* argv, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Corner-growth / last-passage percolation toolkit"};
  app.require_subcommand(1);
  RunConfig c;
  std::string manifest, replay_out;

  auto common = [&](CLI::App* s) {
    s->add_option("--q", c.q, "geometric parameter in (0,1)");
    s->add_option("--gamma", c.gamma, "aspect ratio M/N >= 1");
    s->add_option("--n", c.n, "rows N");
    s->add_option("--m", c.m, "columns M (default floor(gamma N))");
    s->add_option("--seed", c.seed, "64-bit seed");
    s->add_option("--out", c.out, "output directory");
    s->add_option("--threads", c.threads, "worker threads (output does not depend on it)");
  };
  auto* sim = app.add_subcommand("simulate", "Monte Carlo samples of G(M,N) or H(M,N)");
  common(sim);
  sim->add_option("--samples", c.samples, "number of samples");
  sim->add_flag("--exp", c.exp, "exponential weights");

  auto* ex = app.add_subcommand("exact", "exact CDF table");
  common(ex);
  ex->add_option("--t-min", c.t_min, "first threshold");
  ex->add_option("--t-max", c.t_max, "last threshold");
  ex->add_option("--t-step", c.t_step, "threshold step for the exponential model");
  ex->add_flag("--exp", c.exp, "exponential model (Laguerre)");
  ex->add_flag("--rescaled", c.rescaled, "also write the table on the Tracy-Widom scale");

  auto* tw = app.add_subcommand("tw", "Tracy-Widom GUE table");
  tw->add_option("--s-grid", c.s_grid, "lo:hi:step or comma list");
  tw->add_option("--method", c.method, "fredholm or painleve");
  tw->add_option("--out", c.out, "output directory");

  auto* as = app.add_subcommand("asymp", "limit constants and convergence ladder");
  common(as);
  as->add_option("--ladder", c.ladder, "N values, e.g. 50,100,200")->delimiter(',');

  auto* ta = app.add_subcommand("tasep", "continuous-time TASEP current samples");
  common(ta);
  ta->add_option("--samples", c.samples, "independent runs");
  ta->add_option("--u", c.u, "position ratio u in [0,1)");
  ta->add_option("--time", c.time, "time t");

  auto* va = app.add_subcommand("validate", "run the acceptance suite");
  va->add_option("--seed", c.seed, "master seed for the stochastic criteria");
  va->add_option("--tol", c.tol, "multiplier applied to every tolerance");
  va->add_option("--out", c.out, "directory for the report");
  va->add_option("--threads", c.threads, "worker threads");
  va->add_option("--ladder", c.ladder, "N values for the edge ladder")->delimiter(',');
  auto* va_samples = va->add_option("--samples", c.samples, "Monte Carlo sizes for criteria 4, 9 and 10");

  auto* rp = app.add_subcommand("replay", "rerun a command from its manifest");
  rp->add_option("manifest", manifest, "manifest.json of an earlier run")->required();
  rp->add_option("--out", replay_out, "write outputs elsewhere");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, log, err);
    return code == 0 ? kOk : kDomainError;
  }
  if (rp->parsed()) return replay(manifest, replay_out, log, err);
  c.command = app.get_subcommands().front()->get_name();
  c.samples_set = va_samples->count() > 0;
  return run_guarded(c, log, err);
}

}  // namespace lpp::cli
