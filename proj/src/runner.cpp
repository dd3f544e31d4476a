#include "adlab/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "adlab/adiabatic.hpp"
#include "adlab/inconsistency.hpp"
#include "adlab/models.hpp"

namespace adlab::cli {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt_cell(double v) { return fmt_num(v); }

struct Output {
  std::string csv;
  Json json;
};

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

spectral::HamiltonianPath model_from(const RunConfig& cfg) {
  return models::make_model(cfg.model_name, cfg.model_scalars, cfg.model_lists);
}

models::SpinRotatingField spin_from(const RunConfig& cfg) {
  if (cfg.model_name != "spin-rotating-field")
    fail(ErrorKind::Precondition,
         "subcommand requires model 'spin-rotating-field', got '" +
             cfg.model_name + "'");
  models::SpinRotatingField m;
  auto get = [&](const char* key, double fallback) {
    auto it = cfg.model_scalars.find(key);
    return it != cfg.model_scalars.end() ? it->second : fallback;
  };
  m.omega0 = get("omega0", m.omega0);
  m.omega = get("omega", m.omega);
  m.theta = get("theta", 3.14159265358979323846 / 4);
  m.cycles = get("cycles", m.cycles);
  return m;
}

adiabatic::SweepOptions sweep_options(const RunConfig& cfg) {
  adiabatic::SweepOptions opt;
  opt.grid_size = cfg.grid_size;
  opt.steps = cfg.steps;
  return opt;
}

// Running slope column: "exact" while every D so far is <= 1e-9, "na" until
// two finite points exist, then the least-squares slope over the rows so far.
std::string slope_so_far(const std::vector<double>& Ts,
                         const std::vector<double>& Ds, size_t upto) {
  bool all_tiny = true;
  for (size_t i = 0; i <= upto; ++i)
    if (Ds[i] > 1e-9) all_tiny = false;
  if (all_tiny) return "exact";
  if (upto < 1) return "na";
  std::vector<double> ts(Ts.begin(), Ts.begin() + upto + 1);
  std::vector<double> ds(Ds.begin(), Ds.begin() + upto + 1);
  for (double& d : ds) d = std::max(d, 1e-300);
  return fmt_cell(adiabatic::fit_loglog(ts, ds).slope);
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

Output run_models(const RunConfig&) {
  Output out;
  out.csv += csv_line({"name", "closed_loop", "parameters"});
  Json rows = Json::array();
  for (const auto& e : models::model_catalog()) {
    std::string params;
    for (const auto& [k, v] : e.scalar_defaults) {
      if (!params.empty()) params += ';';
      params += k + "=" + fmt_cell(v);
    }
    for (const auto& [k, vs] : e.list_defaults) {
      if (!params.empty()) params += ';';
      params += k + "=";
      for (size_t i = 0; i < vs.size(); ++i) {
        if (i) params += '|';
        params += fmt_cell(vs[i]);
      }
    }
    const std::string closed = e.closed_loop ? "1" : "0";
    out.csv += csv_line({e.name, closed, params});
    rows.push_back({{"name", e.name},
                    {"closed_loop", e.closed_loop ? 1 : 0},
                    {"parameters", params}});
  }
  out.json = Json{{"rows", rows}};
  return out;
}

Output run_evolve(const RunConfig& cfg) {
  auto path = model_from(cfg);
  const double T = cfg.T_values.front();
  auto ep = spectral::build_eigenpath(path, cfg.grid_size);
  evolve::EvolutionSpec spec{path, T, cfg.steps,
                             StateVector(ep.vector(0, cfg.level)),
                             cfg.sample_count};
  auto trace = evolve::propagate(spec);

  const double survival =
      std::abs(trace.psi.back().raw().dot(trace.psi.front().raw()));

  Output out;
  out.csv += csv_line({"key", "value"});
  Json obj;
  auto put = [&](const std::string& key, const std::string& value,
                 Json jvalue) {
    out.csv += csv_line({key, value});
    obj[key] = std::move(jvalue);
  };
  put("model", path.name, path.name);
  put("T", fmt_cell(T), T);
  put("steps", std::to_string(trace.steps), trace.steps);
  put("samples", std::to_string(trace.grid.size()),
      static_cast<long>(trace.grid.size()));
  put("level", std::to_string(cfg.level), cfg.level);
  put("unitarity_defect", fmt_cell(trace.unitarity_defect),
      trace.unitarity_defect);
  put("final_survival", fmt_cell(survival), survival);
  const int last = ep.points() - 1;
  for (int n = 0; n < ep.dim(); ++n) {
    const double pop =
        std::norm(ep.vector(last, n).dot(trace.psi.back().raw()));
    put("final_population_" + std::to_string(n), fmt_cell(pop), pop);
  }
  out.json = std::move(obj);
  return out;
}

Output run_sweep(const RunConfig& cfg, bool dual_command) {
  auto path = model_from(cfg);
  const bool dual = dual_command || cfg.picture == 'b';
  const auto system =
      dual ? adiabatic::SystemKind::Dual : adiabatic::SystemKind::Original;
  auto report = adiabatic::convergence_sweep(path, system, cfg.T_values,
                                             cfg.level, sweep_options(cfg));
  const std::string picture = dual ? "b" : "a";

  Output out;
  Json rows = Json::array();
  if (dual_command) {
    out.csv += csv_line({"T", "consistency", "D", "slope_so_far"});
    for (size_t i = 0; i < report.Ts.size(); ++i) {
      const std::string slope = slope_so_far(report.Ts, report.D, i);
      out.csv += csv_line({fmt_cell(report.Ts[i]),
                           fmt_cell(report.dual_consistency[i]),
                           fmt_cell(report.D[i]), slope});
      rows.push_back({{"T", report.Ts[i]},
                      {"consistency", report.dual_consistency[i]},
                      {"D", report.D[i]},
                      {"slope_so_far", slope}});
    }
  } else {
    out.csv += csv_line({"T", "D", "picture", "slope_so_far"});
    for (size_t i = 0; i < report.Ts.size(); ++i) {
      const std::string slope = slope_so_far(report.Ts, report.D, i);
      out.csv += csv_line({fmt_cell(report.Ts[i]), fmt_cell(report.D[i]),
                           picture, slope});
      rows.push_back({{"T", report.Ts[i]},
                      {"D", report.D[i]},
                      {"picture", picture},
                      {"slope_so_far", slope}});
    }
  }
  out.json = Json{{"rows", rows}};
  if (report.exact) {
    out.json["slope"] = "exact";
  } else {
    out.json["slope"] = report.slope;
    out.json["fit_residual"] = report.fit_residual;
    out.json["discarded_transients"] = report.discarded_transients;
  }
  return out;
}

Output run_berry(const RunConfig& cfg) {
  auto path = model_from(cfg);
  auto ep = spectral::build_eigenpath(path, cfg.grid_size);
  Output out;
  out.csv += csv_line({"level", "phase"});
  Json rows = Json::array();
  for (int n = 0; n < ep.dim(); ++n) {
    const double phase = spectral::berry_phase(ep, n);
    out.csv += csv_line({std::to_string(n), fmt_cell(phase)});
    rows.push_back({{"level", n}, {"phase", phase}});
  }
  out.json = Json{{"rows", rows}};
  return out;
}

Output run_condition(const RunConfig& cfg) {
  auto path = model_from(cfg);
  const auto system = cfg.picture == 'b' ? adiabatic::SystemKind::Dual
                                         : adiabatic::SystemKind::Original;
  const auto mode = cfg.mode == "frozen"
                        ? adiabatic::ConditionMode::Frozen
                        : adiabatic::ConditionMode::SelfConsistent;
  auto reports = adiabatic::condition_sweep(path, system, cfg.T_values,
                                            cfg.level, mode,
                                            sweep_options(cfg));
  Output out;
  out.csv += csv_line({"s", "T", "C_n"});
  Json rows = Json::array();
  for (const auto& r : reports)
    for (size_t k = 0; k < r.s.size(); ++k) {
      out.csv += csv_line({fmt_cell(r.s[k]), fmt_cell(r.T), fmt_cell(r.value[k])});
      rows.push_back({{"s", r.s[k]}, {"T", r.T}, {"C_n", r.value[k]}});
    }
  out.json = Json{{"rows", rows}};
  return out;
}

Output run_probe(const RunConfig& cfg) {
  auto path = model_from(cfg);
  auto ep = spectral::build_eigenpath(path, cfg.grid_size);
  const double T = cfg.T_values.front();
  evolve::EvolutionSpec spec{path, T, cfg.steps,
                             StateVector(ep.vector(0, cfg.level)),
                             cfg.grid_size + 1};
  auto trace = evolve::propagate(spec);
  auto report = inconsistency::premise_probe(ep, path, trace);

  Output out;
  out.csv += csv_line({"key", "value"});
  Json obj;
  auto put = [&](const std::string& key, const std::string& value,
                 Json jvalue) {
    out.csv += csv_line({key, value});
    obj[key] = std::move(jvalue);
  };
  put("model", report.model, report.model);
  put("T", fmt_cell(T), T);
  put("level", std::to_string(report.level), report.level);
  put("max_offdiag", fmt_cell(report.max_offdiag), report.max_offdiag);
  for (size_t n = 0; n < report.berry_phases.size(); ++n)
    put("berry_phase_" + std::to_string(n), fmt_cell(report.berry_phases[n]),
        report.berry_phases[n]);
  put("rigid_frame_deviation", fmt_cell(report.rigid_frame_deviation),
      report.rigid_frame_deviation);
  put("overlap_gap", fmt_cell(report.overlap_gap), report.overlap_gap);
  out.json = std::move(obj);
  return out;
}

Output run_fidelity(const RunConfig& cfg) {
  const auto model = spin_from(cfg);
  const double duration = model.total_duration();
  std::vector<double> t_grid(cfg.sample_count);
  for (int i = 0; i < cfg.sample_count; ++i)
    t_grid[i] = duration * static_cast<double>(i) / (cfg.sample_count - 1);
  auto report =
      inconsistency::spin_fidelity_check(model, t_grid, cfg.steps, cfg.level);

  Output out;
  out.csv += csv_line({"t", "computed", "formula", "formula_sq"});
  Json rows = Json::array();
  for (const auto& p : report.points) {
    out.csv += csv_line({fmt_cell(p.t), fmt_cell(p.computed),
                         fmt_cell(p.formula), fmt_cell(p.formula_sq)});
    rows.push_back({{"t", p.t},
                    {"computed", p.computed},
                    {"formula", p.formula},
                    {"formula_sq", p.formula_sq}});
  }
  out.json = Json{{"rows", rows},
                  {"matched_convention", report.matched_convention},
                  {"oracle_defect", report.oracle_defect},
                  {"max_dev_amplitude", report.max_dev_amplitude},
                  {"max_dev_probability", report.max_dev_probability},
                  {"steps", report.steps}};
  return out;
}

void write_meta(const std::string& out_path, const std::string& subcommand,
                const RunConfig& cfg, double wall_ms) {
  std::ofstream meta(out_path + ".meta");
  if (!meta) return;
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  meta << "subcommand: " << subcommand << "\n"
       << "model: " << cfg.model_name << "\n"
       << "grid_size: " << cfg.grid_size << "\n"
       << "sample_count: " << cfg.sample_count << "\n"
       << "steps: " << cfg.steps << "\n"
       << "level: " << cfg.level << "\n"
       << "picture: " << cfg.picture << "\n"
       << "mode: " << cfg.mode << "\n"
       << "wall_ms: " << fmt_num(wall_ms) << "\n"
       << "written: " << stamp << "\n";
}

}  // namespace

std::string fmt_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Catalog:
    case ErrorKind::InputDomain:
    case ErrorKind::Precondition:
      return 2;
    default:
      return 3;
  }
}

void dispatch(const std::string& subcommand, const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Output out;
  if (subcommand == "models")
    out = run_models(cfg);
  else if (subcommand == "evolve")
    out = run_evolve(cfg);
  else if (subcommand == "sweep")
    out = run_sweep(cfg, false);
  else if (subcommand == "dual")
    out = run_sweep(cfg, true);
  else if (subcommand == "berry")
    out = run_berry(cfg);
  else if (subcommand == "condition")
    out = run_condition(cfg);
  else if (subcommand == "probe")
    out = run_probe(cfg);
  else if (subcommand == "fidelity")
    out = run_fidelity(cfg);
  else
    fail(ErrorKind::Parse, "unknown subcommand '" + subcommand + "'");

  const double wall_ms =
      std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - start)
          .count();

  const std::string payload =
      cfg.format == "json" ? out.json.dump(2) + "\n" : out.csv;
  if (cfg.out_path.empty()) {
    std::cout << payload;
  } else {
    std::ofstream file(cfg.out_path, std::ios::binary);
    if (!file)
      fail(ErrorKind::InputDomain,
           "cannot open output file '" + cfg.out_path + "'");
    file << payload;
    write_meta(cfg.out_path, subcommand, cfg, wall_ms);
  }
}

}  // namespace adlab::cli
