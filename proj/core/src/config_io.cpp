#include "mgdispatch/config_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

namespace mgdispatch {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(context + "." + key, "missing required field");
  return *it;
}

double as_number(const json& v, const std::string& context) {
  if (!v.is_number()) fail(context, "expected a number");
  return v.get<double>();
}

std::vector<double> as_number_array(const json& v, const std::string& context) {
  if (!v.is_array()) fail(context, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], context + "[" + std::to_string(i) + "]"));
  return out;
}

Eigen::VectorXd as_vector(const json& v, const std::string& context) {
  const auto values = as_number_array(v, context);
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<double> optional_schedule(const json& obj, const std::string& key,
                                      const std::string& context) {
  auto it = obj.find(key);
  if (it == obj.end()) return {};
  return as_number_array(*it, context + "." + key);
}

GeneratorParams parse_generator(const json& g, const std::string& context) {
  GeneratorParams out;
  out.p_min = as_number(require(g, "p_min", context), context + ".p_min");
  out.p_max = as_number(require(g, "p_max", context), context + ".p_max");
  out.ramp_up = as_number(require(g, "ramp_up", context), context + ".ramp_up");
  out.ramp_down = as_number(require(g, "ramp_down", context), context + ".ramp_down");
  out.a = as_number(require(g, "a", context), context + ".a");
  out.b = as_number(require(g, "b", context), context + ".b");
  out.a_by_slot = optional_schedule(g, "a_by_slot", context);
  out.b_by_slot = optional_schedule(g, "b_by_slot", context);
  return out;
}

LoadParams parse_load(const json& l, const std::string& context) {
  LoadParams out;
  out.p_min = as_number(require(l, "p_min", context), context + ".p_min");
  out.p_max = as_number(require(l, "p_max", context), context + ".p_max");
  out.c = as_number(require(l, "c", context), context + ".c");
  out.d = as_number(require(l, "d", context), context + ".d");
  out.c_by_slot = optional_schedule(l, "c_by_slot", context);
  out.d_by_slot = optional_schedule(l, "d_by_slot", context);
  return out;
}

WindFarmParams parse_farm(const json& w, const std::string& context) {
  WindFarmParams out;
  out.weibull_shape = as_number(require(w, "weibull_shape", context), context + ".weibull_shape");
  out.weibull_scale = as_number(require(w, "weibull_scale", context), context + ".weibull_scale");
  out.v_cut_in = as_number(require(w, "v_cut_in", context), context + ".v_cut_in");
  out.v_rated = as_number(require(w, "v_rated", context), context + ".v_rated");
  out.v_cut_out = as_number(require(w, "v_cut_out", context), context + ".v_cut_out");
  out.p_rated = as_number(require(w, "p_rated", context), context + ".p_rated");
  out.ar_coeff = as_number(require(w, "ar_coeff", context), context + ".ar_coeff");
  return out;
}

DispatchProblem parse_problem(const json& p) {
  DispatchProblem out;
  out.horizon = static_cast<int>(as_number(require(p, "horizon", "problem"), "problem.horizon"));

  const json& gens = require(p, "generators", "problem");
  if (!gens.is_array()) fail("problem.generators", "expected an array");
  for (size_t m = 0; m < gens.size(); ++m)
    out.generators.push_back(parse_generator(gens[m], "problem.generators[" + std::to_string(m) + "]"));

  const json& loads = require(p, "loads", "problem");
  if (!loads.is_array()) fail("problem.loads", "expected an array");
  for (size_t n = 0; n < loads.size(); ++n)
    out.loads.push_back(parse_load(loads[n], "problem.loads[" + std::to_string(n) + "]"));

  if (auto it = p.find("wind_farms"); it != p.end()) {
    if (!it->is_array()) fail("problem.wind_farms", "expected an array");
    for (size_t i = 0; i < it->size(); ++i)
      out.wind_farms.push_back(parse_farm((*it)[i], "problem.wind_farms[" + std::to_string(i) + "]"));
  }

  const int I = out.num_farms();
  if (auto it = p.find("farm_correlation"); it != p.end()) {
    if (!it->is_array() || static_cast<int>(it->size()) != I)
      fail("problem.farm_correlation", "expected an IxI array of rows");
    out.farm_correlation.resize(I, I);
    for (int i = 0; i < I; ++i) {
      const auto row = as_number_array((*it)[static_cast<size_t>(i)],
                                       "problem.farm_correlation[" + std::to_string(i) + "]");
      if (static_cast<int>(row.size()) != I)
        fail("problem.farm_correlation[" + std::to_string(i) + "]", "row length must equal the farm count");
      for (int j = 0; j < I; ++j) out.farm_correlation(i, j) = row[static_cast<size_t>(j)];
    }
  } else {
    out.farm_correlation = Eigen::MatrixXd::Identity(I, I);
  }

  out.fixed_demand = as_vector(require(p, "fixed_demand", "problem"), "problem.fixed_demand");
  out.spinning_reserve =
      as_vector(require(p, "spinning_reserve", "problem"), "problem.spinning_reserve");

  const json& prices = require(p, "prices", "problem");
  out.prices.alpha = as_vector(require(prices, "alpha", "problem.prices"), "problem.prices.alpha");
  out.prices.beta = as_vector(require(prices, "beta", "problem.prices"), "problem.prices.beta");

  out.p_r_min = p.contains("p_r_min") ? as_number(p["p_r_min"], "problem.p_r_min") : 0.0;
  out.p_r_max = as_number(require(p, "p_r_max", "problem"), "problem.p_r_max");

  if (auto it = p.find("initial_gen"); it != p.end()) {
    out.initial_gen = as_vector(*it, "problem.initial_gen");
  } else {
    out.initial_gen.resize(out.num_generators());
    for (int m = 0; m < out.num_generators(); ++m)
      out.initial_gen[m] = out.generators[static_cast<size_t>(m)].p_min;
  }
  return out;
}

RunConfig parse_run(const json& root) {
  RunConfig run;
  auto it = root.find("run");
  if (it == root.end()) return run;
  const json& r = *it;
  if (r.contains("solver")) {
    run.solver = r["solver"].get<std::string>();
    if (run.solver != "admm" && run.solver != "central" && run.solver != "lmp")
      fail("run.solver", "must be one of admm|central|lmp");
  }
  if (r.contains("n_scenarios")) run.n_scenarios = static_cast<int>(as_number(r["n_scenarios"], "run.n_scenarios"));
  if (r.contains("mean_samples")) run.mean_samples = static_cast<int>(as_number(r["mean_samples"], "run.mean_samples"));
  if (r.contains("seed")) run.seed = r["seed"].get<std::uint64_t>();
  if (r.contains("rho")) run.rho = as_number(r["rho"], "run.rho");
  if (r.contains("nu")) run.nu = as_number(r["nu"], "run.nu");
  if (r.contains("eps_res")) run.eps_res = as_number(r["eps_res"], "run.eps_res");
  if (r.contains("max_iters")) run.max_iters = static_cast<int>(as_number(r["max_iters"], "run.max_iters"));
  return run;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

std::pair<DispatchProblem, RunConfig> parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be an object");

  DispatchProblem problem;
  RunConfig run;
  try {
    problem = parse_problem(require(root, "problem", "config"));
    run = parse_run(root);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }

  const ValidationReport report = validate_problem(problem);
  if (!report.ok()) throw ConfigError("invalid problem:\n" + report.to_string());
  return {std::move(problem), run};
}

std::pair<DispatchProblem, RunConfig> parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string config_to_json(const DispatchProblem& problem, const RunConfig& run) {
  json p;
  p["horizon"] = problem.horizon;
  for (const auto& g : problem.generators) {
    json jg{{"p_min", g.p_min}, {"p_max", g.p_max}, {"ramp_up", g.ramp_up},
            {"ramp_down", g.ramp_down}, {"a", g.a}, {"b", g.b}};
    if (!g.a_by_slot.empty()) jg["a_by_slot"] = g.a_by_slot;
    if (!g.b_by_slot.empty()) jg["b_by_slot"] = g.b_by_slot;
    p["generators"].push_back(jg);
  }
  for (const auto& l : problem.loads) {
    json jl{{"p_min", l.p_min}, {"p_max", l.p_max}, {"c", l.c}, {"d", l.d}};
    if (!l.c_by_slot.empty()) jl["c_by_slot"] = l.c_by_slot;
    if (!l.d_by_slot.empty()) jl["d_by_slot"] = l.d_by_slot;
    p["loads"].push_back(jl);
  }
  for (const auto& w : problem.wind_farms) {
    p["wind_farms"].push_back(json{{"weibull_shape", w.weibull_shape},
                                   {"weibull_scale", w.weibull_scale},
                                   {"v_cut_in", w.v_cut_in},
                                   {"v_rated", w.v_rated},
                                   {"v_cut_out", w.v_cut_out},
                                   {"p_rated", w.p_rated},
                                   {"ar_coeff", w.ar_coeff}});
  }
  json corr = json::array();
  for (int i = 0; i < problem.num_farms(); ++i) {
    json row = json::array();
    for (int j = 0; j < problem.num_farms(); ++j) row.push_back(problem.farm_correlation(i, j));
    corr.push_back(row);
  }
  p["farm_correlation"] = corr;
  p["fixed_demand"] = vector_to_json(problem.fixed_demand);
  p["spinning_reserve"] = vector_to_json(problem.spinning_reserve);
  p["prices"] = {{"alpha", vector_to_json(problem.prices.alpha)},
                 {"beta", vector_to_json(problem.prices.beta)}};
  p["p_r_min"] = problem.p_r_min;
  p["p_r_max"] = problem.p_r_max;
  p["initial_gen"] = vector_to_json(problem.initial_gen);

  json root;
  root["problem"] = p;
  root["run"] = {{"solver", run.solver},     {"n_scenarios", run.n_scenarios},
                 {"mean_samples", run.mean_samples}, {"seed", run.seed},
                 {"rho", run.rho},           {"nu", run.nu},
                 {"eps_res", run.eps_res},   {"max_iters", run.max_iters}};
  return root.dump(2) + "\n";
}

}  // namespace mgdispatch
