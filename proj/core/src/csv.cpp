#include "mgdispatch/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mgdispatch {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, sep)) fields.push_back(field);
  return fields;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_schedule_csv(const std::filesystem::path& path, const Schedule& schedule) {
  std::ofstream out = open_out(path);
  out << "slot,unit_type,unit_id,power_kwh\n";
  const int T = static_cast<int>(schedule.p_r.size());
  for (int t = 0; t < T; ++t) {
    for (int m = 0; m < schedule.p_g.rows(); ++m)
      out << (t + 1) << ",generator," << (m + 1) << ',' << format_double(schedule.p_g(m, t)) << '\n';
    for (int n = 0; n < schedule.p_d.rows(); ++n)
      out << (t + 1) << ",load," << (n + 1) << ',' << format_double(schedule.p_d(n, t)) << '\n';
    out << (t + 1) << ",wind,1," << format_double(schedule.p_r[t]) << '\n';
  }
}

Schedule read_schedule_csv(const std::filesystem::path& path, int n_generators, int n_loads,
                           int horizon) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  Schedule s;
  s.p_g.setZero(n_generators, horizon);
  s.p_d.setZero(n_loads, horizon);
  s.p_r.setZero(horizon);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != 4) throw std::runtime_error("malformed schedule row: " + line);
    const int slot = std::stoi(fields[0]) - 1;
    const int id = std::stoi(fields[2]) - 1;
    const double value = std::stod(fields[3]);
    if (slot < 0 || slot >= horizon) throw std::runtime_error("slot out of range: " + line);
    if (fields[1] == "generator") s.p_g(id, slot) = value;
    else if (fields[1] == "load") s.p_d(id, slot) = value;
    else if (fields[1] == "wind") s.p_r[slot] = value;
    else throw std::runtime_error("unknown unit type: " + fields[1]);
  }
  return s;
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& trace,
                     int horizon) {
  std::ofstream out = open_out(path);
  out << "iter,net_cost_cents,xi_kwh";
  for (int t = 1; t <= horizon; ++t) out << ",lambda_t" << t;
  out << '\n';
  for (const auto& rec : trace) {
    out << rec.iteration << ',' << format_double(rec.net_cost) << ',' << format_double(rec.xi);
    for (int t = 0; t < horizon; ++t) out << ',' << format_double(rec.lambda[t]);
    out << '\n';
  }
}

void write_scenarios_csv(const std::filesystem::path& path, const ScenarioSet& scenarios) {
  if (!scenarios.has_per_farm())
    throw std::runtime_error("write_scenarios_csv: per-farm data was not retained");
  std::ofstream out = open_out(path);
  out << "scenario,slot,farm,power_kwh\n";
  for (size_t s = 0; s < scenarios.per_farm.size(); ++s) {
    const auto& farm_power = scenarios.per_farm[s];
    for (int t = 0; t < farm_power.cols(); ++t)
      for (int i = 0; i < farm_power.rows(); ++i)
        out << (s + 1) << ',' << (t + 1) << ',' << (i + 1) << ','
            << format_double(farm_power(i, t)) << '\n';
  }
}

void write_means_csv(const std::filesystem::path& path, const ScenarioSet& scenarios) {
  std::ofstream out = open_out(path);
  out << "slot,farm,mean_kwh\n";
  for (int t = 0; t < scenarios.means.cols(); ++t)
    for (int i = 0; i < scenarios.means.rows(); ++i)
      out << (t + 1) << ',' << (i + 1) << ',' << format_double(scenarios.means(i, t)) << '\n';
}

}  // namespace mgdispatch
