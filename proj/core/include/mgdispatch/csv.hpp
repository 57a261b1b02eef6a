#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mgdispatch/admm.hpp"
#include "mgdispatch/model.hpp"
#include "mgdispatch/windgen.hpp"

namespace mgdispatch {

// Shortest representation that round-trips exactly to the same double.
std::string format_double(double v);

// schedule.csv: slot,unit_type,unit_id,power_kwh (1-based slot/id).
void write_schedule_csv(const std::filesystem::path& path, const Schedule& schedule);
Schedule read_schedule_csv(const std::filesystem::path& path, int n_generators, int n_loads,
                           int horizon);

// trace.csv: iter,net_cost_cents,xi_kwh,lambda_t1..lambda_tT.
void write_trace_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& trace,
                     int horizon);

// scenarios.csv: scenario,slot,farm,power_kwh (requires per-farm data).
void write_scenarios_csv(const std::filesystem::path& path, const ScenarioSet& scenarios);

// means.csv: slot,farm,mean_kwh.
void write_means_csv(const std::filesystem::path& path, const ScenarioSet& scenarios);

}  // namespace mgdispatch
