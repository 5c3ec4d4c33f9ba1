#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "varidescent/optimizer.hpp"

namespace varidescent {

/// Fully validated run description loaded from a JSON config file.
struct RunConfig {
  BoxDomain domain;
  std::array<int, kMaxRank> cells{};
  std::string problem_name;
  std::map<std::string, std::string> problem_params;
  BoundaryMode boundary_mode = BoundaryMode::AllSides;
  OptimizerConfig optimizer;
  std::optional<IsoperimetricConstraint> isoperimetric;
  std::string solution_csv = "solution.csv";
  std::string convergence_log = "convergence.jsonl";

  UniformGrid make_grid() const;
  Problem make_problem() const;
};

/// Parses and validates a JSON config. Unknown keys are hard errors with a
/// closest-match suggestion; expression errors carry their key path.
RunConfig parse_config(const std::string& path);

/// CSV with header x1,...,xn,u1,...,ud; one row per sample point in
/// row-major order (x1 fastest); 17 significant digits.
void write_csv(const std::string& path, const GridFunction& f);
GridFunction read_csv(const std::string& path, const UniformGrid& grid,
                      Placement placement);

/// Subcommand entry points; each returns the process exit code.
int cmd_solve(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_check_gradient(const RunConfig& config, std::ostream& out,
                       std::ostream& err);
int cmd_project(const std::string& input_csv, const std::string& output_csv,
                const BoxDomain& domain, std::span<const int> cells,
                std::ostream& out, std::ostream& err);
int cmd_list_problems(std::ostream& out);

}  // namespace varidescent
