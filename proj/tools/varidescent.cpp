#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "varidescent/io.hpp"

namespace {

// "a1,b1[,a2,b2...]" -> BoxDomain
varidescent::BoxDomain parse_domain(const std::string& text) {
  std::vector<double> vals;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos
                                                    : comma - pos);
    try {
      vals.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw varidescent::Error("malformed domain entry '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (vals.empty() || vals.size() % 2 != 0)
    throw varidescent::Error(
        "domain must be a1,b1[,a2,b2...] with an even entry count");
  std::vector<double> lo, hi;
  for (std::size_t i = 0; i < vals.size(); i += 2) {
    lo.push_back(vals[i]);
    hi.push_back(vals[i + 1]);
  }
  return varidescent::BoxDomain(lo, hi);
}

std::vector<int> parse_cells(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos
                                                    : comma - pos);
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw varidescent::Error("malformed cell count '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"varidescent: variational minimization by projected descent"};
  app.require_subcommand(1);

  std::string config_path;
  CLI::App* solve = app.add_subcommand("solve", "Run the descent loop");
  solve->add_option("config", config_path, "JSON config file")->required();

  std::string check_config_path;
  CLI::App* check =
      app.add_subcommand("check-gradient", "Compare analytic and FD gradients");
  check->add_option("config", check_config_path, "JSON config file")->required();

  std::string field_csv, domain_text, cells_text, output_csv = "projected.csv";
  CLI::App* project =
      app.add_subcommand("project", "Project a cell field onto the feasible space");
  project->add_option("field", field_csv, "input field CSV")->required();
  project->add_option("--domain", domain_text, "a1,b1[,a2,b2...]")->required();
  project->add_option("--cells", cells_text, "N1[,N2...]")->required();
  project->add_option("--output", output_csv, "output CSV path");

  app.add_subcommand("list-problems", "List builtin problem names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed())
      return varidescent::cmd_solve(varidescent::parse_config(config_path),
                                    std::cout, std::cerr);
    if (check->parsed())
      return varidescent::cmd_check_gradient(
          varidescent::parse_config(check_config_path), std::cout, std::cerr);
    if (project->parsed()) {
      const varidescent::BoxDomain domain = parse_domain(domain_text);
      const std::vector<int> cells = parse_cells(cells_text);
      if (static_cast<int>(cells.size()) != domain.rank)
        throw varidescent::Error("--cells has " + std::to_string(cells.size()) +
                                 " entries but --domain has rank " +
                                 std::to_string(domain.rank));
      return varidescent::cmd_project(field_csv, output_csv, domain, cells,
                                      std::cout, std::cerr);
    }
    return varidescent::cmd_list_problems(std::cout);
  } catch (const varidescent::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
