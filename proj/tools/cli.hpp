#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fbl/fbl_norm.hpp"

namespace fbl::cli {

// Everything a run depends on. Inputs are held inline (not as paths) so a
// report's embedded config can be replayed anywhere.
struct RunConfig {
  std::string command;
  int m = 2;
  int budget = kDefaultBudget;
  int restarts = 8;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int grid = 0;  // 0: default resolution for the dimension
  double alpha = 0.2;
  std::vector<double> scales{1e-1, 1e-2, 1e-3};
  std::vector<double> lambdas;  // empty: uniform
  double eta = 1e-3;
  int runs = 0;  // random families when no --expr is given
  int family_size = 3;
  Json space;
  std::vector<Json> exprs;
  Json tuple;
  Json dual;
};

Json config_to_json(const RunConfig& c);
RunConfig config_from_json(const Json& j);

struct CsvRow {
  std::string experiment;
  std::string space;
  int n = 0;
  double value = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  int budget = 0;
};

// Runs one configuration and returns the report; summary rows are appended to
// `rows`.
Json run(const RunConfig& config, std::vector<CsvRow>& rows);

int main(int argc, char** argv);

}  // namespace fbl::cli
