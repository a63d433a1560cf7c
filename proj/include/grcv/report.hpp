#pragma once

#include <optional>
#include <string>
#include <vector>

#include "grcv/types.hpp"

namespace grcv {

/// One comparison row: dataset, method, errors as fractions, terminal
/// constraint violation (absent for grid search) and iteration accounting.
struct SummaryRow {
  std::string dataset;
  std::string method;
  double E_t = 0.0;
  double E_C = 0.0;
  std::optional<double> vio;
  int k = 0;
  long long it = 0;
};

// Errors print as percentages with two decimals, vio in scientific
// notation, '-' where undefined. Output is a pure function of the rows.
std::string rows_to_csv(const std::vector<SummaryRow>& rows);
std::string rows_to_json(const std::vector<SummaryRow>& rows);

std::string format_percent(double fraction);
std::string format_vio(const std::optional<double>& vio);

}  // namespace grcv
