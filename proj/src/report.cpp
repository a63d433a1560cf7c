#include "grcv/report.hpp"

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

namespace grcv {

std::string format_percent(double fraction) {
  if (std::isnan(fraction)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * fraction);
  return buf;
}

std::string format_vio(const std::optional<double>& vio) {
  if (!vio) return "-";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2e", *vio);
  return buf;
}

std::string rows_to_csv(const std::vector<SummaryRow>& rows) {
  std::string out = "Dataset,Method,E_t(%),E_C(%),Vio,k,it\n";
  for (const SummaryRow& r : rows) {
    out += r.dataset + ',' + r.method + ',' + format_percent(r.E_t) + ',' +
           format_percent(r.E_C) + ',' + format_vio(r.vio) + ',' + std::to_string(r.k) + ',' +
           std::to_string(r.it) + '\n';
  }
  return out;
}

std::string rows_to_json(const std::vector<SummaryRow>& rows) {
  nlohmann::json j = nlohmann::json::array();
  for (const SummaryRow& r : rows) {
    nlohmann::json row{{"dataset", r.dataset}, {"method", r.method}, {"k", r.k}, {"it", r.it}};
    if (std::isnan(r.E_t))
      row["E_t"] = nullptr;
    else
      row["E_t"] = r.E_t;
    row["E_C"] = r.E_C;
    if (r.vio)
      row["vio"] = *r.vio;
    else
      row["vio"] = nullptr;
    j.push_back(row);
  }
  return j.dump(2) + "\n";
}

}  // namespace grcv
