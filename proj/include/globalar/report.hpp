#pragma once

/// @file
/// CSV artifacts of evaluation runs. Reals are printed with 10 significant
/// digits ("%.10g"), so identical runs produce byte-identical files.

#include <globalar/evaluate.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace globalar {

inline std::string format10(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline constexpr const char* summary_header =
    "model,lag,partitions,mase,smape,mae,insample_mase,outsample_onestep_mase,gap,n_failed";

inline constexpr const char* per_series_header =
    "series_id,model,lag,step,forecast,actual,abs_error";

inline void write_summary_row(std::ostream& out, const EvalReport& r) {
  out << r.model << ',' << r.lag << ',' << r.partitions << ',' << format10(r.mase) << ','
      << format10(r.smape) << ',' << format10(r.mae) << ',' << format10(r.insample) << ','
      << format10(r.outsample_onestep) << ',' << format10(r.gap) << ',' << r.failures.size()
      << '\n';
}

inline void write_per_series_rows(std::ostream& out, const EvalReport& r) {
  for (const auto& [id, e] : r.per_series)
    for (std::size_t h = 0; h < e.forecasts.size(); ++h)
      out << id << ',' << r.model << ',' << r.lag << ',' << h + 1 << ','
          << format10(e.forecasts[h]) << ',' << format10(e.actual[h]) << ','
          << format10(std::abs(e.forecasts[h] - e.actual[h])) << '\n';
}

}  // namespace globalar
