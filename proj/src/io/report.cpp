#include "srirnn/io/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <vector>

#include "srirnn/error.hpp"

namespace srirnn::io {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

json design_to_json(const FirCoefficients& filter, const DelaySpec& spec) {
  json taps = json::array();
  for (double t : filter.taps) taps.push_back(t);
  json doc;
  doc["method"] = std::string(to_string(filter.method));
  doc["order"] = filter.order();
  doc["ratio"] = spec.ratio.str();
  doc["train_rate"] = spec.train_rate;
  doc["inference_rate"] = spec.inference_rate;
  doc["delta"] = spec.delta;
  doc["taps"] = taps;
  doc["objective"] = json_number(filter.objective);
  if (filter.method == DesignMethod::minimax) doc["duality_gap"] = filter.duality_gap;
  return doc;
}

void write_response_csv(std::ostream& out, const FrequencyResponse& response) {
  out << "omega,magnitude,phase_delay_error\r\n";
  for (std::size_t i = 0; i < response.omega.size(); ++i) {
    out << format_double(response.omega[i]) << ',' << format_double(response.magnitude[i]) << ','
        << format_double(response.phase_delay_error[i]) << "\r\n";
  }
}

json stability_to_json(const StabilityReport& report, const FirCoefficients& filter,
                       const DelaySpec& spec) {
  json unstable = json::array();
  for (const auto& p : report.unstable) {
    unstable.push_back({{"re", p.pole.real()},
                        {"im", p.pole.imag()},
                        {"radius", p.radius},
                        {"angle", p.angle},
                        {"frequency_hz", p.frequency_hz}});
  }
  json doc;
  doc["ratio"] = spec.ratio.str();
  doc["delta"] = spec.delta;
  doc["inference_rate"] = spec.inference_rate;
  doc["method"] = std::string(to_string(filter.method));
  doc["order"] = filter.order();
  doc["taps"] = filter.taps;
  doc["verdict"] = std::string(to_string(report.verdict));
  doc["stable"] = report.stable;
  doc["spectral_radius"] = json_number(report.spectral_radius);
  doc["margin"] = json_number(report.margin);
  doc["pole_count"] = report.poles.size();
  doc["unstable_poles"] = unstable;
  doc["fixed_point"] = {{"residual", json_number(report.fixed_point.residual)},
                        {"spread", json_number(report.fixed_point.spread)},
                        {"run_length", report.fixed_point.run_length},
                        {"average_length", report.fixed_point.average_length}};
  doc["low_confidence"] = report.low_confidence;
  doc["note"] = report.note;
  return doc;
}

void write_poles_csv(std::ostream& out, const PoleSet& poles) {
  out << "re,im,abs\r\n";
  for (const auto& z : poles) {
    out << format_double(z.real()) << ',' << format_double(z.imag()) << ','
        << format_double(std::abs(z)) << "\r\n";
  }
}

void write_stft_csv(std::ostream& out, const StftTable& table) {
  out << "frame,bin,db\r\n";
  for (std::size_t f = 0; f < table.frames; ++f) {
    for (std::size_t b = 0; b < table.bins; ++b) {
      out << f << ',' << b << ',' << format_double(table.magnitude_db[f * table.bins + b]) << "\r\n";
    }
  }
}

void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
  out << "model,ratio,method,order,snr_db,naive_snr_db,success,rho,predicted_stable\r\n";
  for (const auto& r : records) {
    out << csv_field(r.model_id) << ',' << r.ratio.str() << ',' << to_string(r.method) << ','
        << r.order << ',' << format_double(r.snr_db) << ',' << format_double(r.naive_snr_db) << ','
        << (r.success ? "true" : "false") << ',' << format_double(r.rho) << ','
        << (r.predicted_stable ? "true" : "false") << "\r\n";
  }
}

void write_violin_csv(std::ostream& out, std::span<const ExperimentRecord> records) {
  // Column order follows first appearance; rows follow first appearance of
  // each model id.
  std::vector<std::string> columns;
  std::map<std::string, std::size_t> column_index;
  std::vector<std::string> models;
  std::map<std::string, std::size_t> model_index;
  for (const auto& r : records) {
    const std::string col = r.ratio.str() + " " + FilterChoice{r.method, r.order}.label();
    if (column_index.try_emplace(col, columns.size()).second) columns.push_back(col);
    if (model_index.try_emplace(r.model_id, models.size()).second) models.push_back(r.model_id);
  }
  std::vector<std::vector<std::string>> cells(models.size(), std::vector<std::string>(columns.size()));
  for (const auto& r : records) {
    const std::string col = r.ratio.str() + " " + FilterChoice{r.method, r.order}.label();
    cells[model_index[r.model_id]][column_index[col]] = format_double(r.snr_db);
  }
  out << "model";
  for (const auto& c : columns) out << ',' << csv_field(c);
  out << "\r\n";
  for (std::size_t m = 0; m < models.size(); ++m) {
    out << csv_field(models[m]);
    for (const auto& cell : cells[m]) out << ',' << cell;
    out << "\r\n";
  }
}

json contingency_to_json(const ContingencyTable& table, std::span<const FilterSummary> summaries) {
  json filters = json::array();
  for (const auto& s : summaries) {
    filters.push_back({{"ratio", s.ratio.str()},
                       {"filter", s.filter.label()},
                       {"count", s.count},
                       {"successes", s.successes},
                       {"min_snr_db", json_number(s.min_db)},
                       {"mean_snr_db", json_number(s.mean_db)},
                       {"max_snr_db", json_number(s.max_db)},
                       {"non_finite", s.non_finite}});
  }
  json doc;
  doc["stable_success"] = table.stable_success;
  doc["stable_failure"] = table.stable_failure;
  doc["unstable_success"] = table.unstable_success;
  doc["unstable_failure"] = table.unstable_failure;
  doc["total"] = table.total();
  doc["agreement"] = json_number(table.agreement());
  doc["filters"] = filters;
  return doc;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace srirnn::io
