#pragma once

// Deterministic CSV (RFC 4180) and JSON serialisers for designs, stability
// reports and experiment results. CSV floats use 17 significant digits.

#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "srirnn/analysis.hpp"
#include "srirnn/evaluation.hpp"
#include "srirnn/filters.hpp"
#include "srirnn/spectral.hpp"

namespace srirnn::io {

// "%.17g", with inf / -inf / nan spelled out.
std::string format_double(double v);

// Quotes a CSV field if it contains a comma, quote or newline.
std::string csv_field(const std::string& s);

// JSON number, or the strings "inf" / "-inf" / "nan" for non-finite values.
nlohmann::json json_number(double v);

nlohmann::json design_to_json(const FirCoefficients& filter, const DelaySpec& spec);
void write_response_csv(std::ostream& out, const FrequencyResponse& response);

nlohmann::json stability_to_json(const StabilityReport& report, const FirCoefficients& filter,
                                 const DelaySpec& spec);
void write_poles_csv(std::ostream& out, const PoleSet& poles);
void write_stft_csv(std::ostream& out, const StftTable& table);

// Columns: model, ratio, method, order, snr_db, naive_snr_db, success, rho,
// predicted_stable.
void write_records_csv(std::ostream& out, std::span<const ExperimentRecord> records);

// One row per model, one SNR column per (ratio, filter).
void write_violin_csv(std::ostream& out, std::span<const ExperimentRecord> records);

nlohmann::json contingency_to_json(const ContingencyTable& table,
                                   std::span<const FilterSummary> summaries);

// Writes `text` to `path`, throwing Error on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace srirnn::io
