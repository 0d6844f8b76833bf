#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "srirnn/model.hpp"

namespace srirnn::io {

// Reads a single-layer LSTM export:
//
//   { "model_data": { "unit_type": "LSTM", "hidden_size": H, "input_size": I,
//                     ["skip": 0|1], ["num_layers": 1], ["output_size": 1],
//                     ["sample_rate": Fs] },
//     "state_dict": { "rec.weight_ih_l0", "rec.weight_hh_l0",
//                     "rec.bias_ih_l0", "rec.bias_hh_l0",
//                     "lin.weight", "lin.bias" } }
//
// Weight arrays may be flat or nested row-major. The two LSTM biases are
// summed; "skip" >= 1 selects the direct-input readout. Unknown keys are
// ignored. Errors name the offending key.
LstmModel parse_model(const nlohmann::json& doc);
LstmModel load_model(const std::filesystem::path& path);

nlohmann::json model_to_json(const LstmModel& model);

}  // namespace srirnn::io
