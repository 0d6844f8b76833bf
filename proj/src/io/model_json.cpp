#include "srirnn/io/model_json.hpp"

#include <fstream>
#include <string>

#include "srirnn/error.hpp"

namespace srirnn::io {
namespace {

using nlohmann::json;

void flatten(const json& node, const std::string& key, std::vector<double>& out) {
  if (node.is_number()) {
    out.push_back(node.get<double>());
  } else if (node.is_array()) {
    for (const auto& child : node) flatten(child, key, out);
  } else {
    throw FormatError("state_dict key '" + key + "' contains a non-numeric value");
  }
}

std::vector<double> weights(const json& dict, const std::string& key, std::size_t expected) {
  if (!dict.contains(key)) throw FormatError("state_dict is missing key '" + key + "'");
  std::vector<double> out;
  out.reserve(expected);
  flatten(dict.at(key), key, out);
  if (out.size() != expected) {
    throw FormatError("state_dict key '" + key + "' has " + std::to_string(out.size()) +
                      " values, expected " + std::to_string(expected));
  }
  return out;
}

std::size_t positive_size(const json& meta, const std::string& key) {
  if (!meta.contains(key)) throw FormatError("model_data is missing key '" + key + "'");
  const auto& v = meta.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) {
    throw FormatError("model_data key '" + key + "' must be a positive integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

LstmModel parse_model(const json& doc) {
  if (!doc.is_object()) throw FormatError("model file must contain a JSON object");
  if (!doc.contains("model_data")) throw FormatError("model file is missing key 'model_data'");
  if (!doc.contains("state_dict")) throw FormatError("model file is missing key 'state_dict'");
  const json& meta = doc.at("model_data");
  const json& dict = doc.at("state_dict");

  if (!meta.contains("unit_type") || !meta.at("unit_type").is_string()) {
    throw FormatError("model_data is missing key 'unit_type'");
  }
  const auto unit = meta.at("unit_type").get<std::string>();
  if (unit != "LSTM") throw FormatError("unsupported unit_type '" + unit + "' (only LSTM)");
  if (meta.contains("num_layers") && meta.at("num_layers") != 1) {
    throw FormatError("model_data key 'num_layers' must be 1");
  }
  if (meta.contains("output_size") && meta.at("output_size") != 1) {
    throw FormatError("model_data key 'output_size' must be 1");
  }

  LstmWeights w;
  w.hidden_size = positive_size(meta, "hidden_size");
  w.input_size = positive_size(meta, "input_size");
  const std::size_t hs = w.hidden_size;
  const std::size_t gates = 4 * hs;

  w.w_ih = Matrix(gates, w.input_size, weights(dict, "rec.weight_ih_l0", gates * w.input_size));
  w.w_hh = Matrix(gates, hs, weights(dict, "rec.weight_hh_l0", gates * hs));
  w.bias = weights(dict, "rec.bias_ih_l0", gates);
  const auto bias_hh = weights(dict, "rec.bias_hh_l0", gates);
  for (std::size_t i = 0; i < gates; ++i) w.bias[i] += bias_hh[i];
  w.out_w = weights(dict, "lin.weight", hs);
  w.out_b = weights(dict, "lin.bias", 1)[0];

  if (meta.contains("skip")) {
    const auto& skip = meta.at("skip");
    if (!skip.is_number_integer() || skip.get<std::int64_t>() < 0 || skip.get<std::int64_t>() > 1) {
      throw FormatError("model_data key 'skip' must be 0 or 1");
    }
    w.readout = skip.get<int>() == 1 ? ReadoutVariant::direct_input : ReadoutVariant::hidden_only;
  }
  if (meta.contains("sample_rate")) {
    if (!meta.at("sample_rate").is_number() || !(meta.at("sample_rate").get<double>() > 0.0)) {
      throw FormatError("model_data key 'sample_rate' must be a positive number");
    }
    w.train_rate = meta.at("sample_rate").get<double>();
  }
  try {
    return LstmModel(std::move(w));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid model: ") + e.what());
  }
}

LstmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": invalid JSON: " + e.what(), e.byte);
  }
  try {
    return parse_model(doc);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what(), e.offset());
  }
}

json model_to_json(const LstmModel& model) {
  const LstmWeights& w = model.weights();
  auto rows = [](const Matrix& m) {
    json out = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      out.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return out;
  };
  json doc;
  doc["model_data"] = {{"unit_type", "LSTM"},
                       {"hidden_size", w.hidden_size},
                       {"input_size", w.input_size},
                       {"num_layers", 1},
                       {"output_size", 1},
                       {"skip", w.readout == ReadoutVariant::direct_input ? 1 : 0},
                       {"sample_rate", w.train_rate}};
  doc["state_dict"] = {{"rec.weight_ih_l0", rows(w.w_ih)},
                       {"rec.weight_hh_l0", rows(w.w_hh)},
                       {"rec.bias_ih_l0", w.bias},
                       {"rec.bias_hh_l0", std::vector<double>(w.bias.size(), 0.0)},
                       {"lin.weight", json::array({w.out_w})},
                       {"lin.bias", json::array({w.out_b})}};
  return doc;
}

}  // namespace srirnn::io
