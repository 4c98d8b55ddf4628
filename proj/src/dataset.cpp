#include "spdsc/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

namespace spdsc {

using nlohmann::json;

bool Dataset::labeled() const {
  return !items.empty() &&
         std::all_of(items.begin(), items.end(),
                     [](const LabeledSpd& it) { return it.label.has_value(); });
}

std::vector<std::string> Dataset::classes() const {
  std::set<std::string> s;
  for (const auto& it : items) {
    if (it.label) s.insert(*it.label);
  }
  return {s.begin(), s.end()};
}

void save_dataset(const Dataset& ds, const std::string& path,
                  const std::string& kind) {
  json j;
  j["version"] = 1;
  j["kind"] = kind;
  j["dim"] = ds.dim;
  if (!ds.provenance.empty()) j["provenance"] = ds.provenance;
  json items = json::array();
  for (const auto& it : ds.items) {
    json entry;
    if (it.label) {
      entry["label"] = *it.label;
    } else {
      entry["label"] = nullptr;
    }
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(ds.dim * ds.dim));
    for (Eigen::Index r = 0; r < ds.dim; ++r) {
      for (Eigen::Index c = 0; c < ds.dim; ++c) {
        data.push_back(it.mat.mat()(r, c));
      }
    }
    entry["data"] = data;
    items.push_back(std::move(entry));
  }
  j["items"] = std::move(items);
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("dim") || !j.contains("items")) {
    throw ParseError(path + ": expected object with \"dim\" and \"items\"");
  }
  if (j.value("version", 1) != 1) {
    throw ParseError(path + ": unsupported version");
  }
  Dataset ds;
  ds.dim = j.at("dim").get<Eigen::Index>();
  if (ds.dim <= 0) throw ParseError(path + ": dim must be positive");
  ds.provenance = j.value("provenance", std::string{});
  for (const auto& entry : j.at("items")) {
    const auto& data = entry.at("data");
    if (static_cast<Eigen::Index>(data.size()) != ds.dim * ds.dim) {
      throw DimensionMismatch(path + ": item has " +
                              std::to_string(data.size()) +
                              " entries, expected dim*dim");
    }
    Matrix m(ds.dim, ds.dim);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < ds.dim; ++r) {
      for (Eigen::Index c = 0; c < ds.dim; ++c) {
        m(r, c) = data.at(k++).get<double>();
      }
    }
    LabeledSpd it{SpdMatrix::FromDense(m), std::nullopt};
    if (entry.contains("label") && !entry.at("label").is_null()) {
      it.label = entry.at("label").get<std::string>();
    }
    ds.items.push_back(std::move(it));
  }
  return ds;
}

}  // namespace spdsc
