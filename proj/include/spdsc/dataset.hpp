#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spdsc/spd.hpp"

namespace spdsc {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One SPD sample with an optional class label.
struct LabeledSpd {
  SpdMatrix mat;
  std::optional<std::string> label;
};

/// Labeled collection of SPD matrices of a common dimension.
///
/// File format "SPD-JSON v1": a single JSON object
///   {"version": 1, "dim": n, "items": [{"label": string-or-null,
///    "data": [n*n doubles, row-major]}, ...]}
/// with an optional top-level "kind" field ("dataset" or "dictionary").
struct Dataset {
  Eigen::Index dim = 0;
  std::vector<LabeledSpd> items;
  std::string provenance;

  std::size_t size() const { return items.size(); }
  bool labeled() const;

  /// Sorted distinct labels; empty when unlabeled.
  std::vector<std::string> classes() const;
};

void save_dataset(const Dataset& ds, const std::string& path,
                  const std::string& kind = "dataset");
Dataset load_dataset(const std::string& path);

}  // namespace spdsc
