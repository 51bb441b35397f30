// risk/dataset.hpp

// Copyright 2026  RISK subspace recovery authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef RISK_DATASET_HPP
#define RISK_DATASET_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "risk/linalg.hpp"

namespace risk {

enum class Split : std::uint8_t { id_train = 0, id_test = 1, ood = 2 };

/// Parse "train"/"id-train"/"0", "test"/"id-test"/"1", "ood"/"2".
Split parse_split(const std::string& name);
std::string split_name(Split split);

inline constexpr std::uint8_t kGroupBiasFree = 0;
inline constexpr std::uint8_t kGroupBiased = 1;
// Ingested real embeddings may come without bias annotations.
inline constexpr std::uint8_t kGroupUnknown = 255;

/// N feature vectors with labels, biased/bias-free group flags and split
/// tags.  Feature values are stored as doubles but are kept exactly
/// representable in 32-bit floats, matching the on-disk RSKF precision, so
/// save/load round-trips are bit-exact.
struct FeatureDataset {
  Matrix features;  // N x D
  std::vector<std::int32_t> labels;
  std::vector<std::uint8_t> group;
  std::vector<std::uint8_t> split;
  std::int32_t num_classes = 0;
  std::map<std::string, std::string> metadata;

  Eigen::Index size() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }

  /// Throws InvalidArgument when array lengths disagree, a label is out of
  /// range, a tag is unknown or a feature is non-finite.
  void validate() const;
};

/// Copy of the examples carrying the given split tag, in original order.
FeatureDataset split_view(const FeatureDataset& ds, Split split);

/// (# biased) / (# bias-free) within the split.  Throws InvalidArgument when
/// the split is empty or has unknown group flags, and when it has no
/// bias-free examples.
double bias_skewness(const FeatureDataset& ds, Split split);

// On-disk formats.
//
// RSKF (binary, little-endian): magic "RSKF", u32 version = 1, u64 N, u32 D,
// u32 C, labels u32 x N, group u8 x N, split u8 x N, features f32 row-major
// (N x D), trailing CRC32 of all preceding bytes.
//
// CSV: header "label,group,split,f0..f{D-1}", one decimal-float row per
// example.  Selected by a ".csv" extension; anything else is RSKF.
//
// Metadata, when present, lives in a "<name>.meta.json" sidecar next to the
// data file.
void save_features(const FeatureDataset& ds, const std::filesystem::path& path);
FeatureDataset load_features(const std::filesystem::path& path);

/// Sidecar path for a dataset file: "<dir>/<stem>.meta.json".
std::filesystem::path metadata_path(const std::filesystem::path& data_path);

}  // namespace risk

#endif  // RISK_DATASET_HPP
