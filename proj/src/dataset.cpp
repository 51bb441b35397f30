// src/dataset.cpp

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

#include "risk/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "risk/encoding.hpp"
#include "risk/errors.hpp"

namespace risk {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'K', 'F'};
constexpr std::uint32_t kVersion = 1;

void append_u32(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_u64(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void append_f32(std::string& buf, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  append_u32(buf, bits);
}

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}

  const std::uint8_t* take(std::size_t n) {
    if (pos_ + n > len_)
      throw FormatError(FormatIssue::truncated,
                        "RSKF payload truncated at byte " + std::to_string(pos_));
    const std::uint8_t* p = data_ + pos_;
    pos_ += n;
    return p;
  }

  std::uint32_t u32() {
    const std::uint8_t* p = take(4);
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  }

  std::uint64_t u64() {
    std::uint64_t lo = u32();
    std::uint64_t hi = u32();
    return lo | (hi << 32);
  }

  float f32() {
    std::uint32_t bits = u32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  std::size_t pos() const { return pos_; }

 private:
  const std::uint8_t* data_;
  std::size_t len_;
  std::size_t pos_ = 0;
};

bool is_csv(const std::filesystem::path& path) {
  return path.extension() == ".csv";
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void save_rskf(const FeatureDataset& ds, const std::filesystem::path& path) {
  std::string buf;
  const auto n = static_cast<std::uint64_t>(ds.size());
  const auto d = static_cast<std::uint32_t>(ds.dim());
  buf.append(kMagic, 4);
  append_u32(buf, kVersion);
  append_u64(buf, n);
  append_u32(buf, d);
  append_u32(buf, static_cast<std::uint32_t>(ds.num_classes));
  for (std::uint64_t i = 0; i < n; ++i)
    append_u32(buf, static_cast<std::uint32_t>(ds.labels[i]));
  for (std::uint64_t i = 0; i < n; ++i) buf.push_back(static_cast<char>(ds.group[i]));
  for (std::uint64_t i = 0; i < n; ++i) buf.push_back(static_cast<char>(ds.split[i]));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < d; ++j)
      append_f32(buf, static_cast<float>(ds.features(static_cast<Eigen::Index>(i), j)));
  append_u32(buf, crc32(buf.data(), buf.size()));
  write_file(path, buf);
}

FeatureDataset load_rskf(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError(FormatIssue::bad_magic, path.string() + ": bad RSKF magic");
  if (bytes.size() < 8)
    throw FormatError(FormatIssue::truncated, path.string() + ": truncated header");

  Reader r(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size() - 4);
  r.take(4);  // magic
  std::uint32_t version = r.u32();
  if (version != kVersion)
    throw FormatError(FormatIssue::bad_version,
                      path.string() + ": unsupported RSKF version " + std::to_string(version));
  std::uint64_t n = r.u64();
  std::uint32_t d = r.u32();
  std::uint32_t c = r.u32();

  FeatureDataset ds;
  ds.num_classes = static_cast<std::int32_t>(c);
  ds.labels.resize(n);
  ds.group.resize(n);
  ds.split.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint32_t label = r.u32();
    if (label >= c)
      throw FormatError(FormatIssue::label_out_of_range,
                        path.string() + ": label " + std::to_string(label) +
                            " >= class count " + std::to_string(c));
    ds.labels[i] = static_cast<std::int32_t>(label);
  }
  for (std::uint64_t i = 0; i < n; ++i) ds.group[i] = *r.take(1);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint8_t tag = *r.take(1);
    if (tag > 2)
      throw FormatError(FormatIssue::unknown_split_tag,
                        path.string() + ": unknown split tag " + std::to_string(tag));
    ds.split[i] = tag;
  }
  ds.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::uint64_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < d; ++j)
      ds.features(static_cast<Eigen::Index>(i), j) = static_cast<double>(r.f32());

  std::uint32_t stored = static_cast<std::uint8_t>(bytes[bytes.size() - 4]) |
                         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[bytes.size() - 3])) << 8) |
                         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[bytes.size() - 2])) << 16) |
                         (static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[bytes.size() - 1])) << 24);
  if (r.pos() != bytes.size() - 4)
    throw FormatError(FormatIssue::truncated, path.string() + ": trailing bytes before checksum");
  if (stored != crc32(bytes.data(), bytes.size() - 4))
    throw FormatError(FormatIssue::bad_checksum, path.string() + ": CRC32 mismatch");

  ds.validate();
  return ds;
}

void save_csv(const FeatureDataset& ds, const std::filesystem::path& path) {
  std::string buf = "label,group,split";
  for (Eigen::Index j = 0; j < ds.dim(); ++j) buf += ",f" + std::to_string(j);
  buf += "\n";
  char num[64];
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    buf += std::to_string(ds.labels[i]);
    buf += ",";
    buf += std::to_string(static_cast<int>(ds.group[i]));
    buf += ",";
    buf += std::to_string(static_cast<int>(ds.split[i]));
    for (Eigen::Index j = 0; j < ds.dim(); ++j) {
      // %.9g round-trips any f32 value.
      std::snprintf(num, sizeof num, ",%.9g", ds.features(i, j));
      buf += num;
    }
    buf += "\n";
  }
  write_file(path, buf);
}

FeatureDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw FormatError(FormatIssue::truncated, path.string() + ": empty CSV");
  if (line.rfind("label,group,split", 0) != 0)
    throw FormatError(FormatIssue::bad_field,
                      path.string() + ": CSV header must start with label,group,split");
  Eigen::Index d = -3;
  {
    std::stringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) ++d;
  }
  if (d < 1)
    throw FormatError(FormatIssue::bad_field, path.string() + ": CSV has no feature columns");

  std::vector<std::int32_t> labels;
  std::vector<std::uint8_t> group, split;
  std::vector<float> values;
  std::size_t row = 0;
  std::int32_t max_label = -1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream cells(line);
    std::string cell;
    auto next_cell = [&](const char* what) {
      if (!std::getline(cells, cell, ','))
        throw FormatError(FormatIssue::truncated, path.string() + ": row " +
                                                      std::to_string(row) + " missing " + what);
      return cell;
    };
    auto parse_int = [&](const std::string& text, const char* what) {
      try {
        std::size_t used = 0;
        long v = std::stol(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
      } catch (const std::exception&) {
        throw FormatError(FormatIssue::bad_field, path.string() + ": row " +
                                                      std::to_string(row) + ": bad " + what +
                                                      " '" + text + "'");
      }
    };
    labels.push_back(static_cast<std::int32_t>(parse_int(next_cell("label"), "label")));
    max_label = std::max(max_label, labels.back());
    long g = parse_int(next_cell("group"), "group");
    if (g != 0 && g != 1 && g != 255)
      throw FormatError(FormatIssue::bad_field,
                        path.string() + ": row " + std::to_string(row) + ": bad group flag");
    group.push_back(static_cast<std::uint8_t>(g));
    long s = parse_int(next_cell("split"), "split");
    if (s < 0 || s > 2)
      throw FormatError(FormatIssue::unknown_split_tag,
                        path.string() + ": row " + std::to_string(row) + ": unknown split tag");
    split.push_back(static_cast<std::uint8_t>(s));
    for (Eigen::Index j = 0; j < d; ++j) {
      std::string text = next_cell("feature");
      try {
        std::size_t used = 0;
        values.push_back(std::stof(text, &used));
        if (used != text.size()) throw std::invalid_argument(text);
      } catch (const std::exception&) {
        throw FormatError(FormatIssue::bad_field, path.string() + ": row " +
                                                      std::to_string(row) + ": bad float '" +
                                                      text + "'");
      }
    }
  }

  FeatureDataset ds;
  const auto n = static_cast<Eigen::Index>(labels.size());
  ds.labels = std::move(labels);
  ds.group = std::move(group);
  ds.split = std::move(split);
  ds.num_classes = max_label + 1;
  ds.features.resize(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      ds.features(i, j) = static_cast<double>(values[static_cast<std::size_t>(i * d + j)]);
  ds.validate();
  return ds;
}

void save_metadata(const FeatureDataset& ds, const std::filesystem::path& path) {
  if (ds.metadata.empty()) return;
  nlohmann::json j(ds.metadata);
  write_file(metadata_path(path), j.dump(2) + "\n");
}

void load_metadata(FeatureDataset& ds, const std::filesystem::path& path) {
  const auto side = metadata_path(path);
  if (!std::filesystem::exists(side)) return;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(side));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(FormatIssue::bad_field, side.string() + ": " + e.what());
  }
  if (!j.is_object())
    throw FormatError(FormatIssue::bad_field, side.string() + ": metadata must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string())
      throw FormatError(FormatIssue::bad_field,
                        side.string() + ": metadata value for '" + key + "' must be a string");
    ds.metadata[key] = value.get<std::string>();
  }
}

}  // namespace

Split parse_split(const std::string& name) {
  if (name == "train" || name == "id-train" || name == "0") return Split::id_train;
  if (name == "test" || name == "id-test" || name == "1") return Split::id_test;
  if (name == "ood" || name == "2") return Split::ood;
  throw InvalidArgument("unknown split name '" + name + "'");
}

std::string split_name(Split split) {
  switch (split) {
    case Split::id_train: return "id-train";
    case Split::id_test: return "id-test";
    case Split::ood: return "ood";
  }
  return "?";
}

void FeatureDataset::validate() const {
  const auto n = static_cast<std::size_t>(size());
  if (labels.size() != n || group.size() != n || split.size() != n)
    throw InvalidArgument("FeatureDataset: per-example arrays must have length N");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes)
      throw InvalidArgument("FeatureDataset: label out of range at example " + std::to_string(i));
    if (group[i] > 1 && group[i] != kGroupUnknown)
      throw InvalidArgument("FeatureDataset: bad group flag at example " + std::to_string(i));
    if (split[i] > 2)
      throw InvalidArgument("FeatureDataset: bad split tag at example " + std::to_string(i));
  }
  if (!features.allFinite())
    throw InvalidArgument("FeatureDataset: features must be finite");
}

FeatureDataset split_view(const FeatureDataset& ds, Split split) {
  const auto tag = static_cast<std::uint8_t>(split);
  Eigen::Index count = 0;
  for (auto s : ds.split)
    if (s == tag) ++count;

  FeatureDataset view;
  view.num_classes = ds.num_classes;
  view.metadata = ds.metadata;
  view.features.resize(count, ds.dim());
  view.labels.reserve(static_cast<std::size_t>(count));
  view.group.reserve(static_cast<std::size_t>(count));
  view.split.reserve(static_cast<std::size_t>(count));
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < ds.size(); ++i) {
    if (ds.split[static_cast<std::size_t>(i)] != tag) continue;
    view.features.row(row++) = ds.features.row(i);
    view.labels.push_back(ds.labels[static_cast<std::size_t>(i)]);
    view.group.push_back(ds.group[static_cast<std::size_t>(i)]);
    view.split.push_back(tag);
  }
  return view;
}

double bias_skewness(const FeatureDataset& ds, Split split) {
  const auto tag = static_cast<std::uint8_t>(split);
  std::size_t biased = 0, bias_free = 0, unknown = 0, total = 0;
  for (std::size_t i = 0; i < ds.group.size(); ++i) {
    if (ds.split[i] != tag) continue;
    ++total;
    if (ds.group[i] == kGroupBiased) ++biased;
    else if (ds.group[i] == kGroupBiasFree) ++bias_free;
    else ++unknown;
  }
  if (total == 0)
    throw InvalidArgument("bias_skewness: split " + split_name(split) + " is empty");
  if (unknown > 0)
    throw InvalidArgument("bias_skewness: split has unknown group flags");
  if (bias_free == 0)
    throw InvalidArgument("bias_skewness: split has no bias-free examples");
  return static_cast<double>(biased) / static_cast<double>(bias_free);
}

std::filesystem::path metadata_path(const std::filesystem::path& data_path) {
  std::filesystem::path p = data_path;
  p.replace_extension(".meta.json");
  return p;
}

void save_features(const FeatureDataset& ds, const std::filesystem::path& path) {
  ds.validate();
  if (is_csv(path)) save_csv(ds, path);
  else save_rskf(ds, path);
  save_metadata(ds, path);
}

FeatureDataset load_features(const std::filesystem::path& path) {
  FeatureDataset ds = is_csv(path) ? load_csv(path) : load_rskf(path);
  load_metadata(ds, path);
  return ds;
}

}  // namespace risk
