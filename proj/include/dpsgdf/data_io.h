//
// Copyright 2026 The dpsgdf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Dataset ingestion (IDX image/label pairs, numeric CSV), label remapping,
// dataset fingerprints and run manifests.

#ifndef DPSGDF_DATA_IO_H_
#define DPSGDF_DATA_IO_H_

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpsgdf/core.h"

namespace dpsgdf {

inline constexpr uint32_t kIdxImageMagic = 0x00000803;
inline constexpr uint32_t kIdxLabelMagic = 0x00000801;

// Big-endian IDX container holding unsigned bytes (type code 0x08).
struct IdxFile {
  uint32_t magic = 0;
  std::vector<uint32_t> dims;
  std::vector<uint8_t> payload;
};

absl::StatusOr<IdxFile> ParseIdx(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> SerializeIdx(const IdxFile& file);

absl::StatusOr<std::vector<uint8_t>> ReadFileBytes(const std::string& path);
absl::Status WriteFileBytes(const std::string& path,
                            const std::vector<uint8_t>& bytes);

// Rows are flattened pixels, divided by 255 when `normalize` is set.
// Labels are the raw class bytes; the class count is max label + 1 (at
// least 2).
absl::StatusOr<LabeledDataset> LoadIdxPair(const std::string& images_path,
                                           const std::string& labels_path,
                                           bool normalize);

// Comma-separated numeric file. A first line with any non-numeric cell is a
// header. The label column (0-based, negative counts from the end) holds
// integer labels: {-1, +1} only gives a binary dataset, otherwise classes
// 0..K-1.
absl::StatusOr<LabeledDataset> LoadCsvFeatures(const std::string& path,
                                               int label_column);

// Labels in `positive_classes` become +1, all others -1.
absl::StatusOr<LabeledDataset> Binarize(const LabeledDataset& data,
                                        const std::set<int>& positive_classes);

// Lowercase hex SHA-256 of the dataset's shape, features and labels, in row
// order.
std::string DatasetFingerprint(const LabeledDataset& data);

std::string Sha256Hex(const std::string& text);

struct RunManifest {
  uint64_t seed = 0;
  std::string algorithm;
  std::map<std::string, std::string> config;
  double epsilon = 0.0;
  double delta = 0.0;
  std::string dataset_fingerprint;
  std::string software_version;
  double wall_ms = 0.0;

  // Hash of every field except wall_ms: identifies the run's inputs.
  std::string RunHash() const;

  bool operator==(const RunManifest&) const = default;
};

inline constexpr char kSoftwareVersion[] = "dpsgdf 0.1.0";

// One "key=value" per line. Config entries are written as config.<key>.
// The last line is checksum=<sha256 of all previous lines>.
std::string FormatManifest(const RunManifest& manifest);
absl::StatusOr<RunManifest> ParseManifest(const std::string& text);

absl::Status WriteManifest(const std::string& path,
                           const RunManifest& manifest);
absl::StatusOr<RunManifest> ReadManifest(const std::string& path);

}  // namespace dpsgdf

#endif  // DPSGDF_DATA_IO_H_
