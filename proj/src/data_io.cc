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

#include "dpsgdf/data_io.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "absl/strings/strip.h"

namespace dpsgdf {
namespace {

constexpr uint8_t kIdxUnsignedByte = 0x08;

uint32_t ReadBigEndian32(const uint8_t* p) {
  return (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) |
         (uint32_t{p[2]} << 8) | uint32_t{p[3]};
}

void AppendBigEndian32(uint32_t v, std::vector<uint8_t>& out) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr);
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void Update(const void* data, size_t len) {
    EVP_DigestUpdate(ctx_, data, len);
  }
  std::string HexDigest() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, md, &len);
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) {
      absl::StrAppendFormat(&hex, "%02x", md[i]);
    }
    return hex;
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::string FormatDouble(double v) { return absl::StrFormat("%.17g", v); }

}  // namespace

absl::StatusOr<IdxFile> ParseIdx(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 4) return absl::InvalidArgumentError("truncated header");
  IdxFile file;
  file.magic = ReadBigEndian32(bytes.data());
  if (file.magic != kIdxImageMagic && file.magic != kIdxLabelMagic) {
    return absl::InvalidArgumentError(
        absl::StrFormat("bad magic 0x%08x", file.magic));
  }
  const int ndims = bytes[3];
  if (bytes[2] != kIdxUnsignedByte) {
    return absl::InvalidArgumentError("only unsigned-byte IDX is supported");
  }
  const size_t header = 4 + 4 * static_cast<size_t>(ndims);
  if (bytes.size() < header) {
    return absl::InvalidArgumentError("truncated dimension list");
  }
  uint64_t count = 1;
  for (int i = 0; i < ndims; ++i) {
    file.dims.push_back(ReadBigEndian32(bytes.data() + 4 + 4 * i));
    count *= file.dims.back();
  }
  if (bytes.size() - header < count) {
    return absl::InvalidArgumentError(absl::StrCat(
        "truncated payload: expected ", count, " bytes, found ",
        bytes.size() - header));
  }
  if (bytes.size() - header > count) {
    return absl::InvalidArgumentError("trailing bytes after payload");
  }
  file.payload.assign(bytes.begin() + header, bytes.end());
  return file;
}

std::vector<uint8_t> SerializeIdx(const IdxFile& file) {
  std::vector<uint8_t> out;
  out.reserve(4 + 4 * file.dims.size() + file.payload.size());
  AppendBigEndian32(file.magic, out);
  for (uint32_t d : file.dims) AppendBigEndian32(d, out);
  out.insert(out.end(), file.payload.begin(), file.payload.end());
  return out;
}

absl::StatusOr<std::vector<uint8_t>> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

absl::Status WriteFileBytes(const std::string& path,
                            const std::vector<uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  return out ? absl::OkStatus()
             : absl::InternalError(absl::StrCat("write failed: ", path));
}

absl::StatusOr<LabeledDataset> LoadIdxPair(const std::string& images_path,
                                           const std::string& labels_path,
                                           bool normalize) {
  absl::StatusOr<std::vector<uint8_t>> image_bytes =
      ReadFileBytes(images_path);
  if (!image_bytes.ok()) return image_bytes.status();
  absl::StatusOr<std::vector<uint8_t>> label_bytes =
      ReadFileBytes(labels_path);
  if (!label_bytes.ok()) return label_bytes.status();

  absl::StatusOr<IdxFile> images = ParseIdx(*image_bytes);
  if (!images.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(images_path, ": ", images.status().message()));
  }
  absl::StatusOr<IdxFile> labels = ParseIdx(*label_bytes);
  if (!labels.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(labels_path, ": ", labels.status().message()));
  }
  if (images->magic != kIdxImageMagic || images->dims.size() != 3) {
    return absl::InvalidArgumentError("image file must have 3 dimensions");
  }
  if (labels->magic != kIdxLabelMagic || labels->dims.size() != 1) {
    return absl::InvalidArgumentError("label file must have 1 dimension");
  }
  if (images->dims[0] != labels->dims[0]) {
    return absl::InvalidArgumentError(
        absl::StrCat("count mismatch: ", images->dims[0], " images, ",
                     labels->dims[0], " labels"));
  }
  const int n = static_cast<int>(images->dims[0]);
  const int d = static_cast<int>(images->dims[1] * images->dims[2]);
  const double divisor = normalize ? 255.0 : 1.0;
  std::vector<double> features(images->payload.size());
  for (size_t i = 0; i < features.size(); ++i) {
    features[i] = images->payload[i] / divisor;
  }
  std::vector<int> y(labels->payload.begin(), labels->payload.end());
  const int classes =
      std::max(2, y.empty() ? 2 : *std::max_element(y.begin(), y.end()) + 1);
  return LabeledDataset::Create(std::move(features), n, d, std::move(y),
                                LabelMode::kMulticlass, classes);
}

absl::StatusOr<LabeledDataset> LoadCsvFeatures(const std::string& path,
                                               int label_column) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));

  std::vector<double> features;
  std::vector<int> labels;
  int width = -1;
  int rows = 0;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view trimmed = absl::StripAsciiWhitespace(line);
    if (trimmed.empty()) continue;
    std::vector<absl::string_view> cells = absl::StrSplit(trimmed, ',');
    std::vector<double> values(cells.size());
    bool numeric = true;
    for (size_t c = 0; c < cells.size(); ++c) {
      if (!absl::SimpleAtod(absl::StripAsciiWhitespace(cells[c]),
                            &values[c])) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (rows == 0 && width < 0) {
        width = static_cast<int>(cells.size());  // header
        continue;
      }
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": non-numeric cell"));
    }
    if (width < 0) width = static_cast<int>(cells.size());
    if (static_cast<int>(cells.size()) != width) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ":", line_no, ": expected ", width, " cells, found ",
          cells.size()));
    }
    const int col = label_column < 0 ? width + label_column : label_column;
    if (col < 0 || col >= width) {
      return absl::InvalidArgumentError(absl::StrCat(
          "label column ", label_column, " out of range for ", width,
          " columns"));
    }
    const double yv = values[col];
    if (yv != std::round(yv)) {
      return absl::InvalidArgumentError(
          absl::StrCat(path, ":", line_no, ": label is not an integer"));
    }
    labels.push_back(static_cast<int>(yv));
    for (int c = 0; c < width; ++c) {
      if (c != col) features.push_back(values[c]);
    }
    ++rows;
  }
  if (rows == 0) return absl::InvalidArgumentError("CSV has no data rows");
  if (width < 2) {
    return absl::InvalidArgumentError("CSV needs a label and >= 1 feature");
  }
  const bool binary = std::all_of(labels.begin(), labels.end(),
                                  [](int y) { return y == 1 || y == -1; });
  if (binary) {
    return LabeledDataset::Create(std::move(features), rows, width - 1,
                                  std::move(labels), LabelMode::kBinary);
  }
  const int classes =
      std::max(2, *std::max_element(labels.begin(), labels.end()) + 1);
  return LabeledDataset::Create(std::move(features), rows, width - 1,
                                std::move(labels), LabelMode::kMulticlass,
                                classes);
}

absl::StatusOr<LabeledDataset> Binarize(
    const LabeledDataset& data, const std::set<int>& positive_classes) {
  if (data.mode() != LabelMode::kMulticlass) {
    return absl::InvalidArgumentError("dataset is already binary");
  }
  if (positive_classes.empty()) {
    return absl::InvalidArgumentError("positive class set is empty");
  }
  bool covers_all = true;
  for (int k = 0; k < data.num_classes(); ++k) {
    covers_all &= positive_classes.count(k) > 0;
  }
  if (covers_all) {
    return absl::InvalidArgumentError(
        "positive class set covers every class");
  }
  std::vector<int> y(data.size());
  for (int i = 0; i < data.size(); ++i) {
    y[i] = positive_classes.count(data.label(i)) ? 1 : -1;
  }
  return LabeledDataset::Create(data.features(), data.size(), data.dim(),
                                std::move(y), LabelMode::kBinary, 2,
                                data.radius_hint());
}

std::string DatasetFingerprint(const LabeledDataset& data) {
  Sha256 h;
  const int64_t shape[3] = {data.size(), data.dim(), data.num_classes()};
  h.Update(shape, sizeof(shape));
  h.Update(data.features().data(), data.features().size() * sizeof(double));
  h.Update(data.labels().data(), data.labels().size() * sizeof(int));
  return h.HexDigest();
}

std::string Sha256Hex(const std::string& text) {
  Sha256 h;
  h.Update(text.data(), text.size());
  return h.HexDigest();
}

namespace {

std::string FormatBody(const RunManifest& m, bool include_wall) {
  std::string out;
  absl::StrAppend(&out, "seed=", m.seed, "\n");
  absl::StrAppend(&out, "algorithm=", m.algorithm, "\n");
  for (const auto& [k, v] : m.config) {
    absl::StrAppend(&out, "config.", k, "=", v, "\n");
  }
  absl::StrAppend(&out, "epsilon=", FormatDouble(m.epsilon), "\n");
  absl::StrAppend(&out, "delta=", FormatDouble(m.delta), "\n");
  absl::StrAppend(&out, "dataset_fingerprint=", m.dataset_fingerprint, "\n");
  absl::StrAppend(&out, "software_version=", m.software_version, "\n");
  if (include_wall) {
    absl::StrAppend(&out, "wall_ms=", FormatDouble(m.wall_ms), "\n");
  }
  return out;
}

}  // namespace

std::string RunManifest::RunHash() const {
  return Sha256Hex(FormatBody(*this, /*include_wall=*/false));
}

std::string FormatManifest(const RunManifest& manifest) {
  std::string body = FormatBody(manifest, /*include_wall=*/true);
  absl::StrAppend(&body, "checksum=", Sha256Hex(body), "\n");
  return body;
}

absl::StatusOr<RunManifest> ParseManifest(const std::string& text) {
  RunManifest m;
  std::map<std::string, std::string> fields;
  std::string body;
  std::string checksum;
  bool have_checksum = false;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    if (line.empty()) continue;
    if (have_checksum) {
      return absl::InvalidArgumentError("content after checksum line");
    }
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("malformed manifest line: ", line));
    }
    std::string key(line.substr(0, eq));
    std::string value(line.substr(eq + 1));
    if (key == "checksum") {
      checksum = value;
      have_checksum = true;
      continue;
    }
    absl::StrAppend(&body, line, "\n");
    if (absl::ConsumePrefix(&line, "config.")) {
      m.config[std::string(line.substr(0, line.find('=')))] = value;
    } else if (!fields.emplace(key, value).second) {
      return absl::InvalidArgumentError(absl::StrCat("duplicate field ", key));
    }
  }

  for (const char* required :
       {"seed", "algorithm", "epsilon", "delta", "dataset_fingerprint",
        "software_version", "wall_ms"}) {
    if (!fields.count(required)) {
      return absl::InvalidArgumentError(
          absl::StrCat("manifest is missing field '", required, "'"));
    }
  }
  if (!have_checksum) {
    return absl::InvalidArgumentError("manifest is missing field 'checksum'");
  }
  if (Sha256Hex(body) != checksum) {
    return absl::DataLossError("manifest checksum mismatch");
  }
  if (!absl::SimpleAtoi(fields["seed"], &m.seed) ||
      !absl::SimpleAtod(fields["epsilon"], &m.epsilon) ||
      !absl::SimpleAtod(fields["delta"], &m.delta) ||
      !absl::SimpleAtod(fields["wall_ms"], &m.wall_ms)) {
    return absl::InvalidArgumentError("malformed numeric manifest field");
  }
  m.algorithm = fields["algorithm"];
  m.dataset_fingerprint = fields["dataset_fingerprint"];
  m.software_version = fields["software_version"];
  fields.erase("seed");
  fields.erase("algorithm");
  fields.erase("epsilon");
  fields.erase("delta");
  fields.erase("dataset_fingerprint");
  fields.erase("software_version");
  fields.erase("wall_ms");
  if (!fields.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown manifest field '", fields.begin()->first, "'"));
  }
  return m;
}

absl::Status WriteManifest(const std::string& path,
                           const RunManifest& manifest) {
  const std::string text = FormatManifest(manifest);
  return WriteFileBytes(path, std::vector<uint8_t>(text.begin(), text.end()));
}

absl::StatusOr<RunManifest> ReadManifest(const std::string& path) {
  absl::StatusOr<std::vector<uint8_t>> bytes = ReadFileBytes(path);
  if (!bytes.ok()) return bytes.status();
  return ParseManifest(std::string(bytes->begin(), bytes->end()));
}

}  // namespace dpsgdf
