#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tilda/augment.hpp"
#include "tilda/model.hpp"

namespace tilda {

// All binary formats are little-endian regardless of host.
//
// Feature file ("TFV1"):
//   magic   4 bytes  "TFV1"
//   count   u32      number of vectors
//   dim     u32      vector length
//   payload count * dim  f32, row-major
//
// Model file ("TILDA01"):
//   magic     7 bytes  "TILDA01"
//   P, k, d   u32 each
//   seed      u64
//   rng state u64
//   C         u32      class count
//   classes   C * (u32 length + UTF-8 bytes), registration order
//   anchors   C*P*k*(d/P) f32, class-major [c][p][i][j]
//   counters  C*P*k u64, same order
//
// Image container ("TIM1"):
//   magic    4 bytes  "TIM1"
//   count, height, width, channels  u32 each (uniform dimensions)
//   payload  count * height * width * channels bytes, row-major interleaved
//
// Label files are plain UTF-8 text, one token per line, no empty lines.

/// Reads a "TFV1" feature file. Throws BadMagic, TruncatedFile (reporting
/// expected vs actual byte length) or CorruptPayload on non-finite values
/// (reporting row and column).
std::vector<FeatureVector> read_features(const std::filesystem::path& path);

/// Writes vectors in the "TFV1" format. All vectors must share one
/// dimension; an empty input produces the 12-byte header with dim 0.
void write_features(const std::filesystem::path& path,
                    std::span<const FeatureVector> vectors);

/// Reads a label file: one label per line. Throws ParseError on empty lines.
std::vector<std::string> read_labels(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path,
                  std::span<const std::string> labels);

/// Serializes a model to the "TILDA01" layout. Anchors are narrowed to
/// 32-bit storage; serialize(deserialize(bytes)) reproduces bytes exactly.
std::vector<std::uint8_t> serialize_model(const AnchorStore& store);
AnchorStore deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const AnchorStore& store);
AnchorStore load_model(const std::filesystem::path& path);

/// Exact byte size save_model would produce, without serializing.
std::size_t serialized_model_size(const AnchorStore& store);

/// Reads a "TIM1" image container.
std::vector<ImageTensor> read_images(const std::filesystem::path& path);

/// Writes images to a "TIM1" container; all images must share dimensions
/// and the container must not be empty.
void write_images(const std::filesystem::path& path,
                  std::span<const ImageTensor> images);

/// Parses CSV rows of the form "v1,v2,...,vd,label". The feature width is
/// fixed by the first data row. Throws ParseError for ragged rows or
/// non-numeric cells, naming the offending line.
std::vector<std::pair<FeatureVector, std::string>> read_csv_features(
    const std::filesystem::path& path, bool has_header = false);

} // namespace tilda
