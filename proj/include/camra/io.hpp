#pragma once

// File formats: binary PGM mosaics, the JSON metadata sidecar and raw
// stream files.

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "camra/camera_pipeline.hpp"
#include "camra/cfa_model.hpp"

namespace camra {

struct PgmImage {
  int maxval = 65535;
  IntGrid samples;
};

/// P5 with maxval up to 65535; two-byte samples are big-endian.
PgmImage parse_pgm(std::span<const std::uint8_t> data);
std::vector<std::uint8_t> serialize_pgm(const PgmImage& img);

struct Metadata {
  CfaPhase phase = CfaPhase::RGGB;
  BlackOffset black;
  int bit_depth = 0;  // 0: derive from the PGM maxval
  PipelineParams pipeline;
};

/// Keys: cfa_pattern, black_offset, bit_depth, color_matrix, illuminant,
/// gamma. Only cfa_pattern is required.
Metadata parse_metadata(std::string_view json);
std::string serialize_metadata(const Metadata& m);

BayerImage make_bayer(const PgmImage& pgm, const Metadata& meta);
/// PGM with maxval 2^depth - 1.
PgmImage to_pgm(const BayerImage& y);

std::vector<std::uint8_t> read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::span<const std::uint8_t> data);

PgmImage read_pgm(const std::filesystem::path& p);
void write_pgm(const std::filesystem::path& p, const PgmImage& img);
/// Missing or unreadable sidecars raise MetadataError.
Metadata read_metadata(const std::filesystem::path& p);

}  // namespace camra
