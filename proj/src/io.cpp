#include "camra/io.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include <json.hpp>

#include "camra/error.hpp"

namespace camra {

namespace {

// PGM header token reader; comments run from '#' to end of line.
struct PgmHeaderReader {
  std::span<const std::uint8_t> d;
  std::size_t pos = 0;

  void skip_space() {
    while (pos < d.size()) {
      if (d[pos] == '#') {
        while (pos < d.size() && d[pos] != '\n') ++pos;
      } else if (std::isspace(d[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  }

  long number() {
    skip_space();
    const std::size_t start = pos;
    long v = 0;
    while (pos < d.size() && std::isdigit(d[pos])) {
      v = v * 10 + (d[pos++] - '0');
      if (v > (1L << 24)) throw FormatError("PGM header value too large", start);
    }
    if (pos == start) throw FormatError("malformed PGM header", start);
    return v;
  }
};

}  // namespace

PgmImage parse_pgm(std::span<const std::uint8_t> data) {
  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') throw FormatError("not a binary PGM (P5) file", 0);
  PgmHeaderReader rd{data, 2};
  const long w = rd.number(), h = rd.number(), maxval = rd.number();
  if (w <= 0 || h <= 0) throw FormatError("PGM has empty dimensions", rd.pos);
  if (maxval <= 0 || maxval > 65535) throw FormatError("PGM maxval out of range", rd.pos);
  if (rd.pos >= data.size() || !std::isspace(data[rd.pos])) throw FormatError("malformed PGM header", rd.pos);
  ++rd.pos;
  const std::size_t bps = maxval > 255 ? 2 : 1;
  const std::size_t need = static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * bps;
  if (data.size() - rd.pos < need) throw FormatError("PGM pixel data is truncated", data.size());
  PgmImage img{static_cast<int>(maxval), IntGrid(static_cast<int>(w), static_cast<int>(h))};
  const std::uint8_t* p = data.data() + rd.pos;
  for (auto& v : img.samples.values()) {
    v = bps == 2 ? (p[0] << 8 | p[1]) : p[0];
    if (v > maxval) throw FormatError("PGM sample exceeds maxval", static_cast<std::size_t>(p - data.data()));
    p += bps;
  }
  return img;
}

std::vector<std::uint8_t> serialize_pgm(const PgmImage& img) {
  if (img.maxval <= 0 || img.maxval > 65535) throw InvalidArgument("PGM maxval out of range");
  const std::string head = "P5\n" + std::to_string(img.samples.width()) + " " + std::to_string(img.samples.height()) +
                           "\n" + std::to_string(img.maxval) + "\n";
  std::vector<std::uint8_t> out(head.begin(), head.end());
  const bool wide = img.maxval > 255;
  out.reserve(out.size() + img.samples.size() * (wide ? 2 : 1));
  for (auto v : img.samples.values()) {
    if (v < 0 || v > img.maxval) throw InvalidArgument("sample outside [0, maxval]");
    if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  }
  return out;
}

Metadata parse_metadata(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw MetadataError(std::string("metadata is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw MetadataError("metadata must be a JSON object");
  Metadata m;
  try {
    if (!j.contains("cfa_pattern")) throw MetadataError("metadata lacks cfa_pattern");
    const auto phase = parse_phase(j.at("cfa_pattern").get<std::string>());
    if (!phase) throw MetadataError("unknown cfa_pattern " + j.at("cfa_pattern").get<std::string>());
    m.phase = *phase;
    if (j.contains("black_offset")) {
      const auto k = j.at("black_offset").get<std::vector<int>>();
      if (k.size() != 3) throw MetadataError("black_offset needs 3 values");
      m.black = {k[0], k[1], k[2]};
    }
    if (j.contains("bit_depth")) {
      m.bit_depth = j.at("bit_depth").get<int>();
      if (m.bit_depth < 8 || m.bit_depth > 16) throw MetadataError("bit_depth must lie in [8, 16]");
    }
    if (j.contains("color_matrix")) {
      const auto a = j.at("color_matrix").get<std::vector<double>>();
      if (a.size() != 9) throw MetadataError("color_matrix needs 9 values");
      std::copy(a.begin(), a.end(), m.pipeline.color_matrix.a.begin());
    }
    if (j.contains("illuminant")) {
      const auto i = j.at("illuminant").get<std::vector<double>>();
      if (i.size() != 3) throw MetadataError("illuminant needs 3 values");
      std::copy(i.begin(), i.end(), m.pipeline.illuminant.begin());
    }
    if (j.contains("gamma")) {
      const auto g = j.at("gamma").get<std::string>();
      if (g == "srgb") m.pipeline.gamma = GammaCurve::SRGB;
      else if (g == "identity") m.pipeline.gamma = GammaCurve::Identity;
      else throw MetadataError("gamma must be \"srgb\" or \"identity\"");
    }
  } catch (const json::exception& e) {
    throw MetadataError(std::string("malformed metadata: ") + e.what());
  }
  for (int k : {m.black.r, m.black.g, m.black.b})
    if (k < 0 || k > 65535) throw MetadataError("black offsets must lie in [0, 65535]");
  m.pipeline.black = m.black;
  try {
    m.pipeline.validate();
  } catch (const InvalidArgument& e) {
    throw MetadataError(e.what());
  }
  return m;
}

std::string serialize_metadata(const Metadata& m) {
  nlohmann::ordered_json j;
  j["cfa_pattern"] = std::string(to_string(m.phase));
  j["black_offset"] = {m.black.r, m.black.g, m.black.b};
  if (m.bit_depth) j["bit_depth"] = m.bit_depth;
  j["color_matrix"] = m.pipeline.color_matrix.a;
  j["illuminant"] = m.pipeline.illuminant;
  j["gamma"] = m.pipeline.gamma == GammaCurve::SRGB ? "srgb" : "identity";
  return j.dump(2) + "\n";
}

BayerImage make_bayer(const PgmImage& pgm, const Metadata& meta) {
  BayerImage y;
  y.bit_depth = meta.bit_depth;
  if (y.bit_depth == 0) {
    y.bit_depth = 8;
    while ((1 << y.bit_depth) - 1 < pgm.maxval) ++y.bit_depth;
  }
  y.phase = meta.phase;
  y.black = meta.black;
  y.samples = pgm.samples;
  try {
    y.validate();
  } catch (const InvalidArgument& e) {
    throw MetadataError(std::string("mosaic does not match its metadata: ") + e.what());
  }
  return y;
}

PgmImage to_pgm(const BayerImage& y) { return {y.max_value(), y.samples}; }

std::vector<std::uint8_t> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("failed reading " + p.string());
  return data;
}

void write_file(const std::filesystem::path& p, std::span<const std::uint8_t> data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + p.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("failed writing " + p.string());
}

PgmImage read_pgm(const std::filesystem::path& p) { return parse_pgm(read_file(p)); }

void write_pgm(const std::filesystem::path& p, const PgmImage& img) { write_file(p, serialize_pgm(img)); }

Metadata read_metadata(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw MetadataError("cannot read metadata file " + p.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_metadata(text);
}

}  // namespace camra
