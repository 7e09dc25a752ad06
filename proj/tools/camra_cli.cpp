// camra: command-line front end.
//
//   camra encode --mode lossless --in y.pgm --meta y.json --out y.cmra
//   camra decode --in y.cmra --out y.pgm [--meta-out y.json]
//   camra analyze --in y.pgm --meta y.json [--kernel 97]
//   camra bench [--count 32 --size 512 --seed 42] [--out report.csv]
//
// Exit codes: 0 ok, 1 usage, 2 I/O, 3 metadata, 4 format, 5 internal.

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "camra/bench.hpp"
#include "camra/codec.hpp"
#include "camra/error.hpp"
#include "camra/io.hpp"

using namespace camra;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIo = 2, kMeta = 3, kFormat = 4, kInternal = 5 };

struct EncodeArgs {
  std::string mode = "lossless";
  std::string in, meta, out;
  double step = 1.0;
  double chroma_mult = 1.0;
  std::optional<double> lambda;
  std::vector<double> fixed_m;
  int levels = 5;
  int levels_vd = 2;
  std::string objective = "derived";
  bool exact_bands = false;
};

struct DecodeArgs {
  std::string in, out, meta_out;
};

struct AnalyzeArgs {
  std::string in, meta, out;
  int kernel = 53;
};

struct BenchArgs {
  int count = 32;
  int size = 512;
  std::uint64_t seed = 42;
  std::vector<double> steps{1, 2, 4, 8, 16, 32};
  std::vector<std::string> modes{"lossy-a", "lossy-b", "camra"};
  std::vector<std::string> inputs;
  std::vector<std::string> metas;
  std::string out;
  bool no_lossless = false;
  unsigned threads = 0;
};

std::optional<Mode> parse_mode(const std::string& s) {
  static const std::map<std::string, Mode> modes{
      {"lossless", Mode::Lossless}, {"lossy-a", Mode::LossyA}, {"lossy-b", Mode::LossyB}, {"camra", Mode::Camra}};
  auto it = modes.find(s);
  if (it == modes.end()) return std::nullopt;
  return it->second;
}

BayerImage load(const std::string& pgm, const std::string& meta) {
  const Metadata m = read_metadata(meta);
  return make_bayer(read_pgm(pgm), m);
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot create " + path);
  f << text;
  if (!f) throw IoError("failed writing " + path);
}

int run_encode(const EncodeArgs& a) {
  const auto mode = parse_mode(a.mode);
  if (!mode) throw InvalidArgument("unknown mode " + a.mode);
  const Metadata meta = read_metadata(a.meta);
  const BayerImage y = make_bayer(read_pgm(a.in), meta);

  CodecConfig cfg;
  cfg.levels = a.levels;
  cfg.levels_vd = a.levels_vd;
  cfg.integer_bands = !a.exact_bands;
  if (a.lambda) cfg.optimizer.lambda = *a.lambda;
  if (a.objective == "literal") cfg.optimizer.form = ObjectiveForm::Literal;
  else if (a.objective != "derived") throw InvalidArgument("objective must be derived or literal");
  std::optional<Mat2> m;
  if (!a.fixed_m.empty()) {
    if (a.fixed_m.size() != 4) throw InvalidArgument("--fixed-m takes four values");
    m = Mat2{a.fixed_m[0], a.fixed_m[1], a.fixed_m[2], a.fixed_m[3]};
  }
  const QuantizationSpec q = QuantizationSpec::uniform(a.step, a.chroma_mult);

  CompressedStream s;
  switch (*mode) {
    case Mode::Lossless: s = encode_lossless(y, cfg); break;
    case Mode::LossyA: s = encode_lossy_a(y, q, m, cfg); break;
    case Mode::LossyB: s = encode_lossy_b(y, q, m, cfg); break;
    case Mode::Camra: s = encode_camra(y, q, meta.pipeline, m, cfg); break;
    default: break;
  }
  write_file(a.out, s.serialize());
  std::cerr << to_string(*mode) << ": " << s.byte_size() << " bytes, " << s.bpp() << " bpp\n";
  return kOk;
}

int run_decode(const DecodeArgs& a) {
  const auto bytes = read_file(a.in);
  const CompressedStream s = CompressedStream::parse(bytes);
  const BayerImage y = decode(s);
  write_pgm(a.out, to_pgm(y));
  if (!a.meta_out.empty()) {
    Metadata m;
    m.phase = y.phase;
    m.black = y.black;
    m.bit_depth = y.bit_depth;
    if (s.header.mode == Mode::Camra) m.pipeline = s.header.pipeline();
    emit(a.meta_out, serialize_metadata(m));
  }
  return kOk;
}

int run_analyze(const AnalyzeArgs& a) {
  if (a.kernel != 53 && a.kernel != 97) throw InvalidArgument("kernel must be 53 or 97");
  const BayerImage y = load(a.in, a.meta);
  const DecorrelationStats st = analyze(y, a.kernel == 53 ? Kernel::LeGall53 : Kernel::Daub97);
  std::ostringstream os;
  os << "image_id,kernel,pearson_before,pearson_after,entropy_before,entropy_after\n";
  os << std::setprecision(8) << a.in << ',' << a.kernel << ',' << st.pearson_before << ',' << st.pearson_after << ','
     << st.entropy_before << ',' << st.entropy_after << '\n';
  emit(a.out, os.str());
  return kOk;
}

int run_bench_cmd(const BenchArgs& a) {
  if (a.inputs.size() != a.metas.size()) throw InvalidArgument("every --in needs a matching --meta");
  BenchConfig cfg;
  cfg.lossless = !a.no_lossless;
  cfg.steps = a.steps;
  std::sort(cfg.steps.begin(), cfg.steps.end());
  cfg.display = bench_camera();
  cfg.threads = a.threads;
  cfg.lossy_modes.clear();
  for (const auto& name : a.modes) {
    const auto m = parse_mode(name);
    if (!m || *m == Mode::Lossless) throw InvalidArgument("bench modes are lossy-a, lossy-b, camra");
    cfg.lossy_modes.push_back(*m);
  }
  std::vector<BayerImage> images;
  std::vector<std::string> ids;
  if (a.inputs.empty()) {
    for (auto& img : generate_corpus(a.seed, a.count, a.size)) {
      ids.push_back("synthetic-" + std::to_string(ids.size()));
      images.push_back(std::move(img.mosaic));
    }
  } else {
    for (std::size_t i = 0; i < a.inputs.size(); ++i) {
      const Metadata meta = read_metadata(a.metas[i]);
      images.push_back(make_bayer(read_pgm(a.inputs[i]), meta));
      ids.push_back(a.inputs[i]);
      if (i == 0) {
        cfg.display = meta.pipeline;
      }
    }
  }
  std::ostringstream os;
  write_csv(os, run_bench(images, ids, cfg));
  emit(a.out, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CFA image codec"};
  app.require_subcommand(1);

  EncodeArgs ea;
  auto* enc = app.add_subcommand("encode", "Compress a mosaic");
  enc->add_option("--mode", ea.mode, "lossless, lossy-a, lossy-b or camra")->capture_default_str();
  enc->add_option("--in", ea.in, "Input PGM")->required();
  enc->add_option("--meta", ea.meta, "Metadata JSON")->required();
  enc->add_option("--out", ea.out, "Output stream")->required();
  enc->add_option("--step", ea.step, "Quantization step")->capture_default_str();
  enc->add_option("--chroma-mult", ea.chroma_mult, "Step multiplier for v_s and HH")->capture_default_str();
  enc->add_option("--lambda", ea.lambda, "Sparsity weight of the M optimizer");
  enc->add_option("--fixed-m", ea.fixed_m, "Decorrelation matrix m00 m01 m10 m11")->expected(4);
  enc->add_option("--levels", ea.levels, "Packet levels N")->capture_default_str();
  enc->add_option("--levels-vd", ea.levels_vd, "Packet levels N' for v_d")->capture_default_str();
  enc->add_option("--objective", ea.objective, "derived or literal")->capture_default_str();
  enc->add_flag("--exact-bands", ea.exact_bands, "Skip integer rounding of the level-1 bands");

  DecodeArgs da;
  auto* dec = app.add_subcommand("decode", "Decompress a stream");
  dec->add_option("--in", da.in, "Input stream")->required();
  dec->add_option("--out", da.out, "Output PGM")->required();
  dec->add_option("--meta-out", da.meta_out, "Write the recovered metadata");

  AnalyzeArgs aa;
  auto* ana = app.add_subcommand("analyze", "Decorrelation statistics as CSV");
  ana->add_option("--in", aa.in, "Input PGM")->required();
  ana->add_option("--meta", aa.meta, "Metadata JSON")->required();
  ana->add_option("--kernel", aa.kernel, "53 or 97")->capture_default_str();
  ana->add_option("--out", aa.out, "CSV path (default stdout)");

  BenchArgs ba;
  auto* ben = app.add_subcommand("bench", "Scheme comparison report as CSV");
  ben->add_option("--count", ba.count, "Synthetic images")->capture_default_str();
  ben->add_option("--size", ba.size, "Synthetic image side")->capture_default_str();
  ben->add_option("--seed", ba.seed, "Corpus seed")->capture_default_str();
  ben->add_option("--steps", ba.steps, "Quantization steps")->capture_default_str();
  ben->add_option("--modes", ba.modes, "Lossy modes")->capture_default_str();
  ben->add_option("--in", ba.inputs, "PGM mosaics instead of the synthetic corpus");
  ben->add_option("--meta", ba.metas, "Metadata for each --in");
  ben->add_option("--out", ba.out, "CSV path (default stdout)");
  ben->add_option("--threads", ba.threads, "Worker threads (0: all cores)");
  ben->add_flag("--no-lossless", ba.no_lossless, "Skip the lossless comparison");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*enc) return run_encode(ea);
    if (*dec) return run_decode(da);
    if (*ana) return run_analyze(aa);
    if (*ben) return run_bench_cmd(ba);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const MetadataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMeta;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFormat;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
