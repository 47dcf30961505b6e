#include "freqsketch_cli/cli_commands.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include <freqsketch/error.hpp>
#include <freqsketch/harness.hpp>
#include <freqsketch/mappers.hpp>
#include <freqsketch/oracle.hpp>
#include <freqsketch/sketch_file.hpp>
#include <freqsketch/transforms.hpp>

#include "freqsketch_cli/tsv.hpp"

namespace freqsketch::cli {
namespace {

struct BuildOptions {
  std::string input = "-";
  std::string stat;
  double epsilon = 0.1;
  std::uint32_t r = 0;  // 0: replicas_for(epsilon)
  std::uint32_t k = 100;
  std::uint64_t seed = 0;
  std::string mode = "point";
  std::string output;
  std::uint64_t shard = 0;
  std::uint64_t ordinal_base = 0;
  unsigned outkey_bits = 64;
};

struct MergeOptions {
  std::vector<std::string> inputs;
  std::string output;
};

struct EstimateOptions {
  std::string input;
  std::string stat;
  std::optional<double> t;
};

struct ExactOptions {
  std::string input = "-";
  std::string stat;
};

struct BenchOptions {
  BenchConfig cfg;
  std::string output = "-";
};

// Opens `path`, or returns `fallback` for "-".
std::istream& open_input(const std::string& path, std::istream& fallback, std::unique_ptr<std::ifstream>& holder) {
  if (path == "-") return fallback;
  holder = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*holder) throw Error("cannot open '" + path + "'");
  return *holder;
}

std::ostream& precise(std::ostream& os) {
  os.precision(17);
  return os;
}

void print_estimate(const SketchFile::Estimate& est, std::ostream& out, std::ostream& err) {
  out << "estimate\t" << est.value << '\n';
  if (est.is_signed) {
    out << "plus\t" << est.plus << '\n';
    out << "minus\t" << est.minus << '\n';
    out << "rho\t" << est.certificate.rho << '\n';
    out << "relative_error_bound\t" << est.certificate.error_bound << '\n';
  }
  if (est.certificate.clamped) err << "warning: negative signed estimate clamped to 0\n";
}

int cmd_build(const BuildOptions& o, std::istream& in, std::ostream& out) {
  const StatisticSpec spec = parse_statistic(o.stat);
  const BuildMode mode = parse_build_mode(o.mode);
  PipelineConfig cfg;
  cfg.epsilon = o.epsilon;
  cfg.r = o.r == 0 ? replicas_for(o.epsilon) : o.r;
  cfg.k = o.k;
  cfg.seed = o.seed;
  cfg.outkey_bits = o.outkey_bits;
  SketchFile file(mode, spec, cfg);

  std::unique_ptr<std::ifstream> holder;
  std::istream& src = open_input(o.input, in, holder);
  std::uint64_t index = o.ordinal_base;
  read_tsv(src, [&](const Element& e) { file.ingest(e, Ordinal{o.shard, index++}); });

  file.save(o.output);
  out << "elements\t" << file.header().elements << '\n';
  out << "output_elements\t" << file.outputs() << '\n';
  return kOk;
}

int cmd_merge(const MergeOptions& o, std::ostream& out) {
  // Merge in a canonical order so the result does not depend on argument order.
  std::vector<std::vector<std::uint8_t>> blobs;
  for (const auto& path : o.inputs) blobs.push_back(SketchFile::load(path).serialize());
  std::sort(blobs.begin(), blobs.end());
  SketchFile merged = SketchFile::deserialize(blobs.front());
  for (std::size_t i = 1; i < blobs.size(); ++i) merged.merge(SketchFile::deserialize(blobs[i]));
  merged.save(o.output);
  out << "inputs\t" << o.inputs.size() << '\n';
  out << "elements\t" << merged.header().elements << '\n';
  return kOk;
}

int cmd_estimate(const EstimateOptions& o, std::ostream& out, std::ostream& err) {
  const SketchFile file = SketchFile::load(o.input);
  if (o.t) {
    out << "laplace_c\t" << file.estimate_point(*o.t) << '\n';
    if (o.stat.empty()) return kOk;
  }
  const auto est = o.stat.empty() ? file.estimate() : file.estimate(parse_statistic(o.stat));
  print_estimate(est, out, err);
  return kOk;
}

int cmd_exact(const ExactOptions& o, std::istream& in, std::ostream& out) {
  const StatisticSpec spec = parse_statistic(o.stat);
  std::unique_ptr<std::ifstream> holder;
  std::istream& src = open_input(o.input, in, holder);
  std::vector<Element> elements;
  read_tsv(src, [&](const Element& e) { elements.push_back(e); });
  const FrequencyDistribution dist = aggregate(elements);
  out << "exact\t" << exact_statistic(dist, spec) << '\n';
  out << "keys\t" << dist.distinct() << '\n';
  out << "sum\t" << dist.sum() << '\n';
  return kOk;
}

int cmd_bench(const BenchOptions& o, std::ostream& out) {
  const auto rows = run_point_bench(o.cfg);
  if (o.output == "-") {
    write_bench_csv(out, rows);
  } else {
    std::ofstream file(o.output);
    if (!file) throw Error("cannot open '" + o.output + "' for writing");
    write_bench_csv(file, rows);
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Composable sketches for concave sublinear frequency statistics"};
  app.require_subcommand(1);

  BuildOptions build;
  auto* b = app.add_subcommand("build", "Build a sketch file from TSV elements");
  b->add_option("input", build.input, "TSV input (key<TAB>value), '-' for stdin");
  b->add_option("--stat", build.stat, "Statistic descriptor, e.g. softcapT=5, sqrt, capT=5")->required();
  b->add_option("--epsilon", build.epsilon, "Target relative error")->check(CLI::Range(0.0, 1.0));
  b->add_option("--r", build.r, "Replicas per element (default: ceil(e/(e-1) eps^-2.5))");
  b->add_option("--k", build.k, "Bottom-k sketch size")->check(CLI::Range(2u, 1u << 24));
  b->add_option("--seed", build.seed, "Randomness seed");
  b->add_option("--mode", build.mode, "point | combination | fullrange");
  b->add_option("-o,--output", build.output, "Output sketch file")->required();
  b->add_option("--shard", build.shard, "Shard nonce for element ordinals");
  b->add_option("--ordinal-base", build.ordinal_base, "Ordinal of the first input element");
  b->add_option("--outkey-bits", build.outkey_bits, "Output key width in bits")->check(CLI::Range(16u, 64u));

  MergeOptions merge;
  auto* m = app.add_subcommand("merge", "Merge compatible sketch files");
  m->add_option("inputs", merge.inputs, "Sketch files")->required();
  m->add_option("-o,--output", merge.output, "Output sketch file")->required();

  EstimateOptions estimate;
  auto* e = app.add_subcommand("estimate", "Print the estimate stored in a sketch file");
  e->add_option("input", estimate.input, "Sketch file")->required();
  e->add_option("--stat", estimate.stat, "Statistic override (fullrange sketches)");
  e->add_option("--t", estimate.t, "Laplace^c point query at t (fullrange sketches)");

  ExactOptions exact;
  auto* x = app.add_subcommand("exact", "Compute a statistic exactly from TSV elements");
  x->add_option("input", exact.input, "TSV input, '-' for stdin");
  x->add_option("--stat", exact.stat, "Statistic descriptor")->required();

  BenchOptions bench;
  auto* h = app.add_subcommand("bench", "Soft-cap NRMSE experiment over Zipf data (CSV)");
  h->add_option("--alpha", bench.cfg.alphas, "Zipf parameters")->delimiter(',');
  h->add_option("--n", bench.cfg.n_elements, "Elements per dataset");
  h->add_option("--T", bench.cfg.Ts, "Soft-cap parameters")->delimiter(',');
  h->add_option("--r", bench.cfg.rs, "Replica counts")->delimiter(',');
  h->add_option("--k", bench.cfg.k, "Sketch size");
  h->add_option("--reps", bench.cfg.reps, "Repetitions per cell");
  h->add_option("--n-keys", bench.cfg.n_keys, "Zipf key universe size");
  h->add_option("--seed", bench.cfg.seed, "Seed");
  h->add_option("--out", bench.output, "CSV output path, '-' for stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    std::ostringstream usage_out, usage_err;
    const int code = app.exit(ex, usage_out, usage_err);
    out << usage_out.str();
    err << usage_err.str();
    return code == 0 ? kOk : kParseError;
  }

  precise(out);
  try {
    if (*b) return cmd_build(build, in, out);
    if (*m) return cmd_merge(merge, out);
    if (*e) return cmd_estimate(estimate, out, err);
    if (*x) return cmd_exact(exact, in, out);
    if (*h) return cmd_bench(bench, out);
  } catch (const ParseError& ex) {
    err << "parse error: " << ex.what() << '\n';
    return kParseError;
  } catch (const IncompatibleSketch& ex) {
    err << "error: " << ex.what() << '\n';
    return kIncompatible;
  } catch (const UnsupportedStatistic& ex) {
    err << "unsupported statistic: " << ex.what() << '\n';
    return kUnsupported;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kFailure;
  }
  return kFailure;
}

}  // namespace freqsketch::cli
