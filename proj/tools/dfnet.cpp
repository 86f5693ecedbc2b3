// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// dfnet: enhance | bench | count | synth | sched | loss | init
//
// Exit codes: 0 success, 1 usage or configuration, 2 I/O (including
// unreadable or malformed WAV), 3 weight format or shape errors.

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dfn/augment.hpp"
#include "dfn/complexity.hpp"
#include "dfn/key_values.hpp"
#include "dfn/loss.hpp"
#include "dfn/pipeline.hpp"
#include "dfn/schedule.hpp"
#include "dfn/wav.hpp"
#include "dfn/weights.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitFormat = 3;

// Raised for wrong sample rate or channel count.
class UsageError : public dfn::Error {
 public:
  using dfn::Error::Error;
};

struct CommonOptions {
  std::string weights;
  std::uint64_t seed = 0;
  std::string config;
  bool random_weights = false;
  bool identity_weights = false;
};

dfn::KeyValues LoadConfig(const CommonOptions& common) {
  if (common.config.empty()) return {};
  return dfn::KeyValues::LoadFile(common.config);
}

// Weights from --weights, or generated when --random-weights/--identity-weights
// is given (model config overridable with --config).
std::shared_ptr<const dfn::ModelWeights> ResolveWeights(const CommonOptions& common,
                                                        bool random_by_default) {
  if (!common.weights.empty())
    return std::make_shared<const dfn::ModelWeights>(dfn::LoadWeightsFile(common.weights));
  dfn::ModelConfig cfg;
  cfg.Apply(LoadConfig(common));
  if (common.identity_weights)
    return std::make_shared<const dfn::ModelWeights>(dfn::IdentityWeights(cfg));
  if (common.random_weights || random_by_default)
    return std::make_shared<const dfn::ModelWeights>(dfn::RandomWeights(cfg, common.seed));
  throw UsageError("no weights: pass --weights PATH, --random-weights or --identity-weights");
}

void CheckMono(const dfn::WavInfo& info, const std::string& path) {
  if (info.channels != 1)
    throw UsageError(path + ": expected mono, got " + std::to_string(info.channels) +
                     " channels");
}

std::vector<float> ReadMono(const std::string& path, int sample_rate, bool resample) {
  dfn::WavData d = dfn::ReadWav(path);
  CheckMono(d.info, path);
  if (d.info.sample_rate == sample_rate) return d.samples;
  if (!resample)
    throw UsageError(path + ": sample rate " + std::to_string(d.info.sample_rate) +
                     " Hz, engine requires " + std::to_string(sample_rate) +
                     " Hz (use --resample)");
  return dfn::Resample(d.samples, static_cast<double>(d.info.sample_rate) / sample_rate);
}

// ---------------------------------------------------------------- enhance

struct EnhanceArgs {
  std::vector<std::string> inputs;
  std::string output;
  bool post_filter = false;
  float beta = dfn::kDefaultPostFilterBeta;
  bool raw_latency = false;
  bool resample = false;
  int jobs = 1;
  std::string encoding;  // empty: same as input
};

dfn::WavEncoding ParseEncoding(const std::string& s) {
  if (s == "pcm16") return dfn::WavEncoding::kPcm16;
  if (s == "float32") return dfn::WavEncoding::kFloat32;
  throw UsageError("unknown encoding '" + s + "' (pcm16 or float32)");
}

void EnhanceFile(const std::shared_ptr<const dfn::ModelWeights>& weights,
                 const EnhanceArgs& args, const std::string& in_path,
                 const std::string& out_path) {
  const auto& stft = weights->config().stft;
  dfn::EnhancerOptions opts{args.post_filter, args.beta};
  dfn::Enhancer enhancer(weights, opts);

  dfn::WavReader reader(in_path);
  const dfn::WavInfo info = reader.info();
  CheckMono(info, in_path);
  const dfn::WavEncoding enc =
      args.encoding.empty() ? info.encoding : ParseEncoding(args.encoding);

  if (info.sample_rate != stft.sample_rate) {
    // Resampling needs the whole signal; only taken behind --resample.
    const auto x = ReadMono(in_path, stft.sample_rate, args.resample);
    const auto y = dfn::EnhanceSignal(weights, x, opts, !args.raw_latency);
    dfn::WriteWav(out_path, y, stft.sample_rate, enc);
    return;
  }
  dfn::WavWriter writer(out_path, stft.sample_rate, enc);
  dfn::EnhanceStream(
      enhancer, static_cast<std::size_t>(info.frames),
      [&](std::span<float> buf) { return reader.Read(buf); },
      [&](std::span<const float> chunk) { writer.Write(chunk); }, !args.raw_latency);
  writer.Close();
}

int RunEnhance(const CommonOptions& common, EnhanceArgs args) {
  const auto kv = LoadConfig(common);
  args.post_filter = kv.GetBool("post_filter", args.post_filter);
  args.beta = static_cast<float>(kv.GetDouble("beta", args.beta));
  const auto weights = ResolveWeights(common, false);

  std::vector<std::pair<std::string, std::string>> jobs;
  if (args.inputs.size() == 1 && !std::filesystem::is_directory(args.output)) {
    jobs.emplace_back(args.inputs[0], args.output);
  } else {
    std::filesystem::create_directories(args.output);
    for (const auto& in : args.inputs)
      jobs.emplace_back(in, (std::filesystem::path(args.output) /
                             std::filesystem::path(in).filename())
                                .string());
  }

  const int workers = std::max(1, std::min<int>(args.jobs, static_cast<int>(jobs.size())));
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < jobs.size();) {
      try {
        EnhanceFile(weights, args, jobs[i].first, jobs[i].second);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return kExitOk;
}

// ---------------------------------------------------------------- bench

int RunBench(const CommonOptions& common, double duration, int runs, bool post_filter) {
  const auto weights = ResolveWeights(common, true);
  const auto r = dfn::RunBenchmark(weights, duration, runs, common.seed, {post_filter});
  std::printf("audio_seconds: %.3f\n", r.audio_seconds);
  std::printf("runs: %d\n", runs);
  for (std::size_t i = 0; i < r.run_rtfs.size(); ++i)
    std::printf("run %zu rtf: %.5f\n", i, r.run_rtfs[i]);
  std::printf("wall_seconds: %.5f\n", r.wall_seconds);
  std::printf("rtf: %.5f\n", r.rtf);
  std::printf("frames_processed: %lld\n", static_cast<long long>(r.frames_processed));
  std::printf("params: %lld\n", static_cast<long long>(r.params));
  std::printf("macs_per_second: %.0f\n", r.macs_per_second);
  std::printf("reference_rtf: 0.04 (published, different hardware)\n");
  return kExitOk;
}

// ---------------------------------------------------------------- count

int RunCount(const CommonOptions& common, bool summary_only) {
  dfn::ComplexityReport report;
  if (!common.weights.empty()) {
    const auto w = dfn::LoadWeightsFile(common.weights);
    report = dfn::CountParamsMacs(w);
  } else {
    dfn::ModelConfig cfg;
    cfg.Apply(LoadConfig(common));
    cfg.Validate();
    report = dfn::CountParamsMacs(cfg);
  }
  std::cout << report.Format(!summary_only);
  std::printf("reference: 2.306 M params, 0.356 G MACs/s (published)\n");
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string speech, noise, rir;
  double rt60 = 0.0;
  double snr_db = 5.0;
  std::uint64_t index = 0;
  std::string noisy_out, target_out, log_out;
};

int RunSynth(const CommonOptions& common, const SynthArgs& a) {
  dfn::AugmentSpec spec;
  spec.seed = common.seed;
  spec.Apply(LoadConfig(common));
  const int sr = static_cast<int>(spec.sample_rate);
  const auto speech = ReadMono(a.speech, sr, false);
  const auto noise = ReadMono(a.noise, sr, false);
  dfn::Rng rng = dfn::PairRng(spec.seed, a.index);
  std::optional<std::vector<float>> rir;
  if (!a.rir.empty()) {
    rir = ReadMono(a.rir, sr, false);
  } else if (a.rt60 > 0.0) {
    rir = dfn::SyntheticRir(a.rt60, sr, static_cast<std::size_t>(a.rt60 * sr), rng);
  }
  const auto pair = dfn::Mix(speech, noise, rir ? &*rir : nullptr, a.snr_db, spec, rng);
  dfn::WriteWav(a.noisy_out, pair.noisy, sr);
  dfn::WriteWav(a.target_out, pair.target, sr);
  const std::string log = "seed " + std::to_string(spec.seed) + " index " +
                          std::to_string(a.index) + "\n" + pair.LogText();
  if (a.log_out.empty()) {
    std::cout << log;
  } else {
    std::ofstream out(a.log_out);
    if (!(out << log)) throw dfn::IoError("cannot write log: " + a.log_out);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sched

int RunSchedDump(const CommonOptions& common, dfn::ScheduleConfig cfg, std::int64_t stride,
                 const std::string& out_path) {
  cfg.Apply(LoadConfig(common));
  const std::string csv = dfn::ScheduleCsv(cfg, stride);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path);
    if (!(out << csv)) throw dfn::IoError("cannot write " + out_path);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- loss

int RunLoss(const CommonOptions& common, const std::string& enhanced, const std::string& clean) {
  dfn::LossConfig cfg;
  cfg.Apply(LoadConfig(common));
  const auto y = ReadMono(enhanced, cfg.sample_rate, false);
  const auto s = ReadMono(clean, cfg.sample_rate, false);
  const auto r = dfn::CombinedLoss(y, s, cfg);
  std::printf("spec_loss: %.9g\n", r.spec);
  std::printf("mr_spec_loss: %.9g\n", r.mr);
  std::printf("lambda_spec: %g\nlambda_mr: %g\n", cfg.lambda_spec, cfg.lambda_mr);
  std::printf("combined: %.9g\n", r.combined);
  return kExitOk;
}

// ---------------------------------------------------------------- init

int RunInit(const CommonOptions& common, const std::string& kind, const std::string& out) {
  dfn::ModelConfig cfg;
  cfg.Apply(LoadConfig(common));
  cfg.Validate();
  if (kind == "random") {
    dfn::SaveWeightsFile(dfn::RandomWeights(cfg, common.seed), out);
  } else if (kind == "identity") {
    dfn::SaveWeightsFile(dfn::IdentityWeights(cfg), out);
  } else {
    throw UsageError("unknown --kind '" + kind + "' (random or identity)");
  }
  return kExitOk;
}

void AddCommon(CLI::App* cmd, CommonOptions& c, bool weights_flags) {
  cmd->add_option("--seed", c.seed, "RNG seed");
  cmd->add_option("--config", c.config, "key=value configuration file");
  if (weights_flags) {
    cmd->add_option("--weights", c.weights, "weight container (DFW2)");
    cmd->add_flag("--random-weights", c.random_weights, "use seeded random weights");
    cmd->add_flag("--identity-weights", c.identity_weights,
                  "use weights for which the pipeline is a pure delay");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dfnet: streaming two-stage speech enhancement"};
  app.require_subcommand(1);
  std::function<int()> run;

  CommonOptions common;

  EnhanceArgs enh;
  auto* c_enh = app.add_subcommand("enhance", "enhance WAV files");
  AddCommon(c_enh, common, true);
  c_enh->add_option("inputs", enh.inputs, "input WAV file(s)")->required();
  c_enh->add_option("-o,--output", enh.output, "output WAV, or directory for several inputs")
      ->required();
  c_enh->add_flag("--post-filter", enh.post_filter, "apply the sine post-filter to ERB gains");
  c_enh->add_option("--beta", enh.beta, "post-filter beta")->check(CLI::NonNegativeNumber);
  c_enh->add_flag("--raw-latency", enh.raw_latency, "keep the algorithmic delay in the output");
  c_enh->add_flag("--resample", enh.resample, "resample non-48 kHz input");
  c_enh->add_option("--jobs", enh.jobs, "files processed in parallel")->check(CLI::PositiveNumber);
  c_enh->add_option("--encoding", enh.encoding, "output encoding: pcm16 or float32");
  c_enh->callback([&] { run = [&] { return RunEnhance(common, enh); }; });

  double duration = 10.0;
  int runs = 5;
  bool bench_pf = false;
  auto* c_bench = app.add_subcommand("bench", "real-time factor benchmark");
  AddCommon(c_bench, common, true);
  c_bench->add_option("--duration", duration, "seconds of audio")->check(CLI::PositiveNumber);
  c_bench->add_option("--runs", runs, "runs to average")->check(CLI::PositiveNumber);
  c_bench->add_flag("--post-filter", bench_pf, "enable the post-filter");
  c_bench->callback([&] { run = [&] { return RunBench(common, duration, runs, bench_pf); }; });

  bool summary_only = false;
  auto* c_count = app.add_subcommand("count", "parameter and MAC report");
  AddCommon(c_count, common, false);
  c_count->add_option("--weights", common.weights, "weight container (DFW2)");
  c_count->add_flag("--summary", summary_only, "omit the per-layer table");
  c_count->callback([&] { run = [&] { return RunCount(common, summary_only); }; });

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "synthesize a noisy/target pair");
  AddCommon(c_syn, common, false);
  c_syn->add_option("speech", syn.speech, "clean speech WAV")->required();
  c_syn->add_option("noise", syn.noise, "noise WAV")->required();
  c_syn->add_option("--rir", syn.rir, "room impulse response WAV");
  c_syn->add_option("--rt60", syn.rt60, "synthetic RIR with this RT60 (s) when --rir is absent");
  c_syn->add_option("--snr", syn.snr_db, "mixing SNR in dB");
  c_syn->add_option("--index", syn.index, "pair index for the RNG stream");
  c_syn->add_option("--noisy", syn.noisy_out, "noisy output WAV")->required();
  c_syn->add_option("--target", syn.target_out, "target output WAV")->required();
  c_syn->add_option("--log", syn.log_out, "transform log (default stdout)");
  c_syn->callback([&] { run = [&] { return RunSynth(common, syn); }; });

  dfn::ScheduleConfig sched;
  std::int64_t stride = 1;
  std::string sched_out;
  auto* c_sched = app.add_subcommand("sched", "training schedules");
  c_sched->require_subcommand(1);
  auto* c_dump = c_sched->add_subcommand("dump", "CSV of iter, epoch, lr, wd, batch");
  AddCommon(c_dump, common, false);
  c_dump->add_option("--epochs", sched.total_epochs, "total epochs");
  c_dump->add_option("--warmup", sched.warmup_epochs, "warmup epochs");
  c_dump->add_option("--iters-per-epoch", sched.iters_per_epoch, "iterations per epoch");
  c_dump->add_option("--stride", stride, "emit every n-th iteration")->check(CLI::PositiveNumber);
  c_dump->add_option("-o,--output", sched_out, "CSV path (default stdout)");
  c_dump->callback([&] { run = [&] { return RunSchedDump(common, sched, stride, sched_out); }; });

  std::string enhanced, clean;
  auto* c_loss = app.add_subcommand("loss", "spectral losses of enhanced vs clean");
  AddCommon(c_loss, common, false);
  c_loss->add_option("enhanced", enhanced, "enhanced WAV")->required();
  c_loss->add_option("clean", clean, "clean WAV")->required();
  c_loss->callback([&] { run = [&] { return RunLoss(common, enhanced, clean); }; });

  std::string kind = "random", init_out;
  auto* c_init = app.add_subcommand("init", "write a generated weight container");
  AddCommon(c_init, common, false);
  c_init->add_option("--kind", kind, "random or identity");
  c_init->add_option("-o,--output", init_out, "output path")->required();
  c_init->callback([&] { run = [&] { return RunInit(common, kind, init_out); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    return run ? run() : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dfn::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const dfn::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const dfn::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const dfn::ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
