// Copyright 2026 The dfnet Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Python bindings for the dfnet engine.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>

#include "dfn/augment.hpp"
#include "dfn/complexity.hpp"
#include "dfn/deep_filter.hpp"
#include "dfn/erb.hpp"
#include "dfn/loss.hpp"
#include "dfn/pipeline.hpp"
#include "dfn/schedule.hpp"
#include "dfn/stft.hpp"
#include "dfn/wav.hpp"
#include "dfn/weights.hpp"

namespace py = pybind11;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using ComplexArray =
    py::array_t<std::complex<float>, py::array::c_style | py::array::forcecast>;
// pybind11 holders cannot be pointers to const.
using WeightsPtr = std::shared_ptr<dfn::ModelWeights>;

std::vector<float> ToVector(const FloatArray& a) {
  if (a.ndim() != 1) throw dfn::ShapeError("expected a 1-D array");
  return {a.data(), a.data() + a.size()};
}

FloatArray ToArray(std::span<const float> v) {
  FloatArray out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

dfn::KeyValues ToKeyValues(const py::dict& d) {
  dfn::KeyValues kv;
  for (const auto& [k, v] : d) kv.Set(py::str(k), std::string(py::str(v)));
  return kv;
}

py::dict ToDict(const dfn::KeyValues& kv) {
  py::dict d;
  for (const auto& [k, v] : kv.entries()) d[py::str(k)] = v;
  return d;
}

WeightsPtr Share(dfn::ModelWeights w) {
  return std::make_shared<dfn::ModelWeights>(std::move(w));
}

WeightsPtr OrRandom(const std::optional<WeightsPtr>& w) {
  return w ? *w : Share(dfn::RandomWeights(dfn::ModelConfig{}, 0));
}

ComplexArray Stft(const FloatArray& x, double window_ms) {
  const auto signal = ToVector(x);
  const auto frames = dfn::StftOffline<float>(signal, window_ms);
  const auto bins = frames.empty() ? 0 : frames[0].bins.size();
  ComplexArray out({static_cast<py::ssize_t>(frames.size()),
                    static_cast<py::ssize_t>(bins)});
  auto* p = out.mutable_data();
  for (const auto& f : frames) p = std::copy(f.bins.begin(), f.bins.end(), p);
  return out;
}

FloatArray Istft(const ComplexArray& spec, std::size_t length, double window_ms) {
  if (spec.ndim() != 2) throw dfn::ShapeError("istft: expected [frames, bins]");
  const auto cfg = dfn::StftConfig::ForWindowMs(window_ms);
  const auto bins = static_cast<std::size_t>(spec.shape(1));
  dfn::Spectrogram<float> frames(static_cast<std::size_t>(spec.shape(0)));
  for (std::size_t t = 0; t < frames.size(); ++t) {
    frames[t] = dfn::SpectralFrame<float>(bins, static_cast<std::int64_t>(t));
    std::copy_n(spec.data() + t * bins, bins, frames[t].bins.begin());
  }
  return ToArray(dfn::IstftOffline(frames, cfg, length));
}

py::dict Complexity(const dfn::ComplexityReport& r) {
  py::list layers;
  for (const auto& l : r.layers)
    layers.append(py::dict(py::arg("name") = l.name, py::arg("kind") = dfn::ToString(l.kind),
                           py::arg("params") = l.params,
                           py::arg("macs_per_frame") = l.macs_per_frame));
  return py::dict(py::arg("params") = r.params, py::arg("macs_per_frame") = r.macs_per_frame,
                  py::arg("frames_per_second") = r.frames_per_second,
                  py::arg("macs_per_second") = r.macs_per_second, py::arg("layers") = layers);
}

py::dict PairDict(const dfn::MixturePair& p) {
  return py::dict(py::arg("noisy") = ToArray(p.noisy), py::arg("target") = ToArray(p.target),
                  py::arg("speech_component") = ToArray(p.speech_component),
                  py::arg("noise_component") = ToArray(p.noise_component),
                  py::arg("distorted_speech") = ToArray(p.distorted_speech),
                  py::arg("snr_db") = p.snr_db, py::arg("log") = p.LogText());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Streaming two-stage speech enhancement engine";

  auto error = py::register_exception<dfn::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<dfn::ConfigError>(m, "ConfigError", error);
  py::register_exception<dfn::ShapeError>(m, "ShapeError", error);
  auto format = py::register_exception<dfn::FormatError>(m, "FormatError", error);
  py::register_exception<dfn::TruncatedError>(m, "TruncatedError", format);
  py::register_exception<dfn::IoError>(m, "IoError", error);

  const dfn::ModelConfig defaults;
  m.attr("SAMPLE_RATE") = defaults.stft.sample_rate;
  m.attr("HOP") = defaults.stft.hop_len;
  m.attr("N_BINS") = defaults.stft.n_bins();

  // DSP.
  m.def("stft", &Stft, py::arg("signal"), py::arg("window_ms") = 20.0,
        "Offline STFT, complex64 [frames, bins]; equals streaming analysis.");
  m.def("istft", &Istft, py::arg("spec"), py::arg("length"), py::arg("window_ms") = 20.0,
        "Delay-compensated overlap-add inverse of stft().");
  m.def(
      "erb_band_edges",
      [](int n_bands) { return dfn::BuildFilterbank(dfn::StftConfig{}, n_bands).band_edges(); },
      py::arg("n_bands") = 32);
  m.def(
      "erb_compress",
      [](const ComplexArray& frame, int n_bands) {
        dfn::SpectralFrame<float> f(static_cast<std::size_t>(frame.size()));
        std::copy_n(frame.data(), frame.size(), f.bins.begin());
        return ToArray(dfn::Compress(f, dfn::BuildFilterbank(dfn::StftConfig{}, n_bands)));
      },
      py::arg("frame"), py::arg("n_bands") = 32, "Per-band power in dB.");
  m.def(
      "erb_interpolate",
      [](const FloatArray& gains) {
        const auto g = ToVector(gains);
        const auto fb = dfn::BuildFilterbank(dfn::StftConfig{}, static_cast<int>(g.size()));
        return ToArray(dfn::InterpolateGains(g, fb));
      },
      py::arg("band_gains"), "Band gains to per-bin gains.");
  m.def(
      "post_filter",
      [](const FloatArray& gains, float beta) { return ToArray(dfn::PostFilter(ToVector(gains), beta)); },
      py::arg("gains"), py::arg("beta") = dfn::kDefaultPostFilterBeta);
  m.def(
      "deep_filter",
      [](const std::vector<std::vector<std::complex<double>>>& frames,
         const std::vector<std::vector<std::complex<double>>>& coefs,
         const std::vector<std::complex<double>>& y_g) {
        // frames: oldest first, each the full spectrum; coefs: [order][n_df_bins].
        if (coefs.empty()) throw dfn::ShapeError("deep_filter: no coefficients");
        const dfn::DfConfig cfg{static_cast<int>(coefs.size()), 0, 0.0,
                                static_cast<int>(coefs[0].size())};
        dfn::DfState<double> state(cfg);
        for (const auto& f : frames) {
          if (f.size() < coefs[0].size()) throw dfn::ShapeError("deep_filter: frame too short");
          state.Push(std::span(f).first(coefs[0].size()));
        }
        dfn::DfCoefSet<double> c(cfg.order, cfg.n_df_bins);
        for (int i = 0; i < cfg.order; ++i) {
          if (coefs[i].size() != coefs[0].size()) throw dfn::ShapeError("deep_filter: ragged coefs");
          for (int f = 0; f < cfg.n_df_bins; ++f) c.at(i, f) = coefs[i][f];
        }
        std::vector<std::complex<double>> out(y_g.size());
        dfn::ApplyDeepFilter<double>(state, y_g, c, out);
        return out;
      },
      py::arg("frames"), py::arg("coefs"), py::arg("y_g"),
      "Multi-frame complex filter over the newest frames.");

  // Weights and accounting.
  py::class_<dfn::ModelWeights, WeightsPtr>(m, "Weights")
      .def_static("load", [](const std::string& path) { return Share(dfn::LoadWeightsFile(path)); })
      .def_static("from_bytes",
                  [](const py::bytes& b) {
                    const std::string s = b;
                    return Share(dfn::LoadWeights(std::span(
                        reinterpret_cast<const std::uint8_t*>(s.data()), s.size())));
                  })
      .def_static(
          "random",
          [](std::uint64_t seed, const py::dict& cfg) {
            dfn::ModelConfig c;
            c.Apply(ToKeyValues(cfg));
            return Share(dfn::RandomWeights(c, seed));
          },
          py::arg("seed") = 0, py::arg("config") = py::dict())
      .def_static("identity", [] { return Share(dfn::IdentityWeights(dfn::ModelConfig{})); })
      .def("save", [](const dfn::ModelWeights& w, const std::string& path) { dfn::SaveWeightsFile(w, path); })
      .def("to_bytes",
           [](const dfn::ModelWeights& w) {
             const auto b = dfn::SaveWeights(w);
             return py::bytes(reinterpret_cast<const char*>(b.data()), b.size());
           })
      .def_property_readonly("metadata", [](const dfn::ModelWeights& w) { return ToDict(w.metadata()); })
      .def("names",
           [](const dfn::ModelWeights& w) {
             std::vector<std::string> n;
             for (const auto& t : w.tensors()) n.push_back(t.name);
             return n;
           })
      .def("tensor",
           [](const dfn::ModelWeights& w, const std::string& name) {
             const auto& t = w.Get(name);
             std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
             py::array_t<float> out(shape);
             std::copy(t.data().begin(), t.data().end(), out.mutable_data());
             return out;
           })
      .def_property_readonly("params", [](const dfn::ModelWeights& w) { return dfn::TensorElementSum(w); });

  m.def(
      "count",
      [](const std::optional<WeightsPtr>& w) {
        return Complexity(w ? dfn::CountParamsMacs(**w) : dfn::CountParamsMacs(dfn::ModelConfig{}));
      },
      py::arg("weights") = py::none(), "Parameter and MAC accounting.");

  // Streaming pipeline.
  py::class_<dfn::Enhancer>(m, "Enhancer")
      .def(py::init([](const WeightsPtr& w, bool post_filter, float beta) {
             return std::make_unique<dfn::Enhancer>(w, dfn::EnhancerOptions{post_filter, beta});
           }),
           py::arg("weights"), py::arg("post_filter") = false,
           py::arg("beta") = dfn::kDefaultPostFilterBeta)
      .def_property_readonly("hop", &dfn::Enhancer::hop)
      .def_property_readonly("latency", &dfn::Enhancer::latency_samples)
      .def(
          "process",
          [](dfn::Enhancer& e, const FloatArray& chunk) {
            const auto in = ToVector(chunk);
            std::vector<float> out(in.size());
            e.Process(in, out);
            return ToArray(out);
          },
          py::arg("chunk"), "hop samples in, hop samples out")
      .def("reset", &dfn::Enhancer::Reset)
      .def("audit", [](const dfn::Enhancer& e) {
        const auto a = e.Audit();
        return py::dict(py::arg("analysis") = a.analysis, py::arg("synthesis") = a.synthesis,
                        py::arg("output_buffer") = a.output_buffer,
                        py::arg("normalizer") = a.normalizer, py::arg("conv_history") = a.conv_history,
                        py::arg("gru_hidden") = a.gru_hidden, py::arg("df_ring") = a.df_ring,
                        py::arg("gain_delay_line") = a.gain_delay_line, py::arg("total") = a.total());
      });

  m.def(
      "enhance",
      [](const FloatArray& signal, const std::optional<WeightsPtr>& weights, bool post_filter,
         float beta, bool compensate) {
        const auto x = ToVector(signal);
        const auto w = OrRandom(weights);
        std::vector<float> y;
        {
          py::gil_scoped_release release;
          y = dfn::EnhanceSignal(w, x, {post_filter, beta}, compensate);
        }
        return ToArray(y);
      },
      py::arg("signal"), py::arg("weights") = py::none(), py::arg("post_filter") = false,
      py::arg("beta") = dfn::kDefaultPostFilterBeta, py::arg("compensate") = true,
      "Enhances a 48 kHz mono signal; aligned to the input when compensated.");

  m.def(
      "benchmark",
      [](const std::optional<WeightsPtr>& weights, double duration, int runs, std::uint64_t seed) {
        const auto w = OrRandom(weights);
        dfn::BenchReport r;
        {
          py::gil_scoped_release release;
          r = dfn::RunBenchmark(w, duration, runs, seed);
        }
        return py::dict(py::arg("audio_seconds") = r.audio_seconds,
                        py::arg("wall_seconds") = r.wall_seconds, py::arg("rtf") = r.rtf,
                        py::arg("run_rtfs") = r.run_rtfs,
                        py::arg("frames_processed") = r.frames_processed,
                        py::arg("params") = r.params, py::arg("macs_per_second") = r.macs_per_second);
      },
      py::arg("weights") = py::none(), py::arg("duration") = 10.0, py::arg("runs") = 5,
      py::arg("seed") = 0);

  // Losses and schedules.
  m.def(
      "mr_spec_loss",
      [](const FloatArray& y, const FloatArray& s, const py::dict& cfg) {
        dfn::LossConfig c;
        c.Apply(ToKeyValues(cfg));
        return dfn::MrSpecLoss(ToVector(y), ToVector(s), c);
      },
      py::arg("y"), py::arg("s"), py::arg("config") = py::dict());
  m.def(
      "combined_loss",
      [](const FloatArray& y, const FloatArray& s, const py::dict& cfg) {
        dfn::LossConfig c;
        c.Apply(ToKeyValues(cfg));
        const auto r = dfn::CombinedLoss(ToVector(y), ToVector(s), c);
        return py::dict(py::arg("spec") = r.spec, py::arg("mr") = r.mr,
                        py::arg("combined") = r.combined);
      },
      py::arg("y"), py::arg("s"), py::arg("config") = py::dict());
  m.def(
      "schedule_at",
      [](std::int64_t iter, const py::dict& cfg) {
        dfn::ScheduleConfig c;
        c.Apply(ToKeyValues(cfg));
        const auto p = dfn::ScheduleAt(iter, c);
        return py::dict(py::arg("iter") = p.iter, py::arg("lr") = p.lr, py::arg("wd") = p.wd,
                        py::arg("batch_size") = p.batch_size);
      },
      py::arg("iter"), py::arg("config") = py::dict());
  m.def(
      "batch_stages",
      [](const py::dict& cfg) {
        dfn::ScheduleConfig c;
        c.Apply(ToKeyValues(cfg));
        return c.BatchStages();
      },
      py::arg("config") = py::dict());

  // Augmentation.
  m.def(
      "clip_to_snr",
      [](const FloatArray& x, double snr_db) {
        const auto r = dfn::ClipToSnr(ToVector(x), snr_db);
        return py::dict(py::arg("signal") = ToArray(r.signal), py::arg("threshold") = r.threshold,
                        py::arg("snr_db") = r.snr_db, py::arg("reached") = r.reached);
      },
      py::arg("signal"), py::arg("snr_db"));
  m.def(
      "mix",
      [](const FloatArray& speech, const FloatArray& noise, double snr_db, std::uint64_t seed,
         std::uint64_t index, const std::optional<FloatArray>& rir, const py::dict& cfg) {
        dfn::AugmentSpec spec;
        spec.Apply(ToKeyValues(cfg));
        const auto s = ToVector(speech);
        const auto n = ToVector(noise);
        std::optional<std::vector<float>> h;
        if (rir) h = ToVector(*rir);
        auto rng = dfn::PairRng(seed, index);
        dfn::MixturePair p;
        {
          py::gil_scoped_release release;
          p = dfn::Mix(s, n, h ? &*h : nullptr, snr_db, spec, rng);
        }
        return PairDict(p);
      },
      py::arg("speech"), py::arg("noise"), py::arg("snr_db"), py::arg("seed") = 0,
      py::arg("index") = 0, py::arg("rir") = py::none(), py::arg("config") = py::dict(),
      "Noisy/target pair from one (seed, index) RNG stream.");

  // WAV files.
  m.def(
      "read_wav",
      [](const std::string& path) {
        const auto d = dfn::ReadWav(path);
        return py::make_tuple(ToArray(d.samples), d.info.sample_rate, d.info.channels);
      },
      py::arg("path"), "Returns (interleaved float32 samples, sample_rate, channels).");
  m.def(
      "write_wav",
      [](const std::string& path, const FloatArray& samples, int sample_rate,
         const std::string& encoding) {
        dfn::WavEncoding enc;
        if (encoding == "float32") enc = dfn::WavEncoding::kFloat32;
        else if (encoding == "pcm16") enc = dfn::WavEncoding::kPcm16;
        else throw dfn::ConfigError("write_wav: encoding must be float32 or pcm16");
        dfn::WriteWav(path, ToVector(samples), sample_rate, enc);
      },
      py::arg("path"), py::arg("samples"), py::arg("sample_rate") = 48000,
      py::arg("encoding") = "float32");
}
