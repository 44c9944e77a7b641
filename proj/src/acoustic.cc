// Copyright 2026 The prosocoref Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "prosocoref/acoustic.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "binary_io.h"
#include "prosocoref/errors.h"

namespace prosocoref {

namespace {

// A shorter lag wins over the global maximum when its peak is at least this
// fraction of it. Keeps whole-period multiples from producing octave errors.
constexpr double kOctaveTolerance = 0.95;

}  // namespace

FrameGeometry FrameGeometryFor(int sample_rate) {
  return {static_cast<int>(std::lround(kFrameLength * sample_rate)),
          static_cast<int>(std::lround(kFrameHop * sample_rate))};
}

int NumFrames(size_t n_samples, int sample_rate) {
  FrameGeometry g = FrameGeometryFor(sample_rate);
  if (n_samples < static_cast<size_t>(g.frame_samples)) return 1;
  return static_cast<int>((n_samples - g.frame_samples) / g.hop_samples) + 1;
}

std::vector<std::vector<double>> FrameSignal(const AudioSignal &signal) {
  if (signal.samples.empty()) {
    throw InvalidArgument("FrameSignal: empty signal");
  }
  if (signal.sample_rate < 8000) {
    throw InvalidArgument("FrameSignal: sample rate below 8000 Hz");
  }
  FrameGeometry g = FrameGeometryFor(signal.sample_rate);
  const int n = NumFrames(signal.samples.size(), signal.sample_rate);
  std::vector<std::vector<double>> windows(n);
  for (int f = 0; f < n; ++f) {
    auto &w = windows[f];
    w.assign(g.frame_samples, 0.0);
    size_t offset = static_cast<size_t>(f) * g.hop_samples;
    size_t avail = std::min<size_t>(g.frame_samples,
                                    signal.samples.size() - offset);
    for (size_t i = 0; i < avail; ++i) w[i] = signal.samples[offset + i];
  }
  return windows;
}

PitchEstimate AutocorrelationPitch(std::span<const double> window, int rate) {
  PitchEstimate unvoiced;
  const int n = static_cast<int>(window.size());
  const int min_lag = std::max(1, static_cast<int>(rate / kMaxPitchHz));
  const int max_lag = std::min(static_cast<int>(std::ceil(rate / kMinPitchHz)),
                               n / 2);
  if (max_lag <= min_lag) return unvoiced;

  double mean = 0;
  for (double x : window) mean += x;
  mean /= n;
  std::vector<double> x(n);
  std::vector<double> energy_prefix(n + 1, 0.0);
  for (int i = 0; i < n; ++i) {
    x[i] = window[i] - mean;
    energy_prefix[i + 1] = energy_prefix[i] + x[i] * x[i];
  }
  if (energy_prefix[n] <= 1e-20) return unvoiced;

  // r[lag] for lag in [min_lag - 1, max_lag + 1], the outer two only serve as
  // neighbours for peak picking and interpolation.
  const int lo = min_lag - 1;
  const int hi = max_lag + 1;
  std::vector<double> r(hi - lo + 1, 0.0);
  for (int lag = lo; lag <= hi; ++lag) {
    if (lag < 1 || lag >= n) continue;
    double cross = 0;
    for (int i = 0; i + lag < n; ++i) cross += x[i] * x[i + lag];
    double e_head = energy_prefix[n - lag];
    double e_tail = energy_prefix[n] - energy_prefix[lag];
    double denom = std::sqrt(e_head * e_tail);
    r[lag - lo] = denom > 1e-20 ? cross / denom : 0.0;
  }
  auto at = [&](int lag) { return r[lag - lo]; };

  int best = min_lag;
  for (int lag = min_lag; lag <= max_lag; ++lag) {
    if (at(lag) > at(best)) best = lag;
  }
  const double r_max = at(best);
  int chosen = best;
  for (int lag = min_lag; lag < best; ++lag) {
    bool is_peak = at(lag) >= at(lag - 1) && at(lag) >= at(lag + 1);
    if (is_peak && at(lag) >= kOctaveTolerance * r_max) {
      chosen = lag;
      break;
    }
  }
  const double r_peak = at(chosen);

  PitchEstimate est;
  est.voicing = std::clamp(r_peak, 0.0, 1.0);
  if (r_peak < kVoicingThreshold) {
    est.f0 = 0;
    est.hnr = kMinHnrDb;
    return est;
  }
  // Parabolic refinement of the peak position.
  double left = at(chosen - 1), right = at(chosen + 1);
  double curvature = left - 2 * r_peak + right;
  double shift = 0;
  if (curvature < 0) {
    shift = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
  }
  est.f0 = rate / (chosen + shift);
  if (r_peak >= 1.0) {
    est.hnr = kMaxHnrDb;
  } else {
    est.hnr = std::clamp(10.0 * std::log10(r_peak / (1.0 - r_peak)),
                         kMinHnrDb, kMaxHnrDb);
  }
  return est;
}

EnergyEstimate FrameEnergy(std::span<const double> window) {
  if (window.empty()) return {};
  double sum = 0;
  for (double x : window) sum += x * x;
  EnergyEstimate e;
  e.rms = std::sqrt(sum / static_cast<double>(window.size()));
  e.loudness = std::pow(e.rms, 0.3);
  return e;
}

std::vector<double> SmoothF0(std::span<const double> track) {
  std::vector<double> out(track.begin(), track.end());
  const int n = static_cast<int>(track.size());
  int run_start = 0;
  while (run_start < n) {
    if (track[run_start] == 0) {
      ++run_start;
      continue;
    }
    int run_end = run_start;
    while (run_end + 1 < n && track[run_end + 1] != 0) ++run_end;
    for (int i = run_start; i <= run_end; ++i) {
      int half = std::min({2, i - run_start, run_end - i});
      std::vector<double> window(track.begin() + (i - half),
                                 track.begin() + (i + half + 1));
      std::nth_element(window.begin(), window.begin() + half, window.end());
      out[i] = window[half];
    }
    run_start = run_end + 1;
  }
  return out;
}

FrameSequence ExtractFeatures(const AudioSignal &signal) {
  auto windows = FrameSignal(signal);
  FrameSequence seq;
  seq.raw.resize(windows.size());
  std::vector<double> f0(windows.size());
  for (size_t i = 0; i < windows.size(); ++i) {
    PitchEstimate p = AutocorrelationPitch(windows[i], signal.sample_rate);
    EnergyEstimate e = FrameEnergy(windows[i]);
    FrameFeatures &ff = seq.raw[i];
    f0[i] = p.f0;
    ff.rms = e.rms;
    ff.loudness = e.loudness;
    ff.voicing = p.voicing;
    ff.hnr = p.hnr;
  }
  std::vector<double> smoothed = SmoothF0(f0);
  for (size_t i = 0; i < windows.size(); ++i) seq.raw[i].f0 = smoothed[i];

  const size_t n = seq.raw.size();
  seq.normalized.assign(n, FeatureRow{});
  for (int d = 0; d < kNumAcousticFeatures; ++d) {
    double mean = 0;
    for (const auto &ff : seq.raw) mean += ff.AsArray()[d];
    mean /= static_cast<double>(n);
    double var = 0;
    for (const auto &ff : seq.raw) {
      double diff = ff.AsArray()[d] - mean;
      var += diff * diff;
    }
    var /= static_cast<double>(n);
    double sd = std::sqrt(var);
    for (size_t i = 0; i < n; ++i) {
      double z = sd > 1e-9 ? (seq.raw[i].AsArray()[d] - mean) / sd : 0.0;
      // Stored at float precision so the feature cache round-trips exactly.
      seq.normalized[i][d] = static_cast<float>(z);
    }
  }
  return seq;
}

std::string EncodeFeatureCache(const std::vector<CachedFeatures> &entries) {
  std::string out = "PCF1";
  AppendLE<uint32_t>(&out, static_cast<uint32_t>(entries.size()));
  for (const auto &entry : entries) {
    AppendString(&out, entry.doc_id);
    AppendLE<uint32_t>(&out, static_cast<uint32_t>(entry.rows.size()));
    AppendLE<uint32_t>(&out, kNumAcousticFeatures);
    for (const auto &row : entry.rows) {
      for (double v : row) AppendF32(&out, static_cast<float>(v));
    }
  }
  return out;
}

std::vector<CachedFeatures> DecodeFeatureCache(const std::string &bytes) {
  ByteReader in(bytes, "feature cache");
  in.Expect("PCF1");
  uint32_t count = in.Read<uint32_t>();
  std::vector<CachedFeatures> entries;
  for (uint32_t e = 0; e < count; ++e) {
    CachedFeatures entry;
    entry.doc_id = in.ReadString();
    uint32_t rows = in.Read<uint32_t>();
    uint32_t cols = in.Read<uint32_t>();
    if (cols != kNumAcousticFeatures) {
      throw ParseError("feature cache: expected " +
                       std::to_string(kNumAcousticFeatures) + " columns");
    }
    entry.rows.resize(rows);
    for (auto &row : entry.rows) {
      for (double &v : row) v = in.ReadF32();
    }
    entries.push_back(std::move(entry));
  }
  in.ExpectEnd();
  return entries;
}

}  // namespace prosocoref
