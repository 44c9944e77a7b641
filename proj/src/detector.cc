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

#include "prosocoref/detector.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "binary_io.h"
#include "prosocoref/errors.h"

namespace prosocoref {

namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

void CheckShape(const ProsodyModel &model, const WordWindowMatrix &m) {
  const CnnShape &s = model.shape;
  if (m.rows != s.rows || m.width != s.width ||
      m.values.size() != static_cast<size_t>(s.rows * s.width)) {
    throw InvalidArgument("input matrix is " + std::to_string(m.rows) + "x" +
                          std::to_string(m.width) + ", model expects " +
                          std::to_string(s.rows) + "x" +
                          std::to_string(s.width));
  }
  if (s.conv2_length() < 1) {
    throw InvalidArgument("model kernels are wider than its input");
  }
}

// im2col: out[(r * k + j), t] = in[r, t + j] for t < length.
RowMatrix Unfold(const RowMatrix &in, int k, int length) {
  RowMatrix out(in.rows() * k, length);
  for (Eigen::Index r = 0; r < in.rows(); ++r) {
    for (int j = 0; j < k; ++j) {
      out.row(r * k + j) = in.row(r).segment(j, length);
    }
  }
  return out;
}

// Adjoint of Unfold.
RowMatrix Fold(const RowMatrix &cols, int rows, int k, int width) {
  RowMatrix out = RowMatrix::Zero(rows, width);
  const int length = static_cast<int>(cols.cols());
  for (int r = 0; r < rows; ++r) {
    for (int j = 0; j < k; ++j) {
      out.row(r).segment(j, length) += cols.row(r * k + j);
    }
  }
  return out;
}

// Intermediate values of one forward pass.
struct Activations {
  RowMatrix cols1, z1, a1;
  RowMatrix cols2, z2;
  Eigen::VectorXd pooled;
  std::vector<int> argmax;
  std::array<double, 2> logits{};
  std::array<double, 2> probs{};
};

Activations Forward(const ProsodyModel &model, const WordWindowMatrix &m) {
  CheckShape(model, m);
  const CnnShape &s = model.shape;
  const CnnParams &p = model.params;
  Activations act;
  ConstMatrixMap input(m.values.data(), s.rows, s.width);
  act.cols1 = Unfold(input, s.conv1_width, s.conv1_length());
  ConstMatrixMap w1(p.conv1_w.data(), s.conv1_filters,
                    s.rows * s.conv1_width);
  act.z1 = w1 * act.cols1;
  act.z1.colwise() += ConstVectorMap(p.conv1_b.data(), s.conv1_filters);
  act.a1 = act.z1.cwiseMax(0.0);

  act.cols2 = Unfold(act.a1, s.conv2_width, s.conv2_length());
  ConstMatrixMap w2(p.conv2_w.data(), s.conv2_filters,
                    s.conv1_filters * s.conv2_width);
  act.z2 = w2 * act.cols2;
  act.z2.colwise() += ConstVectorMap(p.conv2_b.data(), s.conv2_filters);

  act.pooled.resize(s.conv2_filters);
  act.argmax.resize(s.conv2_filters);
  for (int k = 0; k < s.conv2_filters; ++k) {
    Eigen::Index best;
    double v = act.z2.row(k).maxCoeff(&best);
    act.argmax[k] = static_cast<int>(best);
    act.pooled[k] = std::max(v, 0.0);  // max(ReLU(z)) == ReLU(max(z))
  }
  ConstMatrixMap fc(p.fc_w.data(), 2, s.conv2_filters);
  Eigen::Vector2d logits = fc * act.pooled;
  logits += Eigen::Vector2d(p.fc_b[0], p.fc_b[1]);
  act.logits = {logits[0], logits[1]};
  double top = std::max(logits[0], logits[1]);
  double e0 = std::exp(logits[0] - top), e1 = std::exp(logits[1] - top);
  act.probs = {e0 / (e0 + e1), e1 / (e0 + e1)};
  return act;
}

size_t TensorSize(const CnnShape &s, const char *name) {
  std::string n = name;
  if (n == "conv1_w") return size_t(s.conv1_filters) * s.rows * s.conv1_width;
  if (n == "conv1_b") return s.conv1_filters;
  if (n == "conv2_w")
    return size_t(s.conv2_filters) * s.conv1_filters * s.conv2_width;
  if (n == "conv2_b") return s.conv2_filters;
  if (n == "fc_w") return size_t(2) * s.conv2_filters;
  return 2;
}

bool IsBias(const char *name) { return std::string(name).ends_with("_b"); }

}  // namespace

const char *EventKindName(EventKind kind) {
  return kind == EventKind::kAccent ? "accent" : "boundary";
}

EventKind ParseEventKind(const std::string &name) {
  if (name == "accent") return EventKind::kAccent;
  if (name == "boundary") return EventKind::kBoundary;
  throw InvalidArgument("unknown event kind '" + name + "'");
}

CnnParams CnnParams::Zeros(const CnnShape &shape) {
  CnnParams p;
  auto tensors = p.Tensors();
  for (size_t i = 0; i < tensors.size(); ++i) {
    tensors[i]->assign(TensorSize(shape, kNames[i]), 0.0);
  }
  return p;
}

ProsodyModel ProsodyModel::Zeros(const CnnShape &shape, EventKind event) {
  ProsodyModel m;
  m.shape = shape;
  m.event = event;
  m.params = CnnParams::Zeros(shape);
  return m;
}

std::vector<FrameRange> TokenFrameRanges(const Document &doc,
                                         const FrameSequence &frames) {
  if (frames.size() < 1) throw InvalidArgument("empty frame sequence");
  std::vector<FrameRange> ranges;
  ranges.reserve(doc.tokens.size());
  for (const Token &t : doc.tokens) {
    ranges.push_back(WordFrameRange(t, frames.hop, frames.size()));
  }
  return ranges;
}

int MeanWordFrames(std::span<const FrameRange> ranges) {
  if (ranges.empty()) return 1;
  double total = 0;
  for (const FrameRange &r : ranges) total += r.size();
  return std::max(1, static_cast<int>(std::lround(total / ranges.size())));
}

WordWindowMatrix BuildWindow(const FrameSequence &frames,
                             std::span<const FrameRange> ranges,
                             int mean_word_frames, int tok_idx) {
  const int n = static_cast<int>(ranges.size());
  if (tok_idx < 0 || tok_idx >= n) {
    throw InvalidArgument("token index " + std::to_string(tok_idx) +
                          " out of range");
  }
  // A segment is either a frame range or a run of zero columns.
  struct Segment {
    int first_frame;
    int length;
    bool zero;
  };
  auto segment = [&](int i) {
    if (i < 0 || i >= n) return Segment{0, mean_word_frames, true};
    return Segment{ranges[i].begin, ranges[i].size(), false};
  };
  const Segment segs[3] = {segment(tok_idx - 1), segment(tok_idx),
                           segment(tok_idx + 1)};
  const int left = segs[0].length, cur = segs[1].length;
  const int total = left + cur + segs[2].length;
  const int width = kWindowWidth;

  // Source column src_begin of the concatenation lands on dest column
  // dest_begin; everything outside the data is zero padding.
  int src_begin = 0, dest_begin = 0;
  if (total <= width) {
    dest_begin = (width - total) / 2;
  } else if (cur <= width) {
    src_begin = std::clamp((total - width) / 2, left + cur - width, left);
  } else {
    src_begin = left + (cur - width) / 2;
  }

  WordWindowMatrix m;
  m.values.assign(static_cast<size_t>(kInputRows) * width, 0.0);
  for (int d = 0; d < width; ++d) {
    int src = d - dest_begin + src_begin;
    if (src < 0 || src >= total) continue;
    int which = 0;
    while (src >= segs[which].length) src -= segs[which++].length;
    if (which == 1) m.at(kPositionRow, d) = 1.0;
    if (segs[which].zero) continue;
    const FeatureRow &row = frames.normalized[segs[which].first_frame + src];
    for (int f = 0; f < kNumAcousticFeatures; ++f) m.at(f, d) = row[f];
  }
  int span_begin = std::max(0, dest_begin + left - src_begin);
  int span_end = std::min(width, dest_begin + left + cur - src_begin);
  m.current_span = {span_begin, span_end};
  return m;
}

WordWindowMatrix BuildWindow(const Document &doc, const FrameSequence &frames,
                             int tok_idx) {
  std::vector<FrameRange> ranges = TokenFrameRanges(doc, frames);
  return BuildWindow(frames, ranges, MeanWordFrames(ranges), tok_idx);
}

std::array<double, 2> CnnForward(const ProsodyModel &model,
                                 const WordWindowMatrix &m) {
  return Forward(model, m).probs;
}

CnnGradient CnnBackward(const ProsodyModel &model, const WordWindowMatrix &m,
                        bool gold) {
  Activations act = Forward(model, m);
  const CnnShape &s = model.shape;
  const CnnParams &p = model.params;
  CnnGradient g;
  g.probs = act.probs;
  // log-softmax keeps the loss finite for saturated logits.
  double top = std::max(act.logits[0], act.logits[1]);
  double lse = top + std::log(std::exp(act.logits[0] - top) +
                              std::exp(act.logits[1] - top));
  g.loss = lse - act.logits[gold ? 1 : 0];
  g.params = CnnParams::Zeros(s);

  Eigen::Vector2d dlogits(act.probs[0], act.probs[1]);
  dlogits[gold ? 1 : 0] -= 1.0;
  MatrixMap(g.params.fc_w.data(), 2, s.conv2_filters) =
      dlogits * act.pooled.transpose();
  g.params.fc_b = {dlogits[0], dlogits[1]};
  Eigen::VectorXd dpooled =
      ConstMatrixMap(p.fc_w.data(), 2, s.conv2_filters).transpose() * dlogits;

  // Max pooling routes each filter's gradient to its argmax position, and
  // only through an active ReLU.
  ConstMatrixMap w2(p.conv2_w.data(), s.conv2_filters,
                    s.conv1_filters * s.conv2_width);
  MatrixMap dw2(g.params.conv2_w.data(), s.conv2_filters,
                s.conv1_filters * s.conv2_width);
  RowMatrix dcols2 = RowMatrix::Zero(act.cols2.rows(), act.cols2.cols());
  for (int k = 0; k < s.conv2_filters; ++k) {
    int t = act.argmax[k];
    if (act.z2(k, t) <= 0) continue;
    double dz = dpooled[k];
    dw2.row(k) = dz * act.cols2.col(t).transpose();
    g.params.conv2_b[k] = dz;
    dcols2.col(t) += dz * w2.row(k).transpose();
  }
  RowMatrix da1 =
      Fold(dcols2, s.conv1_filters, s.conv2_width, s.conv1_length());
  RowMatrix dz1 = (act.z1.array() > 0).select(da1, 0.0);

  MatrixMap(g.params.conv1_w.data(), s.conv1_filters, s.rows * s.conv1_width) =
      dz1 * act.cols1.transpose();
  Eigen::VectorXd db1 = dz1.rowwise().sum();
  std::copy(db1.data(), db1.data() + db1.size(), g.params.conv1_b.begin());

  ConstMatrixMap w1(p.conv1_w.data(), s.conv1_filters, s.rows * s.conv1_width);
  RowMatrix dcols1 = w1.transpose() * dz1;
  RowMatrix dinput = Fold(dcols1, s.rows, s.conv1_width, s.width);
  g.input.assign(dinput.data(), dinput.data() + dinput.size());
  return g;
}

ProsodyModel TrainDetector(std::span<const LabeledWindow> data,
                           const TrainConfig &cfg, EventKind event,
                           const CnnShape &shape,
                           std::vector<double> *epoch_loss) {
  if (cfg.epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (!(cfg.learning_rate > 0)) {
    throw InvalidArgument("learning_rate must be > 0");
  }
  if (cfg.batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (data.empty()) throw InvalidArgument("empty training corpus");
  std::vector<size_t> pos, neg;
  for (size_t i = 0; i < data.size(); ++i) {
    (data[i].label ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty()) {
    throw InvalidArgument("training corpus has a single class");
  }
  const std::vector<size_t> &major = pos.size() >= neg.size() ? pos : neg;
  const std::vector<size_t> &minor = pos.size() >= neg.size() ? neg : pos;

  std::mt19937_64 rng(cfg.seed);
  ProsodyModel model = ProsodyModel::Zeros(shape, event);
  std::uniform_real_distribution<double> init(-0.05, 0.05);
  for (auto *t : model.params.Tensors()) {
    for (double &w : *t) w = init(rng);
  }

  if (epoch_loss) epoch_loss->clear();
  std::vector<size_t> order;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Balanced epoch: all majority examples plus the minority class repeated
    // and topped up by a random draw to the same count.
    order = major;
    for (size_t r = 0; r + minor.size() <= major.size(); r += minor.size()) {
      order.insert(order.end(), minor.begin(), minor.end());
    }
    std::vector<size_t> extra = minor;
    std::shuffle(extra.begin(), extra.end(), rng);
    extra.resize(major.size() % minor.size());
    order.insert(order.end(), extra.begin(), extra.end());
    std::shuffle(order.begin(), order.end(), rng);

    double loss_sum = 0;
    for (size_t b = 0; b < order.size(); b += cfg.batch_size) {
      size_t e = std::min(order.size(), b + cfg.batch_size);
      CnnParams grad = CnnParams::Zeros(shape);
      auto grad_tensors = grad.Tensors();
      for (size_t i = b; i < e; ++i) {
        const LabeledWindow &ex = data[order[i]];
        CnnGradient g = CnnBackward(model, ex.window, ex.label);
        loss_sum += g.loss;
        auto parts = g.params.Tensors();
        for (size_t k = 0; k < parts.size(); ++k) {
          auto &acc = *grad_tensors[k];
          for (size_t j = 0; j < acc.size(); ++j) acc[j] += (*parts[k])[j];
        }
      }
      const double scale = 1.0 / static_cast<double>(e - b);
      auto weights = model.params.Tensors();
      for (size_t k = 0; k < weights.size(); ++k) {
        auto &w = *weights[k];
        const auto &gt = *grad_tensors[k];
        const double decay = IsBias(CnnParams::kNames[k]) ? 0.0 : cfg.l2;
        for (size_t j = 0; j < w.size(); ++j) {
          w[j] -= cfg.learning_rate * (gt[j] * scale + decay * w[j]);
        }
      }
    }
    if (epoch_loss) epoch_loss->push_back(loss_sum / order.size());
  }
  for (auto *t : model.params.Tensors()) {
    for (double &w : *t) w = static_cast<float>(w);
  }
  return model;
}

std::vector<bool> PredictDocument(const ProsodyModel &model, Document *doc,
                                  const FrameSequence &frames) {
  if (frames.size() < 1) {
    throw InvalidArgument("document '" + doc->doc_id + "' has no frames");
  }
  std::vector<FrameRange> ranges = TokenFrameRanges(*doc, frames);
  const int mean = MeanWordFrames(ranges);
  std::vector<bool> out(doc->tokens.size());
  for (size_t i = 0; i < doc->tokens.size(); ++i) {
    auto probs = CnnForward(
        model, BuildWindow(frames, ranges, mean, static_cast<int>(i)));
    out[i] = probs[1] >= 0.5;
    Token &t = doc->tokens[i];
    (model.event == EventKind::kAccent ? t.pred_accent : t.pred_boundary) =
        static_cast<bool>(out[i]);
  }
  return out;
}

DetectorScore EvaluateDetector(const std::vector<bool> &pred,
                               const std::vector<bool> &gold) {
  if (pred.size() != gold.size()) {
    throw InvalidArgument("prediction and gold lengths differ");
  }
  size_t correct = 0, pos = 0, pos_ok = 0, neg = 0, neg_ok = 0;
  for (size_t i = 0; i < gold.size(); ++i) {
    bool ok = pred[i] == gold[i];
    correct += ok;
    if (gold[i]) {
      ++pos;
      pos_ok += ok;
    } else {
      ++neg;
      neg_ok += ok;
    }
  }
  DetectorScore s;
  s.count = gold.size();
  s.accuracy = gold.empty() ? 1.0 : double(correct) / gold.size();
  s.positive_accuracy = pos == 0 ? 1.0 : double(pos_ok) / pos;
  s.negative_accuracy = neg == 0 ? 1.0 : double(neg_ok) / neg;
  return s;
}

std::string EncodeProsodyModel(const ProsodyModel &model) {
  std::string out = "PMD1";
  out.push_back(static_cast<char>(model.event));
  AppendLE<uint32_t>(&out, model.version);
  const CnnShape &s = model.shape;
  for (int v : {s.rows, s.width, s.conv1_filters, s.conv1_width,
                s.conv2_filters, s.conv2_width}) {
    AppendLE<uint32_t>(&out, static_cast<uint32_t>(v));
  }
  auto shapes = [&s](const std::string &name) -> std::vector<uint32_t> {
    if (name == "conv1_w") {
      return {uint32_t(s.conv1_filters), uint32_t(s.rows),
              uint32_t(s.conv1_width)};
    }
    if (name == "conv2_w") {
      return {uint32_t(s.conv2_filters), uint32_t(s.conv1_filters),
              uint32_t(s.conv2_width)};
    }
    if (name == "fc_w") return {2u, uint32_t(s.conv2_filters)};
    if (name == "conv1_b") return {uint32_t(s.conv1_filters)};
    if (name == "conv2_b") return {uint32_t(s.conv2_filters)};
    return {2u};
  };
  auto tensors = model.params.Tensors();
  for (size_t k = 0; k < tensors.size(); ++k) {
    auto dims = shapes(CnnParams::kNames[k]);
    AppendLE<uint32_t>(&out, static_cast<uint32_t>(dims.size()));
    for (uint32_t d : dims) AppendLE<uint32_t>(&out, d);
    for (double w : *tensors[k]) AppendF32(&out, static_cast<float>(w));
  }
  return out;
}

ProsodyModel DecodeProsodyModel(const std::string &bytes) {
  ByteReader in(bytes, "prosody model");
  in.Expect("PMD1");
  uint8_t kind = in.Read<uint8_t>();
  if (kind > 1) throw ParseError("prosody model: bad event kind");
  ProsodyModel model;
  model.event = static_cast<EventKind>(kind);
  model.version = in.Read<uint32_t>();
  CnnShape &s = model.shape;
  for (int *v : {&s.rows, &s.width, &s.conv1_filters, &s.conv1_width,
                 &s.conv2_filters, &s.conv2_width}) {
    *v = static_cast<int>(in.Read<uint32_t>());
    if (*v < 1 || *v > 100000) {
      throw ParseError("prosody model: implausible dimension");
    }
  }
  if (s.conv2_length() < 1) throw ParseError("prosody model: bad geometry");
  model.params = CnnParams::Zeros(s);
  auto tensors = model.params.Tensors();
  for (size_t k = 0; k < tensors.size(); ++k) {
    uint32_t ndim = in.Read<uint32_t>();
    size_t count = 1;
    for (uint32_t d = 0; d < ndim; ++d) count *= in.Read<uint32_t>();
    if (count != tensors[k]->size()) {
      throw ParseError(std::string("prosody model: tensor ") +
                       CnnParams::kNames[k] + " has the wrong size");
    }
    for (double &w : *tensors[k]) {
      w = in.ReadF32();
      if (!std::isfinite(w)) {
        throw ParseError("prosody model: non-finite weight");
      }
    }
  }
  in.ExpectEnd();
  return model;
}

void SaveProsodyModel(const ProsodyModel &model, const std::string &path) {
  WriteFile(path, EncodeProsodyModel(model));
}

ProsodyModel LoadProsodyModel(const std::string &path) {
  return DecodeProsodyModel(ReadFile(path));
}

}  // namespace prosocoref
