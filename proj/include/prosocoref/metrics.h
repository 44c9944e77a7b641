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

// Coreference metrics: MUC, B-cubed, entity-based CEAF and the CoNLL average.
//
// Mentions are matched by exact (document, start, end). Scoring a corpus is
// done by passing the union of all document partitions; the formulas then sum
// numerators and denominators across documents before dividing, the same
// aggregation as the reference scorer.

#ifndef PROSOCOREF_METRICS_H_
#define PROSOCOREF_METRICS_H_

#include <compare>
#include <string>
#include <utility>
#include <vector>

#include "prosocoref/corpus.h"

namespace prosocoref {

struct MentionKey {
  std::string doc_id;
  int start = 0;
  int end = 0;

  auto operator<=>(const MentionKey &other) const = default;
};

struct Partition {
  std::vector<std::vector<MentionKey>> chains;
};

// Throws InvalidArgument on empty or overlapping chains.
void ValidatePartition(const Partition &p);

// Gold chains of one or more documents (NPs without a chain id become
// singletons).
Partition GoldPartition(const Document &doc);
Partition GoldPartition(const std::vector<Document> &docs);

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct MetricReport {
  Prf muc, b3, ceafe;
  double conll = 0;  // 0-100
};

// F = 2PR / (P + R), 0 when P + R = 0.
double F1(double precision, double recall);

Prf Muc(const Partition &key, const Partition &response);
Prf BCubed(const Partition &key, const Partition &response);
Prf CeafE(const Partition &key, const Partition &response);
MetricReport Conll(const Partition &key, const Partition &response);

// Maximum-weight assignment on a dense rows x cols weight matrix (Hungarian
// method). Returns the total weight and, per row, the matched column or -1.
std::pair<double, std::vector<int>> MaxWeightMatching(
    const std::vector<std::vector<double>> &weights);

// Multi-line aligned table.
std::string FormatReport(const MetricReport &report);
// "muc_p=... muc_r=... ... conll=..." on one line.
std::string FormatReportLine(const MetricReport &report);

}  // namespace prosocoref

#endif  // PROSOCOREF_METRICS_H_
