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

#include "prosocoref/metrics.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "prosocoref/errors.h"

namespace prosocoref {

namespace {

using ChainIndex = std::map<MentionKey, int>;

ChainIndex IndexChains(const Partition &p) {
  ChainIndex index;
  for (size_t c = 0; c < p.chains.size(); ++c) {
    for (const MentionKey &m : p.chains[c]) index[m] = static_cast<int>(c);
  }
  return index;
}

// Numerator and denominator of MUC recall of `key` against `response`.
std::pair<double, double> MucCounts(const Partition &key,
                                    const Partition &response) {
  ChainIndex in_response = IndexChains(response);
  double num = 0, den = 0;
  for (const auto &chain : key.chains) {
    std::set<int> parts;
    int unaligned = 0;
    for (const MentionKey &m : chain) {
      auto it = in_response.find(m);
      if (it == in_response.end()) {
        ++unaligned;
      } else {
        parts.insert(it->second);
      }
    }
    double size = static_cast<double>(chain.size());
    num += size - static_cast<double>(parts.size() + unaligned);
    den += size - 1;
  }
  return {num, den};
}

// Numerator and denominator of B-cubed recall.
std::pair<double, double> BCubedCounts(const Partition &key,
                                       const Partition &response) {
  ChainIndex in_response = IndexChains(response);
  double num = 0, den = 0;
  for (const auto &chain : key.chains) {
    // Mentions missing from the response contribute nothing.
    std::map<int, int> overlap;
    for (const MentionKey &m : chain) {
      auto it = in_response.find(m);
      if (it != in_response.end()) ++overlap[it->second];
    }
    double size = static_cast<double>(chain.size());
    for (const auto &[r, count] : overlap) num += double(count) * count / size;
    den += size;
  }
  return {num, den};
}

double Ratio(double num, double den) { return den > 0 ? num / den : 0.0; }

Prf MakePrf(double precision, double recall) {
  return {precision, recall, F1(precision, recall)};
}

// Disjoint-set forest for grouping overlapping chains.
class UnionFind {
 public:
  explicit UnionFind(size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  size_t Find(size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void Union(size_t a, size_t b) { parent_[Find(a)] = Find(b); }

 private:
  std::vector<size_t> parent_;
};

}  // namespace

void ValidatePartition(const Partition &p) {
  std::set<MentionKey> seen;
  for (size_t c = 0; c < p.chains.size(); ++c) {
    if (p.chains[c].empty()) {
      throw InvalidArgument("chain " + std::to_string(c) + " is empty");
    }
    for (const MentionKey &m : p.chains[c]) {
      if (!seen.insert(m).second) {
        throw InvalidArgument("mention " + m.doc_id + "[" +
                              std::to_string(m.start) + "," +
                              std::to_string(m.end) +
                              "] appears in more than one chain");
      }
    }
  }
}

Partition GoldPartition(const Document &doc) {
  Partition p;
  for (const auto &chain : GoldChains(doc)) {
    std::vector<MentionKey> keys;
    for (int np : chain) {
      keys.push_back({doc.doc_id, doc.nps[np].start, doc.nps[np].end});
    }
    p.chains.push_back(std::move(keys));
  }
  return p;
}

Partition GoldPartition(const std::vector<Document> &docs) {
  Partition all;
  for (const Document &doc : docs) {
    Partition p = GoldPartition(doc);
    for (auto &chain : p.chains) all.chains.push_back(std::move(chain));
  }
  return all;
}

double F1(double precision, double recall) {
  return precision + recall > 0
             ? 2 * precision * recall / (precision + recall)
             : 0.0;
}

Prf Muc(const Partition &key, const Partition &response) {
  auto [rn, rd] = MucCounts(key, response);
  auto [pn, pd] = MucCounts(response, key);
  return MakePrf(Ratio(pn, pd), Ratio(rn, rd));
}

Prf BCubed(const Partition &key, const Partition &response) {
  auto [rn, rd] = BCubedCounts(key, response);
  auto [pn, pd] = BCubedCounts(response, key);
  return MakePrf(Ratio(pn, pd), Ratio(rn, rd));
}

Prf CeafE(const Partition &key, const Partition &response) {
  const size_t nk = key.chains.size(), nr = response.chains.size();
  if (nk == 0 || nr == 0) return {};
  // Overlap counts |k ∩ r| for every intersecting pair.
  ChainIndex in_response = IndexChains(response);
  std::map<std::pair<int, int>, int> overlap;
  for (size_t k = 0; k < nk; ++k) {
    for (const MentionKey &m : key.chains[k]) {
      auto it = in_response.find(m);
      if (it != in_response.end()) ++overlap[{static_cast<int>(k), it->second}];
    }
  }
  // Chains that share no mention have similarity 0, so the global matching
  // decomposes over connected components of the overlap graph.
  UnionFind uf(nk + nr);
  for (const auto &[kr, count] : overlap) uf.Union(kr.first, nk + kr.second);
  std::map<size_t, std::pair<std::vector<int>, std::vector<int>>> groups;
  for (const auto &[kr, count] : overlap) {
    auto &g = groups[uf.Find(kr.first)];
    g.first.push_back(kr.first);
    g.second.push_back(kr.second);
  }
  double total = 0;
  for (auto &[root, members] : groups) {
    auto &[ks, rs] = members;
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    std::vector<std::vector<double>> sim(ks.size(),
                                         std::vector<double>(rs.size(), 0.0));
    for (size_t i = 0; i < ks.size(); ++i) {
      for (size_t j = 0; j < rs.size(); ++j) {
        auto it = overlap.find({ks[i], rs[j]});
        if (it == overlap.end()) continue;
        double sizes = double(key.chains[ks[i]].size()) +
                       double(response.chains[rs[j]].size());
        sim[i][j] = 2.0 * it->second / sizes;
      }
    }
    total += MaxWeightMatching(sim).first;
  }
  return MakePrf(total / double(nr), total / double(nk));
}

MetricReport Conll(const Partition &key, const Partition &response) {
  MetricReport r;
  r.muc = Muc(key, response);
  r.b3 = BCubed(key, response);
  r.ceafe = CeafE(key, response);
  r.conll = 100.0 * (r.muc.f1 + r.b3.f1 + r.ceafe.f1) / 3.0;
  return r;
}

std::pair<double, std::vector<int>> MaxWeightMatching(
    const std::vector<std::vector<double>> &weights) {
  const size_t rows = weights.size();
  const size_t cols = rows == 0 ? 0 : weights[0].size();
  if (rows == 0 || cols == 0) return {0.0, std::vector<int>(rows, -1)};
  const bool transpose = rows > cols;
  const size_t n = transpose ? cols : rows;  // n <= m
  const size_t m = transpose ? rows : cols;
  auto cost = [&](size_t i, size_t j) {
    return -(transpose ? weights[j - 1][i - 1] : weights[i - 1][j - 1]);
  };
  // Shortest augmenting path with potentials, 1-based; column 0 is virtual.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0), v(m + 1, 0);
  std::vector<size_t> match(m + 1, 0), way(m + 1, 0);
  for (size_t i = 1; i <= n; ++i) {
    match[0] = i;
    size_t j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      size_t i0 = match[j0], j1 = 0;
      double delta = inf;
      for (size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      size_t j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(rows, -1);
  double total = 0;
  for (size_t j = 1; j <= m; ++j) {
    if (match[j] == 0) continue;
    size_t r = transpose ? j - 1 : match[j] - 1;
    size_t c = transpose ? match[j] - 1 : j - 1;
    assignment[r] = static_cast<int>(c);
    total += weights[r][c];
  }
  return {total, assignment};
}

std::string FormatReport(const MetricReport &report) {
  char buf[512];
  auto row = [](const char *name, const Prf &x) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-8s %9.2f %9.2f %9.2f\n", name,
                  100 * x.recall, 100 * x.precision, 100 * x.f1);
    return std::string(line);
  };
  std::snprintf(buf, sizeof(buf), "%-8s %9s %9s %9s\n", "metric", "recall",
                "precision", "f1");
  std::string out = buf;
  out += row("MUC", report.muc);
  out += row("B3", report.b3);
  out += row("CEAF_e", report.ceafe);
  std::snprintf(buf, sizeof(buf), "%-8s %29.2f\n", "CoNLL", report.conll);
  out += buf;
  return out;
}

std::string FormatReportLine(const MetricReport &report) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "muc_r=%.6f muc_p=%.6f muc_f=%.6f b3_r=%.6f b3_p=%.6f "
                "b3_f=%.6f ceafe_r=%.6f ceafe_p=%.6f ceafe_f=%.6f conll=%.4f",
                report.muc.recall, report.muc.precision, report.muc.f1,
                report.b3.recall, report.b3.precision, report.b3.f1,
                report.ceafe.recall, report.ceafe.precision, report.ceafe.f1,
                report.conll);
  return buf;
}

}  // namespace prosocoref
