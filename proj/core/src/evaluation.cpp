/******************************************************************************
 * Copyright 2026 The objfusion Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#include "objfusion/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "json.hpp"
#include "objfusion/geometry.hpp"
#include "objfusion/parallel.hpp"

namespace objfusion {

SampleCounts match_sample(const std::vector<ObjectState>& estimates,
                          const std::vector<ObjectState>& annotations,
                          double iou_threshold) {
  struct Candidate {
    double iou;
    int est;
    int ann;
  };
  std::vector<Candidate> cands;
  for (std::size_t e = 0; e < estimates.size(); ++e) {
    const Aabb eb = Aabb::from(estimates[e]);
    for (std::size_t a = 0; a < annotations.size(); ++a) {
      const double iou = aabb_iou(eb, Aabb::from(annotations[a]));
      if (iou >= iou_threshold) {
        cands.push_back({iou, static_cast<int>(e), static_cast<int>(a)});
      }
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& l, const Candidate& r) {
    return std::tie(r.iou, l.est, l.ann) < std::tie(l.iou, r.est, r.ann);
  });
  std::vector<char> est_used(estimates.size(), 0);
  std::vector<char> ann_used(annotations.size(), 0);
  SampleCounts c;
  for (const auto& cand : cands) {
    if (est_used[static_cast<std::size_t>(cand.est)] ||
        ann_used[static_cast<std::size_t>(cand.ann)]) {
      continue;
    }
    est_used[static_cast<std::size_t>(cand.est)] = 1;
    ann_used[static_cast<std::size_t>(cand.ann)] = 1;
    ++c.tp;
    if (estimates[static_cast<std::size_t>(cand.est)].cls ==
        annotations[static_cast<std::size_t>(cand.ann)].cls) {
      ++c.tc;
    } else {
      ++c.fc;
    }
    c.tp_ious.push_back(cand.iou);
    c.pairs.emplace_back(cand.est, cand.ann);
  }
  c.fp = static_cast<long>(estimates.size()) - c.tp;
  c.fn = static_cast<long>(annotations.size()) - c.tp;
  return c;
}

void EvalAccumulator::add(const SampleCounts& c) {
  tp += c.tp;
  fp += c.fp;
  fn += c.fn;
  tc += c.tc;
  fc += c.fc;
  for (double v : c.tp_ious) iou_sum += v;
}

void EvalAccumulator::merge(const EvalAccumulator& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tc += o.tc;
  fc += o.fc;
  iou_sum += o.iou_sum;
}

MetricReport compute_metrics(const EvalAccumulator& acc) {
  MetricReport r;
  auto ratio = [](double num, double den, bool& undefined) {
    if (den <= 0.0) {
      undefined = true;
      return 0.0;
    }
    return num / den;
  };
  r.precision = ratio(acc.tp, acc.tp + acc.fp, r.precision_undefined);
  r.recall = ratio(acc.tp, acc.tp + acc.fn, r.recall_undefined);
  r.f1 = ratio(2.0 * acc.tp, 2.0 * acc.tp + acc.fp + acc.fn, r.f1_undefined);
  r.class_precision = ratio(acc.tc, acc.tc + acc.fc, r.class_precision_undefined);
  r.miou = ratio(acc.iou_sum, acc.tp, r.miou_undefined);
  // TP = 0 makes F1 zero even with a non-empty denominator; flag it.
  if (acc.tp == 0) r.f1_undefined = true;
  return r;
}

std::string MetricReport::to_json(int indent) const {
  const nlohmann::json j = {{"f1", f1},
                            {"precision", precision},
                            {"recall", recall},
                            {"class_precision", class_precision},
                            {"miou", miou},
                            {"flags",
                             {{"f1_undefined", f1_undefined},
                              {"precision_undefined", precision_undefined},
                              {"recall_undefined", recall_undefined},
                              {"class_precision_undefined", class_precision_undefined},
                              {"miou_undefined", miou_undefined}}}};
  return j.dump(indent);
}

EvalAccumulator evaluate(const std::vector<std::vector<ObjectState>>& estimates,
                         const std::vector<std::vector<ObjectState>>& annotations,
                         int jobs, double iou_threshold) {
  if (estimates.size() != annotations.size()) {
    throw std::invalid_argument("evaluate: estimate and annotation counts differ");
  }
  std::vector<SampleCounts> per(estimates.size());
  parallel_for(per.size(), jobs, [&](std::size_t i) {
    per[i] = match_sample(estimates[i], annotations[i], iou_threshold);
  });
  EvalAccumulator acc;
  for (const auto& c : per) acc.add(c);
  return acc;
}

std::vector<MatrixCell> cross_domain_matrix(const std::vector<std::string>& methods,
                                            const std::vector<std::string>& sources,
                                            const std::vector<std::string>& targets,
                                            const CellRunner& run) {
  std::vector<MatrixCell> cells;
  for (const auto& t : targets) {
    for (const auto& m : methods) {
      for (const auto& s : sources) {
        cells.push_back({m, s, t, run(m, s, t)});
      }
    }
  }
  return cells;
}

std::string matrix_to_csv(const std::vector<MatrixCell>& cells,
                          const std::vector<std::string>& provenance) {
  std::ostringstream os;
  for (const auto& p : provenance) os << "# " << p << '\n';
  os << "method,source,target,f1,precision,recall,class_precision,miou\n";
  char buf[256];
  for (const auto& c : cells) {
    os << c.method << ',' << c.source << ',' << c.target;
    if (c.report) {
      std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f,%.6f,%.6f", c.report->f1,
                    c.report->precision, c.report->recall, c.report->class_precision,
                    c.report->miou);
      os << buf;
    } else {
      os << ",,,,,";
    }
    os << '\n';
  }
  return os.str();
}

std::string matrix_summary(const std::vector<MatrixCell>& cells) {
  using Getter = double (*)(const MetricReport&);
  const std::vector<std::pair<std::string, Getter>> metrics = {
      {"F1", [](const MetricReport& r) { return r.f1; }},
      {"p_pr", [](const MetricReport& r) { return r.precision; }},
      {"p_re", [](const MetricReport& r) { return r.recall; }},
      {"p_cls", [](const MetricReport& r) { return r.class_precision; }},
      {"mIoU", [](const MetricReport& r) { return r.miou; }}};
  std::vector<std::string> targets;
  for (const auto& c : cells) {
    if (std::find(targets.begin(), targets.end(), c.target) == targets.end()) {
      targets.push_back(c.target);
    }
  }
  std::ostringstream os;
  char buf[64];
  for (const auto& t : targets) {
    os << "target " << t << '\n';
    for (const auto& [name, get] : metrics) {
      std::vector<double> values;
      for (const auto& c : cells) {
        if (c.target == t && c.report) values.push_back(get(*c.report));
      }
      std::sort(values.begin(), values.end(), std::greater<>());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      os << "  " << name << ":";
      for (const auto& c : cells) {
        if (c.target != t) continue;
        os << "  " << c.method << '/' << c.source << '=';
        if (!c.report) {
          os << "n/a";
          continue;
        }
        const double v = get(*c.report);
        std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
        if (!values.empty() && v == values[0]) {
          os << "**" << buf << "**";
        } else if (values.size() > 1 && v == values[1]) {
          os << '_' << buf << '_';
        } else {
          os << buf;
        }
      }
      os << '\n';
    }
  }
  return os.str();
}

}  // namespace objfusion
