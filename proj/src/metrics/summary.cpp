// Copyright 2026 The fliprag Authors
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

#include <iomanip>
#include <sstream>

#include "fliprag/metrics.hpp"

namespace fliprag {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : ""; }

nlohmann::ordered_json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void EvalSummary::aggregate() {
  std::vector<StanceOutcome> outcomes;
  std::vector<double> t3, ra, br;
  for (const auto& r : topics) {
    outcomes.push_back({r.topic_id, r.target, r.pre, r.post});
    t3.push_back(r.top3_v);
    if (r.rasr_pct) ra.push_back(*r.rasr_pct);
    if (r.brank) br.push_back(*r.brank);
  }
  top3_v = mean_of(t3);
  rasr_pct = ra.empty() ? std::nullopt : std::optional<double>(mean_of(ra));
  brank = br.empty() ? std::nullopt : std::optional<double>(mean_of(br));
  omsr_pct = omsr(outcomes);
  asv = fliprag::asv(outcomes);
}

nlohmann::ordered_json to_json(const EvalSummary& s) {
  nlohmann::ordered_json j;
  j["label"] = s.label;
  j["top3_v"] = s.top3_v;
  j["rasr_pct"] = opt_json(s.rasr_pct);
  j["brank"] = opt_json(s.brank);
  j["omsr_pct"] = s.omsr_pct;
  j["asv"] = s.asv;
  j["ndcg10"] = opt_json(s.ndcg10);
  j["inter10"] = opt_json(s.inter10);
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : s.topics) {
    nlohmann::ordered_json row;
    row["topic"] = r.topic_id;
    row["target"] = r.target;
    row["pre"] = r.pre;
    row["post"] = r.post;
    row["success"] = omsr_success(r.pre, r.post, r.target);
    row["asv"] = asv_shift(r.pre, r.post, r.target);
    row["top3_v"] = r.top3_v;
    row["rasr_pct"] = opt_json(r.rasr_pct);
    row["brank"] = opt_json(r.brank);
    rows.push_back(std::move(row));
  }
  j["topics"] = std::move(rows);
  return j;
}

std::string to_csv(const EvalSummary& s) {
  std::ostringstream os;
  os << "topic,target,pre,post,success,asv,top3_v,rasr_pct,brank\n";
  for (const auto& r : s.topics) {
    os << r.topic_id << ',' << r.target << ',' << r.pre << ',' << r.post << ','
       << (omsr_success(r.pre, r.post, r.target) ? 1 : 0) << ','
       << asv_shift(r.pre, r.post, r.target) << ',' << num(r.top3_v) << ','
       << opt(r.rasr_pct) << ',' << opt(r.brank) << '\n';
  }
  os << "summary,,,," << num(s.omsr_pct) << ',' << num(s.asv) << ',' << num(s.top3_v)
     << ',' << opt(s.rasr_pct) << ',' << opt(s.brank) << '\n';
  return os.str();
}

}  // namespace fliprag
