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

// Acceptance run on the standard fixture: one PASS/FAIL line per criterion.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "fliprag/harness.hpp"
#include "metric_oracles.hpp"

namespace {

using fliprag::RunReport;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
}

// Guards a criterion so a missing table or field fails it instead of aborting.
void criterion(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("error: ") + e.what());
  }
}

using Table = std::vector<std::vector<std::string>>;

const Table& table(const RunReport& r, const std::string& name) { return r.tables.at(name); }

std::size_t column(const Table& t, const std::string& name) {
  for (std::size_t i = 0; i < t.front().size(); ++i) {
    if (t.front()[i] == name) return i;
  }
  throw std::runtime_error("no column '" + name + "'");
}

// First row whose leading cells equal `keys`.
const std::vector<std::string>& row(const Table& t, const std::vector<std::string>& keys) {
  for (std::size_t r = 1; r < t.size(); ++r) {
    bool match = true;
    for (std::size_t i = 0; i < keys.size(); ++i) match = match && t[r][i] == keys[i];
    if (match) return t[r];
  }
  throw std::runtime_error("no row starting with '" + keys.front() + "'");
}

double num(const std::string& s) { return std::stod(s); }

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

}  // namespace

int main() {
  using namespace fliprag;
  const ExperimentConfig cfg;  // standard fixture: 30 topics, 2k docs, seed 17

  criterion(1, [] {
    const auto t0 = Clock::now();
    const auto res = oracle::run_suite(500, 2024);
    const double secs = seconds_since(t0);
    report(1, res.mismatches == 0 && secs < 10.0,
           fmt("%.0f instances, %.0f mismatches, %.2f s", static_cast<double>(res.instances),
               static_cast<double>(res.mismatches), secs) +
               (res.first_failure.empty() ? "" : " first: " + res.first_failure));
  });

  std::optional<RunReport> first, second;
  double run_secs = 0.0;
  try {
    const auto t0 = Clock::now();
    first = run_pipeline(cfg);
    run_secs = seconds_since(t0);
    std::printf("info: full pipeline %.1f s\n", run_secs);
    second = run_pipeline(cfg);
  } catch (const std::exception& e) {
    std::printf("info: pipeline failed: %s\n", e.what());
  }
  if (!second) {
    for (int id : {2, 3, 4, 5}) report(id, false, "pipeline did not run");
  } else {
    const RunReport& r = *second;

    // The whole pipeline (imitation, every attack and defense) has to fit
    // within each per-stage budget, so the stage budgets hold a fortiori.
    criterion(2, [&] {
      const auto& im = r.imitation;
      const double untrained = num(row(table(r, "imitation"), {"Surrogate (untrained)"})[2]) / 100;
      const bool ok = im.inter10 >= 0.5 && im.inter10 >= 2 * untrained &&
                      std::abs(im.surrogate_ndcg10 - im.target_ndcg10) <= 0.1 &&
                      run_secs < 180;
      report(2, ok, fmt("Inter@10 %.3f (untrained %.3f), NDCG@10 %.3f vs target %.3f", im.inter10,
                        untrained, im.surrogate_ndcg10, im.target_ndcg10) +
                        fmt(", %.1f s", run_secs));
    });

    criterion(3, [&] {
      bool ok = run_secs < 300;
      std::string detail;
      for (const char* s : {"pro", "con"}) {
        const auto& im = r.attacks.at(std::string("flipped/") + s);
        const auto& un = r.attacks.at(std::string("pat_transfer/") + s);
        ok = ok && im.topics.size() >= 20 && *im.rasr_pct > *un.rasr_pct && *im.brank > *un.brank;
        detail += s + fmt(": RASR %.2f vs %.2f, BRank %.2f vs %.2f; ", *im.rasr_pct, *un.rasr_pct,
                      *im.brank, *un.brank);
      }
      detail += fmt("%.0f topics", static_cast<double>(r.attacks.at("flipped/pro").topics.size()));
      report(3, ok, detail);
    });

    criterion(4, [&] {
      const auto& p = r.attacks.at("flipped/pro");
      const auto& c = r.attacks.at("flipped/con");
      const bool ok = cfg.n_docs == 3 && cfg.rag.k == 3 && p.omsr_pct >= 30 && p.asv > 0 &&
                      c.omsr_pct >= 30 && c.asv > 0 && run_secs < 300;
      report(4, ok, fmt("pro OMSR %.2f%% ASV %.2f, con OMSR %.2f%% ASV %.2f", p.omsr_pct, p.asv,
                        c.omsr_pct, c.asv));
    });

    criterion(5, [&] {
      auto at = [&](double n) {
        for (const auto& c : r.ablation_n) {
          if (c.x == n) return c.omsr_pct;
        }
        throw std::runtime_error("N sweep lacks N=" + std::to_string(n));
      };
      // One topic of the pooled pro and con evaluations.
      const double slack =
          100.0 / static_cast<double>(cfg.synthetic.topics * cfg.stances.size());
      const double o1 = at(1), o3 = at(3), o10 = at(10);
      const bool ok = o3 >= o1 - slack && o10 >= o3 - slack && (o10 - o3) <= (o3 - o1);
      report(5, ok, fmt("OMSR N=1 %.2f, N=3 %.2f, N=10 %.2f (slack %.2f)", o1, o3, o10, slack));
    });
  }

  criterion(6, [&] {
    ExperimentConfig c = cfg;
    c.ablation_corpus = true;
    c.corpus_sizes = {2000, 100000};
    const auto t0 = Clock::now();
    const auto rows = run_ablation_corpus(c);
    const double secs = seconds_since(t0);
    const bool ok = rows.size() == 2 && rows.back().omsr_pct > 0 && secs <= 1800;
    report(6, ok, fmt("OMSR 2k %.2f%%, 100k %.2f%%, sweep %.1f s", rows.front().omsr_pct,
                      rows.back().omsr_pct, secs));
  });

  if (!second) {
    for (int id : {7, 8, 9, 10, 11, 12}) report(id, false, "pipeline did not run");
  } else {
    const RunReport& r = *second;

    criterion(7, [&] {
      const auto& t = table(r, "spamicity");
      const std::size_t c = column(t, "0.20");
      const double qi = num(row(t, {"Question Injection"})[c]);
      const double fl = num(row(t, {"Flipped triggers"})[c]);
      const double cl = num(row(t, {"Clean"})[c]);
      report(7, qi - fl >= 30 && std::abs(fl - cl) <= 25,
             fmt("at 0.2: question injection %.1f%%, flipped %.1f%%, clean %.1f%%", qi, fl, cl));
    });

    criterion(8, [&] {
      const auto& t = table(r, "density");
      const std::size_t c = column(t, "Overall");
      const double qi = num(row(t, {"Question Injection"})[c]);
      const double fl = num(row(t, {"Flipped triggers"})[c]);
      const double cl = num(row(t, {"Clean"})[c]);
      report(8, qi >= 2 * cl && fl <= 1.8 * cl,
             fmt("overall density: question injection %.2f, flipped %.2f, clean %.2f", qi, fl,
                 cl));
    });

    criterion(9, [&] {
      const auto& t = table(r, "mask_smoothing");
      const std::size_t none = column(t, "OMSR% (none)"), masked = column(t, "OMSR% (masked)");
      const std::size_t asv = column(t, "ASV (masked)");
      bool ok = true;
      std::string detail;
      // Mask 0 must reproduce the undefended numbers for every attack.
      for (std::size_t i = 1; i < t.size(); ++i) {
        if (t[i][2] != "0.00") continue;
        const std::string stance = t[i][0] == "PRO" ? "pro" : "con";
        ok = ok && t[i][none] == t[i][masked];
        for (const auto& [key, s] : r.attacks) {
          if (key.size() > stance.size() && key.substr(key.size() - stance.size()) == stance &&
              s.label == t[i][1]) {
            ok = ok && fmt("%.2f", s.asv) == t[i][asv];
          }
        }
      }
      for (const char* s : {"PRO", "CON"}) {
        const double m0 = num(row(t, {s, "Flipped triggers", "0.00"})[masked]);
        const double m7 = num(row(t, {s, "Flipped triggers", "0.70"})[masked]);
        ok = ok && m7 < m0;
        detail += s + fmt(": mask 0.0 %.2f%%, mask 0.7 %.2f%%; ", m0, m7);
      }
      report(9, ok, detail + "mask 0.0 rows equal undefended");
    });

    criterion(10, [&] {
      const auto& t = table(r, "robust_aggregate");
      const std::size_t none = column(t, "OMSR% (none)"), rob = column(t, "OMSR% (robust)");
      bool ok = true;
      std::string detail;
      for (const char* s : {"PRO", "CON"}) {
        const auto& rw = row(t, {s, "Flipped triggers"});
        ok = ok && num(rw[rob]) < num(rw[none]) && num(rw[rob]) > 0;
        detail += std::string(s) + fmt(": %.2f%% -> %.2f%%; ", num(rw[none]), num(rw[rob]));
      }
      report(10, ok, detail);
    });

    criterion(11, [&] {
      const auto& t = table(r, "leak_detection");
      const auto& origin = row(t, {"origin"});
      const auto& evasive = row(t, {"benign_simple"});
      report(11, origin[2] == "yes" && evasive[2] == "no" && evasive[3] == "yes",
             "origin score " + origin[1] + " flagged " + origin[2] + ", benign_simple score " +
                 evasive[1] + " flagged " + evasive[2] + " still leaks " + evasive[3]);
    });

    criterion(12, [&] {
      const std::string a = to_json(*first).dump(2), b = to_json(*second).dump(2);
      report(12, a == b, fmt("report.json %.0f bytes, ", static_cast<double>(a.size())) +
                             (a == b ? "identical" : "differs"));
    });
  }

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
