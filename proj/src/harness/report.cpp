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

#include <algorithm>
#include <fstream>

#include "fliprag/harness.hpp"

namespace fliprag {

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& p, const std::string& content,
                std::vector<std::filesystem::path>& written) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(p.string(), "cannot open for writing");
  out << content;
  if (!out) throw IoError(p.string(), "write failed");
  written.push_back(p);
}

nlohmann::ordered_json curve_json(const std::vector<CurveRow>& rows, const char* x) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    arr.push_back({{x, r.x}, {"omsr_pct", r.omsr_pct}, {"asv", r.asv}, {"alarm", r.alarm}});
  }
  return arr;
}

std::string curve_csv(const std::vector<CurveRow>& rows, bool omsr) {
  std::string s = "x,y\n";
  for (const auto& r : rows) {
    s += nlohmann::json(r.x).dump() + "," + nlohmann::json(omsr ? r.omsr_pct : r.asv).dump() + "\n";
  }
  return s;
}

}  // namespace

nlohmann::ordered_json to_json(const RunReport& r) {
  nlohmann::ordered_json j;
  j["manifest"] = r.manifest;
  j["imitation"] = to_json(r.imitation);
  j["audit"] = {{"passed", r.audit.passed}, {"checks", r.audit.checks}};
  j["attacks"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.attacks) j["attacks"][k] = to_json(v);
  j["tables"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.tables) j["tables"][k] = v;
  j["ablation_n"] = curve_json(r.ablation_n, "n");
  j["ablation_corpus"] = curve_json(r.ablation_corpus, "corpus_size");
  return j;
}

std::vector<std::filesystem::path> emit_report(const RunReport& r,
                                               const std::filesystem::path& out_dir,
                                               bool force) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError(out_dir.string(), ec.message());
  if (fs::exists(out_dir / "report.json") && !force) {
    throw IoError(out_dir.string(), "already holds a report; pass --force to overwrite");
  }
  std::vector<fs::path> written;
  write_file(out_dir / "report.json", to_json(r).dump(2) + "\n", written);

  for (const auto& [name, rows] : r.tables) {
    std::string s;
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) s += ',';
        s += csv_cell(row[i]);
      }
      s += '\n';
    }
    write_file(out_dir / ("table_" + name + ".csv"), s, written);
  }
  for (const auto& [label, summary] : r.attacks) {
    std::string file = label;
    std::replace(file.begin(), file.end(), '/', '_');
    write_file(out_dir / ("attack_" + file + ".csv"), to_csv(summary), written);
  }
  if (!r.ablation_n.empty()) {
    write_file(out_dir / "curve_n_omsr.csv", curve_csv(r.ablation_n, true), written);
    write_file(out_dir / "curve_n_asv.csv", curve_csv(r.ablation_n, false), written);
  }
  if (!r.ablation_corpus.empty()) {
    write_file(out_dir / "curve_corpus_omsr.csv", curve_csv(r.ablation_corpus, true), written);
    write_file(out_dir / "curve_corpus_asv.csv", curve_csv(r.ablation_corpus, false), written);
  }
  return written;
}

}  // namespace fliprag
