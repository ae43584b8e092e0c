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
#include <concepts>
#include <functional>
#include <numeric>
#include <sstream>

#include "fliprag/harness.hpp"
#include "fliprag/ngram.hpp"
#include "fliprag/ragsim_internal.hpp"
#include "fliprag/seed.hpp"

namespace fliprag {

namespace {

// The facade must not hand out what the attacker is not supposed to see.
template <class T>
concept ExposesInternals = requires(const T& t) { t.corpus(); } ||
                           requires(const T& t) { t.retriever(); } ||
                           requires(const T& t) { t.model(); };
static_assert(!ExposesInternals<RagSystem>, "RagSystem leaks its internals");

// Runs one stage and rewraps failures with the stage name and seed.
template <class F>
auto stage(const std::string& name, std::uint64_t seed, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const AuditError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, seed, e.what());
  }
}

std::string fmt(double v, int prec = 2) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(prec);
  os << v;
  return os.str();
}

std::string fmt_opt(const std::optional<double>& v, int prec = 2) {
  return v ? fmt(*v, prec) : "--";
}

// Operator side: corpus, target retriever and the query-only facade.
struct Deployment {
  World world;
  std::shared_ptr<const EmbeddingModel> target;  // null for tf-idf
  std::unique_ptr<RagSystem> system;
  std::map<std::string, TokenList> questions;     // topic id -> tokens
};

Deployment deploy(const ExperimentConfig& cfg, World world) {
  Deployment d;
  d.world = std::move(world);
  std::shared_ptr<const Retriever> retriever;
  if (cfg.retriever == "dense") {
    d.target = stage("train-target", derive_seed(cfg.seed, "target"), [&] {
      return std::make_shared<const EmbeddingModel>(
          train_target(*d.world.corpus, d.world.topics, cfg.target, derive_seed(cfg.seed, "target")));
    });
    retriever = std::make_shared<DenseIndex>(d.target, d.world.corpus);
  } else {
    retriever = std::make_shared<TfidfIndex>(d.world.corpus);
  }
  d.system = std::make_unique<RagSystem>(retriever, cfg.rag);
  for (const auto& t : d.world.topics) d.questions[t.id] = tokenize(t.question);
  return d;
}

std::vector<std::string> attacker_queries(const ExperimentConfig& cfg, const World& w) {
  std::vector<std::string> q;
  for (const auto& t : w.topics) {
    q.push_back(t.question);
    if (!cfg.imitation.topic_queries) continue;
    auto it = w.topic_queries.find(t.id);
    if (it != w.topic_queries.end()) q.insert(q.end(), it->second.begin(), it->second.end());
  }
  return q;
}

std::vector<EvalQuery> eval_queries(const World& w) {
  std::vector<EvalQuery> out;
  for (const auto& t : w.topics) {
    EvalQuery e{t.id, t.question, {}};
    for (const auto* d : topic_documents(*w.corpus, t.id)) e.judgments[d->id()] = 1.0;
    out.push_back(std::move(e));
  }
  return out;
}

// Clean answers and full rankings, taken once and shared by every attack.
struct PreSnapshot {
  std::map<std::string, RagResponse> answers;  // topic id -> response
  RankSnapshot ranks;
  bool has_ranks = false;
};

PreSnapshot take_pre(const Deployment& d, bool with_ranks) {
  PreSnapshot p;
  for (const auto& t : d.world.topics) p.answers.emplace(t.id, d.system->answer(t.question));
  if (with_ranks) {
    p.ranks = RankSnapshot::take(RagInternals::retriever(*d.system), d.questions);
    p.has_ranks = true;
  }
  return p;
}

// Phase 2 inputs. Everything here is attacker-visible.
struct AttackerKit {
  const AttackerModels* models = nullptr;
  NGramLM lm;
  std::vector<std::string> vocab;
  std::map<Stance, std::vector<std::string>> stance_terms;
};

struct Crafted {
  std::shared_ptr<Corpus> corpus;
  TargetMap targets;
  // modified or inserted doc id -> topic id
  std::vector<std::pair<std::string, std::string>> touched;
  bool ranks_apply = false;
  std::size_t no_gain = 0;
  std::size_t trigger_tokens = 0;
  std::size_t triggers = 0;
};

std::uint64_t attack_seed(std::uint64_t master, const std::string& kind, Stance s,
                          std::size_t topic_index) {
  return derive_seed(master, "attack." + kind + "." + stance_name(s), topic_index);
}

Crafted craft(const std::string& kind, Stance target, std::size_t n, const World& world,
              const AttackerKit& kit, const ExperimentConfig& cfg) {
  const Corpus& pub = *world.corpus;
  Crafted c;
  c.corpus = std::make_shared<Corpus>(pub);
  c.ranks_apply = kind == "flipped" || kind == "pat_transfer";
  for (std::size_t ti = 0; ti < world.topics.size(); ++ti) {
    const Topic& topic = world.topics[ti];
    const std::uint64_t seed = attack_seed(cfg.seed, kind, target, ti);
    std::vector<std::string> ids;
    if (kind == "flipped" || kind == "pat_transfer") {
      const EmbeddingModel& sur =
          kind == "flipped" ? kit.models->surrogate : kit.models->init;
      AttackOptions opt{n, cfg.rag.k, cfg.trigger};
      const AttackPlan plan = plan_attack(pub, topic, target, sur, kit.lm, kit.vocab, opt, seed);
      apply_plan(*c.corpus, plan);
      ids = plan.target_doc_ids;
      for (const auto& [id, tr] : plan.triggers) {
        c.no_gain += tr.no_gain ? 1 : 0;
        c.trigger_tokens += tr.tokens.size();
        ++c.triggers;
      }
    } else {
      BaselineParams bp;
      bp.surrogate = &kit.models->surrogate;
      bp.lm = &kit.lm;
      bp.vocab = &kit.vocab;
      bp.k = cfg.rag.k;
      bp.trigger = cfg.trigger;
      bp.stance_terms = kit.stance_terms;
      bp.seed = seed;
      ids = apply_baseline(baseline_from_string(kind), *c.corpus, topic, target, n, bp);
    }
    c.targets[topic.id] = ids;
    for (const auto& id : ids) c.touched.emplace_back(id, topic.id);
  }
  return c;
}

std::unordered_map<std::string, Stance> labeled_stances(const Corpus& corpus) {
  std::unordered_map<std::string, Stance> m;
  for (const auto& d : corpus.documents()) {
    if (d.stance()) m.emplace(d.id(), *d.stance());
  }
  return m;
}

// Operator side: deploys the crafted corpus and measures against the clean
// snapshot.
EvalSummary evaluate(const std::string& label, Stance target, const Crafted& c,
                     const Deployment& d, const PreSnapshot& pre) {
  const RagSystem post_sys = RagInternals::rebind(*d.system, c.corpus);
  const bool ranks = c.ranks_apply && pre.has_ranks;
  RankSnapshot post;
  if (ranks) post = RankSnapshot::take(RagInternals::retriever(post_sys), d.questions);
  const auto stance_of = labeled_stances(*c.corpus);
  EvalSummary s;
  s.label = label;
  for (const auto& t : d.world.topics) {
    const RagResponse& before = pre.answers.at(t.id);
    const RagResponse after = post_sys.answer(t.question);
    TopicRow row;
    row.topic_id = t.id;
    row.target = target;
    row.pre = before.stance;
    row.post = after.stance;
    row.top3_v = top3_v(before.context_ids, after.context_ids, stance_of, target);
    if (ranks) {
      TargetMap one{{t.id, c.targets.at(t.id)}};
      row.rasr_pct = rasr(pre.ranks, post, one);
      row.brank = brank(pre.ranks, post, one);
    }
    s.topics.push_back(std::move(row));
  }
  s.aggregate();
  return s;
}

// Stances for every topic question, in topic order.
using AskAll = std::function<std::vector<Stance>(const RagSystem&)>;

std::vector<StanceOutcome> outcomes_with(const Deployment& d, const std::vector<Stance>& pre,
                                         const std::vector<Stance>& post, Stance target) {
  std::vector<StanceOutcome> out;
  for (std::size_t i = 0; i < d.world.topics.size(); ++i) {
    out.push_back({d.world.topics[i].id, target, pre[i], post[i]});
  }
  return out;
}

// Session state shared by the pipeline and the ablations.
struct Session {
  const ExperimentConfig& cfg;
  Deployment dep;
  AttackerModels models;
  ImitationReport imitation;
  ImitationReport imitation_untrained;
  AttackerKit kit;
  PreSnapshot pre;

  Session(const ExperimentConfig& c, std::optional<std::size_t> size, bool with_ranks)
      : cfg(c), dep(deploy(c, stage("build-corpus", derive_seed(c.seed, "corpus"),
                                    [&] { return build_world(c, size); }))) {
    pre = stage("snapshot", c.seed, [&] { return take_pre(dep, with_ranks); });
    attacker_phase();
  }

  // Phase 1 and the attacker's tooling. Only the facade and the public
  // corpus are passed in.
  void attacker_phase() {
    const RagSystem& facade = *dep.system;
    const Corpus& pub = *dep.world.corpus;
    const std::uint64_t seed = derive_seed(cfg.seed, "imitation");
    models = stage("imitate", seed, [&] {
      return run_imitation(facade, pub, attacker_queries(cfg, dep.world), cfg.imitation, seed);
    });
    stage("eval-imitation", seed, [&] {
      const auto eq = eval_queries(dep.world);
      imitation = eval_imitation(models.surrogate, facade, pub, eq);
      imitation_untrained = eval_imitation(models.init, facade, pub, eq);
      imitation.pairs_used = models.triples - models.skipped;
      imitation.epochs = cfg.imitation.hyper.epochs;
      imitation.lr = cfg.imitation.hyper.lr;
      imitation.batch = cfg.imitation.hyper.batch;
      return 0;
    });
    kit.models = &models;
    kit.lm = train_ngram(pub);
    kit.vocab = attack_vocabulary(pub);
    kit.stance_terms = dep.world.stance_terms;
  }

  EvalSummary attack(const std::string& kind, Stance s, std::size_t n, Crafted* keep = nullptr) {
    const std::string label = kind + "/" + stance_name(s);
    const std::uint64_t seed = attack_seed(cfg.seed, kind, s, 0);
    Crafted c = stage("attack " + label, seed,
                      [&] { return craft(kind, s, n, dep.world, kit, cfg); });
    EvalSummary e = stage("evaluate " + label, seed,
                          [&] { return evaluate(label, s, c, dep, pre); });
    if (kind == "flipped") {
      e.ndcg10 = imitation.surrogate_ndcg10;
      e.inter10 = imitation.inter10;
    } else if (kind == "pat_transfer") {
      e.ndcg10 = imitation_untrained.surrogate_ndcg10;
      e.inter10 = imitation_untrained.inter10;
    }
    if (keep) *keep = std::move(c);
    return e;
  }
};

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

using Table = std::vector<std::vector<std::string>>;

const std::map<std::string, std::string>& method_names() {
  static const std::map<std::string, std::string> k = {
      {"flipped", "Flipped triggers"},
      {"pat_transfer", "PAT Transfer-based"},
      {"question_injection", "Question Injection"},
      {"prompt_injection", "Prompt Injection Attack"},
      {"disinformation", "Disinformation"},
      {"static_text", "Static Text"},
  };
  return k;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

void defense_tables(Session& S, const std::map<std::string, Crafted>& crafted,
                    const std::map<std::string, EvalSummary>& attacks, RunReport& r) {
  const ExperimentConfig& cfg = S.cfg;
  const Deployment& d = S.dep;
  const Corpus& clean = *d.world.corpus;
  std::vector<TokenList> all_q;
  for (const auto& t : d.world.topics) all_q.push_back(d.questions.at(t.id));

  // Detector scores per method: clean topic documents, then every attack's
  // modified documents pooled over target stances.
  struct Scores {
    std::vector<double> spam, density, ppl;
    std::map<std::size_t, std::vector<double>> windowed;
    std::size_t flagged_ppl = 0;
  };
  const NGramLM lm = train_ngram(clean);
  const PerplexityBand band = calibrate_band(lm, clean);
  auto score_doc = [&](Scores& sc, const Document& doc, const Corpus& corpus,
                       const std::string& topic_id) {
    sc.spam.push_back(spamicity(doc, all_q, corpus));
    const KeywordDensity kd = keyword_density(doc.tokens(), d.questions.at(topic_id),
                                              cfg.defense.density_windows,
                                              cfg.defense.density_step);
    sc.density.push_back(kd.overall);
    for (const auto& [w, v] : kd.max_windowed) sc.windowed[w].push_back(v);
    const DefenseVerdict pv = perplexity_verdict(lm, doc.tokens(), band);
    sc.ppl.push_back(pv.score);
    sc.flagged_ppl += pv.flagged ? 1 : 0;
  };
  std::vector<std::pair<std::string, Scores>> rows;
  for (const auto& kind : cfg.attacks) {
    Scores sc;
    for (Stance s : cfg.stances) {
      const Crafted& c = crafted.at(kind + "/" + stance_name(s));
      for (const auto& [id, topic] : c.touched) score_doc(sc, c.corpus->at(id), *c.corpus, topic);
    }
    rows.emplace_back(method_names().at(kind), std::move(sc));
  }
  {
    Scores sc;
    for (const auto& t : d.world.topics) {
      for (const auto* doc : topic_documents(clean, t.id)) score_doc(sc, *doc, clean, t.id);
    }
    rows.emplace_back("Clean", std::move(sc));
  }

  std::vector<double> thr = cfg.defense.thresholds;
  std::sort(thr.rbegin(), thr.rend());
  Table spam{{"Threshold"}};
  for (double t : thr) spam[0].push_back(fmt(t));
  Table dens{{"Method", "Overall"}};
  for (auto w : cfg.defense.density_windows) dens[0].push_back("Max@" + std::to_string(w));
  Table ppl{{"Method", "Mean log-PPL", "Flagged%"}};
  for (const auto& [name, sc] : rows) {
    std::vector<std::string> a{name};
    for (double t : thr) a.push_back(fmt(detection_rate(sc.spam, t), 1));
    spam.push_back(a);
    std::vector<std::string> b{name, fmt(mean(sc.density))};
    for (auto w : cfg.defense.density_windows) {
      auto it = sc.windowed.find(w);
      b.push_back(fmt(it == sc.windowed.end() ? 0.0 : mean(it->second)));
    }
    dens.push_back(b);
    ppl.push_back({name, fmt(mean(sc.ppl), 3),
                   fmt(sc.ppl.empty() ? 0.0
                                      : 100.0 * static_cast<double>(sc.flagged_ppl) /
                                            static_cast<double>(sc.ppl.size()),
                       1)});
  }
  r.tables["spamicity"] = spam;
  r.tables["density"] = dens;
  r.tables["perplexity"] = ppl;

  // Query-side and system-side defenses, measured as OMSR against the same
  // defense applied to the clean system.
  auto run_defense = [&](const AskAll& ask, Table& tab, const std::string& extra) {
    const std::vector<Stance> pre = ask(*d.system);
    for (Stance s : cfg.stances) {
      for (const auto& kind : cfg.attacks) {
        const std::string key = kind + "/" + stance_name(s);
        const RagSystem post = RagInternals::rebind(*d.system, crafted.at(key).corpus);
        const auto out = outcomes_with(d, pre, ask(post), s);
        std::vector<std::string> row{upper(stance_name(s)), method_names().at(kind)};
        if (!extra.empty()) row.push_back(extra);
        row.push_back(fmt(attacks.at(key).omsr_pct));
        row.push_back(fmt(omsr(out)));
        row.push_back(fmt(asv(out)));
        tab.push_back(row);
      }
    }
  };
  std::vector<std::string> questions;
  for (const auto& t : d.world.topics) questions.push_back(t.question);
  auto stances_of = [](const std::vector<RagResponse>& rs) {
    std::vector<Stance> v;
    for (const auto& r : rs) v.push_back(r.stance);
    return v;
  };

  if (cfg.defense.paraphrase) {
    Table t{{"Target", "Attack Method", "OMSR% (none)", "OMSR% (paraphrase)", "ASV (paraphrase)"}};
    std::map<std::string, std::string> para;
    for (std::size_t i = 0; i < d.world.topics.size(); ++i) {
      const Topic& tp = d.world.topics[i];
      para[tp.id] = paraphrase_query(tp.question, d.world.synonyms,
                                     derive_seed(cfg.seed, "defense.paraphrase", i));
    }
    run_defense(
        [&](const RagSystem& sys) {
          std::vector<Stance> v;
          for (const auto& tp : d.world.topics) v.push_back(sys.answer(para.at(tp.id)).stance);
          return v;
        },
        t, "");
    r.tables["paraphrase"] = t;
  }

  {
    Table t{{"Target", "Attack Method", "Mask rate", "OMSR% (none)", "OMSR% (masked)",
             "ASV (masked)"}};
    for (std::size_t mi = 0; mi < cfg.defense.mask_rates.size(); ++mi) {
      const double rate = cfg.defense.mask_rates[mi];
      const std::uint64_t seed = derive_seed(cfg.seed, "defense.mask", mi);
      run_defense(
          [&](const RagSystem& sys) {
            return stances_of(
                masked_smooth_answers(sys, questions, rate, cfg.defense.ensemble, seed));
          },
          t, fmt(rate));
    }
    r.tables["mask_smoothing"] = t;
  }

  {
    Table t{{"Target", "Attack Method", "OMSR% (none)", "OMSR% (robust)", "ASV (robust)"}};
    run_defense(
        [&](const RagSystem& sys) {
          std::vector<Stance> v;
          for (const auto& q : questions) {
            v.push_back(robust_aggregate_answer(sys, q, cfg.defense.robust).stance);
          }
          return v;
        },
        t, "");
    r.tables["robust_aggregate"] = t;
  }

  {
    Table t{{"Tag", "Detector score", "Flagged", "System leaks"}};
    const std::string q = d.world.topics.front().question;
    for (const auto& v : leak_instruction_variants(q)) {
      const DefenseVerdict dv = detect_leak_instruction(v.text);
      t.push_back({v.tag, fmt(dv.score), dv.flagged ? "yes" : "no",
                   d.system->is_leak_instruction(v.text) ? "yes" : "no"});
    }
    r.tables["leak_detection"] = t;
  }
}

std::vector<CurveRow> ablation_n_rows(Session& S, const std::vector<std::size_t>& ns) {
  std::vector<CurveRow> rows;
  for (std::size_t n : ns) {
    std::vector<double> o, a;
    for (Stance s : S.cfg.stances) {
      const EvalSummary e = S.attack("flipped", s, n);
      o.push_back(e.omsr_pct);
      a.push_back(e.asv);
    }
    rows.push_back({static_cast<double>(n), mean(o), mean(a), false});
  }
  return rows;
}

}  // namespace

World build_world(const ExperimentConfig& cfg, std::optional<std::size_t> size) {
  World w;
  if (!cfg.jsonl_path.empty()) {
    if (size) throw ConfigError("corpus-size sweeps need a synthetic corpus");
    auto corpus = std::make_shared<Corpus>(ingest_jsonl(cfg.jsonl_path));
    w.topics = load_topics(cfg.topics_path, *corpus);
    w.corpus = std::move(corpus);
    return w;
  }
  SyntheticSpec spec = cfg.synthetic;
  const std::size_t topic_docs =
      spec.topics * (2 * spec.docs_per_stance + spec.neutral_per_topic);
  const std::size_t total = size.value_or(cfg.corpus_size);
  if (total < topic_docs) {
    throw ConfigError("corpus size " + std::to_string(total) + " is below the " +
                      std::to_string(topic_docs) + " topic documents");
  }
  spec.filler_docs = total - topic_docs;
  SyntheticWorld sw = generate_synthetic(spec, derive_seed(cfg.seed, "corpus"));
  w.corpus = std::make_shared<const Corpus>(std::move(sw.corpus));
  w.topics = std::move(sw.topics);
  w.topic_queries = std::move(sw.topic_queries);
  w.synonyms = std::move(sw.synonyms);
  w.stance_terms[kPro] = std::move(sw.pro_markers);
  w.stance_terms[kCon] = std::move(sw.con_markers);
  return w;
}

AttackerModels run_imitation(const RagSystem& system, const Corpus& public_corpus,
                             const std::vector<std::string>& queries,
                             const ImitationConfig& cfg, std::uint64_t seed) {
  AttackerModels m;
  m.init = EmbeddingModel::random(public_corpus.vocabulary_tokens(), cfg.dim,
                                  derive_seed(seed, "surrogate.init"), cfg.init_scale);
  const auto triples = build_pairs(system, queries, public_corpus, m.init, cfg.pairs,
                                   derive_seed(seed, "imitation.pairs"));
  SurrogateResult res = train_surrogate(m.init, triples, public_corpus, cfg.hyper,
                                        derive_seed(seed, "imitation.train"));
  m.surrogate = std::move(res.model);
  m.surrogate.set_trained_on("imitation");
  m.epoch_losses = std::move(res.epoch_losses);
  m.triples = triples.size();
  m.skipped = res.skipped;
  return m;
}

AuditReport audit_boundary(std::optional<std::uint64_t> target_fingerprint,
                           const AttackerModels& attacker) {
  AuditReport a;
  a.checks.push_back("static: RagSystem exposes no corpus, retriever or model accessor");
  a.checks.push_back("static: Phase 1 receives RagSystem and the public corpus only");
  if (!target_fingerprint) {
    a.checks.push_back("fingerprint: target is sparse, no weights to compare");
    return a;
  }
  auto check = [&](const char* name, const EmbeddingModel& m) {
    const bool same = m.fingerprint() == *target_fingerprint;
    a.checks.push_back(std::string("fingerprint: ") + name +
                       (same ? " EQUALS target weights" : " differs from target"));
    if (same) a.passed = false;
  };
  check("untrained surrogate", attacker.init);
  check("trained surrogate", attacker.surrogate);
  return a;
}

RunReport run_pipeline(const ExperimentConfig& cfg) {
  cfg.validate();
  Session S(cfg, std::nullopt, true);
  RunReport r;

  r.audit = audit_boundary(S.dep.target ? std::optional(S.dep.target->fingerprint())
                                        : std::nullopt,
                           S.models);
  if (!r.audit.passed) throw AuditError("attacker-side model shares the target's weights");

  r.imitation = S.imitation;
  {
    Table t{{"Model", "NDCG@10", "Inter@10"}};
    t.push_back({"Target (" + cfg.retriever + ")", fmt(S.imitation.target_ndcg10 * 100), "--"});
    t.push_back({"Surrogate (imitation)", fmt(S.imitation.surrogate_ndcg10 * 100),
                 fmt(S.imitation.inter10 * 100)});
    t.push_back({"Surrogate (untrained)", fmt(S.imitation_untrained.surrogate_ndcg10 * 100),
                 fmt(S.imitation_untrained.inter10 * 100)});
    r.tables["imitation"] = t;
  }

  std::map<std::string, Crafted> crafted;
  for (Stance s : cfg.stances) {
    for (const auto& kind : cfg.attacks) {
      Crafted c;
      EvalSummary e = S.attack(kind, s, cfg.n_docs, &c);
      crafted.emplace(e.label, std::move(c));
      r.attacks.emplace(e.label, std::move(e));
    }
  }

  {
    Table t{{"Target Opinion", "Victim Model", "Top3_v", "BRank", "RASR%", "OMSR%", "ASV"}};
    for (Stance s : cfg.stances) {
      for (const char* kind : {"pat_transfer", "flipped"}) {
        auto it = r.attacks.find(std::string(kind) + "/" + stance_name(s));
        if (it == r.attacks.end()) continue;
        const EvalSummary& e = it->second;
        t.push_back({upper(stance_name(s)),
                     std::string(kind) == "flipped" ? "imitation" : "w/o imitation",
                     fmt(e.top3_v), fmt_opt(e.brank), fmt_opt(e.rasr_pct), fmt(e.omsr_pct),
                     fmt(e.asv)});
      }
    }
    r.tables["transfer"] = t;
  }
  {
    Table t{{"Target", "Attack Method", "Top3_v", "RASR%", "OMSR%", "ASV"}};
    for (Stance s : cfg.stances) {
      for (const auto& kind : cfg.attacks) {
        const EvalSummary& e = r.attacks.at(kind + "/" + stance_name(s));
        t.push_back({upper(stance_name(s)), method_names().at(kind), fmt(e.top3_v),
                     fmt_opt(e.rasr_pct), fmt(e.omsr_pct), fmt(e.asv)});
      }
    }
    r.tables["baselines"] = t;
  }
  {
    Table t{{"Attack Method", "Target", "Triggers", "No gain", "Mean length"}};
    for (Stance s : cfg.stances) {
      for (const char* kind : {"flipped", "pat_transfer"}) {
        auto it = crafted.find(std::string(kind) + "/" + stance_name(s));
        if (it == crafted.end()) continue;
        const Crafted& c = it->second;
        t.push_back({method_names().at(kind), upper(stance_name(s)), std::to_string(c.triggers),
                     std::to_string(c.no_gain),
                     fmt(c.triggers ? static_cast<double>(c.trigger_tokens) /
                                          static_cast<double>(c.triggers)
                                    : 0.0)});
      }
    }
    r.tables["triggers"] = t;
  }

  if (cfg.defense.enabled) {
    stage("defend", derive_seed(cfg.seed, "defense"),
          [&] { return defense_tables(S, crafted, r.attacks, r), 0; });
  }
  if (cfg.ablation_n) {
    r.ablation_n = stage("ablate-n", cfg.seed, [&] { return ablation_n_rows(S, cfg.n_list); });
  }
  if (cfg.ablation_corpus) r.ablation_corpus = run_ablation_corpus(cfg);

  // Manifest: configuration, derived seeds, and the call behind each field.
  auto& m = r.manifest;
  m["config"] = to_json(cfg);
  m["seeds"] = {{"master", cfg.seed},
                {"corpus", derive_seed(cfg.seed, "corpus")},
                {"target", derive_seed(cfg.seed, "target")},
                {"imitation", derive_seed(cfg.seed, "imitation")},
                {"defense.mask", derive_seed(cfg.seed, "defense.mask")}};
  m["environment"] = {{"compiler", __VERSION__}, {"cplusplus", __cplusplus}};
  m["corpus"] = {{"documents", S.dep.world.corpus->doc_count()},
                 {"topics", S.dep.world.topics.size()},
                 {"vocabulary", S.dep.world.corpus->vocabulary_tokens().size()}};
  m["phase1"] = {{"queries", attacker_queries(cfg, S.dep.world).size()},
                 {"triples", S.models.triples},
                 {"skipped", S.models.skipped},
                 {"epoch_losses", S.models.epoch_losses}};
  m["metric_calls"] = {
      {"imitation.surrogate_ndcg10", "eval_imitation -> ndcg_at(n=10)"},
      {"imitation.target_ndcg10", "eval_imitation -> ndcg_at(n=10)"},
      {"imitation.inter10", "eval_imitation -> inter_at(n=10)"},
      {"attacks.*.topics.top3_v", "top3_v"},
      {"attacks.*.topics.rasr_pct", "rasr"},
      {"attacks.*.topics.brank", "brank"},
      {"attacks.*.omsr_pct", "EvalSummary::aggregate -> omsr"},
      {"attacks.*.asv", "EvalSummary::aggregate -> asv"},
      {"tables.spamicity", "spamicity + detection_rate"},
      {"tables.density", "keyword_density"},
      {"tables.perplexity", "calibrate_band + perplexity_verdict"},
      {"tables.paraphrase", "paraphrase_query + omsr + asv"},
      {"tables.mask_smoothing", "masked_smooth_answer + omsr + asv"},
      {"tables.robust_aggregate", "robust_aggregate_answer + omsr + asv"},
      {"tables.leak_detection", "detect_leak_instruction + RagSystem::is_leak_instruction"},
      {"ablation_n", "flipped attack per N -> omsr + asv, mean over stances"},
      {"ablation_corpus", "flipped attack per corpus size -> omsr + asv, mean over stances"},
  };
  return r;
}

std::vector<CurveRow> run_ablation_n(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.n_list.empty()) throw ConfigError("N list is empty");
  Session S(cfg, std::nullopt, false);
  return stage("ablate-n", cfg.seed, [&] { return ablation_n_rows(S, cfg.n_list); });
}

std::vector<CurveRow> run_ablation_corpus(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.corpus_sizes.empty()) throw ConfigError("corpus size list is empty");
  for (std::size_t i = 0; i < cfg.corpus_sizes.size(); ++i) {
    if (cfg.corpus_sizes[i] > 1'000'000) throw ConfigError("corpus sizes above 1000000 are rejected");
    if (i > 0 && cfg.corpus_sizes[i] <= cfg.corpus_sizes[i - 1]) {
      throw ConfigError("corpus sizes must be strictly ascending");
    }
  }
  std::vector<CurveRow> rows;
  for (std::size_t size : cfg.corpus_sizes) {
    Session S(cfg, size, false);
    auto row = stage("ablate-corpus " + std::to_string(size), cfg.seed, [&] {
      return ablation_n_rows(S, {cfg.n_docs}).front();
    });
    row.x = static_cast<double>(size);
    if (!rows.empty() && rows.back().omsr_pct - row.omsr_pct > cfg.corpus_alarm) row.alarm = true;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fliprag
