/* Copyright 2026 The bild Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "bild/cli.h"

#include <algorithm>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "bild/alignment.h"
#include "bild/engine.h"
#include "bild/ngram_lm.h"
#include "bild/speculative.h"
#include "bild/synthetic.h"
#include "bild/trace.h"
#include "json.hpp"

namespace bild::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw InvalidInput("bad " + what + " '" + s + "'");
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() || base.empty() ? p : base / p;
}

ModelRef model_ref(const json& j, const fs::path& base) {
  ModelRef ref;
  if (j.is_string()) {
    ref.path = resolve(base, j.get<std::string>());
    return ref;
  }
  ref.path = resolve(base, j.at("path").get<std::string>());
  if (j.contains("kind")) {
    auto kind = j["kind"].get<std::string>();
    if (kind == "ngram") {
      ref.kind = ModelKind::kNgram;
    } else if (kind == "table") {
      ref.kind = ModelKind::kTable;
    } else {
      throw InvalidInput("unknown model kind '" + kind + "'");
    }
  }
  return ref;
}

ModelDescriptor descriptor(const json& j) {
  if (j.is_string()) {
    auto name = j.get<std::string>();
    if (name == "t5-large") return kT5Large;
    if (name == "t5-small") return kT5Small;
    if (name == "mt5-large") return kMt5Large;
    if (name == "mt5-small") return kMt5Small;
    throw InvalidInput("unknown descriptor preset '" + name + "'");
  }
  return descriptor_from_json(j.dump());
}

std::vector<double> grid(const json& j) {
  std::vector<double> out;
  for (const auto& v : j) {
    if (v.is_string()) {
      if (v.get<std::string>() != "inf") throw InvalidInput("grid values must be numbers or \"inf\"");
      out.push_back(std::numeric_limits<double>::infinity());
    } else {
      out.push_back(v.get<double>());
    }
  }
  if (out.empty()) throw InvalidInput("sweep grids must be non-empty");
  return out;
}

std::string run_label(std::size_t index) { return "p" + std::to_string(index); }

std::string grid_label(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "g%03zu", index);
  return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json summary_json(const RunSummary& s) {
  return {{"run_id", s.run_id},
          {"strategy", s.strategy},
          {"alpha_fb", format_number(s.alpha_fb)},
          {"alpha_rb", format_number(s.alpha_rb)},
          {"window_cap", s.window_cap},
          {"agreement", optional_json(s.agreement_with_reference)},
          {"perplexity", optional_json(s.perplexity_under_model)},
          {"fallback_pct", s.fallback_pct},
          {"rollback_pct", s.rollback_pct},
          {"modeled_speedup", optional_json(s.modeled_speedup)}};
}

std::string csv(const std::vector<RunSummary>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& r : rows) out += to_csv_row(r) + "\n";
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InvalidInput("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::unique_ptr<LanguageModel> open_model(const ModelRef& ref, const Vocabulary* vocab) {
  return load_model(ref.path, ref.kind, vocab);
}

}  // namespace

Strategy Strategy::parse(const std::string& text) {
  auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  auto need_arg = [&](double fallback) {
    return arg.empty() ? fallback : parse_number(arg, "strategy parameter");
  };
  Strategy s;
  if (name == "bild") {
    s.kind = Kind::kBild;
  } else if (name == "vanilla_small") {
    s.kind = Kind::kVanillaSmall;
  } else if (name == "vanilla_large") {
    s.kind = Kind::kVanillaLarge;
  } else if (name == "speculative") {
    s = {Kind::kSpeculative, need_arg(4)};
  } else if (name == "oracle_blend") {
    s = {Kind::kOracleBlend, need_arg(0.5)};
  } else if (name == "no_rollback") {
    s.kind = Kind::kNoRollback;
  } else if (name == "fixed_window") {
    s = {Kind::kFixedWindow, need_arg(1)};
  } else {
    throw InvalidInput("unknown strategy '" + text + "'");
  }
  if ((s.kind == Kind::kSpeculative || s.kind == Kind::kFixedWindow) &&
      (s.param < 1 || s.param != static_cast<int>(s.param))) {
    throw InvalidInput("strategy '" + text + "' needs a positive integer window");
  }
  return s;
}

std::string Strategy::to_string() const {
  switch (kind) {
    case Kind::kBild:
      return "bild";
    case Kind::kVanillaSmall:
      return "vanilla_small";
    case Kind::kVanillaLarge:
      return "vanilla_large";
    case Kind::kSpeculative:
      return "speculative:" + std::to_string(static_cast<int>(param));
    case Kind::kOracleBlend:
      return "oracle_blend:" + format_number(param);
    case Kind::kNoRollback:
      return "no_rollback";
    case Kind::kFixedWindow:
      return "fixed_window:" + std::to_string(static_cast<int>(param));
  }
  return "bild";
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const fs::path& base) {
  ExperimentConfig c;
  try {
    json doc = json::parse(text);
    if (!doc.is_object()) throw InvalidInput("config must be a JSON object");
    c.small_model = model_ref(doc.at("small_model"), base);
    c.large_model = model_ref(doc.at("large_model"), base);
    c.prompts = resolve(base, doc.at("prompts").get<std::string>());
    if (doc.contains("vocab")) c.vocab = resolve(base, doc["vocab"].get<std::string>());
    if (doc.contains("eval_model")) c.eval_model = model_ref(doc["eval_model"], base);
    if (doc.contains("policy")) c.policy = PolicyConfig::from_json(doc["policy"].dump());
    const std::uint64_t seed = doc.value("seed", std::uint64_t{0});
    c.sampler = Sampler::parse(doc.value("sampler", std::string("greedy")), seed);
    if (doc.contains("max_len")) c.max_len = doc["max_len"].get<std::size_t>();
    if (doc.contains("out")) c.out = resolve(base, doc["out"].get<std::string>());
    if (doc.contains("strategy")) c.strategies = {Strategy::parse(doc["strategy"].get<std::string>())};
    if (doc.contains("strategies")) {
      c.strategies.clear();
      for (const auto& s : doc["strategies"]) c.strategies.push_back(Strategy::parse(s.get<std::string>()));
      if (c.strategies.empty()) throw InvalidInput("strategies must be non-empty");
    }
    if (doc.contains("sweep")) {
      const auto& sw = doc["sweep"];
      if (sw.contains("alpha_fb")) c.alpha_fb_grid = grid(sw["alpha_fb"]);
      if (sw.contains("alpha_rb")) c.alpha_rb_grid = grid(sw["alpha_rb"]);
    }
    if (doc.contains("descriptors")) {
      const auto& d = doc["descriptors"];
      if (d.contains("small")) c.small_desc = descriptor(d["small"]);
      if (d.contains("large")) c.large_desc = descriptor(d["large"]);
    }
    if (doc.contains("roofline")) {
      c.roofline.peak_flops = doc["roofline"].value("peak_flops", 0.0);
      c.roofline.peak_bandwidth = doc["roofline"].value("peak_bandwidth", 0.0);
    }
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("malformed config: ") + e.what());
  }
  if (c.max_len < 1) throw InvalidInput("max_len must be >= 1");
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  try {
    return parse(read_file(path), path.parent_path());
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.find(path.string()) != std::string::npos) throw;
    throw InvalidInput(path.string() + ": " + msg);
  }
}

void apply_overrides(const Overrides& o, ExperimentConfig& c) {
  if (o.alpha_fb) c.policy.alpha_fb = *o.alpha_fb;
  if (o.alpha_rb) c.policy.alpha_rb = *o.alpha_rb;
  if (o.window_cap) c.policy.window_cap = *o.window_cap;
  if (o.seed) c.sampler.seed = *o.seed;
  if (o.strategy) c.strategies = {Strategy::parse(*o.strategy)};
  if (o.max_len) c.max_len = *o.max_len;
  if (o.out) c.out = *o.out;
  c.policy.validate();
  if (c.max_len < 1) throw InvalidInput("max_len must be >= 1");
}

Workspace Workspace::open(const ExperimentConfig& config) {
  std::optional<Vocabulary> vocab;
  if (config.vocab) vocab = load_vocabulary(*config.vocab);
  const Vocabulary* vp = vocab ? &*vocab : nullptr;
  Workspace ws{vocab.value_or(Vocabulary(2, 1)), open_model(config.small_model, vp),
               open_model(config.large_model, vp), nullptr, {}};
  require_same_vocabulary(*ws.small, *ws.large);
  if (!vocab) ws.vocab = ws.small->vocabulary();
  if (config.eval_model) {
    ws.eval = open_model(*config.eval_model, vp);
    require_same_vocabulary(*ws.small, *ws.eval);
  }
  ws.prompts = load_corpus(config.prompts, ws.vocab);
  if (ws.prompts.empty()) throw InvalidInput(config.prompts.string() + ": no prompts");
  return ws;
}

StrategyRun run_strategy(const Workspace& ws, const ExperimentConfig& config,
                         const Strategy& strategy, const PolicyConfig& policy,
                         std::size_t index) {
  const TokenSeq& prompt = ws.prompts.at(index);
  Sampler sampler = config.sampler;
  sampler.seed = derive_seed(config.sampler.seed, index);
  const auto& small = *ws.small;
  const auto& large = *ws.large;
  const std::size_t n = config.max_len;

  StrategyRun run;
  using K = Strategy::Kind;
  switch (strategy.kind) {
    case K::kBild:
      run.result = bild_decode(small, large, policy, sampler, prompt, n);
      break;
    case K::kVanillaSmall:
      run.result = vanilla_decode(small, prompt, sampler, n, Provenance::kSmall);
      break;
    case K::kVanillaLarge:
      run.result = vanilla_decode(large, prompt, sampler, n, Provenance::kLarge);
      break;
    case K::kSpeculative:
      run.result = speculative_decode(
          small, large, SpecConfig{static_cast<int>(strategy.param), sampler.seed}, sampler, prompt, n);
      break;
    case K::kOracleBlend:
      run.result = oracle_blend_decode(small, large, strategy.param, sampler, prompt, n);
      break;
    case K::kNoRollback:
      run.result = ablation_decode(AblationVariant::no_rollback(), small, large, policy, sampler,
                                   prompt, n);
      break;
    case K::kFixedWindow:
      run.result = ablation_decode(AblationVariant::fixed_window(static_cast<int>(strategy.param)),
                                   small, large, policy, sampler, prompt, n);
      break;
  }
  const TokenSeq reference = vanilla_decode(large, prompt, sampler, n, Provenance::kLarge).sequence;
  run.tally = tally_trace(run.result.trace, config.small_desc, config.large_desc, config.roofline, n);
  run.summary = summarize(run.result, &run.tally, &reference, &ws.evaluator(), prompt);
  run.summary.run_id = run_label(index);
  run.summary.strategy = strategy.to_string();
  run.summary.alpha_fb = policy.alpha_fb;
  run.summary.alpha_rb = policy.alpha_rb;
  run.summary.window_cap = policy.window_cap;
  return run;
}

RunSummary aggregate(const std::vector<StrategyRun>& runs, const std::string& run_id,
                     const std::string& strategy, const PolicyConfig& policy) {
  RunSummary s;
  s.run_id = run_id;
  s.strategy = strategy;
  s.alpha_fb = policy.alpha_fb;
  s.alpha_rb = policy.alpha_rb;
  s.window_cap = policy.window_cap;
  double agree = 0.0, ppl = 0.0, vanilla = 0.0, bild = 0.0;
  std::size_t n_agree = 0, n_ppl = 0;
  Counters& c = s.counters;
  for (const auto& r : runs) {
    if (auto a = r.summary.agreement_with_reference) agree += *a, ++n_agree;
    if (auto p = r.summary.perplexity_under_model) ppl += *p, ++n_ppl;
    vanilla += r.tally.vanilla_latency;
    bild += r.tally.bild_latency;
    const Counters& rc = r.result.counters;
    c.small_tokens += rc.small_tokens;
    c.large_tokens += rc.large_tokens;
    c.fallback_count += rc.fallback_count;
    c.rollback_count += rc.rollback_count;
    c.tokens_discarded += rc.tokens_discarded;
    c.small_calls += rc.small_calls;
    c.large_calls += rc.large_calls;
    c.small_emitted += rc.small_emitted;
  }
  if (n_agree) s.agreement_with_reference = agree / static_cast<double>(n_agree);
  if (n_ppl) s.perplexity_under_model = ppl / static_cast<double>(n_ppl);
  s.fallback_pct = fallback_fraction(c);
  s.rollback_pct = rollback_fraction(c);
  if (bild > 0.0) s.modeled_speedup = vanilla / bild;
  return s;
}

std::vector<std::size_t> pareto_front(const std::vector<RunSummary>& rows) {
  std::vector<std::size_t> out;
  auto usable = [](const RunSummary& r) {
    return r.agreement_with_reference.has_value() && r.modeled_speedup.has_value();
  };
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!usable(rows[i])) continue;
    const double qi = *rows[i].agreement_with_reference, si = *rows[i].modeled_speedup;
    bool dominated = false;
    for (std::size_t j = 0; j < rows.size() && !dominated; ++j) {
      if (j == i || !usable(rows[j])) continue;
      const double qj = *rows[j].agreement_with_reference, sj = *rows[j].modeled_speedup;
      dominated = qj >= qi && sj >= si && (qj > qi || sj > si);
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

int cmd_decode(const ExperimentConfig& config, std::ostream& out) {
  Workspace ws = Workspace::open(config);
  const Strategy& strategy = config.strategies.front();
  std::vector<StrategyRun> runs;
  for (std::size_t i = 0; i < ws.prompts.size(); ++i) {
    runs.push_back(run_strategy(ws, config, strategy, config.policy, i));
  }

  ensure_dir(config.out);
  json summary = json::array();
  std::vector<RunSummary> rows;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    write_file_atomic(config.out / ("trace_" + run_label(i) + ".jsonl"),
                      trace_to_jsonl(r.result.trace));
    json entry = summary_json(r.summary);
    entry["prompt"] = format_sequence(ws.prompts[i], ws.vocab);
    entry["output"] = format_sequence(r.result.sequence, ws.vocab);
    entry["result"] = json::parse(result_summary_json(r.result));
    entry["cost"] = json::parse(r.tally.to_json());
    summary.push_back(std::move(entry));
    rows.push_back(r.summary);
  }
  write_file_atomic(config.out / "summary.json", summary.dump(2) + "\n");
  write_file_atomic(config.out / "summary.csv", csv(rows));

  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& r = runs[i];
    const auto& c = r.result.counters;
    out << run_label(i) << " " << strategy.to_string() << ": "
        << format_sequence(r.result.sequence, ws.vocab) << "  [small " << c.small_tokens
        << ", large " << c.large_tokens << ", fallbacks " << c.fallback_count << ", rollbacks "
        << c.rollback_count << ", speedup " << format_number(r.tally.speedup_estimate) << "]\n";
  }
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& config, std::ostream& out) {
  Workspace ws = Workspace::open(config);
  const Strategy bild{Strategy::Kind::kBild, 0.0};
  std::vector<RunSummary> rows;
  std::size_t g = 0;
  for (double fb : config.alpha_fb_grid) {
    for (double rb : config.alpha_rb_grid) {
      PolicyConfig policy = config.policy;
      policy.alpha_fb = fb;
      policy.alpha_rb = rb;
      policy.validate();
      std::vector<StrategyRun> runs;
      for (std::size_t i = 0; i < ws.prompts.size(); ++i) {
        runs.push_back(run_strategy(ws, config, bild, policy, i));
      }
      rows.push_back(aggregate(runs, grid_label(g++), bild.to_string(), policy));
    }
  }
  std::vector<RunSummary> front;
  for (std::size_t i : pareto_front(rows)) front.push_back(rows[i]);

  ensure_dir(config.out);
  write_file_atomic(config.out / "sweep.csv", csv(rows));
  write_file_atomic(config.out / "pareto.csv", csv(front));
  out << rows.size() << " grid points, " << front.size() << " on the pareto front -> "
      << (config.out / "sweep.csv").string() << "\n";
  return kExitOk;
}

int cmd_compare(const ExperimentConfig& config, std::ostream& out) {
  if (config.strategies.size() < 2) throw InvalidInput("compare needs at least two strategies");
  Workspace ws = Workspace::open(config);
  std::string text = csv_header() +
                     ",small_calls,large_calls,fallback_count,rollback_count,tokens_discarded,"
                     "small_emitted,bild_flops,bild_mops,vanilla_mops,mops_ratio\n";
  for (const auto& strategy : config.strategies) {
    std::vector<StrategyRun> runs;
    WorkloadTally bild, vanilla;
    for (std::size_t i = 0; i < ws.prompts.size(); ++i) {
      runs.push_back(run_strategy(ws, config, strategy, config.policy, i));
      bild += runs.back().tally.bild;
      vanilla += runs.back().tally.vanilla_large_equivalent;
    }
    RunSummary s = aggregate(runs, strategy.to_string(), strategy.to_string(), config.policy);
    const Counters& c = s.counters;
    std::ostringstream row;
    row << to_csv_row(s) << ',' << c.small_calls << ',' << c.large_calls << ',' << c.fallback_count
        << ',' << c.rollback_count << ',' << c.tokens_discarded << ',' << c.small_emitted << ','
        << format_number(bild.flops) << ',' << format_number(bild.mops()) << ','
        << format_number(vanilla.mops()) << ','
        << format_number(bild.mops() > 0 ? vanilla.mops() / bild.mops() : 0.0) << '\n';
    text += row.str();
    out << strategy.to_string() << ": agreement "
        << (s.agreement_with_reference ? format_number(*s.agreement_with_reference) : "-")
        << ", large calls " << c.large_calls << ", fallback_pct " << format_number(s.fallback_pct)
        << ", rollback_pct " << format_number(s.rollback_pct) << "\n";
  }
  ensure_dir(config.out);
  write_file_atomic(config.out / "compare.csv", text);
  return kExitOk;
}

int cmd_cost(const fs::path& trace_path, const ModelDescriptor& small, const ModelDescriptor& large,
             const Roofline& roofline, std::optional<std::size_t> max_len,
             const std::optional<fs::path>& out, std::ostream& os) {
  Trace trace;
  try {
    trace = trace_from_jsonl(read_file(trace_path));
  } catch (const InvalidTrace& e) {
    throw InvalidInput(trace_path.string() + ": " + e.what());
  }
  const TallyReport report = tally_trace(trace, small, large, roofline, max_len);
  const std::string text = json::parse(report.to_json()).dump(2) + "\n";
  if (out) {
    write_file_atomic(*out, text);
  } else {
    os << text;
  }
  return kExitOk;
}

int cmd_fit(const fs::path& corpus, const fs::path& vocab_path, int order, double smoothing,
            const fs::path& out, std::ostream& os) {
  const Vocabulary vocab = load_vocabulary(vocab_path);
  const auto data = load_corpus(corpus, vocab);
  NgramLM model = fit_ngram(data, vocab, order, smoothing);
  write_file_atomic(out, model.to_json() + "\n");
  os << "fit order-" << order << " model on " << data.size() << " sequences -> " << out.string()
     << "\n";
  return kExitOk;
}

int cmd_align(const ModelRef& large_ref, const fs::path& prompts_path,
              const std::optional<fs::path>& vocab_path, int order, double smoothing,
              std::size_t max_len, const fs::path& out, std::ostream& os) {
  std::optional<Vocabulary> vocab;
  if (vocab_path) vocab = load_vocabulary(*vocab_path);
  auto large = open_model(large_ref, vocab ? &*vocab : nullptr);
  const auto prompts = load_corpus(prompts_path, large->vocabulary());
  AlignedModel aligned = align_small(*large, prompts, order, smoothing, max_len);
  write_file_atomic(out, aligned.model.to_json() + "\n");
  os << "aligned order-" << order << " model on " << prompts.size()
     << " large-model generations -> " << out.string() << "\n";
  return kExitOk;
}

int cmd_synth(std::uint64_t seed, const fs::path& dir, std::ostream& os) {
  synthetic::Task task = synthetic::make_task(seed);
  ensure_dir(dir);
  write_file_atomic(dir / "vocab.txt", format_vocabulary(task.vocab));
  write_file_atomic(dir / "small.json", task.small.to_json() + "\n");
  write_file_atomic(dir / "large.json", task.large.to_json() + "\n");
  write_file_atomic(dir / "gold.json", task.gold.to_json() + "\n");
  write_file_atomic(dir / "prompts.txt", format_corpus(task.prompts, task.vocab));
  json config = {{"small_model", "small.json"},
                 {"large_model", "large.json"},
                 {"eval_model", "gold.json"},
                 {"vocab", "vocab.txt"},
                 {"prompts", "prompts.txt"},
                 {"policy", json::parse(PolicyConfig{}.to_json())},
                 {"sampler", "greedy"},
                 {"seed", seed},
                 {"max_len", 24},
                 {"out", "out"},
                 {"strategies", {"bild", "vanilla_large", "speculative:4", "no_rollback",
                                 "fixed_window:4"}},
                 {"sweep", {{"alpha_fb", {0.5, 0.6, 0.7, 0.8, 0.9}},
                            {"alpha_rb", {1.0, 2.0, 3.0, 5.0, 10.0}}}},
                 {"descriptors", {{"small", "t5-small"}, {"large", "t5-large"}}}};
  write_file_atomic(dir / "config.json", config.dump(2) + "\n");
  os << "wrote synthetic experiment to " << dir.string() << "\n";
  return kExitOk;
}

namespace {

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--alpha-fb", o.alpha_fb, "fallback threshold");
  cmd->add_option("--alpha-rb", o.alpha_rb, "rollback threshold");
  cmd->add_option("--window-cap", o.window_cap, "max drafted tokens per round (0: no cap)");
  cmd->add_option("--seed", o.seed, "sampler seed");
  cmd->add_option("--strategy", o.strategy, "decoding strategy");
  cmd->add_option("--max-len", o.max_len, "max generated tokens");
  cmd->add_option("--out", o.out, "output directory");
}

ModelDescriptor descriptor_arg(const std::string& s) {
  if (fs::exists(s)) return descriptor_from_json(read_file(s));
  return descriptor(json(s));
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"bild: small/large collaborative decoding experiments"};
  app.require_subcommand(1);

  fs::path config_path;
  Overrides overrides;
  auto* decode = app.add_subcommand("decode", "decode every prompt with one strategy");
  auto* sweep = app.add_subcommand("sweep", "grid over alpha_fb x alpha_rb");
  auto* compare = app.add_subcommand("compare", "side-by-side strategies");
  for (auto* cmd : {decode, sweep, compare}) {
    cmd->add_option("config", config_path, "experiment config JSON")->required();
    add_overrides(cmd, overrides);
  }

  fs::path trace_path;
  std::string small_desc = "t5-small", large_desc = "t5-large";
  double peak_flops = 0.0, peak_bw = 0.0;
  std::optional<std::size_t> cost_max_len;
  std::optional<fs::path> cost_out;
  auto* cost = app.add_subcommand("cost", "tally FLOPs and memory traffic for a trace");
  cost->add_option("trace", trace_path, "trace JSONL")->required();
  cost->add_option("--small", small_desc, "small descriptor preset or JSON file");
  cost->add_option("--large", large_desc, "large descriptor preset or JSON file");
  cost->add_option("--peak-flops", peak_flops, "FLOP/s (0: unset)");
  cost->add_option("--peak-bandwidth", peak_bw, "bytes/s (0: unset)");
  cost->add_option("--max-len", cost_max_len, "cut the sequence to this length");
  cost->add_option("--out", cost_out, "write JSON here instead of stdout");

  fs::path corpus, vocab_path, model_out, large_path, prompts_path;
  std::optional<fs::path> align_vocab;
  int order = 2;
  double smoothing = 0.5;
  std::size_t align_len = 32;
  auto* fit = app.add_subcommand("fit", "fit an n-gram model on a corpus");
  fit->add_option("corpus", corpus)->required();
  fit->add_option("--vocab", vocab_path)->required();
  fit->add_option("--order", order);
  fit->add_option("--smoothing", smoothing);
  fit->add_option("--out", model_out)->required();

  auto* align = app.add_subcommand("align", "fit a small model on large-model generations");
  align->add_option("large", large_path, "large model file")->required();
  align->add_option("--prompts", prompts_path)->required();
  align->add_option("--vocab", align_vocab);
  align->add_option("--order", order);
  align->add_option("--smoothing", smoothing);
  align->add_option("--max-len", align_len);
  align->add_option("--out", model_out)->required();

  std::uint64_t synth_seed = 0;
  fs::path synth_dir;
  auto* synth = app.add_subcommand("synth", "write a synthetic experiment directory");
  synth->add_option("dir", synth_dir)->required();
  synth->add_option("--seed", synth_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (decode->parsed() || sweep->parsed() || compare->parsed()) {
      ExperimentConfig config = ExperimentConfig::load(config_path);
      apply_overrides(overrides, config);
      if (decode->parsed()) return cmd_decode(config, out);
      if (sweep->parsed()) return cmd_sweep(config, out);
      return cmd_compare(config, out);
    }
    if (cost->parsed()) {
      return cmd_cost(trace_path, descriptor_arg(small_desc), descriptor_arg(large_desc),
                      Roofline{peak_flops, peak_bw}, cost_max_len, cost_out, out);
    }
    if (fit->parsed()) return cmd_fit(corpus, vocab_path, order, smoothing, model_out, out);
    if (align->parsed()) {
      return cmd_align(ModelRef{large_path, std::nullopt}, prompts_path, align_vocab, order,
                       smoothing, align_len, model_out, out);
    }
    return cmd_synth(synth_seed, synth_dir, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitVocabMismatch;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace bild::cli
