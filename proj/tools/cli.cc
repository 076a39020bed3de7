/*
 * Copyright 2026 The cohs-cqg Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "cohs/corpus.h"
#include "cohs/errors.h"
#include "cohs/metrics.h"
#include "cohs/pipeline.h"
#include "cohs/prompting.h"
#include "cohs/relevance.h"
#include "cohs/selector.h"
#include "cohs/services.h"
#include "json.hpp"

namespace cohs::cli {
namespace {

using ordered_json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string embedder = "stub:7";
  std::string generator = "stub:7";
  std::string qa = "stub:7";
  std::string extractor = "stub:7";
  std::string p;  // empty: per-command default
  std::string mode = "cohs";
  int k_fixed = 3;
  int timeout_ms = 30000;
  int retries = 2;
  std::string dataset;
  std::string context;
  std::string turn = "all";
  std::string out;
  std::string split;
  int max_turns = 5;
  bool no_ae = false;
  bool no_qf = false;
  std::string references;
  std::string hypotheses;
};

// Options that a JSON config file may also set. Flags given on the command
// line win over the file.
struct ConfigKey {
  std::string key;
  CLI::Option* option;
  std::function<void(const nlohmann::json&)> assign;
};

double parse_threshold(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") {
    return std::numeric_limits<double>::infinity();
  }
  std::size_t used = 0;
  double p;
  try {
    p = std::stod(text, &used);
  } catch (const std::exception&) {
    throw UsageError("invalid threshold \"" + text + "\"");
  }
  if (used != text.size() || !std::isfinite(p) || p < 0.0) {
    throw UsageError("threshold must be a number >= 0 or \"inf\", got \"" + text + "\"");
  }
  return p;
}

std::vector<double> parse_threshold_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_threshold(item));
  }
  if (out.empty()) throw UsageError("empty threshold list");
  return out;
}

SelectionParams selection_params(const RunConfig& cfg, double p) {
  SelectionParams params;
  params.p = p;
  try {
    params.mode = parse_selection_mode(cfg.mode);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  params.k_fixed = cfg.k_fixed;
  params.validate();
  return params;
}

std::uint64_t parse_seed(const std::string& spec) {
  const std::string digits = spec.substr(5);
  std::size_t used = 0;
  try {
    std::uint64_t seed = std::stoull(digits, &used);
    if (used == digits.size()) return seed;
  } catch (const std::exception&) {
  }
  throw UsageError("invalid stub seed in \"" + spec + "\"");
}

ServiceEndpoint endpoint_for(const RunConfig& cfg, const std::string& url) {
  ServiceEndpoint e{url, cfg.timeout_ms, cfg.retries};
  e.validate();
  return e;
}

bool is_stub(const std::string& spec) { return spec.rfind("stub:", 0) == 0; }
bool is_http(const std::string& spec) { return spec.rfind("http://", 0) == 0; }

ServiceClients build_clients(const RunConfig& cfg) {
  ServiceClients clients;
  if (is_stub(cfg.embedder)) {
    clients.embedder = make_stub_suite(parse_seed(cfg.embedder)).embedder;
  } else if (is_http(cfg.embedder)) {
    clients.embedder = make_http_embedder(endpoint_for(cfg, cfg.embedder));
  } else if (cfg.embedder.rfind("file:", 0) == 0) {
    clients.embedder = make_table_embedder(load_embeddings(cfg.embedder.substr(5)));
  } else {
    throw UsageError("--embedder must be stub:<seed>, http://... or file:<path>");
  }

  auto role = [&](const std::string& spec, const char* flag, auto from_stub, auto from_http) {
    if (is_stub(spec)) return from_stub(make_stub_suite(parse_seed(spec)));
    if (is_http(spec)) return from_http(endpoint_for(cfg, spec));
    throw UsageError(std::string(flag) + " must be stub:<seed> or http://...");
  };
  clients.generator = role(
      cfg.generator, "--generator", [](const ServiceClients& s) { return s.generator; },
      [](ServiceEndpoint e) { return make_http_generator(std::move(e)); });
  clients.qa = role(
      cfg.qa, "--qa", [](const ServiceClients& s) { return s.qa; },
      [](ServiceEndpoint e) { return make_http_qa(std::move(e)); });
  clients.extractor = role(
      cfg.extractor, "--extractor", [](const ServiceClients& s) { return s.extractor; },
      [](ServiceEndpoint e) { return make_http_extractor(std::move(e)); });
  return clients;
}

std::vector<Conversation> load_dataset(const RunConfig& cfg) {
  if (cfg.dataset.empty()) throw UsageError("--dataset is required");
  return load_coqa_file(cfg.dataset);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

// Writes to --out when given, otherwise to the command's stdout.
void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + cfg.out);
  file << text;
}

struct TurnRef {
  std::string conversation_id;
  int turn = 0;
};

TurnRef parse_turn_ref(const std::string& spec) {
  std::size_t colon = spec.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw UsageError("--turn must be <conversation_id>:<turn>, got \"" + spec + "\"");
  }
  TurnRef ref{spec.substr(0, colon), 0};
  try {
    std::size_t used = 0;
    ref.turn = std::stoi(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw UsageError("invalid turn number in \"" + spec + "\"");
  }
  return ref;
}

const Conversation& find_conversation(const std::vector<Conversation>& corpus,
                                      const std::string& id) {
  for (const auto& conv : corpus) {
    if (conv.id == id) return conv;
  }
  throw UsageError("no conversation with id \"" + id + "\"");
}

ordered_json selection_record(const std::string& conv_id, int turn, const Selection& s) {
  ordered_json r;
  r["conversation_id"] = conv_id;
  r["turn"] = turn;
  r["window_start"] = s.window_start;
  r["u"] = s.u;
  r["k"] = s.k;
  r["sum"] = s.achieved_sum;
  r["fallback"] = s.fallback;
  return r;
}

constexpr const char* kDefaultThreshold = "5";
constexpr const char* kDefaultSweep = "1,2,3,5,7,10,inf";

double single_threshold(const RunConfig& cfg) {
  return parse_threshold(cfg.p.empty() ? kDefaultThreshold : cfg.p);
}

int cmd_select(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const SelectionParams params = selection_params(cfg, single_threshold(cfg));
  const auto corpus = load_dataset(cfg);
  const ServiceClients clients = build_clients(cfg);

  std::string lines;
  if (cfg.turn != "all") {
    TurnRef ref = parse_turn_ref(cfg.turn);
    const Conversation& conv = find_conversation(corpus, ref.conversation_id);
    TurnSelection ts = select_turn(make_answer_aware_task(conv, ref.turn), params,
                                   *clients.embedder);
    lines = selection_record(conv.id, ref.turn, ts.selection).dump() + "\n";
  } else {
    std::size_t skipped = 0;
    for (const auto& conv : corpus) {
      if (conv.turns.size() < 2) continue;
      const ConversationEmbeddings embs = embed_conversation(conv, *clients.embedder);
      for (std::size_t n = 2; n <= conv.turns.size(); ++n) {
        const QATurn& target = conv.turns[n - 1];
        std::size_t c_s;
        try {
          if (!target.rationale_span) throw LocateError("no rationale");
          c_s = locate_rationale(conv.context, *target.rationale_span);
        } catch (const LocateError&) {
          ++skipped;
          continue;
        }
        Selection s = select_for_turn(embs.relevance_for_turn(static_cast<int>(n)), c_s, params);
        lines += selection_record(conv.id, static_cast<int>(n), s).dump() + "\n";
      }
    }
    if (skipped > 0) {
      err << "skipped " << skipped << " turn(s) without a locatable rationale\n";
    }
  }
  emit(cfg, out, lines);
  return kOk;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  const std::vector<double> thresholds =
      parse_threshold_list(cfg.p.empty() ? kDefaultSweep : cfg.p);
  const SelectionParams params = selection_params(cfg, thresholds.front());
  const auto corpus = load_dataset(cfg);
  const ServiceClients clients = build_clients(cfg);
  const auto rows = selection_stats(corpus, *clients.embedder, params, thresholds);

  out << "# mode=" << cfg.mode;
  if (!cfg.split.empty()) out << " split=" << cfg.split;
  out << " turns=" << rows.front().samples << '\n';
  out << format_stats_table(rows);
  if (!cfg.out.empty()) {
    std::ofstream file(cfg.out, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot write " + cfg.out);
    file << to_json(rows) << '\n';
  }
  return kOk;
}

int cmd_prompt(const RunConfig& cfg, std::ostream& out) {
  const SelectionParams params = selection_params(cfg, single_threshold(cfg));
  const auto corpus = load_dataset(cfg);
  if (cfg.turn == "all") throw UsageError("--turn <conversation_id>:<turn> is required");
  const TurnRef ref = parse_turn_ref(cfg.turn);
  const Conversation& conv = find_conversation(corpus, ref.conversation_id);
  const ServiceClients clients = build_clients(cfg);

  TurnTask task = make_answer_aware_task(conv, ref.turn);
  TurnSelection ts = select_turn(task, params, *clients.embedder);
  std::string prompt = assemble_prompt(make_prompt_spec(
      task.context, task.history, ts.selection, *task.target_answer, *task.rationale_text));
  emit(cfg, out, prompt + "\n");
  return kOk;
}

int cmd_pipeline(const RunConfig& cfg, std::ostream& out) {
  const SelectionParams params = selection_params(cfg, single_threshold(cfg));
  if (cfg.context.empty()) throw UsageError("--context is required");
  if (cfg.max_turns < 1) throw UsageError("--max-turns must be >= 1");
  ContextDoc context(read_file(cfg.context));
  const ServiceClients clients = build_clients(cfg);

  PipelineOptions options;
  options.use_extractor = !cfg.no_ae;
  options.use_filter = !cfg.no_qf;
  std::vector<QATurn> turns = run_conversation(context, cfg.max_turns, params, clients, options);

  std::vector<Conversation> result;
  result.push_back(Conversation{std::filesystem::path(cfg.context).stem().string(),
                                std::move(context), std::move(turns)});
  emit(cfg, out, to_coqa_json(result) + "\n");
  return kOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  if (cfg.references.empty() || cfg.hypotheses.empty()) {
    throw UsageError("--references and --hypotheses are required");
  }
  const auto ref_lines = read_lines(cfg.references);
  const auto hyp_lines = read_lines(cfg.hypotheses);
  if (ref_lines.size() != hyp_lines.size()) {
    throw UsageError("references have " + std::to_string(ref_lines.size()) +
                     " lines but hypotheses have " + std::to_string(hyp_lines.size()));
  }
  std::vector<Tokens> refs;
  std::vector<Tokens> hyps;
  double rouge_total = 0.0;
  for (std::size_t i = 0; i < ref_lines.size(); ++i) {
    refs.push_back(tokenize(ref_lines[i]));
    hyps.push_back(tokenize(hyp_lines[i]));
    if (refs.back().empty() || hyps.back().empty()) {
      throw UsageError("line " + std::to_string(i + 1) + " is empty");
    }
    rouge_total += rouge_l(refs.back(), hyps.back());
  }
  BleuReport bleu = corpus_bleu(refs, hyps);
  ordered_json report = ordered_json::parse(to_json(bleu));
  report["rouge_l"] = refs.empty() ? 0.0 : rouge_total / static_cast<double>(refs.size());
  report["segments"] = refs.size();
  emit(cfg, out, report.dump() + "\n");
  return kOk;
}

void add_service_options(CLI::App* sub, RunConfig& cfg, std::vector<ConfigKey>& keys) {
  auto str = [&](const char* flag, const char* key, std::string& field, const char* help) {
    CLI::Option* opt = sub->add_option(flag, field, help);
    keys.push_back({key, opt, [&field](const nlohmann::json& v) { field = v.get<std::string>(); }});
  };
  auto num = [&](const char* flag, const char* key, int& field, const char* help) {
    CLI::Option* opt = sub->add_option(flag, field, help);
    keys.push_back({key, opt, [&field](const nlohmann::json& v) { field = v.get<int>(); }});
  };
  str("--embedder", "embedder", cfg.embedder, "stub:<seed>, http://host:port or file:<jsonl>");
  str("--generator", "generator", cfg.generator, "stub:<seed> or http://host:port");
  str("--qa", "qa", cfg.qa, "stub:<seed> or http://host:port");
  str("--extractor", "extractor", cfg.extractor, "stub:<seed> or http://host:port");
  num("--timeout-ms", "timeout_ms", cfg.timeout_ms, "per-request timeout");
  num("--retries", "retries", cfg.retries, "retries on transport failure");
}

void add_selection_options(CLI::App* sub, RunConfig& cfg, std::vector<ConfigKey>& keys,
                           const char* p_help) {
  CLI::Option* p = sub->add_option("--p", cfg.p, p_help);
  keys.push_back({"p", p, [&cfg](const nlohmann::json& v) {
                    cfg.p = v.is_string() ? v.get<std::string>() : v.dump();
                  }});
  CLI::Option* mode = sub->add_option("--mode", cfg.mode, "cohs | dyn_cs | dyn_hs | static");
  keys.push_back({"mode", mode, [&cfg](const nlohmann::json& v) { cfg.mode = v.get<std::string>(); }});
  CLI::Option* k = sub->add_option("--k-fixed", cfg.k_fixed, "history turns kept by dyn_cs");
  keys.push_back({"k_fixed", k, [&cfg](const nlohmann::json& v) { cfg.k_fixed = v.get<int>(); }});
}

void add_path_option(CLI::App* sub, const char* flag, const char* key, std::string& field,
                     std::vector<ConfigKey>& keys, const char* help) {
  CLI::Option* opt = sub->add_option(flag, field, help);
  keys.push_back({key, opt, [&field](const nlohmann::json& v) { field = v.get<std::string>(); }});
}

void apply_config_file(const std::string& path, const std::vector<ConfigKey>& keys) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw UsageError("config " + path + " must be a JSON object");
  for (const auto& [name, value] : doc.items()) {
    bool known = false;
    for (const auto& key : keys) {
      if (key.key != name) continue;
      known = true;
      if (key.option->count() > 0) break;
      try {
        key.assign(value);
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("config key \"" + name + "\": " + e.what());
      }
    }
    if (!known) throw UsageError("config " + path + ": unknown key \"" + name + "\"");
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Context and history selection for conversational question generation"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_path;

  CLI::App* select = app.add_subcommand("select", "per-turn selections as JSON lines");
  CLI::App* analyze = app.add_subcommand("analyze", "average selection size per threshold");
  CLI::App* prompt = app.add_subcommand("prompt", "print the generator input for one turn");
  CLI::App* pipeline = app.add_subcommand("pipeline", "generate a conversation from a context");
  CLI::App* eval = app.add_subcommand("eval", "BLEU 1-4 and ROUGE-L of hypotheses");

  std::vector<ConfigKey> select_keys, analyze_keys, prompt_keys, pipeline_keys, eval_keys;
  for (CLI::App* sub : {select, analyze, prompt, pipeline, eval}) {
    sub->add_option("--config", config_path, "JSON config file; flags override it");
  }

  add_path_option(select, "--dataset", "dataset", cfg.dataset, select_keys, "CoQA JSON file");
  add_path_option(select, "--turn", "turn", cfg.turn, select_keys, "all or <conversation_id>:<turn>");
  add_path_option(select, "--out", "out", cfg.out, select_keys, "output file (default stdout)");
  add_selection_options(select, cfg, select_keys, "threshold (number or inf)");
  add_service_options(select, cfg, select_keys);

  add_path_option(analyze, "--dataset", "dataset", cfg.dataset, analyze_keys, "CoQA JSON file");
  add_path_option(analyze, "--split", "split", cfg.split, analyze_keys, "split label for the report");
  add_path_option(analyze, "--out", "out", cfg.out, analyze_keys, "JSON report file");
  add_selection_options(analyze, cfg, analyze_keys, "comma-separated thresholds");
  add_service_options(analyze, cfg, analyze_keys);

  add_path_option(prompt, "--dataset", "dataset", cfg.dataset, prompt_keys, "CoQA JSON file");
  add_path_option(prompt, "--turn", "turn", cfg.turn, prompt_keys, "<conversation_id>:<turn>");
  add_path_option(prompt, "--out", "out", cfg.out, prompt_keys, "output file (default stdout)");
  add_selection_options(prompt, cfg, prompt_keys, "threshold (number or inf)");
  add_service_options(prompt, cfg, prompt_keys);

  add_path_option(pipeline, "--context", "context", cfg.context, pipeline_keys, "plain-text context file");
  add_path_option(pipeline, "--out", "out", cfg.out, pipeline_keys, "output file (default stdout)");
  CLI::Option* max_turns = pipeline->add_option("--max-turns", cfg.max_turns, "turns to generate");
  pipeline_keys.push_back({"max_turns", max_turns, [&cfg](const nlohmann::json& v) { cfg.max_turns = v.get<int>(); }});
  CLI::Option* no_ae = pipeline->add_flag("--no-ae", cfg.no_ae, "use the rationale sentence as the answer");
  pipeline_keys.push_back({"no_ae", no_ae, [&cfg](const nlohmann::json& v) { cfg.no_ae = v.get<bool>(); }});
  CLI::Option* no_qf = pipeline->add_flag("--no-qf", cfg.no_qf, "skip question filtering");
  pipeline_keys.push_back({"no_qf", no_qf, [&cfg](const nlohmann::json& v) { cfg.no_qf = v.get<bool>(); }});
  add_selection_options(pipeline, cfg, pipeline_keys, "threshold (number or inf)");
  add_service_options(pipeline, cfg, pipeline_keys);

  add_path_option(eval, "--references", "references", cfg.references, eval_keys, "one reference per line");
  add_path_option(eval, "--hypotheses", "hypotheses", cfg.hypotheses, eval_keys, "one hypothesis per line");
  add_path_option(eval, "--out", "out", cfg.out, eval_keys, "output file (default stdout)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  auto with_config = [&](const std::vector<ConfigKey>& sub_keys) {
    if (!config_path.empty()) apply_config_file(config_path, sub_keys);
  };
  if (select->parsed()) {
    with_config(select_keys);
    return cmd_select(cfg, out, err);
  }
  if (analyze->parsed()) {
    with_config(analyze_keys);
    return cmd_analyze(cfg, out);
  }
  if (prompt->parsed()) {
    with_config(prompt_keys);
    return cmd_prompt(cfg, out);
  }
  if (pipeline->parsed()) {
    with_config(pipeline_keys);
    return cmd_pipeline(cfg, out);
  }
  with_config(eval_keys);
  return cmd_eval(cfg, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const LocateError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace cohs::cli
