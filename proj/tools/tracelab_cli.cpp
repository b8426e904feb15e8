// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The tracelab Authors

#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tracelab/tracelab.h"

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

struct Switch {
  const char* name;
  const char* key;
  const char* value;
  const char* help;
};

struct Command {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> values;  // config key -> flag value
  std::map<std::string, CLI::Option*> options;
  std::vector<std::pair<CLI::Option*, std::pair<std::string, std::string>>> switches;
  std::vector<std::string> sets;
  std::string config_file;
};

const Flag kRecovery[] = {
    {"--dataset", "dataset", "dataset root directory"},
    {"--format", "format", "coest_dir or csv_pair"},
    {"--engine", "engine", "vsm, lsi, lda or classifier"},
    {"--measure", "measure", "cosine, jaccard, hellinger or symmetric_kl"},
    {"--mode", "mode", "full_matrix or per_source"},
    {"--source", "source_id", "source artifact id (per_source mode)"},
    {"--threshold", "threshold", "inclusive score threshold"},
    {"--top-k", "top_k", "candidates kept per source"},
    {"--weighting", "weighting", "tfidf or bag_of_words"},
    {"--lsi-k", "lsi_k", "LSI rank"},
    {"--lda-topics", "lda_topics", "LDA topic count"},
    {"--lda-iterations", "lda_iterations", "Gibbs sweeps"},
    {"--classifier", "classifier", "logistic_regression or naive_bayes"},
};

const Switch kPreprocess[] = {
    {"--no-stem", "stem", "false", "disable Porter stemming"},
    {"--no-stopwords", "remove_stopwords", "false", "keep stopwords"},
    {"--no-split-identifiers", "split_identifiers", "false", "keep identifiers whole"},
    {"--no-lowercase", "lowercase", "false", "keep case"},
};

void add_common(Command& cmd) {
  cmd.app->add_option("--config", cmd.config_file, "key=value config file")->check(CLI::ExistingFile);
  for (const Flag& f : std::initializer_list<Flag>{{"--seed", "seed", "random seed"},
                                                   {"--jobs", "jobs", "worker threads (default: all cores)"},
                                                   {"--out", "out", "output directory"}})
    cmd.options[f.key] = cmd.app->add_option(f.name, cmd.values[f.key], f.help);
  cmd.app->add_option("--set", cmd.sets, "extra config assignment key=value (repeatable)");
}

void add_flags(Command& cmd, std::initializer_list<Flag> flags) {
  for (const Flag& f : flags) cmd.options[f.key] = cmd.app->add_option(f.name, cmd.values[f.key], f.help);
}

template <std::size_t N>
void add_flags(Command& cmd, const Flag (&flags)[N]) {
  for (const Flag& f : flags) cmd.options[f.key] = cmd.app->add_option(f.name, cmd.values[f.key], f.help);
}

template <std::size_t N>
void add_switches(Command& cmd, const Switch (&switches)[N]) {
  for (const Switch& s : switches)
    cmd.switches.push_back({cmd.app->add_flag(s.name, s.help), {s.key, s.value}});
}

int fail(tl_status status) {
  std::fprintf(stderr, "error: %s\n", tl_last_error());
  return status == TL_ERR_INVALID_ARGUMENT ? 2 : 1;
}

// Config file first, then --set assignments, then dedicated flags.
int build_config(const Command& cmd, tl_config* config) {
  tl_status st = TL_OK;
  if (!cmd.config_file.empty() && (st = tl_config_load(config, cmd.config_file.c_str())) != TL_OK)
    return fail(st);
  for (const auto& s : cmd.sets) {
    auto eq = s.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", s.c_str());
      return 2;
    }
    if ((st = tl_config_set(config, s.substr(0, eq).c_str(), s.substr(eq + 1).c_str())) != TL_OK)
      return fail(st);
  }
  for (const auto& [key, opt] : cmd.options)
    if (opt->count() > 0 && (st = tl_config_set(config, key.c_str(), cmd.values.at(key).c_str())) != TL_OK)
      return fail(st);
  for (const auto& [opt, kv] : cmd.switches)
    if (opt->count() > 0 && (st = tl_config_set(config, kv.first.c_str(), kv.second.c_str())) != TL_OK)
      return fail(st);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tracelab: trace link recovery, evaluation, maintenance and explanation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tl_version());

  using Runner = std::function<tl_status(tl_config*, const char**)>;
  std::vector<std::pair<Command, Runner>> commands;
  commands.reserve(6);

  auto add = [&](const char* name, const char* help, Runner run) -> Command& {
    commands.push_back({Command{}, std::move(run)});
    Command& cmd = commands.back().first;
    cmd.app = app.add_subcommand(name, help);
    add_common(cmd);
    return cmd;
  };

  Command& recover = add("recover", "rank targets per source and write candidate links",
                         tl_run_recover);
  add_flags(recover, kRecovery);
  add_switches(recover, kPreprocess);

  Command& eval = add("eval", "score a candidate file against gold links", tl_run_eval);
  add_flags(eval, {{"--pred", "pred", "candidate CSV or pair file"},
                   {"--gold", "gold", "gold answers (pairs or CSV)"},
                   {"--beta", "beta", "F-beta weight (default 2)"},
                   {"--k", "k", "cut-off for DCG/precision/recall at k (default 10)"}});

  Command& maintain = add("maintain", "update a trace matrix after artifact changes",
                          tl_run_maintain);
  add_flags(maintain, {{"--old", "old", "dataset before the change"},
                       {"--new", "new", "dataset after the change"},
                       {"--matrix", "matrix", "trace matrix CSV"},
                       {"--threshold", "threshold", "similarity threshold for new links"},
                       {"--format", "format", "dataset format"},
                       {"--engine", "engine", "re-scoring engine"},
                       {"--measure", "measure", "re-scoring measure"},
                       {"--tim", "tim", "traceability information model CSV"},
                       {"--vetted", "vetted", "CSV source_id,target_id,correct"},
                       {"--timestamp", "timestamp", "epoch seconds written to history and log"}});
  add_switches(maintain, kPreprocess);

  Command& types = add("classify-types", "cross-validate link type prediction on issue data",
                       tl_run_classify_types);
  add_flags(types, {{"--issues", "issues", "issues CSV or JSON lines"},
                    {"--links", "links", "CSV source_id,target_id,raw_label"},
                    {"--label-rules", "label_rules", "CSV pattern,canonical[,keep_distinct]"},
                    {"--split", "split", "kfold or timestamp"},
                    {"--folds", "folds", "number of folds"},
                    {"--cutoff", "cutoff", "timestamp split cutoff"}});
  types.switches.push_back(
      {types.app->add_flag("--class-weights", "weight classes by inverse frequency"),
       {"class_weights", "true"}});

  Command& expl = add("explain", "annotate terms and explain links", tl_run_explain);
  add_flags(expl, {{"--dataset", "dataset", "dataset root directory"},
                   {"--format", "format", "dataset format"},
                   {"--source", "source_id", "source artifact id"},
                   {"--target", "target_id", "target artifact id"},
                   {"--pred", "pred", "explain every link of a candidate file"},
                   {"--glossary", "glossary", "CSV term,expansion,definition,source"},
                   {"--blacklist", "blacklist", "terms never annotated, one per line"},
                   {"--triplets", "triplets", "CSV subject,verb,object"},
                   {"--frames", "frames", "CSV artifact_id,agent,action,theme"},
                   {"--domain", "domain", "domain name for research queries"}});
  expl.switches.push_back(
      {expl.app->add_flag("--naive-frames", "derive missing action frames heuristically"),
       {"naive_frames", "true"}});

  Command& serve = add("serve", "run the vetting HTTP service", nullptr);
  add_flags(serve, {{"--store", "store", "session store directory"},
                    {"--host", "host", "bind address (default 127.0.0.1)"},
                    {"--port", "port", "port (default 8080)"}});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  for (auto& [cmd, run] : commands) {
    if (!cmd.app->parsed()) continue;
    tl_config* config = nullptr;
    if (tl_config_new(&config) != TL_OK) return fail(TL_ERR_INTERNAL);
    int rc = build_config(cmd, config);
    if (rc == 0) {
      tl_status st = TL_OK;
      if (cmd.app == serve.app) {
        const char* port = nullptr;
        tl_config_get(config, "port", &port);
        std::fprintf(stderr, "serving on port %s\n", port ? port : "8080");
        st = tl_serve(config);
      } else {
        const char* summary = nullptr;
        st = run(config, &summary);
        if (st == TL_OK && summary) std::printf("%s\n", summary);
      }
      if (st != TL_OK) rc = fail(st);
    }
    tl_config_free(config);
    return rc;
  }
  return 2;
}
