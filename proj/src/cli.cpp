// Copyright 2026 The rollattr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rollattr/cli.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rollattr/corpus.hpp"
#include "rollattr/error.hpp"
#include "rollattr/eval.hpp"
#include "rollattr/features.hpp"
#include "rollattr/prosody.hpp"
#include "rollattr/report.hpp"
#include "rollattr/rolling.hpp"
#include "rollattr/synth.hpp"

namespace rollattr {

namespace {

namespace fs = std::filesystem;

struct Settings {
  std::size_t jobs = 1;
  std::string out_dir;

  std::string corpus_path;
  std::string lexicon_path;
  std::size_t min_lines = kDefaultMinLines;

  std::vector<std::string> modes;
  std::map<std::string, std::vector<std::string>> modes_by_command;
  std::size_t top_words = kDefaultTopWords;
  std::size_t top_rhythms = kDefaultTopRhythms;
  std::size_t iterations = kDefaultIterations;
  std::uint64_t seed = 0;
  double C = 1.0;
  double tol = 1e-4;
  std::size_t max_passes = 10000;

  std::string target;
  std::size_t k = kDefaultWindowLines;
  std::size_t d = kDefaultStepLines;
  std::string boundaries_path;
  std::string truth_path;
  std::string primary;
  std::string secondary;

  std::string profiles_path;
};

std::ofstream open_output(const Settings& s, const std::string& name) {
  fs::create_directories(s.out_dir);
  const auto path = fs::path(s.out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError(fmt::format("cannot write '{}'", path.string()));
  return f;
}

Corpus load_input(const Settings& s, std::ostream& out) {
  Corpus c = load_corpus(s.corpus_path);
  if (!s.lexicon_path.empty()) {
    const auto lex = StressLexicon::load(s.lexicon_path);
    AnnotationStats stats;
    c = annotate_corpus(c, lex, &stats);
    out << fmt::format("lexicon: {} lines annotated, {} unknown, {} "
                       "precomputed\n",
                       stats.annotated, stats.unknown, stats.preexisting);
  }
  return c;
}

std::vector<FeatureMode> parse_modes(const std::vector<std::string>& names) {
  std::vector<FeatureMode> modes;
  for (const auto& n : names) modes.push_back(parse_feature_mode(n));
  if (modes.empty()) throw DataError("no feature mode given");
  return modes;
}

SvmOptions svm_options(const Settings& s) {
  SvmOptions o;
  o.C = s.C;
  o.tol = s.tol;
  o.max_passes = s.max_passes;
  return o;
}

EvalConfig eval_config(const Settings& s, FeatureMode mode) {
  EvalConfig cfg;
  cfg.iterations = s.iterations;
  cfg.top_words = s.top_words;
  cfg.top_rhythms = s.top_rhythms;
  cfg.mode = mode;
  cfg.svm = svm_options(s);
  cfg.min_lines = s.min_lines;
  cfg.master_seed = s.seed;
  cfg.jobs = s.jobs;
  return cfg;
}

void cmd_validate(const Settings& s, std::ostream& out) {
  const Corpus c = load_input(s, out);
  const auto r = validate_corpus(c, s.min_lines, !s.lexicon_path.empty());
  std::ostringstream report;
  report << fmt::format("plays: {}\nauthors: {}\nlines: {}\n", c.plays.size(),
                        c.authors.size(), r.total_lines);
  report << fmt::format("excluded scenes (< {} lines): {}\n", s.min_lines,
                        r.excluded_scenes.size());
  for (const auto& e : r.excluded_scenes) {
    report << fmt::format("  excluded {} {}.{} ({} lines)\n", e.play_id, e.act,
                          e.scene, e.line_count);
  }
  report << fmt::format("unlabeled plays: {}\n", r.unlabeled_plays.size());
  for (const auto& p : r.unlabeled_plays) report << "  unlabeled " << p << '\n';
  report << fmt::format("unannotated lines: {}{}\n", r.unannotated_lines,
                        r.lexicon_configured || r.unannotated_lines == 0
                            ? ""
                            : " (no lexicon configured; these lines carry no "
                              "rhythmic features)");
  out << report.str();
  if (!s.out_dir.empty()) open_output(s, "validation.txt") << report.str();
}

void cmd_features(const Settings& s, std::ostream& out) {
  const Corpus c = load_input(s, out);
  const auto mode = parse_modes(s.modes).front();
  std::vector<Segment> labeled;
  for (auto& seg : segment_scenes(c, s.min_lines)) {
    if (seg.label) labeled.push_back(std::move(seg));
  }
  const auto spec =
      build_feature_spec(labeled, s.top_words, s.top_rhythms, mode);
  const auto all = segment_scenes(c, s.min_lines);
  auto f = open_output(s, "features.csv");
  write_feature_csv(f, all, spec);
  out << fmt::format("features: {} words, {} rhythmic types, {} segments\n",
                     spec.words().size(), spec.rhythm_types().size(),
                     all.size());
}

void cmd_crossval(const Settings& s, std::ostream& out) {
  const Corpus c = load_input(s, out);
  std::vector<VoteTable> tables;
  for (const auto mode : parse_modes(s.modes)) {
    tables.push_back(leave_one_play_out(c, eval_config(s, mode)));
    const auto& t = tables.back();
    auto f = open_output(s, fmt::format("votes_{}.csv", to_string(mode)));
    write_vote_csv(f, t);
    out << fmt::format("{}: {} scenes, {} ties, {} unconverged fits\n",
                       to_string(mode), t.rows.size(), t.ties,
                       t.unconverged_fits);
  }
  auto f = open_output(s, "accuracy.csv");
  write_accuracy_csv(f, tables, c);
}

void cmd_attribute(const Settings& s, std::ostream& out) {
  const Corpus c = load_input(s, out);
  for (const auto mode : parse_modes(s.modes)) {
    const auto t = attribute_scenes(c, s.target, eval_config(s, mode));
    auto f = open_output(s, fmt::format("votes_{}.csv", to_string(mode)));
    write_vote_csv(f, t);
    out << fmt::format("{}: {} scenes of {} attributed\n", to_string(mode),
                       t.rows.size(), s.target);
  }
}

std::vector<AuthorId> read_truth(const std::string& path, const Play& play) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open truth file '{}'", path));
  // Same two-column shape as a boundaries file.
  const auto rows = parse_boundaries(in);
  std::map<int, AuthorId> by_line;
  for (const auto& r : rows) by_line[r.line_index] = r.label;
  std::vector<AuthorId> labels;
  for (const auto* l : play.lines()) {
    auto it = by_line.find(l->index_in_play);
    if (it == by_line.end()) {
      throw DataError(fmt::format("truth file has no label for line {}",
                                  l->index_in_play));
    }
    labels.push_back(it->second);
  }
  return labels;
}

void cmd_rolling(const Settings& s, std::ostream& out) {
  const Corpus c = load_input(s, out);
  const Play& play = c.at(s.target);
  check_window_constraints(play.line_count(), s.k, s.d);

  std::vector<Boundary> boundaries;
  if (!s.boundaries_path.empty()) {
    std::ifstream in(s.boundaries_path);
    if (!in) {
      throw DataError(
          fmt::format("cannot open boundaries '{}'", s.boundaries_path));
    }
    boundaries = parse_boundaries(in);
  } else {
    boundaries = scene_boundaries(play);
  }
  std::vector<AuthorId> line_truth;
  if (!s.truth_path.empty()) line_truth = read_truth(s.truth_path, play);

  std::vector<RollingResult> results;
  std::ostringstream summary;
  summary << "mode,groups,accuracy,crossings\n";
  for (const auto mode : parse_modes(s.modes)) {
    RollingConfig cfg;
    cfg.k = s.k;
    cfg.d = s.d;
    cfg.iterations = s.iterations;
    cfg.master_seed = s.seed;
    cfg.top_words = s.top_words;
    cfg.top_rhythms = s.top_rhythms;
    cfg.mode = mode;
    cfg.svm = svm_options(s);
    cfg.min_lines = s.min_lines;
    cfg.jobs = s.jobs;
    if (!s.primary.empty()) cfg.primary = s.primary;
    if (!s.secondary.empty()) cfg.secondary = s.secondary;
    results.push_back(rolling_attribute(c, s.target, cfg));
    const auto& r = results.back();
    auto f = open_output(s, fmt::format("rolling_{}.csv", to_string(mode)));
    write_curve_csv(f, r);

    std::string accuracy;
    if (!line_truth.empty()) {
      const auto truth = group_truth(r, play, line_truth);
      accuracy = format_real(1.0 - misattribution_rate(r, truth));
    }
    std::string crossings;
    for (double x : zero_crossings(r)) {
      if (!crossings.empty()) crossings += ' ';
      crossings += format_real(x);
    }
    summary << to_string(mode) << ',' << r.groups.size() << ',' << accuracy
            << ',' << csv_field(crossings) << '\n';
    out << fmt::format("{}: {} groups, {} vs {}\n", to_string(mode),
                       r.groups.size(), r.authors[r.primary],
                       r.authors[r.secondary]);
  }
  open_output(s, "rolling_summary.csv") << summary.str();
  auto svg = open_output(s, "rolling.svg");
  write_curve_svg(svg, results, boundaries);
}

void cmd_synth(const Settings& s, std::ostream& out) {
  std::ifstream in(s.profiles_path);
  if (!in) {
    throw DataError(fmt::format("cannot open profiles '{}'", s.profiles_path));
  }
  const auto result = synthesize(in, s.seed);
  {
    auto f = open_output(s, "corpus.tsv");
    write_corpus(f, result.corpus);
  }
  for (const auto& [play_id, labels] : result.truth) {
    auto f = open_output(s, fmt::format("truth_{}.tsv", play_id));
    write_truth(f, result.corpus.at(play_id), labels);
  }
  out << fmt::format("synth: {} plays written\n", result.corpus.plays.size());
}

void add_corpus_options(CLI::App* cmd, Settings& s) {
  cmd->add_option("--corpus", s.corpus_path, "Corpus TSV")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--lexicon", s.lexicon_path,
                  "Stress lexicon TSV for lines without stress")
      ->envname("ROLLATTR_LEXICON")
      ->check(CLI::ExistingFile);
  cmd->add_option("--min-lines", s.min_lines,
                  "Scenes with fewer lines are excluded")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_model_options(CLI::App* cmd, Settings& s) {
  cmd->add_option("--top-words", s.top_words, "Most frequent words")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--top-rhythms", s.top_rhythms,
                  "Most frequent rhythmic types")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--C", s.C, "SVM regularization trade-off")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--tol", s.tol, "SVM stopping tolerance")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-passes", s.max_passes, "SVM pass cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--iterations", s.iterations, "Ensemble size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", s.seed, "Master seed")->capture_default_str();
}

void add_mode_option(CLI::App* cmd, Settings& s,
                     std::vector<std::string> defaults) {
  auto& modes = s.modes_by_command[cmd->get_name()];
  modes = std::move(defaults);
  cmd->add_option("--modes,--mode", modes,
                  "Feature modes: words, rhythm, combined")
      ->delimiter(',')
      ->capture_default_str()
      ->check(CLI::IsMember({"words", "rhythm", "combined"}));
}

void add_out_option(CLI::App* cmd, Settings& s, bool required) {
  auto* opt = cmd->add_option("--out", s.out_dir, "Output directory");
  if (required) opt->required();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  Settings s;
  CLI::App app{"Authorship attribution with lexical and rhythmic features"};
  app.name("rollattr");
  app.set_config("--config", "", "Config file (TOML/INI); flags override it");
  app.add_option("--jobs", s.jobs, "Worker threads")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.require_subcommand(1);
  app.fallthrough();

  auto* validate = app.add_subcommand("validate", "Check a corpus file");
  add_corpus_options(validate, s);
  add_out_option(validate, s, false);

  auto* features =
      app.add_subcommand("features", "Export the scene feature matrix");
  add_corpus_options(features, s);
  add_model_options(features, s);
  add_mode_option(features, s, {"combined"});
  add_out_option(features, s, true);

  auto* crossval =
      app.add_subcommand("crossval", "Leave-one-play-out scene accuracy");
  add_corpus_options(crossval, s);
  add_model_options(crossval, s);
  add_mode_option(crossval, s, {"rhythm", "words", "combined"});
  add_out_option(crossval, s, true);

  auto* attribute =
      app.add_subcommand("attribute", "Scene votes for one target play");
  add_corpus_options(attribute, s);
  add_model_options(attribute, s);
  add_mode_option(attribute, s, {"combined"});
  attribute->add_option("--target", s.target, "Target play id")->required();
  add_out_option(attribute, s, true);

  auto* rolling = app.add_subcommand("rolling", "Rolling attribution curve");
  add_corpus_options(rolling, s);
  add_model_options(rolling, s);
  add_mode_option(rolling, s, {"combined"});
  rolling->add_option("--target", s.target, "Target play id")->required();
  rolling->add_option("--k", s.k, "Window length in lines")
      ->capture_default_str();
  rolling->add_option("--d", s.d, "Window step in lines")
      ->capture_default_str();
  rolling->add_option("--boundaries", s.boundaries_path,
                      "TSV of line_index and label markers")
      ->check(CLI::ExistingFile);
  rolling->add_option("--truth", s.truth_path,
                      "TSV of line_index and true author, for scoring")
      ->check(CLI::ExistingFile);
  rolling->add_option("--primary", s.primary, "Author plotted above the axis");
  rolling->add_option("--secondary", s.secondary,
                      "Author plotted below the axis");
  add_out_option(rolling, s, true);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus");
  synth->add_option("--profiles", s.profiles_path, "Profile config JSON")
      ->required()
      ->check(CLI::ExistingFile);
  synth->add_option("--seed", s.seed, "Master seed")->capture_default_str();
  add_out_option(synth, s, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  for (const auto* sub : app.get_subcommands()) {
    auto it = s.modes_by_command.find(sub->get_name());
    if (it != s.modes_by_command.end()) s.modes = it->second;
  }

  try {
    if (!s.out_dir.empty()) {
      open_output(s, "run_config.toml") << app.config_to_str(true, false);
    }
    if (validate->parsed()) cmd_validate(s, out);
    if (features->parsed()) cmd_features(s, out);
    if (crossval->parsed()) cmd_crossval(s, out);
    if (attribute->parsed()) cmd_attribute(s, out);
    if (rolling->parsed()) cmd_rolling(s, out);
    if (synth->parsed()) cmd_synth(s, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace rollattr
