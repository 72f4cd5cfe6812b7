#include "coach/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "coach/coach.hpp"
#include "coach/errors.hpp"
#include "coach/profiler.hpp"
#include "coach/semantics.hpp"
#include "coach/service.hpp"
#include "coach/supertagger.hpp"

namespace coach {

namespace {

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string stats_json(const ParseStats& s) {
  nlohmann::json gaps = s.gaps;
  return nlohmann::json{{"edges_built", s.edges_built},
                        {"unification_attempts", s.unification_attempts},
                        {"unification_failures", s.unification_failures},
                        {"filter_prunes_rule", s.filter_prunes_rule},
                        {"filter_prunes_supertag", s.filter_prunes_supertag},
                        {"readings_found", s.readings_found},
                        {"wall_time_ms", s.wall_time_ms},
                        {"gaps", gaps}}
      .dump();
}

struct SupertagArgs {
  std::size_t k = 0;
  std::string model;

  void add(CLI::App* cmd) {
    cmd->add_option("--supertag", k, "Keep the top-k supertags per token (0 disables)");
    cmd->add_option("--supertag-model", model, "Supertagger model (default: the bundled model)");
  }

  std::optional<SupertagModel> load() const {
    if (k == 0) return std::nullopt;
    return load_supertag_model(model.empty() ? bundled_supertag_model_path() : std::filesystem::path(model));
  }
};

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spanish grammar coach over typed feature structure unification", "coach"};
  app.require_subcommand(1);

  std::string grammar = "toy";
  std::string mode = "strict";

  auto* validate = app.add_subcommand("validate", "Load a grammar and report errors as JSON lines");
  std::string validate_file;
  validate->add_option("grammar", validate_file, "Grammar file or bundled name")->required();
  validate->add_option("--mode", mode, "strict or learner")->check(CLI::IsMember({"strict", "learner"}));

  auto* analyze = app.add_subcommand("analyze", "Print the morphological analyses of tokens");
  std::vector<std::string> analyze_tokens;
  analyze->add_option("--grammar", grammar, "Grammar file or bundled name");
  analyze->add_option("token", analyze_tokens, "Tokens to analyse")->required();

  auto* parse_cmd = app.add_subcommand("parse", "Parse a sentence");
  std::vector<std::string> parse_words;
  bool no_rule_filter = false, dump_fs = false, dump_deriv = false, dump_deps = false, stats = false;
  std::size_t reading_cap = 64;
  SupertagArgs parse_tag;
  parse_cmd->add_option("--grammar", grammar, "Grammar file or bundled name");
  parse_cmd->add_option("--mode", mode, "strict or learner")->check(CLI::IsMember({"strict", "learner"}));
  parse_cmd->add_flag("--no-rule-filter", no_rule_filter, "Disable the static rule-compatibility filter");
  parse_cmd->add_option("--reading-cap", reading_cap, "Maximum readings to return")->check(CLI::PositiveNumber);
  parse_tag.add(parse_cmd);
  parse_cmd->add_flag("--dump-fs", dump_fs, "Print each reading's feature structure");
  parse_cmd->add_flag("--dump-deriv", dump_deriv, "Print each reading's derivation tree");
  parse_cmd->add_flag("--dump-deps", dump_deps, "Print each reading's dependency arcs");
  parse_cmd->add_flag("--stats", stats, "Print parse statistics as JSON");
  parse_cmd->add_option("sentence", parse_words, "Sentence to parse")->required();

  auto* check = app.add_subcommand("check", "Coach a sentence: verdict, feedback and correction");
  std::vector<std::string> check_words;
  bool check_json = false;
  SupertagArgs check_tag;
  check->add_option("--grammar", grammar, "Grammar file or bundled name");
  check_tag.add(check);
  check->add_flag("--json", check_json, "Print the response in wire format");
  check->add_option("sentence", check_words, "Sentence to check")->required();

  auto* profile = app.add_subcommand("profile", "Profile a test suite");
  std::string suite, profile_out;
  std::size_t threads = 1;
  SupertagArgs profile_tag;
  profile->add_option("--grammar", grammar, "Grammar file or bundled name");
  profile->add_option("--mode", mode, "strict or learner")->check(CLI::IsMember({"strict", "learner"}));
  profile->add_option("--suite", suite, "Suite file or bundled name")->required();
  profile->add_option("--out", profile_out, "Output file (default: stdout)");
  profile->add_flag("--no-rule-filter", no_rule_filter, "Disable the static rule-compatibility filter");
  profile->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  profile_tag.add(profile);

  auto* compare = app.add_subcommand("compare", "Compare two profiles; exit 1 on a verdict regression");
  std::string profile_a, profile_b;
  compare->add_option("a", profile_a, "Baseline profile")->required();
  compare->add_option("b", profile_b, "New profile")->required();

  auto* train = app.add_subcommand("train-supertagger", "Train a supertagger model from a treebank");
  std::string treebank, model_out;
  train->add_option("--grammar", grammar, "Grammar file or bundled name");
  train->add_option("--treebank", treebank, "Treebank file")->required();
  train->add_option("--out", model_out, "Model output file")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string config_path;
  serve->add_option("--config", config_path, "JSON config file (default: $COACH_CONFIG)");

  if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands([](CLI::App*) { return true; })) known |= sub->get_name() == args[0];
    if (!known) {
      err << "unknown subcommand '" << args[0] << "'\n" << app.help();
      return 2;
    }
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*validate) {
      try {
        Grammar g = load_grammar_file(resolve_grammar_path(validate_file), parse_mode(mode));
        err << "valid: " << g.version_label << "\n";
        return 0;
      } catch (const GrammarError& e) {
        out << nlohmann::json{{"kind", e.kind()}, {"location", e.location()}, {"detail", e.detail()}}.dump() << "\n";
        return 1;
      }
    }

    if (*analyze) {
      Grammar g = load_grammar_file(resolve_grammar_path(grammar), GrammarMode::strict);
      bool all_known = true;
      for (const auto& token : analyze_tokens) {
        auto analyses = analyze_token(token, g);
        if (analyses.empty()) {
          err << "no analysis for '" << token << "'\n";
          all_known = false;
        }
        for (const auto& a : analyses) out << a.token << '\t' << a.lemma << '\t' << a.tag << '\n';
      }
      return all_known ? 0 : 1;
    }

    if (*parse_cmd) {
      Grammar g = load_grammar_file(resolve_grammar_path(grammar), parse_mode(mode));
      Parser parser(g);
      auto model = parse_tag.load();
      ParseOptions opts;
      opts.rule_filter = !no_rule_filter;
      opts.reading_cap = reading_cap;
      opts.supertag_k = parse_tag.k;
      opts.supertag_model = model ? &*model : nullptr;
      ParseResult r = parser.parse(join(parse_words), opts);
      out << "readings: " << r.readings.size();
      if (r.stats.readings_found > r.readings.size()) out << " of " << r.stats.readings_found;
      out << "\n";
      for (std::size_t i = 0; i < r.readings.size(); ++i) {
        const Reading& rd = r.readings[i];
        out << "reading " << i + 1 << ": " << rd.derivation_string << "\n";
        if (dump_deriv) out << rd.derivation.pretty();
        if (dump_fs) out << rd.fs.canonical(g.hierarchy);
        if (dump_deps) out << format_dependencies(to_dependencies(rd.semantics), rd.semantics);
      }
      if (stats) out << stats_json(r.stats) << "\n";
      if (!r.stats.gaps.empty()) {
        err << "no lexical analysis for token(s):";
        for (auto gap : r.stats.gaps) err << ' ' << r.tokens.at(gap).text;
        err << "\n";
      }
      return r.readings.empty() ? 1 : 0;
    }

    if (*check) {
      Coach c = Coach::from_file(grammar);
      auto model = check_tag.load();
      ParseOptions opts;
      opts.supertag_k = check_tag.k;
      opts.supertag_model = model ? &*model : nullptr;
      Verdict v = c.check(join(check_words), opts);
      if (check_json) {
        out << verdict_json(v, c.learner().version_label, true, true) << "\n";
      } else {
        out << format_verdict(v);
      }
      return 0;
    }

    if (*profile) {
      Grammar g = load_grammar_file(resolve_grammar_path(grammar), parse_mode(mode));
      auto items = read_suite(resolve_suite_path(suite).string());
      auto model = profile_tag.load();
      ProfileOptions opts;
      opts.parse.rule_filter = !no_rule_filter;
      opts.parse.supertag_k = profile_tag.k;
      opts.parse.supertag_model = model ? &*model : nullptr;
      opts.threads = threads;
      opts.suite_name = std::filesystem::path(resolve_suite_path(suite)).stem().string();
      Profile p = run_profile(items, g, opts);
      if (profile_out.empty()) {
        out << profile_to_json(p);
      } else {
        write_profile(p, profile_out);
      }
      err << "coverage " << p.aggregates.covered << "/" << p.aggregates.items << "\n";
      return 0;
    }

    if (*compare) {
      Comparison c = compare_profiles(read_profile(profile_a), read_profile(profile_b));
      out << format_comparison(c);
      return c.regressions.empty() ? 0 : 1;
    }

    if (*train) {
      Grammar g = load_grammar_file(resolve_grammar_path(grammar), GrammarMode::learner);
      SupertagModel m = train_supertagger(read_treebank(treebank), g);
      std::ofstream f(model_out, std::ios::binary);
      if (!f) throw InputError("cannot write model '" + model_out + "'");
      f << m.serialize();
      err << "model " << m.hash() << ": " << m.unigram.size() << " surfaces\n";
      return 0;
    }

    if (*serve) {
      if (config_path.empty()) {
        if (const char* env = std::getenv("COACH_CONFIG"); env && *env) config_path = env;
      }
      ServiceConfig config = config_path.empty() ? ServiceConfig{} : load_service_config(config_path);
      apply_env_overrides(config);
      CoachService(config).serve();
      return 0;
    }
  } catch (const GrammarError& e) {
    err << "grammar error (" << e.kind() << ") " << e.location() << ": " << e.detail() << "\n";
    return 1;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace coach
