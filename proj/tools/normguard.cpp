#include <fstream>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "normguard/dataset.hpp"
#include "normguard/soundness.hpp"

namespace {

using namespace normguard;

// Exit codes: 0 success, 1 usage, 2 parse failure, 3 evaluation mismatch,
// 4 invariant violation.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kParseFailure = 2;
constexpr int kEvalMismatch = 3;
constexpr int kInvariantViolation = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file: " + path, 0);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path, 0);
  out << text;
}

struct CommonOpts {
  std::string closure = "prohibitive";
  std::string taxonomy_path;
  std::vector<std::string> kb_paths;
  std::vector<std::string> norm_specs;  // owner=path
  int depth = KnowledgeBase::kDefaultDepthLimit;
  std::string format = "text";
  std::string save_path;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_save = true) {
  cmd->add_option("--closure", o.closure, "closure assumption for unregulated behavior")
      ->check(CLI::IsMember({"prohibitive", "permissive"}))
      ->capture_default_str();
  cmd->add_option("--taxonomy", o.taxonomy_path, "taxonomy file replacing the built-in one");
  cmd->add_option("--kb", o.kb_paths, "extra knowledge-base files to load");
  cmd->add_option("--norms", o.norm_specs, "norm files to preload, as <owner>=<path>");
  cmd->add_option("--depth", o.depth, "proof depth budget")->capture_default_str();
  cmd->add_option("--format", o.format, "output format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
  if (with_save) {
    cmd->add_option("--save", o.save_path, "write the session transcript here on exit");
  }
}

Session make_session(const CommonOpts& o, bool recheck_guard) {
  SessionConfig cfg;
  cfg.closure = *closure_from_string(o.closure);
  cfg.depth_limit = o.depth;
  cfg.recheck_guard = recheck_guard;
  if (!o.taxonomy_path.empty()) cfg.taxonomy_text = read_file(o.taxonomy_path);
  Session s(cfg);
  for (const std::string& path : o.kb_paths) s.kb().load_text(read_file(path));
  for (const std::string& spec : o.norm_specs) {
    std::size_t eq = spec.find('=');
    if (eq == std::string::npos) {
      throw ParseError("--norms expects <owner>=<path>, got " + spec, 0);
    }
    const std::string owner = spec.substr(0, eq);
    s.ensure_person(owner);
    load_norm_text(s.stores().find(owner)->second, read_file(spec.substr(eq + 1)));
  }
  return s;
}

void save_transcript(const Session& s, const std::string& path) {
  if (path.empty()) return;
  std::ostringstream os;
  for (const auto& [input, response] : s.transcript()) {
    os << input << "\n# -> " << response << "\n";
  }
  write_file(path, os.str());
}

nlohmann::json response_json(const Response& r) {
  nlohmann::json j;
  j["kind"] = to_string(r.kind);
  j["text"] = r.text;
  if (r.person) j["person"] = *r.person;
  if (r.object) j["object"] = *r.object;
  return j;
}

void print_explanation(const Session& s, std::ostream& out) {
  if (!s.last_outcome()) {
    out << "nothing to explain yet\n";
    return;
  }
  const PlanOutcome& o = *s.last_outcome();
  out << "outcome: " << to_string(o.kind) << "\n";
  for (const std::string& line : o.trace) out << "  " << line << "\n";
  if (o.norm_judgment) {
    out << render_trace(*o.norm_judgment);
  }
}

int cmd_repl(const CommonOpts& o) {
  Session session = make_session(o, false);
  const bool tty = isatty(0);
  const bool json_mode = o.format == "json";
  std::string line;
  while (true) {
    if (tty) std::cout << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    const std::string trimmed = [&] {
      auto a = line.find_first_not_of(" \t\r\n");
      if (a == std::string::npos) return std::string();
      auto b = line.find_last_not_of(" \t\r\n");
      return line.substr(a, b - a + 1);
    }();
    if (trimmed.empty()) continue;
    if (trimmed[0] == ':') {
      std::istringstream cmd(trimmed.substr(1));
      std::string name;
      cmd >> name;
      if (name == "quit" || name == "q" || name == "exit") break;
      if (name == "speaker") {
        std::string who;
        cmd >> who;
        if (who.empty()) {
          std::cout << "current speaker: " << session.speaker() << "\n";
        } else {
          try {
            session.submit("#speaker: " + who);
            std::cout << "speaker is now " << who << "\n";
          } catch (const Error& e) {
            std::cout << "error: " << e.what() << "\n";
          }
        }
      } else if (name == "explain") {
        print_explanation(session, std::cout);
      } else if (name == "norms") {
        auto lines = session.norm_summary();
        if (lines.empty()) std::cout << "no norms stored\n";
        for (const std::string& l : lines) std::cout << l << "\n";
      } else {
        std::cout << "commands: :speaker <name>, :explain, :norms, :quit —\n"
                  << "anything else is parsed as a statement\n";
      }
      continue;
    }
    try {
      Response r = session.submit(trimmed);
      if (json_mode) {
        std::cout << response_json(r).dump() << "\n";
      } else {
        std::cout << r.text << "\n";
      }
    } catch (const Error& e) {
      std::cout << "error: " << e.what() << "\n";
    }
  }
  save_transcript(session, o.save_path);
  return kOk;
}

int cmd_run_script(const CommonOpts& o, const std::string& path) {
  Session session = make_session(o, false);
  const std::string text = read_file(path);
  std::vector<Response> responses = run_script(session, text);
  if (o.format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < session.transcript().size(); ++i) {
      nlohmann::json j;
      j["input"] = session.transcript()[i].first;
      j["response"] = session.transcript()[i].second;
      arr.push_back(j);
    }
    std::cout << arr.dump(2) << "\n";
  } else {
    for (const auto& [input, response] : session.transcript()) {
      std::cout << "> " << input << "\n" << response << "\n";
    }
  }
  save_transcript(session, o.save_path);
  (void)responses;
  return kOk;
}

int cmd_gen_dataset(const CommonOpts& o, const std::string& config_path,
                    const std::string& out_path) {
  GridConfig cfg;
  if (!config_path.empty()) cfg = grid_config_from_json(read_file(config_path));
  cfg.closure = *closure_from_string(o.closure);
  std::vector<DialogueCase> cases = generate_dataset(cfg);
  const std::string psv = cases_to_psv(cases);
  if (out_path.empty() || out_path == "-") {
    std::cout << psv;
  } else {
    write_file(out_path, psv);
    std::cerr << "wrote " << cases.size() << " cases to " << out_path << "\n";
  }
  return kOk;
}

int cmd_eval_dataset(const CommonOpts& o, const std::string& path, int jobs,
                     bool no_recheck, const std::string& report_path) {
  std::vector<DialogueCase> cases = cases_from_psv(read_file(path));
  EvalOptions opts;
  opts.closure = *closure_from_string(o.closure);
  opts.depth_limit = o.depth;
  opts.recheck_guard = !no_recheck;
  opts.jobs = jobs;
  EvalReport report = evaluate(cases, opts);
  if (o.format == "json") {
    std::cout << report_to_json(report);
  } else {
    std::cout << report_to_text(report);
  }
  if (!report_path.empty()) write_file(report_path, report_to_json(report));
  if (report.guard_violations > 0) return kInvariantViolation;
  if (!report.all_correct()) return kEvalMismatch;
  return kOk;
}

int cmd_check_soundness(const CommonOpts& o, int stores, int max_frames, int probes,
                        unsigned seed, int jobs) {
  SoundnessOptions opts;
  opts.stores = stores;
  opts.max_frames = max_frames;
  opts.probes_per_store = probes;
  opts.seed = seed;
  opts.jobs = jobs;
  opts.depth_limit = o.depth;
  SoundnessResult r = check_soundness(opts);
  if (o.format == "json") {
    std::cout << soundness_to_json(r);
  } else {
    std::cout << soundness_to_text(r);
  }
  return r.ok() ? kOk : kInvariantViolation;
}

int cmd_explain(const CommonOpts& o, const std::string& script_path,
                const std::string& behavior, const std::string& context,
                const std::string& owner) {
  if (!script_path.empty()) {
    Session session = make_session(o, false);
    run_script(session, read_file(script_path));
    print_explanation(session, std::cout);
    return kOk;
  }
  if (behavior.empty()) {
    std::cerr << "explain needs a script path or --behavior\n";
    return kUsage;
  }
  Session session = make_session(o, false);
  session.ensure_person(owner);
  const Conjunction b = conjunction_from_sexpr(parse_sexpr(behavior));
  const Conjunction c = context.empty()
                            ? Conjunction{}
                            : conjunction_from_sexpr(parse_sexpr(context));
  CalculusOptions copts;
  copts.depth_limit = o.depth;
  const Judgment j =
      permissible(session.kb(), session.stores().find(owner)->second, owner, b, c,
                  *closure_from_string(o.closure), copts);
  std::cout << render_trace(j);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"norm-guarded dialogue engine"};
  app.require_subcommand(1);

  CommonOpts repl_opts;
  CLI::App* repl = app.add_subcommand("repl", "interactive dialogue loop");
  add_common(repl, repl_opts);

  CommonOpts script_opts;
  std::string script_path;
  CLI::App* script = app.add_subcommand("run-script", "run a statement script");
  script->add_option("script", script_path, "script file")->required();
  add_common(script, script_opts);

  CommonOpts gen_opts;
  std::string gen_config, gen_out;
  CLI::App* gen = app.add_subcommand("gen-dataset", "generate the dialogue dataset");
  gen->add_option("--config", gen_config, "grid configuration JSON file");
  gen->add_option("--out,-o", gen_out, "output path ('-' for stdout)");
  add_common(gen, gen_opts, false);

  CommonOpts eval_opts;
  std::string eval_path, eval_report;
  int eval_jobs = 1;
  bool eval_no_recheck = false;
  CLI::App* eval = app.add_subcommand("eval-dataset", "evaluate a dataset file");
  eval->add_option("dataset", eval_path, "dataset file")->required();
  eval->add_option("--jobs", eval_jobs, "worker threads")->capture_default_str();
  eval->add_flag("--no-recheck", eval_no_recheck,
                 "skip the post-execution guard recheck");
  eval->add_option("--report", eval_report, "also write the JSON report here");
  add_common(eval, eval_opts, false);

  CommonOpts sound_opts;
  int sound_stores = 10000, sound_frames = 6, sound_probes = 12, sound_jobs = 1;
  unsigned sound_seed = 7;
  CLI::App* sound = app.add_subcommand("check-soundness",
                                       "fuzz stores for complementary verdicts");
  sound->add_option("--stores", sound_stores, "stores to generate")->capture_default_str();
  sound->add_option("--max-frames", sound_frames, "max frames per store")
      ->capture_default_str();
  sound->add_option("--probes", sound_probes, "probes per store")->capture_default_str();
  sound->add_option("--seed", sound_seed, "rng seed")->capture_default_str();
  sound->add_option("--jobs", sound_jobs, "worker threads")->capture_default_str();
  add_common(sound, sound_opts, false);

  CommonOpts explain_opts;
  std::string explain_script, explain_behavior, explain_context;
  std::string explain_owner = "Plato";
  CLI::App* explain = app.add_subcommand("explain", "show a judgment trace");
  explain->add_option("script", explain_script, "script to run, then explain");
  explain->add_option("--behavior", explain_behavior, "behavior conjunction s-expression");
  explain->add_option("--context", explain_context, "context conjunction s-expression");
  explain->add_option("--owner", explain_owner, "norm store owner")->capture_default_str();
  add_common(explain, explain_opts, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (app.got_subcommand(repl)) return cmd_repl(repl_opts);
    if (app.got_subcommand(script)) return cmd_run_script(script_opts, script_path);
    if (app.got_subcommand(gen)) return cmd_gen_dataset(gen_opts, gen_config, gen_out);
    if (app.got_subcommand(eval)) {
      return cmd_eval_dataset(eval_opts, eval_path, eval_jobs, eval_no_recheck,
                              eval_report);
    }
    if (app.got_subcommand(sound)) {
      return cmd_check_soundness(sound_opts, sound_stores, sound_frames, sound_probes,
                                 sound_seed, sound_jobs);
    }
    if (app.got_subcommand(explain)) {
      return cmd_explain(explain_opts, explain_script, explain_behavior,
                         explain_context, explain_owner);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const VocabularyError& e) {
    std::cerr << "vocabulary error: " << e.what() << "\n";
    return kParseFailure;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariantViolation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvariantViolation;
  }
  return kUsage;
}
