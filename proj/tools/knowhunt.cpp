// Command-line front end: index building, batch solving, evaluation and
// per-instance evidence inspection.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "knowhunt/knowhunt.hpp"

namespace {

using namespace knowhunt;

struct CommonOpts {
  std::string task = "wsc";
  std::string data;
  std::string lexicon_dir = "data/lexicon";
  std::string queries = "auto";
  double alpha = 0.7;
  std::string provider = "corpus";
  std::string corpus_dir;
  std::string index_path;
  std::string fixtures;
  std::string manual;
  std::size_t limit = kDefaultSnippetLimit;
  std::string weights;
  bool force_label = false;
  bool random_backoff = false;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

void add_common(CLI::App* cmd, CommonOpts* o) {
  cmd->add_option("--task", o->task, "Task: wsc or copa")->check(CLI::IsMember({"wsc", "copa"}));
  cmd->add_option("--data", o->data, "Dataset file (line-delimited json)")->required();
  cmd->add_option("--lexicon", o->lexicon_dir, "Lexicon directory")->capture_default_str();
  cmd->add_option("--queries", o->queries, "Query mode")
      ->check(CLI::IsMember({"auto", "auto-syn", "auto-syn-filter", "manual"}))
      ->capture_default_str();
  cmd->add_option("--alpha", o->alpha, "Similarity filter threshold factor")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  cmd->add_option("--provider", o->provider, "Snippet provider: corpus or fixture")
      ->check(CLI::IsMember({"corpus", "fixture"}))
      ->capture_default_str();
  cmd->add_option("--corpus-dir", o->corpus_dir, "Directory of .txt corpus documents");
  cmd->add_option("--index", o->index_path, "Prebuilt index file (alternative to --corpus-dir)");
  cmd->add_option("--fixtures", o->fixtures, "Recorded-snippet fixture file");
  cmd->add_option("--manual", o->manual, "Manual query file (required with --queries manual)");
  cmd->add_option("--limit", o->limit, "Max snippets per search query")->capture_default_str();
  cmd->add_option("--weights", o->weights,
                  "Score weights len2,len1,ord2,ord1 (default 2,1,2,1)");
  cmd->add_flag("--force-label", o->force_label,
                "Label unresolved evidence as agent instead of discarding it");
  cmd->add_flag("--random-backoff", o->random_backoff, "Answer abstentions with a seeded coin flip");
  cmd->add_option("--seed", o->seed, "Seed for --random-backoff")->capture_default_str();
  cmd->add_option("--jobs", o->jobs, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
}

RunConfig to_config(const CommonOpts& o) {
  RunConfig c;
  c.task = o.task == "copa" ? RunConfig::Task::COPA : RunConfig::Task::WSC;
  if (o.queries == "auto") c.query_mode = QueryMode::AGQ;
  else if (o.queries == "auto-syn") c.query_mode = QueryMode::AGQS;
  else if (o.queries == "auto-syn-filter") c.query_mode = QueryMode::AGQSF;
  else c.query_mode = QueryMode::MGQ;
  c.alpha = o.alpha;
  c.provider = o.provider == "fixture" ? RunConfig::Provider::Fixture : RunConfig::Provider::Corpus;
  c.corpus_dir = o.corpus_dir;
  c.index_path = o.index_path;
  c.fixtures_path = o.fixtures;
  c.lexicon_dir = o.lexicon_dir;
  c.manual_path = o.manual;
  c.limit = o.limit;
  c.force_label = o.force_label;
  c.random_backoff = o.random_backoff;
  c.seed = o.seed;
  c.jobs = o.jobs;
  if (!o.weights.empty()) {
    auto parts = detail::split(o.weights, ',');
    if (parts.size() != 4) throw CLI::ValidationError("--weights expects four integers");
    c.weights.len_multi = std::stoi(parts[0]);
    c.weights.len_single = std::stoi(parts[1]);
    c.weights.order_match = std::stoi(parts[2]);
    c.weights.order_mismatch = std::stoi(parts[3]);
  }
  if (c.provider == RunConfig::Provider::Corpus && c.corpus_dir.empty() && c.index_path.empty())
    throw CLI::ValidationError("--provider corpus needs --corpus-dir or --index");
  if (c.provider == RunConfig::Provider::Fixture && c.fixtures_path.empty())
    throw CLI::ValidationError("--provider fixture needs --fixtures");
  if (c.query_mode == QueryMode::MGQ && c.manual_path.empty())
    throw CLI::ValidationError("--queries manual needs --manual");
  return c;
}

std::vector<InstanceResult> run(const CommonOpts& opts, const RunConfig& config,
                                const Lexicon& lexicon) {
  auto provider = make_provider(config, lexicon);
  if (config.task == RunConfig::Task::COPA)
    return run_copa(load_copa(opts.data), lexicon, *provider, config);
  return run_wsc(load_wsc(opts.data), lexicon, *provider, config);
}

void write_or_print(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Knowledge-hunting resolver for pronoun disambiguation and "
               "causal alternative selection"};
  app.require_subcommand(1);

  auto* cmd_index = app.add_subcommand("index", "Build a corpus index file");
  std::string index_corpus_dir, index_out;
  cmd_index->add_option("--corpus-dir", index_corpus_dir, "Directory of .txt documents")->required();
  cmd_index->add_option("--out", index_out, "Index file to write")->required();

  CommonOpts solve_opts;
  std::string solve_out;
  auto* cmd_solve = app.add_subcommand("solve", "Resolve every instance in a dataset");
  add_common(cmd_solve, &solve_opts);
  cmd_solve->add_option("--out", solve_out, "Resolution dump file (stdout when omitted)");

  CommonOpts eval_opts;
  std::string report_path, report_format = "json-lines";
  auto* cmd_eval = app.add_subcommand("eval", "Solve and score against gold labels");
  add_common(cmd_eval, &eval_opts);
  cmd_eval->add_option("--report", report_path, "Per-instance report file");
  cmd_eval->add_option("--report-format", report_format, "Report format")
      ->check(CLI::IsMember({"json-lines", "tsv"}))
      ->capture_default_str();

  CommonOpts inspect_opts;
  std::string inspect_id;
  auto* cmd_inspect = app.add_subcommand("inspect", "Show the labeled evidence for one instance");
  add_common(cmd_inspect, &inspect_opts);
  cmd_inspect->add_option("--id", inspect_id, "Instance id")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_index->parsed()) {
      CorpusIndex index = CorpusIndex::build_dir(index_corpus_dir);
      index.save(index_out);
      std::cout << "indexed " << index.size() << " documents -> " << index_out << "\n";
      return 0;
    }

    if (cmd_solve->parsed()) {
      RunConfig config = to_config(solve_opts);
      Lexicon lexicon = Lexicon::load(config.lexicon_dir);
      auto results = run(solve_opts, config, lexicon);
      write_or_print(render_resolutions(results), solve_out);
      return 0;
    }

    if (cmd_eval->parsed()) {
      RunConfig config = to_config(eval_opts);
      Lexicon lexicon = Lexicon::load(config.lexicon_dir);
      auto results = run(eval_opts, config, lexicon);
      std::vector<Resolution> resolutions;
      for (const auto& r : results) resolutions.push_back(r.resolution);
      EvalReport report;
      if (config.task == RunConfig::Task::COPA) {
        report = evaluate_copa(resolutions, load_copa(eval_opts.data));
        std::cout << format_copa_summary(report) << "\n";
      } else {
        report = evaluate_wsc(resolutions, load_wsc(eval_opts.data));
        std::cout << format_summary(report) << "\n";
      }
      if (!report_path.empty())
        emit_report(report,
                    report_format == "tsv" ? ReportFormat::Tsv : ReportFormat::JsonLines,
                    report_path);
      return 0;
    }

    // inspect
    RunConfig config = to_config(inspect_opts);
    Lexicon lexicon = Lexicon::load(config.lexicon_dir);
    auto provider = make_provider(config, lexicon);
    InstanceResult result;
    std::string text;
    bool found = false;
    if (config.task == RunConfig::Task::COPA) {
      for (const auto& c : load_copa(inspect_opts.data))
        if (c.id == inspect_id) {
          result = solve_copa_instance(c, lexicon, *provider, config);
          text = c.premise;
          found = true;
        }
    } else {
      for (const auto& p : load_wsc(inspect_opts.data))
        if (p.id == inspect_id) {
          result = solve_wsc_instance(p, lexicon, *provider, config);
          text = p.text;
          found = true;
        }
    }
    if (!found) throw std::runtime_error("no instance with id '" + inspect_id + "'");
    std::cout << "instance " << inspect_id << ": " << text << "\n";
    if (!result.error.empty()) std::cout << "skipped: " << result.error << "\n";
    const Resolution& res = result.resolution;
    std::cout << "decision: " << decision_name(res.decision) << " (agent=" << res.agent_strength
              << " patient=" << res.patient_strength << ", evidence " << res.evidence_count
              << ")\n";
    if (result.evidence.empty()) {
      std::cout << "no evidence retrieved\n";
    } else {
      for (const auto& e : result.evidence) {
        std::cout << "  [" << evidence_label_name(e.label) << "] strength=" << e.strength
                  << " pattern=" << e.parse.pattern
                  << " coref=" << coref_target_name(e.parse.coref_target) << " voice="
                  << ((e.parse.voice_c == Voice::Passive || e.parse.voice_q == Voice::Passive)
                          ? "passive"
                          : "active")
                  << " causative=" << (e.parse.causative ? "yes" : "no") << " :: \""
                  << e.snippet.text << "\"\n";
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
