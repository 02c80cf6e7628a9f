// Metrics and reports. Precision counts only answered instances in its
// denominator, recall counts all, F1 is their harmonic mean; COPA uses plain
// accuracy over the full set. Reports are emitted with a fixed field order
// so identical runs produce identical bytes.
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "knowhunt/resolver.hpp"
#include "knowhunt/schema.hpp"

namespace knowhunt {

struct CopaInstance {
  std::string id;
  std::string premise;
  std::string alt1;
  std::string alt2;
  CopaRelation relation = CopaRelation::Cause;
  std::optional<int> answer;  // 1 or 2
};

inline std::vector<CopaInstance> load_copa(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("copa: cannot open " + path);
  std::vector<CopaInstance> out;
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (detail::strip(line).empty()) continue;
    ++record;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error("copa: record " + std::to_string(record) + ": bad json: " + e.what());
    }
    CopaInstance c;
    for (const char* field : {"id", "premise", "alt1", "alt2", "relation"})
      if (!j.contains(field) || !j[field].is_string())
        throw std::runtime_error("copa: record " + std::to_string(record) + ": field '" +
                                 std::string(field) + "' missing or not a string");
    c.id = j["id"].get<std::string>();
    c.premise = j["premise"].get<std::string>();
    c.alt1 = j["alt1"].get<std::string>();
    c.alt2 = j["alt2"].get<std::string>();
    std::string rel = j["relation"].get<std::string>();
    if (rel == "cause") c.relation = CopaRelation::Cause;
    else if (rel == "result") c.relation = CopaRelation::Result;
    else
      throw std::runtime_error("copa: record " + std::to_string(record) +
                               ": relation must be \"cause\" or \"result\"");
    if (j.contains("answer") && !j["answer"].is_null()) {
      int a = j["answer"].get<int>();
      if (a != 1 && a != 2)
        throw std::runtime_error("copa: record " + std::to_string(record) + ": answer must be 1 or 2");
      c.answer = a;
    }
    out.push_back(std::move(c));
  }
  return out;
}

struct PerInstance {
  std::string id;
  Decision decision = Decision::Abstain;
  std::string gold;
  bool correct = false;
  int agent_strength = 0;
  int patient_strength = 0;
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t answered = 0;
  std::size_t correct = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<PerInstance> per_instance;
};

inline void fill_metrics(EvalReport& r) {
  r.precision = r.answered > 0 ? static_cast<double>(r.correct) / static_cast<double>(r.answered) : 0.0;
  r.recall = r.total > 0 ? static_cast<double>(r.correct) / static_cast<double>(r.total) : 0.0;
  r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                                        : 0.0;
}

inline EvalReport metrics_from_counts(std::size_t correct, std::size_t answered,
                                      std::size_t total) {
  EvalReport r;
  r.correct = correct;
  r.answered = answered;
  r.total = total;
  fill_metrics(r);
  return r;
}

inline EvalReport evaluate_wsc(const std::vector<Resolution>& resolutions,
                               const std::vector<ProblemInstance>& gold) {
  std::map<std::string, GoldAnswer> answers;
  for (const auto& g : gold) {
    if (!g.answer) throw std::runtime_error("eval: instance " + g.id + " has no gold answer");
    answers[g.id] = *g.answer;
  }
  EvalReport r;
  for (const auto& res : resolutions) {
    auto it = answers.find(res.instance_id);
    if (it == answers.end())
      throw std::runtime_error("eval: no gold label for id '" + res.instance_id + "'");
    ++r.total;
    PerInstance p;
    p.id = res.instance_id;
    p.decision = res.decision;
    p.gold = it->second == GoldAnswer::Agent ? "agent" : "patient";
    p.agent_strength = res.agent_strength;
    p.patient_strength = res.patient_strength;
    if (res.decision != Decision::Abstain) {
      ++r.answered;
      bool agent_gold = it->second == GoldAnswer::Agent;
      p.correct = (res.decision == Decision::Agent) == agent_gold;
      if (p.correct) ++r.correct;
    }
    r.per_instance.push_back(std::move(p));
  }
  fill_metrics(r);
  return r;
}

inline EvalReport evaluate_copa(const std::vector<Resolution>& resolutions,
                                const std::vector<CopaInstance>& gold) {
  std::map<std::string, int> answers;
  for (const auto& g : gold) {
    if (!g.answer) throw std::runtime_error("eval: instance " + g.id + " has no gold answer");
    answers[g.id] = *g.answer;
  }
  EvalReport r;
  for (const auto& res : resolutions) {
    auto it = answers.find(res.instance_id);
    if (it == answers.end())
      throw std::runtime_error("eval: no gold label for id '" + res.instance_id + "'");
    ++r.total;
    PerInstance p;
    p.id = res.instance_id;
    p.decision = res.decision;
    p.gold = "alt" + std::to_string(it->second);
    p.agent_strength = res.agent_strength;
    p.patient_strength = res.patient_strength;
    if (res.decision != Decision::Abstain) {
      ++r.answered;
      Decision want = it->second == 1 ? Decision::Alt1 : Decision::Alt2;
      p.correct = res.decision == want;
      if (p.correct) ++r.correct;
    }
    r.per_instance.push_back(std::move(p));
  }
  fill_metrics(r);
  return r;
}

inline std::string format_fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// "P=0.60 R=0.44 F1=0.51" — the two-decimal presentation used everywhere.
inline std::string format_summary(const EvalReport& r) {
  return "P=" + format_fixed(r.precision, 2) + " R=" + format_fixed(r.recall, 2) +
         " F1=" + format_fixed(r.f1, 2);
}

inline std::string format_copa_summary(const EvalReport& r) {
  double acc = r.total > 0 ? 100.0 * static_cast<double>(r.correct) / static_cast<double>(r.total)
                           : 0.0;
  return "accuracy=" + format_fixed(acc, 1) + "% (" + std::to_string(r.correct) + "/" +
         std::to_string(r.total) + ", answered " + std::to_string(r.answered) + ")";
}

enum class ReportFormat : std::uint8_t { JsonLines, Tsv };

inline std::string render_report(const EvalReport& report, ReportFormat format) {
  std::string out;
  if (format == ReportFormat::Tsv) {
    out += "id\tdecision\tgold\tcorrect\tagent_strength\tpatient_strength\n";
    for (const auto& p : report.per_instance) {
      out += p.id;
      out += '\t';
      out += decision_name(p.decision);
      out += '\t';
      out += p.gold;
      out += '\t';
      out += p.correct ? '1' : '0';
      out += '\t';
      out += std::to_string(p.agent_strength);
      out += '\t';
      out += std::to_string(p.patient_strength);
      out += '\n';
    }
    return out;
  }
  nlohmann::ordered_json summary;
  summary["total"] = report.total;
  summary["answered"] = report.answered;
  summary["correct"] = report.correct;
  summary["precision"] = report.precision;
  summary["recall"] = report.recall;
  summary["f1"] = report.f1;
  out += summary.dump();
  out += '\n';
  for (const auto& p : report.per_instance) {
    nlohmann::ordered_json row;
    row["id"] = p.id;
    row["decision"] = decision_name(p.decision);
    row["gold"] = p.gold;
    row["correct"] = p.correct;
    row["agent_strength"] = p.agent_strength;
    row["patient_strength"] = p.patient_strength;
    out += row.dump();
    out += '\n';
  }
  return out;
}

inline void emit_report(const EvalReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("report: cannot write " + path);
  out << render_report(report, format);
  if (!out) throw std::runtime_error("report: write failed for " + path);
}

}  // namespace knowhunt
