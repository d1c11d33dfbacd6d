#include "kplane/report.hpp"

#include <cmath>
#include <sstream>

namespace kplane::verify {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "unknown";
}

Verdict worst(Verdict a, Verdict b) { return static_cast<int>(a) >= static_cast<int>(b) ? a : b; }

CaseRow& VerdictReport::add(CaseRow row) {
  cases.push_back(std::move(row));
  return cases.back();
}

void VerdictReport::settle() {
  if (verdict == Verdict::Inconclusive) return;
  bool ok = true;
  for (const auto& c : cases) {
    if (!c.excluded && !c.passed) ok = false;
  }
  verdict = ok ? Verdict::Pass : Verdict::Fail;
}

namespace {

// JSON has no representation for non-finite numbers.
Json number(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(17);
  o << x;
  return o.str();
}

}  // namespace

Json to_json(const VerdictReport& r) {
  Json j;
  j["lemma_id"] = r.lemma_id;
  Json p;
  p["n"] = r.params.n;
  p["k"] = r.params.k;
  p["samples"] = r.params.samples;
  p["seed"] = r.params.seed;
  p["workers"] = r.params.workers;
  p["tolerance"] = number(r.params.tolerance);
  for (auto it = r.params.extra.begin(); it != r.params.extra.end(); ++it) p[it.key()] = it.value();
  j["params"] = p;
  Json cases = Json::array();
  for (const auto& c : r.cases) {
    Json row;
    row["desc"] = c.desc;
    row["lhs"] = number(c.lhs);
    row["rhs"] = number(c.rhs);
    row["ratio"] = number(c.ratio);
    row["stderr"] = number(c.std_error);
    row["passed"] = c.passed;
    row["excluded"] = c.excluded;
    if (!c.note.empty()) row["note"] = c.note;
    cases.push_back(row);
  }
  j["cases"] = cases;
  j["verdict"] = verdict_name(r.verdict);
  Json notes = r.notes;
  if (!notes.contains("rejection_fraction")) notes["rejection_fraction"] = 0.0;
  if (!notes.contains("truncation_radius")) notes["truncation_radius"] = nullptr;
  if (!notes.contains("c_estimate")) notes["c_estimate"] = nullptr;
  j["notes"] = notes;
  return j;
}

std::string to_csv(const std::vector<VerdictReport>& reports) {
  std::ostringstream o;
  o << "lemma_id,desc,lhs,rhs,ratio,stderr,passed,excluded,verdict\n";
  for (const auto& r : reports) {
    for (const auto& c : r.cases) {
      o << csv_field(r.lemma_id) << ',' << csv_field(c.desc) << ',' << fmt(c.lhs) << ',' << fmt(c.rhs)
        << ',' << fmt(c.ratio) << ',' << fmt(c.std_error) << ',' << (c.passed ? "true" : "false") << ','
        << (c.excluded ? "true" : "false") << ',' << verdict_name(r.verdict) << '\n';
    }
  }
  return o.str();
}

std::string to_csv(const VerdictReport& r) { return to_csv(std::vector<VerdictReport>{r}); }

}  // namespace kplane::verify
