#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace kplane::verify {

using Json = nlohmann::ordered_json;

// Ordered by severity; the exit code of a run is the numeric value.
enum class Verdict { Pass = 0, Fail = 1, Inconclusive = 2 };

std::string verdict_name(Verdict v);
Verdict worst(Verdict a, Verdict b);

struct CaseRow {
  std::string desc;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double std_error = 0.0;  // of the ratio when both sides are estimates, else of lhs
  bool passed = true;
  bool excluded = false;
  std::string note;
};

struct Params {
  int n = 0;
  int k = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  double tolerance = 0.0;
  Json extra = Json::object();
};

struct VerdictReport {
  std::string lemma_id;
  Params params;
  std::vector<CaseRow> cases;
  Verdict verdict = Verdict::Pass;
  Json notes = Json::object();

  CaseRow& add(CaseRow row);
  // verdict = Pass iff every non-excluded row passed (unless already inconclusive).
  void settle();
};

Json to_json(const VerdictReport& r);
std::string to_csv(const VerdictReport& r);
std::string to_csv(const std::vector<VerdictReport>& reports);

}  // namespace kplane::verify
