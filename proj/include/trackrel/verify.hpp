#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trackrel {

enum class CaseKind { cflbmc_srdcf, struck_srdcf, label_substitution, loss_substitution };

CaseKind parse_case_kind(const std::string& name);
std::string to_string(CaseKind kind);

enum class Texture { noise, flat, zero };

/// Pass thresholds and default case parameters, reported with every run.
struct SuiteManifest {
  double relation_tolerance = 1e-3;
  std::vector<double> relation_bigs{1e2, 1e4, 1e6, 1e8};
  double relation_lambda = 10.0;
  int relation_seeds = 10;

  double gap_tolerance = 0.05;
  std::vector<int> gap_multiples{1, 2, 4, 8};
  double gap_lambda = 1.0;
  int gap_seeds = 10;

  double agreement_rate = 0.9;
  double struck_lambda = 100.0;
  int label_seeds = 50;
  int loss_seeds = 50;
  /// Label agreement allows this much argmax displacement (cells, per axis).
  int label_displacement = 1;
};

struct CaseSpec {
  CaseKind kind = CaseKind::cflbmc_srdcf;
  std::uint64_t seed = 1;
  Texture texture = Texture::noise;
  std::optional<double> lambda;
  std::optional<double> tolerance;

  std::string id() const;
};

struct CaseResult {
  std::string id;
  CaseKind kind = CaseKind::cflbmc_srdcf;
  std::uint64_t seed = 1;
  bool pass = false;
  /// Informative cases are reported but do not count toward the suite verdict.
  bool informative = false;
  std::map<std::string, double> values;
  /// Relation error per big, or gap per region multiple.
  std::vector<double> curve;
  std::vector<double> ratios;
  std::string error;
  double seconds = 0.0;
};

struct SuiteResult {
  CaseKind kind = CaseKind::cflbmc_srdcf;
  int counted = 0;
  int passed = 0;
  double rate = 0.0;
  double threshold = 1.0;
  bool pass = false;
};

struct VerifyReport {
  SuiteManifest manifest;
  std::vector<CaseResult> cases;
  std::vector<SuiteResult> suites;
  bool pass = false;
};

/// The four default suites plus their degenerate cases (zero signal, flat texture).
std::vector<CaseSpec> default_cases(const SuiteManifest& manifest = {});

/// JSON array of {"kind", "seed", optional "texture", "lambda", "tolerance"}.
std::vector<CaseSpec> cases_from_json(const std::string& text);

CaseResult run_case(const CaseSpec& spec, const SuiteManifest& manifest = {});

/// Runs all cases in a worker pool; results are in input order.
VerifyReport run_verify(const std::vector<CaseSpec>& cases, const SuiteManifest& manifest = {},
                        int threads = 0);

/// Per-kind verdicts from case results.
std::vector<SuiteResult> summarize(const std::vector<CaseResult>& cases, const SuiteManifest& manifest);

std::string report_to_json(const VerifyReport& report);
std::string report_table(const VerifyReport& report);

}  // namespace trackrel
