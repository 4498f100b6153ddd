#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncvharm/error.hpp"
#include "ncvharm/serialize.hpp"

namespace ncvharm {

// Typed failures of the runner; each maps to its own process exit code.
struct UnknownSuite : Error {
  using Error::Error;
};
struct OutputError : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

inline constexpr int kExitChecksFailed = 1;
inline constexpr int kExitUnknownSuite = 2;
inline constexpr int kExitOutput = 3;
inline constexpr int kExitConfig = 4;

struct SuiteConfig {
  std::string suite = "all";
  std::uint64_t seed = 1;
  int n = 0;               // matrix size; 0 keeps each check's default
  std::size_t corpus = 0;  // items per corpus check; 0 keeps each check's default
  std::optional<Grid> grid;  // replaces the default grid of the bmo, duality, garnett and atoms suites
  std::map<std::string, double> tolerances;  // overrides; keys from tolerance_defaults()
  std::filesystem::path out = "out";
  bool dump = false;  // write the witness data of every row, not only of failures
  std::optional<std::filesystem::path> manifest;  // expected pass counts per check

  double tol(const std::string& key) const;
};

const std::map<std::string, double>& tolerance_defaults();
// "bmo", "atoms", "garnett", "duality", "cz", "lp".
const std::vector<std::string>& suite_names();
std::vector<std::string> check_names(const std::string& suite);

SuiteConfig config_from_json(const json& j);
json config_to_json(const SuiteConfig& c);
SuiteConfig load_config(const std::filesystem::path& path);

enum class Relation { le, ge, eq };

struct CheckRow {
  std::string suite;
  std::string check;
  std::size_t item = 0;
  double value = 0.0;
  Relation relation = Relation::le;
  double bound = 0.0;
  bool pass = false;
  std::string detail;   // key=value pairs separated by ';'
  std::string witness;  // witness file name relative to the output directory
};

// One line of cz.csv.
struct CzRow {
  std::string kernel;
  double lambda = 0.0, c_lambda = 0.0, t_norm = 0.0;
  std::size_t atom_seed = 0;
  double near = 0.0, far = 0.0, total = 0.0, bound = 0.0;
  bool pass = false;
};

struct SuiteResult {
  std::vector<CheckRow> rows;
  std::vector<CzRow> cz_rows;
  std::map<std::string, json> witnesses;  // file name -> witness document
};

// Runs the checks of one suite in memory; `only` restricts to the named checks.
SuiteResult run_checks(const SuiteConfig& cfg, const std::string& suite, const std::vector<std::string>& only = {});

// Runs cfg.suite ("all" runs every suite), writes results.csv, cz.csv, summary.json and
// witnesses/ under cfg.out. Returns 0 when every row passes (and the manifest matches), else 1.
int run_suite(const SuiteConfig& cfg);

std::string csv_header();
std::string csv_line(const CheckRow& r);
std::string cz_csv_header();
std::string cz_csv_line(const CzRow& r);

json row_to_json(const CheckRow& r);

struct ReplayResult {
  CheckRow stored;
  CheckRow replayed;
  bool row_match = false;   // identical value, bound and verdict
  bool data_match = false;  // regenerated inputs equal the serialized ones
};

// Recomputes the row named by a witness document from its config, seed and item index.
ReplayResult replay_witness(const json& witness);

}  // namespace ncvharm
