// Command-line runner for the property suites, witness replay and decomposition files.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "ncvharm/hardy.hpp"
#include "ncvharm/serialize.hpp"
#include "ncvharm/suite.hpp"

using namespace ncvharm;

namespace {

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError(path + " is not valid JSON: " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  const std::string text = dump_json(j) + "\n";
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!(out << text)) throw OutputError("cannot write " + path);
}

int replay(const std::string& path) {
  const ReplayResult r = replay_witness(read_json(path));
  std::cout << "stored:   " << csv_line(r.stored) << "\n"
            << "replayed: " << csv_line(r.replayed) << "\n"
            << "row " << (r.row_match ? "reproduced" : "differs") << ", data "
            << (r.data_match ? "reproduced" : "differs") << "\n";
  return r.row_match && r.data_match ? 0 : kExitChecksFailed;
}

// Re-validates every atom of a serialized decomposition and its reconstruction.
int verify(const std::string& path, const std::string& out) {
  CDecomposition d;
  try {
    d = decomposition_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed decomposition: ") + e.what());
  }
  json atoms = json::array();
  bool all_valid = true;
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    const AtomReport r = validate_atom(d.terms[i].atom);
    all_valid = all_valid && r.valid;
    atoms.push_back({{"index", i},
                     {"valid", r.valid},
                     {"support_ok", r.support_ok},
                     {"mean_zero_ok", r.mean_zero_ok},
                     {"norm_ok", r.norm_ok},
                     {"h_ok", r.h_ok},
                     {"support_leak", r.support_leak},
                     {"mean_norm", r.mean_norm},
                     {"norm_slack", r.norm_slack},
                     {"h_norm", r.h_norm},
                     {"l1_norm", r.l1_norm}});
  }
  json report{{"terms", d.terms.size()}, {"abs_lambda_sum", d.abs_lambda_sum()}, {"valid", all_valid}, {"atoms", atoms}};
  if (!d.terms.empty()) report["reconstruction_l1"] = l1_norm(d.reconstruct());
  write_json(out, report);
  return all_valid ? 0 : kExitChecksFailed;
}

int decompose(const std::string& path, const std::string& out, bool center) {
  GridFn f;
  try {
    f = gridfn_from_json(read_json(path));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed GridFn: ") + e.what());
  }
  write_json(out, to_json(c_decompose(f, center)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Property suites for matrix-valued harmonic analysis"};
  std::string command, input, config_path, out, replay_path, manifest;
  std::uint64_t seed = 0;
  int n = 0;
  std::size_t corpus = 0;
  bool dump = false, center = false;
  app.add_option("command", command, "suite (bmo, atoms, garnett, duality, cz, lp, all), replay, verify or decompose")
      ->required();
  app.add_option("input", input, "witness (replay), decomposition (verify) or GridFn (decompose) JSON file");
  auto* config_opt = app.add_option("--config", config_path, "suite configuration JSON");
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed");
  auto* out_opt = app.add_option("--out", out, "output directory (suites) or file (verify, decompose)");
  app.add_option("--replay", replay_path, "replay the row stored in a witness file");
  auto* n_opt = app.add_option("--n", n, "matrix size for every corpus check")->check(CLI::Range(1, 8));
  auto* corpus_opt = app.add_option("--corpus", corpus, "items per corpus check")->check(CLI::PositiveNumber);
  auto* manifest_opt = app.add_option("--manifest", manifest, "expected pass counts per check");
  app.add_flag("--dump", dump, "write witness data for every row");
  app.add_flag("--center", center, "decompose: subtract the mean first");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (!replay_path.empty()) return replay(replay_path);
    if (command == "replay") {
      if (input.empty()) throw ConfigError("replay needs a witness file");
      return replay(input);
    }
    if (command == "verify") {
      if (input.empty()) throw ConfigError("verify needs a decomposition file");
      return verify(input, out);
    }
    if (command == "decompose") {
      if (input.empty()) throw ConfigError("decompose needs a GridFn file");
      return decompose(input, out, center);
    }
    SuiteConfig cfg = *config_opt ? load_config(config_path) : SuiteConfig{};
    cfg.suite = command;
    if (*seed_opt) cfg.seed = seed;
    if (*out_opt) cfg.out = out;
    if (*n_opt) cfg.n = n;
    if (*corpus_opt) cfg.corpus = corpus;
    if (*manifest_opt) cfg.manifest = manifest;
    if (dump) cfg.dump = true;
    const int status = run_suite(cfg);
    std::cerr << (status == 0 ? "all checks passed" : "some checks failed") << "; reports in " << cfg.out.string() << "\n";
    return status;
  } catch (const UnknownSuite& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnknownSuite;
  } catch (const OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOutput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
