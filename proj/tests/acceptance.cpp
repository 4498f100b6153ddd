// Acceptance run: one PASS/FAIL line per criterion, each with its row counts and wall time.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "ncvharm/suite.hpp"

using namespace ncvharm;

namespace {

struct Tally {
  std::size_t rows = 0, pass = 0;
};

Tally tally(const SuiteResult& r, const std::vector<std::string>& checks) {
  Tally t;
  for (const auto& row : r.rows)
    for (const auto& c : checks)
      if (row.check == c) {
        ++t.rows;
        t.pass += row.pass;
      }
  return t;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  // Returns (ok, detail).
  std::function<std::pair<bool, std::string>()> run;
};

// All listed checks present with the expected number of rows and every row passing.
std::pair<bool, std::string> expect(const SuiteResult& r, const std::vector<std::pair<std::string, std::size_t>>& want) {
  bool ok = true;
  std::ostringstream d;
  for (const auto& [check, count] : want) {
    const Tally t = tally(r, {check});
    ok = ok && t.rows == count && t.pass == t.rows;
    d << check << " " << t.pass << "/" << t.rows << "; ";
  }
  return {ok, d.str()};
}

}  // namespace

int main() {
  SuiteConfig cfg;  // seed 1, default corpora
  const std::vector<Criterion> criteria{
      {1, "BMO oracle equivalence", 30,
       [&] { return expect(run_checks(cfg, "bmo", {"naive_equivalence"}), {{"naive_equivalence", 100}}); }},
      {2, "atom contraction", 5,
       [&] { return expect(run_checks(cfg, "atoms", {"atom_contraction"}), {{"atom_contraction", 1000}}); }},
      {3, "duality inequality and extremal supremum", 60,
       [&] {
         return expect(run_checks(cfg, "duality", {"pairing_bound", "extremal_sup"}),
                       {{"pairing_bound", 1000}, {"extremal_sup", 50}});
       }},
      {4, "Garnett truncation", 20,
       [&] {
         return expect(run_checks(cfg, "garnett"), {{"support_3j", 100}, {"equal_on_j", 100}, {"garnett_bound", 100}});
       }},
      {5, "Meyer decomposition", 30,
       [&] {
         return expect(run_checks(cfg, "atoms", {"meyer"}),
                       {{"meyer_reconstruction", 100}, {"meyer_atoms", 100}, {"meyer_constant", 100}});
       }},
      {6, "Hormander anchor ln 3", 10,
       [&] { return expect(run_checks(cfg, "cz", {"hormander"}), {{"hormander_hilbert", 1}}); }},
      {7, "CZ endpoint on atoms", 300,
       [&] {
         return expect(run_checks(cfg, "cz", {"cz_atom_hilbert", "cz_atom_rotated"}),
                       {{"cz_atom_hilbert", 500}, {"cz_atom_rotated", 500}});
       }},
      {8, "mollification ladder, Lipschitz bound, mollified Hormander", 300,
       [&] {
         const SuiteResult r = run_checks(cfg, "cz", {"mollified_convergence", "lipschitz", "mollified_hormander"});
         // Lipschitz rows each cover 1250 sampled triples.
         return expect(r, {{"mollified_convergence", 4}, {"lipschitz", 8}, {"mollified_hormander", 4}});
       }},
      {9, "Littlewood-Paley", 600,
       [&] {
         const SuiteResult r = run_checks(cfg, "lp", {"fixed", "poisson_mass", "g_ratio"});
         return expect(r, {{"g_zero", 1},
                           {"poisson_mass", 48},
                           {"g_ratio", 200},
                           {"g_refinement", 200},
                           {"step_pair_refinement", 1}});
       }},
      {10, "determinism", 60,
       [&] {
         const auto base = std::filesystem::temp_directory_path() / "ncvharm_acceptance";
         std::filesystem::remove_all(base);
         SuiteConfig c;
         c.suite = "garnett";
         c.seed = 7;
         c.out = base / "a";
         const int s1 = run_suite(c);
         c.out = base / "b";
         const int s2 = run_suite(c);
         const std::string a = read_file(base / "a" / "results.csv"), b = read_file(base / "b" / "results.csv");
         const bool same = !a.empty() && a == b;
         std::filesystem::remove_all(base);
         return std::pair<bool, std::string>{same, "exit " + std::to_string(s1) + "/" + std::to_string(s2) + "; " +
                                                         std::to_string(a.size()) + " bytes " +
                                                         (same ? "identical; " : "differ; ")};
       }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::pair<bool, std::string> r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool ok = r.first && s < c.budget_s;
    failed += !ok;
    std::printf("AC%-2d %s  %s | %s%.2f s (budget %.0f s)\n", c.id, ok ? "PASS" : "FAIL", c.title.c_str(), r.second.c_str(), s,
                c.budget_s);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
