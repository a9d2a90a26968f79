// Command-line front end over the library: list scenarios, run a
// verification, dump sampled paths, run the deterministic self-test.
//
// Exit codes: 0 success (all verdicts/identities pass), 1 a verification
// or identity failed, 2 usage or parameter errors.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pathlaw/errors.hpp"
#include "pathlaw/plpath.hpp"
#include "pathlaw/rng.hpp"
#include "pathlaw/samplers.hpp"
#include "pathlaw/scenarios.hpp"
#include "pathlaw/selftest.hpp"
#include "pathlaw/transforms.hpp"

namespace {

using namespace pathlaw;

/// Writes through `fn` to the named file, or to stdout when path is empty.
void with_output(const std::string& path,
                 const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  std::ofstream file(path);
  if (!file) throw InvalidParams("cannot open output file: " + path);
  fn(file);
}

PLPath draw_path(const std::string& kind, double a, double b, double t,
                 std::size_t steps, Seed seed) {
  if (kind == "brownian_motion") return sample_brownian_motion(a, t, steps, seed);
  if (kind == "brownian_bridge") {
    return sample_brownian_bridge(a, b, t, steps, seed);
  }
  if (kind == "bessel3_process") return sample_bessel3_process(a, t, steps, seed);
  if (kind == "bessel3_bridge") {
    return sample_bessel3_bridge(a, b, t, steps, seed);
  }
  throw InvalidParams("unknown process kind '" + kind + "'");
}

PLPath apply_named(const std::string& name, const PLPath& path, bool have_x,
                   double x) {
  if (name == "P") return pitman_max(path);
  if (name == "Pbar") return pitman_min(path);
  if (name == "N") return n_transform(path);
  if (name == "Q") return q_transform(path);
  if (name == "S") return s_transform(path);
  if (name == "Mx" || name == "Mbarx") {
    if (!have_x) throw InvalidParams("transform " + name + " needs --x");
    return name == "Mx" ? m_x(path, x) : mbar_x(path, x);
  }
  throw InvalidParams("unknown transform '" + name +
                      "' (expected P, Pbar, Mx, Mbarx, N, Q or S)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"path-transformation identities at desk scale"};
  app.require_subcommand(1);

  CLI::App* cmd_list =
      app.add_subcommand("list", "print the registered scenario ids");

  // --- verify ---------------------------------------------------------
  CLI::App* cmd_verify =
      app.add_subcommand("verify", "run one scenario and report verdicts");
  std::string scenario;
  cmd_verify->add_option("scenario", scenario, "registered scenario id")
      ->required();
  double pa = 0.0;
  double pb = 0.0;
  double pc = 0.0;
  double px = 0.0;
  double py = 0.0;
  double pt = 0.0;
  CLI::Option* oa = cmd_verify->add_option("--a", pa, "parameter a");
  CLI::Option* ob = cmd_verify->add_option("--b", pb, "parameter b");
  CLI::Option* oc = cmd_verify->add_option("--c", pc, "parameter c");
  CLI::Option* ox = cmd_verify->add_option("--x", px, "parameter x");
  CLI::Option* oy = cmd_verify->add_option("--y", py, "parameter y");
  CLI::Option* ot = cmd_verify->add_option("--t", pt, "horizon t");
  std::size_t n_samples = 20000;
  std::size_t steps = 256;
  int n_perm = 500;
  std::size_t workers = 0;
  std::uint64_t seed = 42;
  std::string out_path;
  std::string dump_path;
  cmd_verify->add_option("--n", n_samples, "replications per side");
  cmd_verify->add_option("--steps", steps, "grid segments");
  cmd_verify->add_option("--seed", seed, "master seed")
      ->envname("PATHLAW_SEED");
  cmd_verify->add_option("--n-perm", n_perm, "energy permutations");
  cmd_verify->add_option("--workers", workers,
                         "sampling threads (0 = all cores)");
  cmd_verify->add_option("--out", out_path, "JSON report file (default stdout)");
  cmd_verify->add_option("--dump", dump_path, "raw panel matrices as CSV");

  // --- sample ---------------------------------------------------------
  CLI::App* cmd_sample =
      app.add_subcommand("sample", "dump sampled paths as CSV");
  std::string kind;
  cmd_sample
      ->add_option("kind", kind,
                   "brownian_motion | brownian_bridge | bessel3_process | "
                   "bessel3_bridge")
      ->required();
  double sa = 0.0;
  double sb = 0.0;
  double st = 1.0;
  double sx = 0.0;
  std::size_t s_steps = 256;
  std::uint64_t s_seed = 42;
  std::size_t n_paths = 1;
  std::string transform;
  std::string s_out;
  cmd_sample->add_option("--a", sa, "start value");
  cmd_sample->add_option("--b", sb, "end value (bridges)");
  cmd_sample->add_option("--t", st, "horizon");
  cmd_sample->add_option("--steps", s_steps, "grid segments");
  cmd_sample->add_option("--seed", s_seed, "master seed")
      ->envname("PATHLAW_SEED");
  cmd_sample->add_option("--paths", n_paths, "number of paths to dump");
  cmd_sample->add_option("--transform", transform,
                         "apply P, Pbar, Mx, Mbarx, N, Q or S before dumping");
  CLI::Option* osx =
      cmd_sample->add_option("--x", sx, "level for Mx / Mbarx");
  cmd_sample->add_option("--out", s_out, "CSV file (default stdout)");

  // --- selftest -------------------------------------------------------
  CLI::App* cmd_selftest = app.add_subcommand(
      "selftest", "run the deterministic identity suite on random paths");
  std::size_t st_paths = 1000;
  std::uint64_t st_seed = 42;
  cmd_selftest->add_option("--paths", st_paths, "number of random paths");
  cmd_selftest->add_option("--seed", st_seed, "master seed")
      ->envname("PATHLAW_SEED");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_list->parsed()) {
      for (const std::string& id : list_scenarios()) {
        std::printf("%s\n", id.c_str());
      }
      return 0;
    }

    if (cmd_verify->parsed()) {
      ScenarioSpec spec = make_scenario(scenario);
      if (oa->count() > 0) spec.params["a"] = pa;
      if (ob->count() > 0) spec.params["b"] = pb;
      if (oc->count() > 0) spec.params["c"] = pc;
      if (ox->count() > 0) spec.params["x"] = px;
      if (oy->count() > 0) spec.params["y"] = py;
      if (ot->count() > 0) spec.params["t"] = pt;
      spec.n_samples = n_samples;
      spec.steps = steps;
      spec.seed.master = seed;
      spec.tests.n_perm = n_perm;
      spec.workers = workers;
      refresh_panel(spec);  // panel times follow a changed horizon

      const VerdictReport report = run_scenario(spec);
      const std::string json = report_to_json(report);
      with_output(out_path, [&](std::ostream& os) { os << json; });
      if (!dump_path.empty()) {
        with_output(dump_path,
                    [&](std::ostream& os) { write_matrix_csv(os, report); });
      }
      return report.all_pass() ? 0 : 1;
    }

    if (cmd_sample->parsed()) {
      if (n_paths < 1) throw InvalidParams("--paths must be positive");
      std::ostringstream csv;
      for (std::size_t rep = 0; rep < n_paths; ++rep) {
        PLPath path =
            draw_path(kind, sa, sb, st, s_steps, Seed{s_seed, rep});
        if (!transform.empty()) {
          path = apply_named(transform, path, osx->count() > 0, sx);
        }
        if (rep > 0) csv << '\n';  // blank line between paths
        std::ostringstream one;
        write_csv(path, one);
        const std::string block = one.str();
        // Repeat the header only on the first block.
        csv << (rep == 0 ? block : block.substr(block.find('\n') + 1));
      }
      const std::string text = csv.str();
      with_output(s_out, [&](std::ostream& os) { os << text; });
      return 0;
    }

    // selftest
    if (st_paths < 1) throw InvalidParams("--paths must be positive");
    const std::vector<CheckResult> results =
        run_identity_suite(st_seed, st_paths);
    bool all_ok = true;
    for (const CheckResult& r : results) {
      std::printf("%s: max_dev=%.3e\n", r.name.c_str(), r.max_dev);
      all_ok = all_ok && r.pass;
    }
    return all_ok ? 0 : 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
