#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pathlaw/plpath.hpp"
#include "pathlaw/rng.hpp"
#include "pathlaw/statlab.hpp"

namespace pathlaw {

// --- functional panels --------------------------------------------------

enum class Selector { eval_at, max_over, min_over, endpoint, integral_over };

/// One scalar functional of one component of a sampled tuple.
struct PanelItem {
  std::size_t component = 0;
  Selector kind = Selector::eval_at;
  double lo = 0.0;  ///< eval_at time, or window start
  double hi = 0.0;  ///< window end (ignored by eval_at/endpoint)
  std::string label;
};

struct FunctionalPanel {
  std::vector<PanelItem> items;
};

/// Seven functionals per component: values at t/4, t/2, 3t/4, the window
/// extrema over [0, t], the endpoint, and the exact trapezoid integral.
/// Labels are c<k>_{t4,t2,3t4,max,min,end,int}.
FunctionalPanel default_panel(std::size_t arity, double t);

/// One real per panel item; extrema exact on the PL representation,
/// integrals exact trapezoid.  Throws InvalidSelector for a component
/// index outside the tuple or an unknown selector.
std::vector<double> evaluate_panel(std::span<const PLPath> tuple,
                                   const FunctionalPanel& panel);

/// Knot-pointwise ratio map: re-interpolates through (u, phi(u)/(1+u)) at
/// the input knots.  The true ratio path is not PL; this is exact at knots
/// only.
PLPath ratio_tilt(const PLPath& path);

// --- scenario plumbing --------------------------------------------------

struct TestConfig {
  double ks_threshold = 0.02;
  double energy_min_p = 0.01;
  int n_perm = 500;
};

struct ScenarioSpec {
  std::string id;
  std::map<std::string, double> params;  ///< keys among {a,b,c,x,y,t}
  std::size_t n_samples = 20000;
  std::size_t steps = 256;
  FunctionalPanel panel;  ///< default-filled by make_scenario
  TestConfig tests;
  Seed seed{};
  std::size_t max_rejections = 1000000;
  std::size_t workers = 0;  ///< 0 = all available cores
  /// Negative-control knob: added to the right side's b before sampling,
  /// so a nonzero value must break the identity.
  double corrupt_right_b = 0.0;
};

struct VerdictReport {
  ScenarioSpec spec;  ///< effective values echoed back
  std::vector<TestVerdict> verdicts;
  std::optional<double> acceptance_rate;
  SampleMatrix left;
  SampleMatrix right;
  double runtime_ms = 0.0;

  [[nodiscard]] bool all_pass() const;
};

/// Registered scenario ids, in registry order.
std::vector<std::string> list_scenarios();

/// Spec preloaded with the scenario's reference parameters and default
/// panel.  Throws UnknownScenario.
ScenarioSpec make_scenario(const std::string& id);

/// Rebuilds spec.panel from the current parameters (after overrides).
void refresh_panel(ScenarioSpec& spec);

/// Samples both sides on disjoint substreams, evaluates the panel, and
/// runs the configured tests.  Throws UnknownScenario, InvalidParams,
/// RejectionBudgetExceeded.
VerdictReport run_scenario(const ScenarioSpec& spec);

/// Serialized JSON report; byte-identical across identical runs except
/// the runtime_ms field.
std::string report_to_json(const VerdictReport& report);

/// Raw panel matrices as CSV: header `side,<labels...>`, then one row per
/// replication (all left rows, then all right rows), 17 significant
/// digits.
void write_matrix_csv(std::ostream& os, const VerdictReport& report);

}  // namespace pathlaw
