#pragma once

// Scenario files: one YAML document per experiment. Angles are degrees in the
// file and radians everywhere else; conversion happens in parse/serialize.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ptc/controllers.hpp"
#include "ptc/dynamics.hpp"
#include "ptc/errors.hpp"
#include "ptc/sim.hpp"
#include "ptc/timewarp.hpp"
#include "ptc/types.hpp"

namespace ptc::cli {

/// Invalid scenario content; `path()` names the offending key, e.g. "controller.P".
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Variant { Itc, Ptc, PtcPure };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

enum class ItcKind { PdGravity, FeedbackLinearization };

std::string to_string(ItcKind k);

struct ControllerSpec {
  ItcKind itc = ItcKind::PdGravity;
  Mat P;
  Mat D;
  Vec target;  ///< rad
  std::vector<control::JointLimit> joint_limits;
  Variant variant = Variant::Ptc;
  timewarp::MapRecord kappa;
  double t0 = 0.0;
  double epsilon = 1.0;
  double sigma = 0.0;
  control::SwitchNorm switch_norm = control::SwitchNorm::Error;
};

struct DesignSpec {
  std::vector<timewarp::MapRecord> candidates;
  /// Hurwitz matrix for the Lyapunov route; `exponential_hint: closed_loop`
  /// in the file stands for [[0, I], [P, D]].
  std::optional<Mat> exponential_hint;
  bool hint_is_closed_loop = false;
  double alpha = 0.45;
  double check_horizon = 200.0;
};

struct SimSpec {
  double horizon = 19.0;
  double step = 1e-3;
  sim::ControlSampling sampling = sim::ControlSampling::PerStage;
  int max_refine = 0;
  double itc_horizon = 200.0;  ///< ITC run length for cross-domain checks
};

struct DisturbanceSpec {
  bool enabled = false;
  double std = 0.1;
  sim::WienerScaling scaling = sim::WienerScaling::PerSqrtSecond;
  std::uint64_t seed = 0;
  int seeds = 1;
};

struct Scenario {
  std::string name;
  dynamics::TwoLinkParams params;
  dynamics::TwoLinkForm form = dynamics::TwoLinkForm::Textbook;
  ControllerSpec controller;
  DesignSpec design;
  Vec q0;   ///< rad
  Vec qd0;  ///< rad/s
  SimSpec sim;
  DisturbanceSpec disturbance;
  std::string output = "out";
};

/// Parses and validates. ConfigError on malformed or out-of-range content,
/// including an empty document.
Scenario parse_scenario(const std::string& yaml_text);
Scenario load_scenario_file(const std::string& path);

/// Canonical YAML with every field written out.
std::string serialize_scenario(const Scenario& s);

/// Names of the scenarios compiled into the binary.
std::vector<std::string> bundled_scenarios();
/// YAML text of a bundled scenario, or nullopt.
std::optional<std::string> bundled_scenario_text(const std::string& name);

/// A bundled name or a path to a YAML file.
Scenario resolve_scenario(const std::string& name_or_path);

// Builders from a validated scenario.
dynamics::EulerLagrangeModel build_model(const Scenario& s);
control::ControlLaw build_itc(const Scenario& s, const dynamics::EulerLagrangeModel& model);
timewarp::KappaMap build_kappa(const Scenario& s);
/// The law for `variant` (ITC, switching PTC, or plain PTC).
control::ControlLaw build_law(const Scenario& s, const dynamics::EulerLagrangeModel& model, Variant variant);
sim::IntegrationOptions build_integration(const Scenario& s);

}  // namespace ptc::cli
