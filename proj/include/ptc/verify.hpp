#pragma once

// Empirical checks that a time warp is compatible with a given ITC, and the
// end-to-end design procedure built on them.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptc/controllers.hpp"
#include "ptc/dynamics.hpp"
#include "ptc/lyapunov.hpp"
#include "ptc/sim.hpp"
#include "ptc/timewarp.hpp"
#include "ptc/types.hpp"

namespace ptc::verify {

/// Which acceleration-level inequality carries the assumption.
enum class Branch { None, AccelBound, ControlBound, Both };

std::string to_string(Branch b);

/// Result of checking, along a nominal ITC run,
///   ||qd(t)|| <= mu'(t - t0)   and   ||qdd(t)|| <= mu'^2  or  ||f(qd, q)|| <= mu'^2
/// from some t_tilde on. Margins are mu' - ||qd||, mu'^2 - ||qdd||, mu'^2 - ||f||.
struct AssumptionReport {
  bool satisfied = false;
  double t_tilde = 0.0;  ///< horizon when no such time exists
  Branch which_branch = Branch::None;
  double horizon = 0.0;
  std::vector<double> times;
  std::vector<double> velocity_margin;
  std::vector<double> accel_margin;
  std::vector<double> control_margin;
};

struct CheckOptions {
  double horizon = 200.0;
  double step = 1e-3;
  int max_refine = 0;
  double t0 = 0.0;
};

/// Simulates the nominal loop under `itc` from (q0, qd0) and evaluates the
/// assumption. satisfied requires t_tilde < horizon / 2. SimulationDiverged if
/// the run leaves the divergence ball.
AssumptionReport check_assumption1(const dynamics::EulerLagrangeModel& model, const control::ControlLaw& itc,
                                   const timewarp::MuMap& mu, const Vec& q0, const Vec& qd0,
                                   const CheckOptions& options = {});

/// Same check on an existing nominal ITC trajectory.
AssumptionReport check_assumption1(const sim::Trajectory& itc_run, const dynamics::EulerLagrangeModel& model,
                                   const control::ControlLaw& itc, const timewarp::MuMap& mu, double t0 = 0.0);

/// Earliest index from which every flag stays true; flags.size() if the last is false.
std::size_t first_persistent(const std::vector<bool>& flags);

struct Lemma2Report {
  bool premise_holds = false;  ///< ||r|| <= mu' on [premise_from, horizon]
  double premise_from = 0.0;
  bool first_decays = false;   ///< -eta'' / eta'^alpha ||r||
  bool second_decays = false;  ///< ||r|| / eta'^alpha
  std::vector<double> times;
  std::vector<double> first;
  std::vector<double> second;
  bool passed() const { return premise_holds && first_decays && second_decays; }
};

/// Finite-horizon proxy for the two limits: over the last decade
/// [horizon / 10, horizon] the running sup of each quantity, taken on five
/// log-spaced windows, must be non-increasing and end at most half its start
/// (or vanish).
Lemma2Report lemma2_finite_check(const std::vector<double>& times, const std::vector<double>& r_norm,
                                 const timewarp::MuMap& mu, const timewarp::MuMap& eta, double alpha,
                                 double horizon);

/// eta with mu = (eta'(0)^(alpha+1) - eta'^(alpha+1)) / (alpha + 1) for an
/// exponential mu(s) = tau (1 - exp(-beta s)) (ExpInverse or single-term LogSum
/// maps). DomainError for other families or alpha < 1.
timewarp::MuMap lemma2_eta(const timewarp::MuMap& mu, double alpha);

/// Decision trail of the design procedure.
struct DesignLog {
  struct Candidate {
    timewarp::MapRecord mapping;
    AssumptionReport report;
  };
  bool used_exponential_hint = false;
  std::optional<lyapunov::LyapunovSolution> lyapunov;
  std::vector<Candidate> candidates;
  std::optional<std::size_t> chosen;
  double settle_error = 0.0;  ///< ||[q - q_d; qd]|| at the end of the ITC run
  std::vector<std::string> steps;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
  std::string to_text() const;
};

struct DesignResult {
  control::ControlLaw law;
  timewarp::KappaMap kappa;
  DesignLog log;
};

struct DesignOptions {
  CheckOptions check;
  Vec q0;   ///< defaults to zeros
  Vec qd0;  ///< defaults to zeros
  double alpha = 0.45;
  double settle_tol = 1e-2;  ///< final error relative to max(1, initial error)
  control::SwitchNorm switch_norm = control::SwitchNorm::Error;
};

/// Design procedure: settle check on the ITC; with an exponential hint Q the
/// warp is built from the Lyapunov solution, otherwise the candidates are
/// tried in order until one satisfies the assumption; finally the switching
/// PTC is synthesized. NoCandidatePassed if none qualifies.
DesignResult design_pipeline(const dynamics::EulerLagrangeModel& model, const control::ControlLaw& itc,
                             double tau, const std::vector<timewarp::MuMap>& mu_candidates, double epsilon,
                             double sigma, const std::optional<Mat>& exponential_hint,
                             const DesignOptions& options = {});

nlohmann::json to_json(const AssumptionReport& r, bool with_series = false);
nlohmann::json to_json(const timewarp::MapRecord& r);

}  // namespace ptc::verify
