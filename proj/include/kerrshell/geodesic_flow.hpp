//========================================================================================
// kerrshell: Hamiltonian geodesic flow in the (r, theta) and (rho, z) charts, conserved
// quantity monitoring, Mino-time periods and the numerical orbit-fate oracle
// Licensed under the MIT License, see LICENSE file for details
//========================================================================================
#ifndef KERRSHELL_GEODESIC_FLOW_HPP_
#define KERRSHELL_GEODESIC_FLOW_HPP_

#include <array>
#include <cstddef>
#include <limits>
#include <vector>

#include "kerrshell/orbit_families.hpp"

// M = 1 units throughout; (eps, ell) are the constant momenta -v_t and v_phi, so the
// reduced system evolves (position, in-plane covector) only.

namespace kerrshell {

enum class Chart { BL, Weyl };

struct PhaseState {
  Chart chart = Chart::BL;
  double x1 = 0.0;  //!< r or rho
  double x2 = 0.0;  //!< theta or z
  double v1 = 0.0;  //!< v_r or v_rho
  double v2 = 0.0;  //!< v_theta or v_z
  double eps = 0.0;
  double ell = 0.0;
  double tau = 0.0;   //!< proper time
  double mino = 0.0;  //!< Mino time, d tau = Sigma^2 d lambda
};

struct ConservedReport {
  ConservedSet cs;
  double H;  //!< -1/2 on the unit mass shell
};

//! H = (1/2) g^{ab} v_a v_b in the chart of the state.
double hamiltonian(const PhaseState& s, const KerrParams& p);
//! (eps, ell_z, q) and H of a state (q from v_theta in the BL chart; converted otherwise).
ConservedReport conserved_from_state(const PhaseState& s, const KerrParams& p);
//! BL state with constants cs at (r, theta) and the given signs of v_r, v_theta.
//! Throws InvalidInput when R(r) < 0 or T(cos theta) < 0 beyond round-off.
PhaseState make_state(const ConservedSet& cs, BLPoint at, int sign_vr, int sign_vtheta, const KerrParams& p);
//! Rescale the in-plane covector so that H = -1/2. Throws InvalidInput where the
//! in-plane kinetic budget is negative (outside the allowed region of (eps, ell)).
PhaseState normalize_momentum(PhaseState s, const KerrParams& p);
PhaseState to_weyl(const PhaseState& s, const KerrParams& p);
PhaseState to_bl(const PhaseState& s, const KerrParams& p);

//! Proper-time right-hand side d/dtau (x1, x2, v1, v2) of the reduced BL system with
//! the effective potential written through R(r; q) and T(cos theta; q). The q terms
//! cancel analytically, so the result does not depend on q beyond round-off.
std::array<double, 4> hamilton_rhs_bl(const PhaseState& s, double q, const KerrParams& p);
//! Proper-time right-hand side in the Weyl chart.
std::array<double, 4> hamilton_rhs_weyl(const PhaseState& s, const KerrParams& p);

enum class TimeParam { Proper, Mino };

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double horizon_margin = 1e-6;
  double escape_radius = 1e3;
  TimeParam time = TimeParam::Proper;
  bool record = true;
  std::size_t record_stride = 1;
  std::size_t max_steps = 2000000;
};

enum class Termination { HorizonReached, Escaped, SpanExhausted, StepFailure };
const char* termination_name(Termination t);

struct DriftStats {
  double eps = 0.0;  //!< structurally zero: eps and ell are constants of the reduced system
  double ell = 0.0;
  double q = 0.0;  //!< max |q - q0| / max(1, |q0|)
  double H = 0.0;  //!< max |2H + 1|
  //! max |2H + 1| divided by the summed magnitudes of its terms, which grow like 1 / Delta
  //! on a plunge in the BL chart
  double H_rel = 0.0;
};

//! Zero crossing of v_r or v_theta located on the dense output.
struct TurnEvent {
  double time;  //!< in the integration time parameter
  double x;     //!< r or theta at the event
  int direction;  //!< sign of v after the crossing
};

struct Trajectory {
  std::vector<PhaseState> samples;
  DriftStats drift;
  Termination reason = Termination::SpanExhausted;
  std::vector<TurnEvent> radial_turns;   //!< BL chart only
  std::vector<TurnEvent> polar_turns;    //!< BL chart only
  double r_min = std::numeric_limits<double>::infinity();
  double r_max = 0.0;
  double theta_min = std::numeric_limits<double>::infinity();
  double theta_max = -std::numeric_limits<double>::infinity();
  PhaseState final_state;
  std::size_t steps = 0;
  std::string message;
};

//! Integrate from s0 over `span` of the selected time parameter. Mino time is available
//! in the BL chart only. Stops at r < r_+ + margin, r > escape radius or the span end.
Trajectory integrate(const PhaseState& s0, double span, const KerrParams& p, const IntegrateOptions& opt = {});

struct OrbitPeriods {
  double T_r;      //!< full radial period in Mino time (r1 -> r2 -> r1)
  double T_theta;  //!< full polar period in Mino time
  double err_r;
  double err_theta;
};
//! Mino-time periods of a trapped orbit between the two largest simple roots.
//! Throws MarginalOrbit for double roots and InvalidInput without a trapped interval.
OrbitPeriods periods(const ConservedSet& cs, const KerrParams& p);
//! Mean spacing of same-direction crossings in a trajectory; NaN if fewer than two.
double measured_period(const std::vector<TurnEvent>& turns);

struct FateOptions {
  std::size_t min_radial_oscillations = 2;
  double r_lo = 0.0;  //!< containment box (trapped check); 0 and inf disable it
  double r_hi = std::numeric_limits<double>::infinity();
};
//! Numerical fate: Trapped, Plunging, Scattered (escaped) or Indeterminate.
OrbitClass fate(const Trajectory& t, const FateOptions& opt = {});

}  // namespace kerrshell

#endif  // KERRSHELL_GEODESIC_FLOW_HPP_
