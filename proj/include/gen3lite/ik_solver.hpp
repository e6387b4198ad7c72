#pragma once

// Analytical inverse kinematics of the Gen3 Lite by elimination down to a
// degree-16 polynomial in T1 = tan(theta1 / 2), followed by back substitution.
//
// Angles passed to the elimination primitives (c4_of_theta1, vw_split,
// back_substitute, ...) are DH angles. Solutions are reported in the robot's
// joint convention (DH angle minus the chain offset).

#include "gen3lite/dh_kinematics.hpp"
#include "gen3lite/polynomial.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace gen3lite::ik {

/// Tolerances for the whole pipeline, in one place.
struct Options {
  // Root extraction.
  double real_tol = 1e-7;
  double leading_tol = 1e-10;
  /// Complex roots with |Im T| <= near_real_tol * (1 + |Re T|) are searched
  /// for nearby real roots of the unexpanded equation.
  double near_real_tol = 5e-2;
  int refine_samples_real = 64;
  int refine_samples_near_real = 256;

  // Back substitution.
  double c4_tol = 1e-9;
  /// |V| below this times max|phi coefficient| selects the two-branch theta4 route.
  double v_zero_tol = 1e-8;
  /// |A1 B2 - A2 B1| below this times max|B| selects the half-angle route.
  double denominator_zero_tol = 1e-8;
  /// When a generic candidate fails the residual filter and |V| or the
  /// denominator is this small (relative), the special routes are tried too.
  double special_fallback_tol = 1e-4;
  double wrist_singular_tol = 1e-9;

  /// Solutions with theta4 within fold_window of 0 or pi are also searched
  /// in theta4, on fold_samples intervals, since their theta1 roots cluster.
  double fold_window = 0.25;
  int fold_samples = 512;

  /// Gauss-Newton steps on the pose error applied to back-substituted
  /// solutions with residual below polish_band. Clustered theta1 roots only
  /// pin theta1 to about eps^(1/k) for a k-fold cluster, and the steps recover
  /// the lost digits.
  int polish_iterations = 6;
  double polish_band = 1e-2;

  // Filtering.
  double residual_max = 1e-6;
  double dedupe_tol = 1e-5;
};

/// Coefficients of B1 s32 + B2 c32 + B3 = 0 (position) and
/// A1 s32 + A2 c32 + A3 = 0 (orientation), s32 = sin(theta3 - theta2).
struct AbCoefficients {
  double A1 = 0, A2 = 0, A3 = 0;
  double B1 = 0, B2 = 0, B3 = 0;

  [[nodiscard]] double denominator() const { return A1 * B2 - A2 * B1; }
  /// Reference size of the denominator: max |B|. (A1, A2, A3) is s4 or c4
  /// times a unit vector, so the A row has natural scale 1 and shrinks with s4.
  [[nodiscard]] double scale() const;
};

/// V and W of V s4 + W = 0 at a fixed theta1.
struct VwSplit {
  double V = 0;
  double W = 0;
  double c4 = 0;
  /// max |coefficient| of the eliminant phi(s4); the reference scale for V and W.
  double scale = 0;
  /// False when |c4| > 1 + 1e-12, i.e. no real s4 exists on this branch.
  bool real_s4 = true;
};

enum class Branch { generic, special_v_zero, special_denominator_zero, theta1_pi };

std::string_view to_string(Branch b);

struct IkSolution {
  JointAnglesd joints = JointAnglesd::Zero();
  /// tan(theta1_dh / 2); +inf when theta1 = pi.
  double t1_root = 0;
  bool t1_at_infinity = false;
  /// |p - p*| + ||Q - Q*||_F (metres plus a dimensionless term).
  double residual = 0;
  bool within_limits = false;
  /// |s5| below wrist_singular_tol; theta6 is read off the rotation left
  /// after joints 1..5 instead of the s5 divisions.
  bool wrist_singular = false;
  Branch branch = Branch::generic;
};

enum class RejectReason {
  c4_out_of_range,   // |c4| > 1: theta1 admits no real theta4
  no_real_branch,    // half-angle equation without real root, or no real root near a complex pair
  residual_filter,   // back substitution does not reproduce the pose
};

std::string_view to_string(RejectReason r);

struct Rejection {
  double theta1 = 0;
  RejectReason reason = RejectReason::residual_filter;
  double residual = 0;
};

struct SolutionSet {
  Posed target;
  /// Deduplicated solutions passing the residual filter, sorted by theta1 then theta4.
  std::vector<IkSolution> all;
  /// Indices into `all` within joint limits and away from the wrist singularity.
  std::vector<std::size_t> feasible;
  /// Root candidates that produced no surviving solution, with the reason.
  std::vector<Rejection> rejected;
  /// Leading coefficients trimmed from the polynomial (roots at theta1 = pi).
  int trimmed_degrees = 0;
};

/// Throws std::invalid_argument unless the chain has the Gen3 Lite zero
/// pattern: only a2 nonzero among the a_i, alpha = (pi/2, pi, pi/2, pi/2,
/// pi/2, 0), b5 != 0.
void require_supported_chain(const DhChaind& chain);

/// c4 = (r1 s1 - r2 c1 + b3 - b2) / b5. Not clamped.
double c4_of_theta1(double theta1, const Vector3d& r, const DhChaind& chain);

AbCoefficients ab_coefficients(double theta1, double s4, double c4, const Posed& pose,
                               const Vector3d& r, const DhChaind& chain);

/// phi(s4) = (A2B3 - A3B2)^2 + (A3B1 - A1B3)^2 - (A1B2 - A2B1)^2 with c4
/// taken from c4_of_theta1. Zero whenever the two linear equations in
/// (s32, c32) admit a unit-norm solution.
double eliminant(double theta1, double s4, const Posed& pose, const Vector3d& r,
                 const DhChaind& chain);

/// Odd and even parts of phi(s4) after reducing s4^2 -> 1 - c4^2.
///
/// phi is sampled at 7 Chebyshev points, interpolated (degree 6 in s4) and
/// reduced modulo s4^2 - sigma^2, sigma^2 = 1 - c4^2. For |c4| <= 1:
/// phi(sigma) = V sigma + W and phi(-sigma) = -V sigma + W.
VwSplit vw_split(double theta1, const Posed& pose, const Vector3d& r, const DhChaind& chain);

/// b5^2 W^2 + [(b5 c4)^2 - b5^2] V^2 as a function of theta1.
double univariate_trig(double theta1, const Posed& pose, const DhChaind& chain);

/// univariate_trig(2 atan T1) * (1 + T1^2)^8, a polynomial of degree 16 in T1.
double univariate_eval(double T1, const Posed& pose, const DhChaind& chain);

/// Coefficients E_0..E_16 by interpolating univariate_eval at 17 Chebyshev
/// nodes on [-4, 4]. Node values and the interpolation use long double.
DensePolynomial<double> build_univariate(const Posed& pose, const DhChaind& chain);

/// Solutions of a sin(x) + b cos(x) + c = 0 through T = tan(x/2); at most two.
std::vector<double> solve_half_angle(double a, double b, double c);

/// Joint sets for one theta1 root: theta4, theta3 - theta2, theta5, theta2,
/// theta6, theta3 in that order. Dispatches to the special cases when V or the
/// 2x2 determinant vanishes. Empty when |c4| > 1.
std::vector<IkSolution> back_substitute(double theta1, const Posed& pose, const DhChaind& chain,
                                        const Options& opts = {});

/// Two theta4 branches +-acos(c4), used when V = 0 leaves s4 undetermined.
std::vector<IkSolution> special_case_v_zero(double theta1, const Posed& pose,
                                            const DhChaind& chain, const Options& opts = {});

/// theta3 - theta2 from a single half-angle equation, used when the 2x2
/// system is singular. Takes whichever of the two equations has the larger
/// coefficient norm.
std::vector<IkSolution> special_case_denominator_zero(double theta1, double s4, double c4,
                                                      const Posed& pose, const DhChaind& chain,
                                                      const Options& opts = {});

SolutionSet solve_ik(const Posed& pose, const DhChaind& chain, const Options& opts = {});

double fk_residual(const JointAnglesd& joints, const Posed& target, const DhChaind& chain);

}  // namespace gen3lite::ik
