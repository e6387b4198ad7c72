#include "gen3lite/ik_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gen3lite::ik {

namespace {

constexpr double kPi = std::numbers::pi;

// Elimination primitives, templated so the polynomial can be built in
// extended precision.

template <typename S>
S c4_impl(S theta1, const Vector3<S>& r, const DhChain<S>& chain) {
  using std::cos;
  using std::sin;
  return (r[0] * sin(theta1) - r[1] * cos(theta1) + chain.b[2] - chain.b[1]) / chain.b[4];
}

// A1, A2, A3, B1, B2, B3.
template <typename S>
std::array<S, 6> ab_impl(S theta1, S s4, S c4, const Matrix3<S>& Q, const Vector3<S>& r,
                         const DhChain<S>& chain) {
  using std::cos;
  using std::sin;
  const S s1 = sin(theta1), c1 = cos(theta1);
  const S a2 = chain.a[1], b1 = chain.b[0], b4 = chain.b[3], b5 = chain.b[4];
  const S x = r[0] * c1 + r[1] * s1;
  const S z = r[2] - b1;
  return {-Q(2, 2) * s4,
          Q(0, 2) * c1 * s4 + Q(1, 2) * s1 * s4,
          Q(0, 2) * c4 * s1 - Q(1, 2) * c1 * c4,
          S(2) * z * b5 * s4 - S(2) * x * b4,
          -S(2) * b4 * z - S(2) * b5 * s4 * x,
          z * z + x * x + b4 * b4 + b5 * b5 * s4 * s4 - a2 * a2};
}

template <typename S>
S eliminant_impl(S theta1, S s4, const Matrix3<S>& Q, const Vector3<S>& r,
                 const DhChain<S>& chain) {
  const S c4 = c4_impl(theta1, r, chain);
  const auto [A1, A2, A3, B1, B2, B3] = ab_impl(theta1, s4, c4, Q, r, chain);
  const S e1 = A2 * B3 - A3 * B2;
  const S e2 = A3 * B1 - A1 * B3;
  const S e3 = A1 * B2 - A2 * B1;
  return e1 * e1 + e2 * e2 - e3 * e3;
}

template <typename S>
struct VwImpl {
  S V{0}, W{0}, c4{0}, scale{0};
};

// Maps phi at the 7 fixed s4 nodes to its monomial coefficients.
template <typename S>
const Eigen::Matrix<S, 7, 7>& phi_fit() {
  static const Eigen::Matrix<S, 7, 7> fit = [] {
    const std::vector<S> nodes = chebyshev_nodes<S>(7, S(-1), S(1));
    Eigen::Matrix<S, 7, 7> vander;
    for (int i = 0; i < 7; ++i) {
      S pw(1);
      for (int k = 0; k < 7; ++k, pw *= nodes[static_cast<std::size_t>(i)]) vander(i, k) = pw;
    }
    return Eigen::Matrix<S, 7, 7>(vander.fullPivLu().inverse());
  }();
  return fit;
}

template <typename S>
VwImpl<S> vw_impl(S theta1, const Matrix3<S>& Q, const Vector3<S>& r, const DhChain<S>& chain) {
  static const std::vector<S> nodes = chebyshev_nodes<S>(7, S(-1), S(1));
  Eigen::Matrix<S, 7, 1> values;
  for (int i = 0; i < 7; ++i)
    values[i] = eliminant_impl(theta1, nodes[static_cast<std::size_t>(i)], Q, r, chain);
  const Eigen::Matrix<S, 7, 1> phi = phi_fit<S>() * values;

  VwImpl<S> out;
  out.c4 = c4_impl(theta1, r, chain);
  out.scale = phi.cwiseAbs().maxCoeff();
  const S sigma2 = S(1) - out.c4 * out.c4;
  // s4^(2k) -> sigma2^k
  S pw(1);
  for (int k = 0; k <= 6; k += 2) {
    out.W += phi[k] * pw;
    if (k + 1 <= 6) out.V += phi[k + 1] * pw;
    pw *= sigma2;
  }
  return out;
}

template <typename S>
S univariate_trig_impl(S theta1, const Matrix3<S>& Q, const Vector3<S>& r,
                       const DhChain<S>& chain) {
  const VwImpl<S> vw = vw_impl(theta1, Q, r, chain);
  const S b5 = chain.b[4];
  const S b5c4 = b5 * vw.c4;  // r1 s1 - r2 c1 + b3 - b2
  return b5 * b5 * vw.W * vw.W + (b5c4 * b5c4 - b5 * b5) * vw.V * vw.V;
}

template <typename S>
S univariate_eval_impl(S T1, const Matrix3<S>& Q, const Vector3<S>& r, const DhChain<S>& chain) {
  using std::atan;
  using std::pow;
  return univariate_trig_impl(S(2) * atan(T1), Q, r, chain) * pow(S(1) + T1 * T1, 8);
}

// Quantities that stay fixed for one theta1 during back substitution.
struct RootFrame {
  double theta1, c1, s1;
  Vector3d r;
  const Matrix3d* Q;
  const DhChaind* chain;

  RootFrame(double t1, const Posed& pose, const DhChaind& ch)
      : theta1(t1), c1(std::cos(t1)), s1(std::sin(t1)), r(wrist_vector(pose, ch)), Q(&pose.Q),
        chain(&ch) {}

  [[nodiscard]] double q(int i, int j) const { return (*Q)(i - 1, j - 1); }
  // r1 c1 + r2 s1 and r3 - b1.
  [[nodiscard]] double X() const { return r[0] * c1 + r[1] * s1; }
  [[nodiscard]] double Z() const { return r[2] - chain->b[0]; }
};

struct PartialSolution {
  JointAnglesd dh;
  bool wrist_singular = false;
};

// theta5, theta2, theta6 and theta3 once theta1, theta4 and theta3 - theta2 are known.
PartialSolution complete_from_theta32(const RootFrame& f, double s4, double c4, double theta32,
                                      const Options& opts) {
  const double s32 = std::sin(theta32), c32 = std::cos(theta32);
  const double a2 = f.chain->a[1], b4 = f.chain->b[3], b5 = f.chain->b[4];

  const double y = f.q(1, 3) * f.c1 + f.q(2, 3) * f.s1;
  const double m13 = y * c32 - f.q(3, 3) * s32;
  const double m23 = -f.q(1, 3) * f.s1 + f.q(2, 3) * f.c1;
  const double m33 = y * s32 + f.q(3, 3) * c32;

  const double c5 = -m33;
  const double s5 = std::abs(s4) >= std::abs(c4) ? m23 / s4 : m13 / c4;
  const double theta5 = std::atan2(s5, c5);

  const double x = f.X(), z = f.Z();
  const double c2 = (x - b5 * c32 * s4 - b4 * s32) / a2;
  const double s2 = (z + b5 * s32 * s4 - b4 * c32) / a2;
  const double theta2 = std::atan2(s2, c2);

  PartialSolution out;
  const double theta4 = std::atan2(s4, c4);
  const double s5n = std::sin(theta5);
  double theta6 = 0.0;
  if (std::abs(s5n) < opts.wrist_singular_tol ||
      (std::abs(s5) < opts.wrist_singular_tol && std::abs(c5) < opts.wrist_singular_tol)) {
    // Both theta6 equations read 0 = 0; the remaining rotation is Rz(theta6).
    out.wrist_singular = true;
    const std::array<double, 5> dh{f.theta1, theta2, theta32 + theta2, theta4, theta5};
    Matrix3d rot = Matrix3d::Identity();
    for (std::size_t i = 0; i < dh.size(); ++i)
      rot = rot * joint_rotation(dh[i], f.chain->alpha[static_cast<Eigen::Index>(i)]);
    const Matrix3d rest = rot.transpose() * *f.Q;
    theta6 = std::atan2(rest(1, 0), rest(0, 0));
  } else {
    const double c6 = (f.q(1, 1) * f.c1 * s32 + f.q(2, 1) * f.s1 * s32 + f.q(3, 1) * c32) / s5n;
    const double s6 = (f.q(1, 2) * f.c1 * s32 + f.q(2, 2) * f.s1 * s32 + f.q(3, 2) * c32) / -s5n;
    theta6 = std::atan2(s6, c6);
  }

  out.dh << f.theta1, theta2, theta32 + theta2, theta4, theta5, theta6;
  return out;
}

IkSolution make_solution(const RootFrame& f, const PartialSolution& part, Branch branch,
                         const Posed& pose) {
  IkSolution sol;
  sol.joints = f.chain->from_dh(part.dh);
  sol.branch = branch;
  sol.wrist_singular = part.wrist_singular;
  const double half = normalize_angle(f.theta1) / 2;
  if (std::abs(std::abs(half) - kPi / 2) < 1e-12) {
    sol.t1_at_infinity = true;
    sol.t1_root = std::numeric_limits<double>::infinity();
  } else {
    sol.t1_root = std::tan(half);
  }
  sol.residual = fk_residual(sol.joints, pose, *f.chain);
  sol.within_limits = f.chain->within_limits(sol.joints);
  return sol;
}

// theta3 - theta2 from the 2x2 system; falls through to the half-angle route
// when the determinant vanishes.
std::vector<IkSolution> solve_from_theta4(const RootFrame& f, double s4, double c4, Branch branch,
                                          const Posed& pose, const Options& opts) {
  const AbCoefficients ab = ab_coefficients(f.theta1, s4, c4, pose, f.r, *f.chain);
  const double det = ab.denominator();
  if (std::abs(det) <= opts.denominator_zero_tol * ab.scale())
    return special_case_denominator_zero(f.theta1, s4, c4, pose, *f.chain, opts);
  const double s32 = (ab.A2 * ab.B3 - ab.A3 * ab.B2) / det;
  const double c32 = (ab.A3 * ab.B1 - ab.A1 * ab.B3) / det;
  const PartialSolution part = complete_from_theta32(f, s4, c4, std::atan2(s32, c32), opts);
  return {make_solution(f, part, branch, pose)};
}

double refine_bracket(double lo, double hi, double flo, const Posed& pose, const DhChaind& chain) {
  // Bisection; the function is cheap and this is robust at clustered roots.
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = univariate_trig(mid, pose, chain);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section minimum of sign * g on [lo, hi].
double refine_extremum(double lo, double hi, double sign, const Posed& pose,
                       const DhChaind& chain) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  const auto f = [&](double x) { return sign * univariate_trig(x, pose, chain); };
  double a = lo, b = hi;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Drives g toward zero on [lo, hi] from the side `sign`. A crossing gives the
// two close roots on either side; otherwise the extremum, which is a
// tangential root when g reaches zero there.
std::vector<double> refine_dip(double lo, double hi, double sign, const Posed& pose,
                               const DhChaind& chain, double& g_at_extremum) {
  const double x = refine_extremum(lo, hi, sign, pose, chain);
  g_at_extremum = univariate_trig(x, pose, chain);
  if (sign * g_at_extremum >= 0.0) return {x};
  const double glo = univariate_trig(lo, pose, chain);
  return {refine_bracket(lo, x, glo, pose, chain),
          refine_bracket(x, hi, g_at_extremum, pose, chain)};
}

struct WindowScan {
  // Refined sign changes, plus interior dips of |g| that reach zero.
  std::vector<double> roots;
  // Grid bracket around the sample with the smallest |g|, and the sign of g there.
  double best_lo = 0, best_hi = 0, best_sign = 1;
  bool best_interior = false;
};

WindowScan scan_window(double lo, double hi, int samples, const Posed& pose,
                       const DhChaind& chain) {
  constexpr double tangency_tol = 1e-8;  // |g| at a dip, relative to max |g| in the window
  std::vector<double> xs(static_cast<std::size_t>(samples) + 1);
  std::vector<double> gs(xs.size());
  for (int i = 0; i <= samples; ++i) {
    xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / samples;
    gs[static_cast<std::size_t>(i)] = univariate_trig(xs[static_cast<std::size_t>(i)], pose, chain);
  }
  double g_max = 0.0;
  for (double g : gs) g_max = std::max(g_max, std::abs(g));

  WindowScan out;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    if (gs[i] == 0.0) {
      out.roots.push_back(xs[i]);
    } else if ((gs[i] < 0) != (gs[i + 1] < 0) && gs[i + 1] != 0.0) {
      out.roots.push_back(refine_bracket(xs[i], xs[i + 1], gs[i], pose, chain));
    }
  }
  if (gs.back() == 0.0) out.roots.push_back(xs.back());

  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const bool same_side = (gs[i - 1] < 0) == (gs[i] < 0) && (gs[i] < 0) == (gs[i + 1] < 0);
    if (!same_side || gs[i] == 0.0) continue;
    if (std::abs(gs[i]) > std::abs(gs[i - 1]) || std::abs(gs[i]) > std::abs(gs[i + 1])) continue;
    double g_ext = 0.0;
    const double sign = gs[i] < 0 ? -1.0 : 1.0;
    const std::vector<double> dip = refine_dip(xs[i - 1], xs[i + 1], sign, pose, chain, g_ext);
    if (dip.size() == 2 || std::abs(g_ext) <= tangency_tol * g_max)
      out.roots.insert(out.roots.end(), dip.begin(), dip.end());
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < gs.size(); ++i)
    if (std::abs(gs[i]) < std::abs(gs[best])) best = i;
  out.best_interior = best > 0 && best + 1 < xs.size();
  out.best_sign = gs[best] < 0 ? -1.0 : 1.0;
  out.best_lo = xs[best == 0 ? 0 : best - 1];
  out.best_hi = xs[std::min(best + 1, xs.size() - 1)];
  return out;
}

// Real roots of univariate_trig near the polynomial root re + i im. The
// window around re grows until it holds a sign change (two for a complex
// pair, which stands for zero or two real roots), or until the smallest |g|
// lies strictly inside it. There g is driven toward zero: a crossing
// reveals two close roots the grid stepped over, otherwise the extremum is
// returned as a tangential root.
std::vector<double> roots_near(double re, double im, int samples, const Options& opts,
                               const Posed& pose, const DhChaind& chain) {
  const double size = 1.0 + std::abs(re);
  double w = std::max(4.0 * im, 1e-4 * size);
  const double w_max = std::max(w, opts.near_real_tol * size);
  const std::size_t wanted = im > 0.0 ? 2 : 1;
  for (;;) {
    const WindowScan scan =
        scan_window(2.0 * std::atan(re - w), 2.0 * std::atan(re + w), samples, pose, chain);
    if (scan.roots.size() >= wanted || (!scan.roots.empty() && w >= w_max)) return scan.roots;
    if (scan.roots.empty() && (scan.best_interior || w >= w_max)) {
      double g_ext = 0.0;
      return refine_dip(scan.best_lo, scan.best_hi, scan.best_sign, pose, chain, g_ext);
    }
    w = std::min(4.0 * w, w_max);
  }
}

// Gauss-Newton on p and the columns of Q with the geometric Jacobian: joint
// i turns about z_i through O_i, so dp = z_i x (p - O_i) and dQ = [z_i]x Q.
void polish(IkSolution& sol, const Posed& pose, const DhChaind& chain, int iterations) {
  for (int it = 0; it < iterations && sol.residual > 0.0; ++it) {
    std::array<Vector3d, 6> axes, origins;
    Vector3d p = chain.base;
    Matrix3d rot = Matrix3d::Identity();
    for (int i = 0; i < 6; ++i) {
      const double theta = sol.joints[i] + chain.offset[i];
      axes[static_cast<std::size_t>(i)] = rot.col(2);
      origins[static_cast<std::size_t>(i)] = p;
      p += rot * link_offset(theta, chain.a[i], chain.b[i]);
      rot = rot * joint_rotation(theta, chain.alpha[i]);
    }
    Eigen::Matrix<double, 12, 6> jac;
    for (std::size_t i = 0; i < 6; ++i) {
      const Vector3d& z = axes[i];
      jac.col(static_cast<Eigen::Index>(i)) << z.cross(p - origins[i]), z.cross(rot.col(0)),
          z.cross(rot.col(1)), z.cross(rot.col(2));
    }
    Eigen::Matrix<double, 12, 1> err;
    err << p - pose.p, (rot - pose.Q).reshaped();
    const JointAnglesd step = jac.colPivHouseholderQr().solve(-err);
    const JointAnglesd next = normalize_angles(JointAnglesd(sol.joints + step));
    const double res = fk_residual(next, pose, chain);
    if (!(res < sol.residual)) break;
    sol.joints = next;
    sol.residual = res;
  }
  sol.within_limits = chain.within_limits(sol.joints);
}

struct Theta1Candidate {
  double theta1;
  bool at_pi = false;
};

std::vector<Theta1Candidate> theta1_candidates(const Posed& pose, const DhChaind& chain,
                                               const Options& opts, int& trimmed) {
  const DensePolynomial<double> poly = build_univariate(pose, chain);
  const PolynomialRoots<double> roots = polynomial_roots(poly, opts.leading_tol);
  trimmed = roots.trimmed_degrees;

  std::vector<Theta1Candidate> out;
  for (const auto& z : roots.roots) {
    const double re = z.real(), im = std::abs(z.imag());
    const double size = 1.0 + std::abs(re);
    const bool is_real = im <= opts.real_tol * size;
    if (!is_real && (z.imag() < 0.0 || im > opts.near_real_tol * size)) continue;
    const int samples = is_real ? opts.refine_samples_real : opts.refine_samples_near_real;
    for (double t : roots_near(re, is_real ? 0.0 : im, samples, opts, pose, chain))
      out.push_back({t});
  }
  if (trimmed > 0) out.push_back({kPi, true});

  std::sort(out.begin(), out.end(),
            [](const Theta1Candidate& a, const Theta1Candidate& b) { return a.theta1 < b.theta1; });
  std::vector<Theta1Candidate> unique;
  for (const auto& c : out)
    if (unique.empty() || std::abs(c.theta1 - unique.back().theta1) > 1e-13 || c.at_pi)
      unique.push_back(c);
  return unique;
}

// theta1 with c4_of_theta1(theta1) = c4 on one side of the extremum of
// r1 s1 - r2 c1 = rho sin(theta1 - beta). False when c4 is out of reach.
bool theta1_for_c4(double c4, int side, const Vector3d& r, const DhChaind& chain, double& theta1) {
  const double rho = std::hypot(r[0], r[1]);
  if (rho == 0.0) return false;
  const double m = (chain.b[4] * c4 - (chain.b[2] - chain.b[1])) / rho;
  if (std::abs(m) > 1.0) return false;
  const double beta = std::atan2(r[1], r[0]);
  theta1 = normalize_angle(side == 0 ? beta + std::asin(m) : beta + kPi - std::asin(m));
  return true;
}

// Solutions with theta4 near 0 or pi. There theta1 is quadratic in theta4,
// so roots well apart in theta4 crowd together in theta1 below what the
// theta1 search resolves. The eliminant is scanned in theta4 instead, with
// theta1 slaved to c4 = cos(theta4) and s4 = sin(theta4).
std::vector<IkSolution> fold_solutions(const Posed& pose, const DhChaind& chain,
                                       const Options& opts) {
  const Vector3d r = wrist_vector(pose, chain);
  const int n = opts.fold_samples;
  std::vector<IkSolution> out;
  for (double center : {0.0, kPi}) {
    for (int side = 0; side < 2; ++side) {
      const auto psi = [&](double t4, double& t1) {
        if (!theta1_for_c4(std::cos(t4), side, r, chain, t1)) return std::numeric_limits<double>::quiet_NaN();
        return eliminant(t1, std::sin(t4), pose, r, chain);
      };
      double prev_x = 0, prev_g = std::numeric_limits<double>::quiet_NaN();
      for (int i = 0; i <= n; ++i) {
        const double x = center - opts.fold_window + 2.0 * opts.fold_window * i / n;
        double t1 = 0;
        const double g = psi(x, t1);
        if (!std::isnan(g) && !std::isnan(prev_g) && (g < 0) != (prev_g < 0)) {
          double lo = prev_x, hi = x, glo = prev_g;
          for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double gm = psi(mid, t1);
            if ((gm < 0) == (glo < 0)) {
              lo = mid;
              glo = gm;
            } else {
              hi = mid;
            }
          }
          const double t4 = 0.5 * (lo + hi);
          if (theta1_for_c4(std::cos(t4), side, r, chain, t1)) {
            const RootFrame f(t1, pose, chain);
            for (IkSolution& sol :
                 solve_from_theta4(f, std::sin(t4), std::cos(t4), Branch::generic, pose, opts))
              out.push_back(sol);
          }
        }
        prev_x = x;
        prev_g = g;
      }
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(Branch b) {
  switch (b) {
    case Branch::generic: return "generic";
    case Branch::special_v_zero: return "special_V_zero";
    case Branch::special_denominator_zero: return "special_denominator_zero";
    case Branch::theta1_pi: return "theta1_pi";
  }
  return "unknown";
}

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::c4_out_of_range: return "c4_out_of_range";
    case RejectReason::no_real_branch: return "no_real_branch";
    case RejectReason::residual_filter: return "residual_filter";
  }
  return "unknown";
}

double AbCoefficients::scale() const {
  return std::max({std::abs(B1), std::abs(B2), std::abs(B3)});
}

void require_supported_chain(const DhChaind& chain) {
  chain.validate();
  constexpr double tol = 1e-12;
  const std::array<double, 6> alpha{kPi / 2, kPi, kPi / 2, kPi / 2, kPi / 2, 0.0};
  for (int i = 0; i < 6; ++i) {
    if (std::abs(normalize_angle(chain.alpha[i] - alpha[static_cast<std::size_t>(i)])) > tol)
      throw std::invalid_argument("unsupported chain: twist angles must be (pi/2, pi, pi/2, pi/2, pi/2, 0)");
    if (i != 1 && chain.a[i] != 0.0)
      throw std::invalid_argument("unsupported chain: only a2 may be nonzero");
  }
  if (chain.a[1] == 0.0) throw std::invalid_argument("unsupported chain: a2 must be nonzero");
}

double c4_of_theta1(double theta1, const Vector3d& r, const DhChaind& chain) {
  return c4_impl(theta1, r, chain);
}

AbCoefficients ab_coefficients(double theta1, double s4, double c4, const Posed& pose,
                               const Vector3d& r, const DhChaind& chain) {
  const auto ab = ab_impl(theta1, s4, c4, pose.Q, r, chain);
  return {ab[0], ab[1], ab[2], ab[3], ab[4], ab[5]};
}

double eliminant(double theta1, double s4, const Posed& pose, const Vector3d& r,
                 const DhChaind& chain) {
  return eliminant_impl(theta1, s4, pose.Q, r, chain);
}

VwSplit vw_split(double theta1, const Posed& pose, const Vector3d& r, const DhChaind& chain) {
  const VwImpl<double> vw = vw_impl(theta1, pose.Q, r, chain);
  VwSplit out;
  out.V = vw.V;
  out.W = vw.W;
  out.c4 = vw.c4;
  out.scale = vw.scale;
  out.real_s4 = std::abs(out.c4) <= 1.0 + 1e-12;
  return out;
}

double univariate_trig(double theta1, const Posed& pose, const DhChaind& chain) {
  return univariate_trig_impl(theta1, pose.Q, wrist_vector(pose, chain), chain);
}

double univariate_eval(double T1, const Posed& pose, const DhChaind& chain) {
  return univariate_eval_impl(T1, pose.Q, wrist_vector(pose, chain), chain);
}

DensePolynomial<double> build_univariate(const Posed& pose, const DhChaind& chain) {
  // Node values at |T1| = 4 carry the factor 17^8 relative to those near 0, so
  // they are evaluated in extended precision before interpolation.
  using Ext = long double;
  const DhChain<Ext> ext_chain = chain.cast<Ext>();
  const Pose<Ext> ext_pose = pose.cast<Ext>();
  const Vector3<Ext> r = wrist_vector(ext_pose, ext_chain);
  const std::vector<Ext> nodes = chebyshev_nodes<Ext>(17, Ext(-4), Ext(4));
  std::vector<Ext> values(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    values[i] = univariate_eval_impl(nodes[i], ext_pose.Q, r, ext_chain);
  return DensePolynomial<double>(interpolate(nodes, values, 16).coeffs().cast<double>());
}

std::vector<double> solve_half_angle(double a, double b, double c) {
  // (c - b) T^2 + 2 a T + (b + c) = 0
  const double qa = c - b, qb = 2.0 * a, qc = b + c;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c)});
  if (scale == 0.0) return {};
  std::vector<double> out;
  if (std::abs(qa) <= 1e-14 * scale) {
    out.push_back(kPi);  // T -> infinity
    if (std::abs(qb) > 1e-14 * scale) out.push_back(2.0 * std::atan(-qc / qb));
    return out;
  }
  double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) {
    if (disc < -1e-12 * scale * scale) return {};
    disc = 0.0;
  }
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (qb + std::copysign(sq, qb));
  if (q == 0.0) {
    out.push_back(0.0);
    out.push_back(0.0);
  } else {
    out.push_back(2.0 * std::atan(q / qa));
    out.push_back(2.0 * std::atan(qc / q));
  }
  return out;
}

std::vector<IkSolution> back_substitute(double theta1, const Posed& pose, const DhChaind& chain,
                                        const Options& opts) {
  const RootFrame f(theta1, pose, chain);
  double c4 = c4_of_theta1(theta1, f.r, chain);
  if (std::abs(c4) > 1.0 + opts.c4_tol) return {};
  c4 = std::clamp(c4, -1.0, 1.0);

  const VwSplit vw = vw_split(theta1, pose, f.r, chain);
  if (std::abs(vw.V) <= opts.v_zero_tol * vw.scale)
    return special_case_v_zero(theta1, pose, chain, opts);

  const double theta4 = std::atan2(-vw.W / vw.V, c4);
  const Branch branch =
      std::abs(std::abs(normalize_angle(theta1)) - kPi) < 1e-12 ? Branch::theta1_pi : Branch::generic;
  return solve_from_theta4(f, std::sin(theta4), std::cos(theta4), branch, pose, opts);
}

std::vector<IkSolution> special_case_v_zero(double theta1, const Posed& pose,
                                            const DhChaind& chain, const Options& opts) {
  const RootFrame f(theta1, pose, chain);
  double c4 = c4_of_theta1(theta1, f.r, chain);
  if (std::abs(c4) > 1.0 + opts.c4_tol) return {};
  c4 = std::clamp(c4, -1.0, 1.0);
  // acos loses half the digits next to +-1, where the branches coincide.
  const double t4 = 1.0 - std::abs(c4) <= 1e-12 ? (c4 > 0 ? 0.0 : kPi) : std::acos(c4);

  std::vector<IkSolution> out;
  for (double theta4 : {t4, -t4}) {
    auto sols = solve_from_theta4(f, std::sin(theta4), std::cos(theta4), Branch::special_v_zero,
                                  pose, opts);
    for (auto& s : sols) {
      if (s.branch == Branch::generic) s.branch = Branch::special_v_zero;
      out.push_back(s);
    }
    if (t4 == 0.0 || t4 == kPi) break;  // +-acos coincide
  }
  return out;
}

std::vector<IkSolution> special_case_denominator_zero(double theta1, double s4, double c4,
                                                      const Posed& pose, const DhChaind& chain,
                                                      const Options& opts) {
  const RootFrame f(theta1, pose, chain);
  const AbCoefficients ab = ab_coefficients(theta1, s4, c4, pose, f.r, chain);
  const double norm_a = std::hypot(ab.A1, ab.A2);
  const double norm_b = std::hypot(ab.B1, ab.B2);
  const std::vector<double> roots = norm_b >= norm_a ? solve_half_angle(ab.B1, ab.B2, ab.B3)
                                                     : solve_half_angle(ab.A1, ab.A2, ab.A3);
  std::vector<IkSolution> out;
  for (double theta32 : roots) {
    const PartialSolution part = complete_from_theta32(f, s4, c4, theta32, opts);
    out.push_back(make_solution(f, part, Branch::special_denominator_zero, pose));
  }
  return out;
}

double fk_residual(const JointAnglesd& joints, const Posed& target, const DhChaind& chain) {
  const Posed fk = forward_kinematics(joints, chain);
  return (fk.p - target.p).norm() + (fk.Q - target.Q).norm();
}

SolutionSet solve_ik(const Posed& pose, const DhChaind& chain, const Options& opts) {
  require_supported_chain(chain);
  SolutionSet set;
  set.target = pose;

  int trimmed = 0;
  const std::vector<Theta1Candidate> candidates = theta1_candidates(pose, chain, opts, trimmed);
  set.trimmed_degrees = trimmed;

  std::vector<IkSolution> pool;
  for (const Theta1Candidate& cand : candidates) {
    const Vector3d r = wrist_vector(pose, chain);
    const double c4 = c4_of_theta1(cand.theta1, r, chain);
    if (std::abs(c4) > 1.0 + opts.c4_tol) {
      set.rejected.push_back({cand.theta1, RejectReason::c4_out_of_range, 0.0});
      continue;
    }
    std::vector<IkSolution> sols = back_substitute(cand.theta1, pose, chain, opts);
    if (cand.at_pi)
      for (auto& s : sols) s.branch = Branch::theta1_pi;

    // Near-degenerate roots: the generic division is ill-conditioned there,
    // so the special routes are tried as well and the residual filter decides.
    const VwSplit vw = vw_split(cand.theta1, pose, r, chain);
    if (std::abs(vw.V) <= opts.special_fallback_tol * vw.scale) {
      auto extra = special_case_v_zero(cand.theta1, pose, chain, opts);
      sols.insert(sols.end(), extra.begin(), extra.end());
    }
    const double cc4 = std::clamp(c4, -1.0, 1.0);
    const double s4_abs = std::sqrt(1.0 - cc4 * cc4);
    for (double s4 : {s4_abs, -s4_abs}) {
      const AbCoefficients ab = ab_coefficients(cand.theta1, s4, cc4, pose, r, chain);
      const double rel = std::abs(ab.denominator());
      if (rel <= opts.special_fallback_tol * ab.scale()) {
        auto extra = special_case_denominator_zero(cand.theta1, s4, cc4, pose, chain, opts);
        sols.insert(sols.end(), extra.begin(), extra.end());
      }
      if (s4_abs == 0.0) break;
    }

    for (IkSolution& s : sols)
      if (!s.wrist_singular && s.residual < opts.polish_band)
        polish(s, pose, chain, opts.polish_iterations);

    bool kept = false;
    double best = std::numeric_limits<double>::infinity();
    for (const IkSolution& s : sols) {
      best = std::min(best, s.residual);
      if (s.residual < opts.residual_max) {
        pool.push_back(s);
        kept = true;
      }
    }
    if (!kept)
      set.rejected.push_back({cand.theta1,
                              sols.empty() ? RejectReason::no_real_branch
                                           : RejectReason::residual_filter,
                              sols.empty() ? 0.0 : best});
  }

  for (IkSolution& s : fold_solutions(pose, chain, opts)) {
    if (!s.wrist_singular && s.residual < opts.polish_band) polish(s, pose, chain, opts.polish_iterations);
    if (s.residual < opts.residual_max) pool.push_back(s);
  }

  // Dedupe, preferring the smaller residual.
  std::stable_sort(pool.begin(), pool.end(),
                   [](const IkSolution& a, const IkSolution& b) { return a.residual < b.residual; });
  for (const IkSolution& s : pool) {
    const bool dup = std::any_of(set.all.begin(), set.all.end(), [&](const IkSolution& k) {
      return max_joint_distance(k.joints, s.joints) <= opts.dedupe_tol;
    });
    if (!dup) set.all.push_back(s);
  }
  std::sort(set.all.begin(), set.all.end(), [](const IkSolution& a, const IkSolution& b) {
    if (a.joints[0] != b.joints[0]) return a.joints[0] < b.joints[0];
    return a.joints[3] < b.joints[3];
  });
  for (std::size_t i = 0; i < set.all.size(); ++i)
    if (set.all[i].within_limits && !set.all[i].wrist_singular) set.feasible.push_back(i);
  return set;
}

}  // namespace gen3lite::ik
