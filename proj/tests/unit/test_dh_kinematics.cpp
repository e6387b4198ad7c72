#include "fixtures.hpp"

#include "gen3lite/chain_io.hpp"
#include "gen3lite/dh_kinematics.hpp"

#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace gen3lite;

namespace {

constexpr double kPi = std::numbers::pi;

void expect_matrix_near(const Matrix3d& a, const Matrix3d& b, double tol) {
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), tol) << "\n" << a << "\nvs\n" << b;
}

}  // namespace

TEST(JointRotation, ZeroAnglesGiveIdentity) {
  expect_matrix_near(joint_rotation(0.0, 0.0), Matrix3d::Identity(), 1e-15);
}

TEST(JointRotation, QuarterTurnAboutZ) {
  Matrix3d expected;
  expected << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  expect_matrix_near(joint_rotation(kPi / 2, 0.0), expected, 1e-15);
}

TEST(JointRotation, PureTwistAboutX) {
  Matrix3d expected;
  expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  expect_matrix_near(joint_rotation(0.0, kPi / 2), expected, 1e-15);
}

TEST(JointRotation, DeterminantIsOne) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (int i = 0; i < 100; ++i) {
    const Matrix3d q = joint_rotation(u(rng), u(rng));
    EXPECT_NEAR(q.determinant(), 1.0, 1e-12);
    expect_matrix_near(q * q.transpose(), Matrix3d::Identity(), 1e-12);
  }
}

TEST(LinkOffset, Examples) {
  EXPECT_LE((link_offset(0.0, 0.28, 0.03) - Vector3d(0.28, 0, 0.03)).norm(), 1e-15);
  EXPECT_LE((link_offset(kPi / 2, 0.28, 0.03) - Vector3d(0, 0.28, 0.03)).norm(), 1e-15);
  EXPECT_LE((link_offset(1.0, 0.0, 0.245) - Vector3d(0, 0, 0.245)).norm(), 1e-15);
}

TEST(DhChain, DefaultMatchesPublishedParameters) {
  const auto c = DhChaind::gen3_lite();
  for (int i = 0; i < 6; ++i) EXPECT_EQ(c.a[i], i == 1 ? 0.28 : 0.0);
  const double b[] = {0.2433, 0.03, 0.02, 0.245, 0.057, 0.235};
  const double alpha[] = {kPi / 2, kPi, kPi / 2, kPi / 2, kPi / 2, 0.0};
  const double limit_deg[] = {154, 150, 150, 149, 145, 149};
  for (int i = 0; i < 6; ++i) {
    EXPECT_EQ(c.b[i], b[i]);
    EXPECT_EQ(c.alpha[i], alpha[i]);
    EXPECT_EQ(c.upper[i], limit_deg[i] * (kPi / 180.0));
    EXPECT_EQ(c.lower[i], -c.upper[i]);
  }
  EXPECT_NO_THROW(c.validate());
}

TEST(DhChain, ValidateRejectsBadChains) {
  auto c = DhChaind::gen3_lite();
  c.b[4] = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = DhChaind::gen3_lite();
  c.lower[2] = c.upper[2];
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(DhChain, LimitsApplyToJointValues) {
  const auto c = DhChaind::gen3_lite();
  EXPECT_TRUE(c.within_limits(fixtures::reach_joints()));
  JointAnglesd q = JointAnglesd::Zero();
  q[4] = 146.0 * kPi / 180.0;
  EXPECT_FALSE(c.within_limits(q));
}

TEST(NormalizeAngle, WrapsIntoHalfOpenInterval) {
  EXPECT_DOUBLE_EQ(normalize_angle(kPi), kPi);
  EXPECT_DOUBLE_EQ(normalize_angle(-kPi), kPi);
  EXPECT_NEAR(normalize_angle(3 * kPi / 2), -kPi / 2, 1e-15);
  EXPECT_NEAR(angle_distance(kPi - 0.1, -kPi + 0.1), 0.2, 1e-15);
}

TEST(ForwardKinematics, ReachExamplePose) {
  const Posed pose = forward_kinematics(fixtures::reach_joints(), DhChaind::gen3_lite());
  EXPECT_LE((pose.p - fixtures::reach_printed_position()).cwiseAbs().maxCoeff(), 1e-3);
  const RpyAnglesd rpy = matrix_to_rpy(pose.Q);
  const Vector3d expected = fixtures::reach_printed_rpy();
  EXPECT_NEAR(rpy.roll, expected[0], 1e-3);
  EXPECT_NEAR(rpy.pitch, expected[1], 1e-3);
  EXPECT_NEAR(rpy.yaw, expected[2], 1e-3);
  EXPECT_TRUE(pose.is_valid());
}

TEST(ForwardKinematics, PickPlaceRowsReproducePrintedPose) {
  const auto chain = DhChaind::gen3_lite();
  const Posed target = fixtures::pick_place_pose();
  const auto rows = fixtures::pick_place_rows();
  // The first printed row carries theta2 = -2.010; the solution reproducing the
  // pose has theta2 = -2.0997, so only the other rows are checked against 5e-3.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const Posed pose = forward_kinematics(rows[i], chain);
    EXPECT_LE((pose.p - target.p).cwiseAbs().maxCoeff(), 5e-3) << "row " << i;
    const RpyAnglesd a = matrix_to_rpy(pose.Q), b = matrix_to_rpy(target.Q);
    EXPECT_LE(angle_distance(a.roll, b.roll), 5e-3) << "row " << i;
    EXPECT_LE(angle_distance(a.pitch, b.pitch), 5e-3) << "row " << i;
    EXPECT_LE(angle_distance(a.yaw, b.yaw), 5e-3) << "row " << i;
  }
  JointAnglesd corrected = rows[0];
  corrected[1] = -2.0997;
  EXPECT_LE((forward_kinematics(corrected, chain).p - target.p).cwiseAbs().maxCoeff(), 5e-3);
  EXPECT_GT((forward_kinematics(rows[0], chain).p - target.p).cwiseAbs().maxCoeff(), 5e-3);
}

TEST(ForwardKinematics, ZeroJointsMatchHomogeneousChain) {
  const auto chain = DhChaind::gen3_lite();
  const JointAnglesd q = JointAnglesd::Zero();
  const Posed pose = forward_kinematics(q, chain);
  const Eigen::Matrix4d t = fixtures::homogeneous_fk(q, chain);
  EXPECT_LE((pose.p - t.block<3, 1>(0, 3)).norm(), 1e-12);
  expect_matrix_near(pose.Q, t.block<3, 3>(0, 0), 1e-12);
}

TEST(ForwardKinematics, BaseOffsetTranslatesPose) {
  auto chain = DhChaind::gen3_lite();
  const Posed ref = forward_kinematics(fixtures::reach_joints(), chain);
  chain.base = Vector3d(0.1, -0.2, 0.3);
  const Posed moved = forward_kinematics(fixtures::reach_joints(), chain);
  EXPECT_LE((moved.p - ref.p - chain.base).norm(), 1e-15);
  expect_matrix_near(moved.Q, ref.Q, 0.0);
  const Eigen::Matrix4d t = fixtures::homogeneous_fk(fixtures::reach_joints(), chain);
  EXPECT_LE((moved.p - t.block<3, 1>(0, 3)).norm(), 1e-12);
}

TEST(FrameOrigins, Examples) {
  const auto chain = DhChaind::gen3_lite();
  const auto zero = frame_origins(JointAnglesd::Zero().eval(), chain);
  EXPECT_EQ(zero[0], Vector3d::Zero());
  EXPECT_LE((zero[1] - Vector3d(0, 0, 0.2433)).norm(), 1e-15);
  const auto reach = frame_origins(fixtures::reach_joints(), chain);
  EXPECT_EQ(reach[0], Vector3d::Zero());
  EXPECT_LE((reach[6] - fixtures::reach_printed_position()).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(RpyToMatrix, Examples) {
  expect_matrix_near(rpy_to_matrix(0.0, 0.0, 0.0), Matrix3d::Identity(), 0.0);
  Matrix3d roll;
  roll << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  expect_matrix_near(rpy_to_matrix(kPi / 2, 0.0, 0.0), roll, 1e-15);
  const Vector3d rpy = fixtures::reach_printed_rpy();
  expect_matrix_near(rpy_to_matrix(rpy[0], rpy[1], rpy[2]),
                     forward_kinematics(fixtures::reach_joints(), DhChaind::gen3_lite()).Q, 1e-3);
}

TEST(RpyToMatrix, MatchesYawPitchRollComposition) {
  const double r = 0.3, p = -0.2, y = 1.1;
  const Matrix3d expected = (Eigen::AngleAxisd(y, Eigen::Vector3d::UnitZ()) *
                             Eigen::AngleAxisd(p, Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(r, Eigen::Vector3d::UnitX()))
                                .toRotationMatrix();
  expect_matrix_near(rpy_to_matrix(r, p, y), expected, 1e-15);
}

TEST(MatrixToRpy, Examples) {
  const RpyAnglesd id = matrix_to_rpy(Matrix3d::Identity().eval());
  EXPECT_EQ(id.roll, 0.0);
  EXPECT_EQ(id.pitch, 0.0);
  EXPECT_EQ(id.yaw, 0.0);
  EXPECT_FALSE(id.gimbal_lock);

  const RpyAnglesd back = matrix_to_rpy(rpy_to_matrix(0.3, -0.2, 1.1));
  EXPECT_NEAR(back.roll, 0.3, 1e-12);
  EXPECT_NEAR(back.pitch, -0.2, 1e-12);
  EXPECT_NEAR(back.yaw, 1.1, 1e-12);
}

TEST(MatrixToRpy, GimbalLockZeroesRoll) {
  const Matrix3d q = rpy_to_matrix(0.7, kPi / 2, 0.4);
  ASSERT_NEAR(q(2, 0), -1.0, 1e-15);
  const RpyAnglesd rpy = matrix_to_rpy(q);
  EXPECT_TRUE(rpy.gimbal_lock);
  EXPECT_EQ(rpy.roll, 0.0);
  EXPECT_NEAR(rpy.pitch, kPi / 2, 1e-7);
  expect_matrix_near(rpy_to_matrix(rpy), q, 1e-7);
}

TEST(WristVector, IdentityOrientationSubtractsToolLength) {
  Posed pose;
  pose.p = Vector3d(0, 0, 1);
  EXPECT_LE((wrist_vector(pose, DhChaind::gen3_lite()) - Vector3d(0, 0, 0.765)).norm(), 1e-15);
}

TEST(WristVector, MatchesLinkSumAtKnownJoints) {
  const auto chain = DhChaind::gen3_lite();
  const JointAnglesd q = fixtures::reach_joints();
  EXPECT_LE((wrist_vector(forward_kinematics(q, chain), chain) - fixtures::wrist_sum(q, chain)).norm(),
            1e-12);
  JointAnglesd row = fixtures::pick_place_rows()[0];
  row[1] = -2.0997;
  const Vector3d r = wrist_vector(fixtures::pick_place_pose(), chain);
  EXPECT_LE((r - fixtures::wrist_sum(row, chain)).cwiseAbs().maxCoeff(), 5e-3);
}

TEST(ChainJson, RoundTripPreservesChain) {
  auto chain = DhChaind::gen3_lite();
  chain.base = Vector3d(0.5, 0.25, -0.125);
  const DhChaind back = chain_from_json(chain_to_json(chain));
  EXPECT_LE((back.a - chain.a).norm(), 1e-15);
  EXPECT_LE((back.b - chain.b).norm(), 1e-15);
  EXPECT_LE((back.alpha - chain.alpha).norm(), 1e-15);
  EXPECT_LE((back.offset - chain.offset).norm(), 1e-15);
  EXPECT_LE((back.upper - chain.upper).norm(), 1e-15);
  EXPECT_LE((back.lower - chain.lower).norm(), 1e-15);
  EXPECT_EQ(back.base, chain.base);
}

TEST(ChainJson, OptionalKeysDefault) {
  const nlohmann::json doc = {{"a", {0, 0.28, 0, 0, 0, 0}},
                              {"b", {0.2433, 0.03, 0.02, 0.245, 0.057, 0.235}},
                              {"alpha", {kPi / 2, kPi, kPi / 2, kPi / 2, kPi / 2, 0}},
                              {"lower_deg", {-154, -150, -150, -149, -145, -149}},
                              {"upper_deg", {154, 150, 150, 149, 145, 149}}};
  const DhChaind chain = chain_from_json(doc);
  EXPECT_EQ(chain.offset, Vector6<double>::Zero());
  EXPECT_EQ(chain.base, Vector3d::Zero());
  EXPECT_NEAR(chain.upper[0], 154.0 * kPi / 180.0, 1e-15);
}

TEST(ChainJson, RejectsMalformedDocuments) {
  nlohmann::json doc = chain_to_json(DhChaind::gen3_lite());
  doc.erase("alpha");
  EXPECT_THROW(chain_from_json(doc), std::invalid_argument);
  doc = chain_to_json(DhChaind::gen3_lite());
  doc["b"] = {1, 2, 3};
  EXPECT_THROW(chain_from_json(doc), std::invalid_argument);
  doc = chain_to_json(DhChaind::gen3_lite());
  doc["b"][4] = 0.0;
  EXPECT_THROW(chain_from_json(doc), std::invalid_argument);
  EXPECT_THROW(load_chain("/nonexistent/chain.json"), std::invalid_argument);
}
