#include "tropism/kinematics.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace tropism;

namespace {

SectionGeometry plate(double diameter = 0.05) { return SectionGeometry{diameter, 0.042, 2, kTendonAzimuths}; }

ArmGeometry single_section_arm() {
  ArmGeometry arm;
  arm.sections.push_back(plate());
  return arm;
}

// Tendon lengths that realise a given curvature / azimuth in a section of
// diameter `d` at mean length s (inverse of the three-tendon relation).
TendonLengths lengths_for(double kappa, double phi, double s, double d) {
  TendonLengths l;
  for (std::size_t i = 0; i < 3; ++i) l[i] = s * (1.0 - kappa * d * std::cos(phi - kTendonAzimuths[i]));
  return l;
}

}  // namespace

TEST(SectionShape, EqualLengthsAreStraight) {
  const auto shape = section_shape(TendonLengths::uniform(0.084), plate());
  EXPECT_EQ(shape.kappa, 0.0);
  EXPECT_DOUBLE_EQ(shape.arc_length, 0.084);
  EXPECT_EQ(shape.phi, 0.0);
}

TEST(SectionShape, PulledFirstTendonMatchesDirectEvaluation) {
  const auto shape = section_shape({{0.080, 0.084, 0.084}}, plate());
  const double expected = oracle::direct_kappa(0.080, 0.084, 0.084, 0.05);
  EXPECT_NEAR(expected, 0.645161, 1e-6);
  EXPECT_NEAR(shape.kappa, expected, 1e-14);
  EXPECT_NEAR(shape.phi, 0.0, 1e-15);
  EXPECT_NEAR(shape.arc_length, 0.0826667, 1e-7);
}

TEST(SectionShape, PulledSecondTendonBendsToward120Degrees) {
  const auto shape = section_shape({{0.084, 0.080, 0.084}}, plate());
  EXPECT_NEAR(shape.kappa, 0.645161, 1e-6);
  EXPECT_NEAR(shape.phi, 2.0 * kPi / 3.0, 1e-12);
}

TEST(SectionShape, RejectsNonPositiveLengths) {
  EXPECT_THROW(section_shape({{0.0, 0.084, 0.084}}, plate()), InvalidInput);
  EXPECT_THROW(section_shape({{0.084, -0.01, 0.084}}, plate()), InvalidInput);
  EXPECT_THROW(section_shape({{0.0, 0.0, 0.0}}, plate()), InvalidInput);
}

TEST(SectionShape, PermutationInvarianceAndAzimuthShift) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    const TendonLengths l{{oracle::uniform(rng, 0.03, 0.084), oracle::uniform(rng, 0.03, 0.084),
                           oracle::uniform(rng, 0.03, 0.084)}};
    const auto base = section_shape(l, plate());
    std::array<std::size_t, 3> idx{0, 1, 2};
    do {
      const TendonLengths p{{l[idx[0]], l[idx[1]], l[idx[2]]}};
      EXPECT_EQ(section_shape(p, plate()).kappa, base.kappa);
    } while (std::next_permutation(idx.begin(), idx.end()));
    // cyclic relabelling (l3, l1, l2): tendon 1 moves to azimuth 120 deg
    const auto rotated = section_shape({{l[2], l[0], l[1]}}, plate());
    const double shift = wrap_two_pi(rotated.phi - base.phi);
    EXPECT_NEAR(std::min(std::abs(shift - 2.0 * kPi / 3.0), kTwoPi - std::abs(shift - 2.0 * kPi / 3.0)), 0.0, 1e-9);
  }
}

TEST(SectionShape, StraightIffEqualLengths) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const double a = oracle::uniform(rng, 0.03, 0.084);
    EXPECT_EQ(section_shape(TendonLengths::uniform(a), plate()).kappa, 0.0);
    const TendonLengths l{{a, a * (1.0 + 1e-6), a}};
    EXPECT_GT(section_shape(l, plate()).kappa, 0.0);
  }
}

TEST(SectionShape, CommonScalingScalesCurvatureInversely) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const TendonLengths l{{oracle::uniform(rng, 0.03, 0.084), oracle::uniform(rng, 0.03, 0.084),
                           oracle::uniform(rng, 0.03, 0.084)}};
    const double c = oracle::uniform(rng, 0.2, 5.0);
    const double k1 = section_shape(l, plate(0.05)).kappa;
    const double k2 = section_shape({{c * l[0], c * l[1], c * l[2]}}, plate(0.05 * c)).kappa;
    EXPECT_NEAR(k2 * c, k1, 1e-12 * std::max(1.0, k1));
  }
}

TEST(SectionTransform, StraightLimitIsPureTranslation) {
  const Transform t = section_transform({0.0, 0.0, 0.084});
  EXPECT_TRUE(t.translation().isApprox(Vec3(0, 0, 0.084), 1e-15));
  EXPECT_TRUE(t.linear().isIdentity(1e-15));
}

TEST(SectionTransform, QuarterTurnMatchesArcGeometry) {
  const double kappa = 18.69998;
  const Transform t = section_transform({kappa, 0.0, 0.084});
  const Eigen::Matrix4d ref = oracle::arc_matrix(kappa, 0.0, 0.084);
  EXPECT_NEAR(t.translation().x(), 0.053476, 1e-6);
  EXPECT_NEAR(t.translation().y(), 0.0, 1e-15);
  EXPECT_NEAR(t.translation().z(), 0.053476, 1e-6);
  EXPECT_TRUE(t.matrix().isApprox(ref, 1e-12));

  const Transform m = section_transform({kappa, kPi, 0.084});
  EXPECT_NEAR(m.translation().x(), -0.053476, 1e-6);
  EXPECT_NEAR(m.translation().z(), 0.053476, 1e-6);
  EXPECT_TRUE(m.matrix().isApprox(oracle::arc_matrix(kappa, kPi, 0.084), 1e-12));
}

TEST(SectionTransform, MatchesHandAssembledMatrixForRandomShapes) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const double s = oracle::uniform(rng, 0.03, 0.09);
    const double kappa = oracle::uniform(rng, 1e-3, 0.95 * kPi / s);
    const double phi = oracle::uniform(rng, 0.0, kTwoPi);
    const Transform t = section_transform({kappa, phi, s});
    EXPECT_LT((t.matrix() - oracle::arc_matrix(kappa, phi, s)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SectionTransform, RejectsInvalidShape) {
  EXPECT_THROW(section_transform({-1.0, 0.0, 0.084}), InvalidInput);
  EXPECT_THROW(section_transform({1.0, 0.0, 0.0}), InvalidInput);
}

TEST(ForwardKinematics, StraightArmTipIsSumOfLengths) {
  const auto arm = ArmGeometry::default_arm();
  const auto pose = forward_kinematics(arm, rest_lengths(arm));
  EXPECT_TRUE(pose.tip_position.isApprox(Vec3(0, 0, 0.252), 1e-15));
  EXPECT_TRUE(pose.tip_tangent.isApprox(Vec3::UnitZ(), 1e-15));
}

TEST(ForwardKinematics, SingleSectionTipEqualsSectionTransform) {
  const auto arm = single_section_arm();
  const double kappa = kPi / 2.0 / 0.084;
  const auto lengths = lengths_for(kappa, 0.0, 0.084, 0.05);
  const auto pose = forward_kinematics(arm, std::vector<TendonLengths>{lengths});
  const Transform t = section_transform(section_shape(lengths, arm.sections[0]));
  EXPECT_TRUE(pose.tip_position.isApprox(t.translation(), 1e-14));
}

TEST(ForwardKinematics, ThreeSectionTipMatchesBruteForceComposition) {
  const auto arm = ArmGeometry::default_arm();
  const std::vector<TendonLengths> lengths(3, TendonLengths{{0.080, 0.084, 0.084}});
  const auto pose = forward_kinematics(arm, lengths);

  Eigen::Matrix4d total = Eigen::Matrix4d::Identity();
  for (const auto& s : arm.sections) {
    const double kappa = oracle::direct_kappa(0.080, 0.084, 0.084, s.diameter);
    total = total * oracle::arc_matrix(kappa, oracle::direct_phi(0.080, 0.084, 0.084), 0.248 / 3.0);
  }
  EXPECT_NEAR(pose.shapes[0].kappa, 0.645161, 1e-6);
  EXPECT_LT((pose.tip_position - total.block<3, 1>(0, 3)).norm(), 1e-14);
  EXPECT_NEAR(pose.tip_position.y(), 0.0, 1e-15);
  EXPECT_GT(pose.tip_position.x(), 0.0);
}

TEST(ForwardKinematics, BackboneInvariants) {
  const auto arm = ArmGeometry::default_arm();
  std::mt19937_64 rng(19);
  for (int i = 0; i < 50; ++i) {
    std::vector<TendonLengths> lengths;
    for (int s = 0; s < 3; ++s)
      lengths.push_back({{oracle::uniform(rng, 0.05, 0.084), oracle::uniform(rng, 0.05, 0.084),
                          oracle::uniform(rng, 0.05, 0.084)}});
    const auto pose = forward_kinematics(arm, lengths);
    EXPECT_EQ(pose.backbone.front(), arm.base_pose.translation());
    EXPECT_EQ(pose.backbone.back(), pose.tip_position);
    EXPECT_GE(pose.backbone.size(), 31u);
    for (std::size_t k = 1; k < pose.backbone.size(); ++k)
      EXPECT_LE((pose.backbone[k] - pose.backbone[k - 1]).norm(), 0.042);
  }
}

TEST(ForwardKinematics, ContinuousAcrossTheStraightLimit) {
  const auto arm = ArmGeometry::default_arm();
  std::vector<TendonLengths> lengths;
  for (const auto& s : arm.sections) lengths.push_back(lengths_for(1e-9, 0.3, s.rest_length(), s.diameter));
  const auto pose = forward_kinematics(arm, lengths);
  EXPECT_LT((pose.tip_position - Vec3(0, 0, 0.252)).norm(), 1e-6);

  // and directly through the shape, bypassing tendon lengths
  Transform t = Transform::Identity();
  for (int s = 0; s < 3; ++s) t = t * section_transform({1e-9, 1.0, 0.084});
  EXPECT_LT((t.translation() - Vec3(0, 0, 0.252)).norm(), 1e-6);
}

TEST(ForwardKinematics, BackboneLengthMatchesArcLength) {
  const auto arm = ArmGeometry::default_arm();
  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    std::vector<TendonLengths> lengths;
    for (int s = 0; s < 3; ++s)
      lengths.push_back({{oracle::uniform(rng, 0.05, 0.084), oracle::uniform(rng, 0.05, 0.084),
                          oracle::uniform(rng, 0.05, 0.084)}});
    const auto pose = forward_kinematics(arm, lengths, 100);
    double sampled = 0.0;
    for (std::size_t k = 1; k < pose.backbone.size(); ++k) sampled += (pose.backbone[k] - pose.backbone[k - 1]).norm();
    double arc = 0.0;
    for (const auto& s : pose.shapes) arc += s.arc_length;
    EXPECT_NEAR(sampled / arc, 1.0, 1e-3);
  }
}

TEST(ForwardKinematics, ReportsFailingSection) {
  const auto arm = ArmGeometry::default_arm();
  std::vector<TendonLengths> lengths = rest_lengths(arm);
  lengths[1][2] = -0.001;
  try {
    forward_kinematics(arm, lengths);
    FAIL() << "expected InvalidInput";
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("section 1"), std::string::npos);
  }
  EXPECT_THROW(forward_kinematics(arm, std::vector<TendonLengths>(2, TendonLengths::uniform(0.084))), InvalidInput);
}

TEST(BendingAngle, StraightArmIsZero) {
  const auto arm = ArmGeometry::default_arm();
  EXPECT_EQ(bending_angle(forward_kinematics(arm, rest_lengths(arm))), 0.0);
}

TEST(BendingAngle, QuarterArcChordSubtendsHalfTheBend) {
  const auto arm = single_section_arm();
  const double kappa = kPi / 2.0 / 0.084;
  for (double phi : {0.0, 1.0, 2.5, 4.0}) {
    const auto pose = forward_kinematics(arm, std::vector<TendonLengths>{lengths_for(kappa, phi, 0.084, 0.05)});
    EXPECT_NEAR(bending_angle(pose), kPi / 4.0, 1e-12) << "phi " << phi;
  }
}

TEST(BendingAngle, UndefinedWhenTipAtBase) {
  ArmPose pose;
  pose.frames.push_back(Transform::Identity());
  pose.tip_position = Vec3::Zero();
  EXPECT_THROW(bending_angle(pose), InvalidInput);
}

TEST(ArmGeometry, DefaultsAndValidation) {
  auto arm = ArmGeometry::default_arm();
  ASSERT_EQ(arm.section_count(), 3u);
  EXPECT_DOUBLE_EQ(arm.sections[0].diameter, 0.050);
  EXPECT_DOUBLE_EQ(arm.sections[2].diameter, 0.040);
  EXPECT_DOUBLE_EQ(arm.total_rest_length(), 0.252);
  EXPECT_NO_THROW(arm.validate());
  arm.sections[2].diameter = 0.06;
  EXPECT_THROW(arm.validate(), InvalidInput);
  arm = ArmGeometry::default_arm();
  arm.sections[0].tendon_azimuths[1] = 1.0;
  EXPECT_THROW(arm.validate(), InvalidInput);
}
