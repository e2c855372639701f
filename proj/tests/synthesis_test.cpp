#include "support.hpp"

namespace pmw {
namespace {

using test::max_abs;

struct Fixture {
  Scene scene;
  ManipulatorState state;
  VirtualInertiaDistribution virt;
};

Fixture fixture(Scene s) {
  auto st = test::solve(s);
  auto v = solve_virtual_masses(st.grasp_system());
  return {std::move(s), std::move(st), std::move(v)};
}

Matrix null_basis(const Matrix& a) {
  Eigen::FullPivLU<Matrix> lu(a);
  return lu.kernel();
}

TEST(MinTorqueNorm, ZeroWrench) {
  const auto f = fixture(test::nominal_scene());
  EXPECT_EQ(min_torque_norm(f.state, PlanarWrench::Zero()).tau, Vector::Zero(6));
}

TEST(MinTorqueNorm, CaseStudyTorques) {
  const auto f = fixture(test::nominal_scene());
  const auto r = min_torque_norm(f.state, test::kTask);
  EXPECT_EQ(r.method, SynthesisMethod::MinTorqueNorm);
  EXPECT_LE(max_abs(r.tau - test::kTauMin), test::kReportedTol);
  EXPECT_LE((r.realized - test::kTask).norm(), 1e-9 * test::kTask.norm());
  EXPECT_LE(r.diagnostics.wrench_residual, 1e-9);
  EXPECT_GT(r.diagnostics.max_interaction_residual, 0.1);
}

TEST(EquilibratingTorques, CaseStudyTorques) {
  const auto f = fixture(test::nominal_scene());
  const auto r = equilibrating_torques(f.state, test::kTask, &f.virt);
  EXPECT_LE(max_abs(r.tau - test::kTauE), test::kReportedTol);
  EXPECT_LE(max_abs(r.forces.stacked - test::kForcesE), test::kReportedTol);
  EXPECT_LE(r.diagnostics.normalized_interaction_residual, 1e-9);
  ASSERT_TRUE(r.diagnostics.constraint_wrench_norm.has_value());
  EXPECT_EQ(equilibrating_torques(f.state, PlanarWrench::Zero()).tau, Vector::Zero(6));
}

TEST(EquilibratingTorques, ModifiedEndEffector) {
  const auto f = fixture(test::modified_scene());
  const auto r = equilibrating_torques(f.state, test::kModifiedTask);
  EXPECT_LE(max_abs(r.tau - test::kTauE2), test::kReportedTol);
  EXPECT_LE(max_abs(r.forces.stacked - test::kForcesE2), test::kReportedTol);
}

TEST(ManipulatingTorques, ModifiedEndEffector) {
  const auto f = fixture(test::modified_scene());
  const auto r = manipulating_torques(f.state, f.virt, test::kModifiedTask);
  EXPECT_EQ(r.method, SynthesisMethod::Manipulating);
  EXPECT_LE(max_abs(r.tau - test::kTauM2), test::kReportedTol);
  EXPECT_LE(max_abs(r.forces.stacked - test::kForcesM2), test::kReportedTol);
  ASSERT_TRUE(r.diagnostics.constraint_wrench_norm.has_value());
  EXPECT_LE(*r.diagnostics.constraint_wrench_norm, 1e-8);
  EXPECT_EQ(manipulating_torques(f.state, f.virt, PlanarWrench::Zero()).tau, Vector::Zero(6));
}

TEST(ManipulatingTorques, SymmetricEndEffectorMatchesEquilibrating) {
  const auto f = fixture(test::nominal_scene());
  EXPECT_LE(max_abs(manipulating_torques(f.state, f.virt, test::kTask).tau -
                    equilibrating_torques(f.state, test::kTask).tau),
            1e-9);
}

TEST(ManipulatingTorques, RejectsMismatchedDistribution) {
  const auto f = fixture(test::nominal_scene());
  auto bad = f.virt;
  bad.masses.pop_back();
  EXPECT_THROW(manipulating_torques(f.state, bad, test::kTask), Error);
  bad = f.virt;
  bad.masses[0] += 0.2;
  EXPECT_THROW_CODE(manipulating_torques(f.state, bad, test::kTask), ErrorCode::InvalidVirtualDistribution);
}

TEST(GeneralResolution, ZeroShiftIsMinimumNorm) {
  const auto f = fixture(test::nominal_scene());
  EXPECT_LE(max_abs(general_resolution(f.state, test::kTask, InverseChoice::Unweighted, Vector::Zero(6)).tau -
                    min_torque_norm(f.state, test::kTask).tau),
            1e-12);
}

TEST(GeneralResolution, ShiftsNeverChangeTheWrench) {
  std::mt19937_64 rng(31);
  const auto f = fixture(test::modified_scene());
  for (auto choice : {InverseChoice::Unweighted, InverseChoice::Equilibrating, InverseChoice::Manipulating}) {
    for (int t = 0; t < 30; ++t) {
      const auto st = test::random_state(f.scene, rng);
      const auto v = solve_virtual_masses(st.grasp_system());
      const Vector z = test::random_matrix(rng, 6, 1, 5.0);
      const auto r = general_resolution(st, test::kModifiedTask, choice, z, &v);
      EXPECT_EQ(r.method, SynthesisMethod::General);
      EXPECT_LE((forward_force(st, r.tau) - test::kModifiedTask).norm(), 1e-9 * test::kModifiedTask.norm());
    }
  }
}

TEST(GeneralResolution, NullSpaceShiftChangesForcesOnly) {
  const auto f = fixture(test::nominal_scene());
  const Matrix n = null_basis(f.state.wrench_map());
  ASSERT_EQ(n.cols(), 3);
  const Vector z = n.col(0).normalized();
  const auto base = general_resolution(f.state, test::kTask, InverseChoice::Unweighted, Vector::Zero(6));
  const auto moved = general_resolution(f.state, test::kTask, InverseChoice::Unweighted, z);
  EXPECT_LE((moved.realized - base.realized).norm(), 1e-9);
  EXPECT_GT(max_abs(moved.forces.stacked - base.forces.stacked), 1e-3);
  EXPECT_THROW_CODE(general_resolution(f.state, test::kTask, InverseChoice::Unweighted, Vector::Zero(5)),
                    ErrorCode::DimensionMismatch);
}

// The objective of each method cannot be lowered by a null-space shift.
TEST(Optimality, NullSpacePerturbationsNeverLowerTheObjective) {
  std::mt19937_64 rng(32);
  for (const auto& s : {test::nominal_scene(), test::modified_scene()}) {
    for (int t = 0; t < 20; ++t) {
      const auto st = test::random_state(s, rng);
      const auto v = solve_virtual_masses(st.grasp_system());
      const PlanarWrench h = test::random_matrix(rng, 3, 1, 20.0);
      const Matrix n = null_basis(st.wrench_map());
      const Matrix we = equilibrating_weight(st).matrix(), wm = manipulating_weight(st, v).matrix();
      const Vector t0 = min_torque_norm(st, h).tau, te = equilibrating_torques(st, h).tau,
                   tm = manipulating_torques(st, v, h).tau;
      for (int k = 0; k < 10; ++k) {
        const Vector dz = n * test::random_matrix(rng, n.cols(), 1);
        const auto obj = [](const Matrix& w, const Vector& x) { return x.dot(w * x); };
        const Matrix id = Matrix::Identity(6, 6);
        EXPECT_GE(obj(id, t0 + dz), obj(id, t0) - 1e-9);
        EXPECT_GE(obj(we, te + dz), obj(we, te) - 1e-9);
        EXPECT_GE(obj(wm, tm + dz), obj(wm, tm) - 1e-9);
      }
    }
  }
}

TEST(Linearity, SynthesizersAreLinear) {
  std::mt19937_64 rng(33);
  const auto f = fixture(test::modified_scene());
  for (int t = 0; t < 30; ++t) {
    const PlanarWrench h1 = test::random_matrix(rng, 3, 1, 10.0), h2 = test::random_matrix(rng, 3, 1, 10.0);
    const double a = test::random_matrix(rng, 1, 1)(0), b = test::random_matrix(rng, 1, 1)(0);
    const PlanarWrench h = a * h1 + b * h2;
    const auto check = [&](auto synth) {
      EXPECT_LE((synth(h) - (a * synth(h1) + b * synth(h2))).norm(), 1e-9 * std::max(1.0, h.norm()));
    };
    check([&](const PlanarWrench& x) { return Vector(min_torque_norm(f.state, x).tau); });
    check([&](const PlanarWrench& x) { return Vector(equilibrating_torques(f.state, x).tau); });
    check([&](const PlanarWrench& x) { return Vector(manipulating_torques(f.state, f.virt, x).tau); });
  }
}

TEST(VirtualMassScale, ManipulatingTorquesAreInvariant) {
  std::mt19937_64 rng(34);
  const auto f = fixture(test::modified_scene());
  const Vector t1 = manipulating_torques(f.state, f.virt, test::kModifiedTask).tau;
  for (double c : {0.01, 0.5, 3.0, 250.0})
    EXPECT_LE(max_abs(manipulating_torques(f.state, f.virt.scaled(c), test::kModifiedTask).tau - t1), 1e-9);
}

TEST(CrossModule, TorqueSynthesisRealizesTheGraspDistributions) {
  std::mt19937_64 rng(35);
  for (const auto& s : {test::nominal_scene(), test::modified_scene()}) {
    for (int t = 0; t < 30; ++t) {
      const auto st = test::random_state(s, rng);
      const auto sys = st.grasp_system();
      const auto v = solve_virtual_masses(sys);
      const PlanarWrench h = test::random_matrix(rng, 3, 1, 20.0);
      const Vector hv = h;
      EXPECT_LE(max_abs(applied_forces(st, equilibrating_torques(st, h).tau).stacked -
                        equilibrating_distribution(sys, hv).stacked),
                1e-9 * std::max(1.0, h.norm()));
      const auto fm = applied_forces(st, manipulating_torques(st, v, h).tau);
      EXPECT_LE(max_abs(fm.stacked - manipulating_distribution(sys, v, hv).stacked), 1e-9 * std::max(1.0, h.norm()));
      EXPECT_LE(check_manipulating(sys, v, fm, hv).norm(), 1e-8 * std::max(1.0, h.norm()));
      EXPECT_LE(normalized_interaction_residual(applied_forces(st, equilibrating_torques(st, h).tau), sys), 1e-9);
    }
  }
}

TEST(Weights, ClosedFormsAgainstDirectProducts) {
  const auto f = fixture(test::modified_scene());
  const Matrix kinv = f.state.k().inverse();
  const Matrix b = f.state.basis();
  EXPECT_LE(max_abs(equilibrating_weight(f.state).matrix() - kinv * b.transpose() * b * kinv.transpose()), 1e-9);
  Matrix minv = Matrix::Zero(6, 6);
  for (int j = 0; j < 3; ++j) minv.block<2, 2>(2 * j, 2 * j) = Matrix::Identity(2, 2) / f.virt.masses[static_cast<std::size_t>(j)];
  EXPECT_LE(max_abs(manipulating_weight(f.state, f.virt).matrix() - kinv * b.transpose() * minv * b * kinv.transpose()),
            1e-9);
  EXPECT_THROW(wrench_map_inverse(f.state, InverseChoice::Manipulating, nullptr), Error);
}

TEST(EvaluateTorques, ReportsRealizedWrenchAndForces) {
  const auto f = fixture(test::nominal_scene());
  const auto r = evaluate_torques(f.state, test::kTauE, SynthesisMethod::General, &f.virt);
  EXPECT_LE((r.realized - forward_force(f.state, test::kTauE)).norm(), 1e-12);
  EXPECT_LE(max_abs(r.forces.stacked - applied_forces(f.state, test::kTauE).stacked), 1e-12);
}

TEST(Names, MethodAndInverseStrings) {
  EXPECT_EQ(to_string(SynthesisMethod::MinTorqueNorm), "min-norm");
  EXPECT_EQ(to_string(InverseChoice::Manipulating), "manipulating");
}

}  // namespace
}  // namespace pmw
