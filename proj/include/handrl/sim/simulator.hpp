// Copyright 2026 The handrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>
#include <vector>

#include "handrl/sim/types.hpp"

namespace handrl::sim {

// Ball on the ground at the origin, palm at its initial height, fingers
// hanging straight down, everything at rest. Validates the model.
SimState reset(const Model& model);

struct FingertipPose {
  Eigen::Vector3d tip_center;
  // Inner-side normal of the distal phalanx in the x-z plane.
  Eigen::Vector3d pad_normal;
};

// Planar two-link forward kinematics. Each finger flexes toward the palm
// centre for negative joint angles.
FingertipPose fingertip_pose(const SimState& state, const HandParams& hand, Finger finger);

// Axis endpoints of a finger's distal phalanx (joint 2 and tip centre).
struct Segment {
  Eigen::Vector3d a;
  Eigen::Vector3d b;
};
Segment distal_segment(const SimState& state, const HandParams& hand, Finger finger);

// Velocity of a point rigidly attached to the distal phalanx of `finger`.
Eigen::Vector3d distal_point_velocity(const SimState& state, const HandParams& hand,
                                      Finger finger, const Eigen::Vector3d& point);

// Distal capsule vs ball, palm underside vs ball and ground vs ball.
// Touching without overlap is not a contact.
std::vector<ContactPoint> detect_contacts(const SimState& state, const Model& model);

// Generalised contact loads; forces on the ball and reactions on the hand.
struct ContactLoads {
  double ball_fx = 0.0;
  double ball_fz = 0.0;
  double ball_torque_y = 0.0;
  std::array<double, kNumJoints> joint_torques{};
  double palm_fz = 0.0;
};

// Penalty normal force plus tanh-regularised Coulomb friction. Writes
// normal_force / tangential_force into each contact.
ContactLoads contact_forces(std::span<ContactPoint> contacts, const SimState& state,
                            const Model& model);

// Joint torques from finger weights.
std::array<double, kNumJoints> gravity_torques(const SimState& state, const Model& model);

struct ServoTargets {
  std::array<double, kNumJoints> q{};
  double palm_z = 0.0;
};

// Clamps each action value to [-1, 1] and maps it affinely onto the joint
// limit range (or the palm translation range for the last value).
ServoTargets map_action(const ActionCommand& action, const HandParams& hand);

// Tactile readout from finger contacts that touch the pad side of the
// distal phalanx. Contacts must already carry forces.
TactileFrame tactile_readout(std::span<const ContactPoint> contacts, const SimState& state,
                             const HandParams& hand);

struct StepResult {
  SimState state;
  TactileFrame tactile;
};

// One control interval of `physics_substeps` semi-implicit Euler substeps.
// Servo and ball dampers, the servo springs, the ball x-spring, contact
// damping and linearised friction are taken at the end of each substep;
// penetration forces, gravity and the palm servo at its start.
// Throws SimulationDiverged if the state stops being finite.
StepResult step(const Model& model, const SimState& state, const ActionCommand& action);

// Hand observation (14 values) optionally followed by 9 tactile values.
// Ball state is never observed.
std::vector<double> observe(const SimState& state, const TactileFrame& tactile, TactileMode mode);

// Kinetic energy of every body plus the ball's x-spring and contact-spring
// potentials. Gravity potential is not included.
double mechanical_energy(const SimState& state, const Model& model);

// Constant joint inertias used by the decoupled servo model.
std::array<double, 2> finger_joint_inertias(const HandParams& hand);

}  // namespace handrl::sim
