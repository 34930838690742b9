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

#include "handrl/sim/simulator.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

#include "handrl/errors.hpp"

namespace handrl::sim {
namespace {

using Eigen::Vector3d;

// +1 when the finger sits on the -x side of the palm, so that it flexes
// toward +x; -1 otherwise.
double flex_sign(const HandParams& hand, Finger finger) {
  return hand.finger_mounts[static_cast<int>(finger)].x() < 0.0 ? 1.0 : -1.0;
}

// Link direction for absolute link angle `phi`; phi = 0 hangs straight down.
Vector3d link_direction(double phi, double s) {
  return {-s * std::sin(phi), 0.0, -std::cos(phi)};
}

// axis x r for the joint axis (0, s, 0).
Vector3d axis_cross(double s, const Vector3d& r) { return {s * r.z(), 0.0, -s * r.x()}; }

struct FingerFrames {
  double s;
  Vector3d mount;
  Vector3d knuckle;  // joint 2
  Vector3d tip;
  double phi2;       // absolute distal angle
};

FingerFrames finger_frames(const SimState& state, const HandParams& hand, Finger finger) {
  const int f = static_cast<int>(finger);
  const double s = flex_sign(hand, finger);
  const double q1 = state.q[2 * f];
  const double q2 = state.q[2 * f + 1];
  const Eigen::Vector2d& m = hand.finger_mounts[f];
  FingerFrames frames;
  frames.s = s;
  frames.mount = Vector3d{m.x(), m.y(), state.palm_z};
  frames.knuckle = frames.mount + hand.link_length * link_direction(q1, s);
  frames.phi2 = q1 + q2;
  frames.tip = frames.knuckle + hand.link_length * link_direction(frames.phi2, s);
  return frames;
}

Vector3d ball_center(const SimState& state) { return {state.ball_x, 0.0, state.ball_z}; }

Vector3d ball_point_velocity(const SimState& state, const Vector3d& point) {
  const Vector3d r = point - ball_center(state);
  // omega = (0, theta_dot, 0)
  return Vector3d{state.ball_x_dot + state.ball_theta_dot * r.z(), 0.0,
                  state.ball_z_dot - state.ball_theta_dot * r.x()};
}

ContactPoint make_contact(ContactBody body, double depth, const Vector3d& normal,
                          const Vector3d& position, const Vector3d& body_velocity,
                          const SimState& state) {
  ContactPoint c;
  c.body = body;
  c.penetration = depth;
  c.normal = normal;
  c.position = position;
  const Vector3d rel = ball_point_velocity(state, position) - body_velocity;
  const double normal_speed = rel.dot(normal);
  c.penetration_rate = -normal_speed;
  c.slip_velocity = rel - normal_speed * normal;
  return c;
}

}  // namespace

std::array<double, 2> finger_joint_inertias(const HandParams& hand) {
  // Two uniform rods of half the finger mass, evaluated fully extended.
  const double m = 0.5 * hand.finger_mass;
  const double l2 = hand.link_length * hand.link_length;
  const double proximal = m * l2 / 3.0 + m * (l2 / 12.0 + 2.25 * l2);
  const double distal = m * l2 / 3.0;
  return {proximal, distal};
}

SimState reset(const Model& model) {
  model.validate();
  SimState s;
  s.palm_z = model.hand.initial_palm_height;
  s.ball_z = model.object.radius;
  return s;
}

FingertipPose fingertip_pose(const SimState& state, const HandParams& hand, Finger finger) {
  const FingerFrames f = finger_frames(state, hand, finger);
  return {f.tip, Vector3d{f.s * std::cos(f.phi2), 0.0, -std::sin(f.phi2)}};
}

Segment distal_segment(const SimState& state, const HandParams& hand, Finger finger) {
  const FingerFrames f = finger_frames(state, hand, finger);
  return {f.knuckle, f.tip};
}

Vector3d distal_point_velocity(const SimState& state, const HandParams& hand, Finger finger,
                               const Vector3d& point) {
  const FingerFrames f = finger_frames(state, hand, finger);
  const int i = static_cast<int>(finger);
  return Vector3d{0.0, 0.0, state.palm_z_dot} +
         state.q_dot[2 * i] * axis_cross(f.s, point - f.mount) +
         state.q_dot[2 * i + 1] * axis_cross(f.s, point - f.knuckle);
}

std::vector<ContactPoint> detect_contacts(const SimState& state, const Model& model) {
  const HandParams& hand = model.hand;
  const double radius = model.object.radius;
  const Vector3d center = ball_center(state);
  std::vector<ContactPoint> contacts;

  for (int i = 0; i < kNumFingers; ++i) {
    const auto finger = static_cast<Finger>(i);
    const FingerFrames f = finger_frames(state, hand, finger);
    const Vector3d axis = f.tip - f.knuckle;
    const double t = std::clamp((center - f.knuckle).dot(axis) / axis.squaredNorm(), 0.0, 1.0);
    const Vector3d closest = f.knuckle + t * axis;
    const Vector3d diff = center - closest;
    const double dist = diff.norm();
    const double depth = radius + hand.phalanx_radius - dist;
    if (!(depth > 0.0)) continue;
    const Vector3d normal = dist > 1e-12
                                ? Vector3d(diff / dist)
                                : Vector3d{f.s * std::cos(f.phi2), 0.0, -std::sin(f.phi2)};
    const Vector3d position = closest + (hand.phalanx_radius - 0.5 * depth) * normal;
    contacts.push_back(make_contact(static_cast<ContactBody>(i), depth, normal, position,
                                    distal_point_velocity(state, hand, finger, position), state));
  }

  const double palm_depth = state.ball_z + radius - state.palm_z;
  if (palm_depth > 0.0 && std::abs(state.ball_x) <= 0.5 * hand.palm_diameter) {
    const Vector3d position{state.ball_x, 0.0, state.palm_z + 0.5 * palm_depth};
    contacts.push_back(make_contact(ContactBody::kPalm, palm_depth, -Vector3d::UnitZ(), position,
                                    Vector3d{0.0, 0.0, state.palm_z_dot}, state));
  }

  const double ground_depth = radius - state.ball_z;
  if (ground_depth > 0.0) {
    const Vector3d position{state.ball_x, 0.0, -0.5 * ground_depth};
    contacts.push_back(make_contact(ContactBody::kGround, ground_depth, Vector3d::UnitZ(),
                                    position, Vector3d::Zero(), state));
  }
  return contacts;
}

ContactLoads contact_forces(std::span<ContactPoint> contacts, const SimState& state,
                            const Model& model) {
  const SimConfig& cfg = model.config;
  const Vector3d center = ball_center(state);
  ContactLoads loads;
  for (ContactPoint& c : contacts) {
    c.normal_force =
        std::max(0.0, cfg.contact_stiffness * c.penetration + cfg.contact_damping * c.penetration_rate);
    const double slip = c.slip_velocity.norm();
    c.tangential_force = Vector3d::Zero();
    if (slip > 0.0) {
      c.tangential_force = (-cfg.friction * c.normal_force * std::tanh(slip / cfg.slip_velocity) / slip) *
                           c.slip_velocity;
    }
    const Vector3d force = c.normal_force * c.normal + c.tangential_force;
    const Vector3d r = c.position - center;
    loads.ball_fx += force.x();
    loads.ball_fz += force.z();
    loads.ball_torque_y += r.z() * force.x() - r.x() * force.z();

    if (is_finger(c.body)) {
      const FingerFrames f = finger_frames(state, model.hand, static_cast<Finger>(c.body));
      const int i = static_cast<int>(c.body);
      loads.joint_torques[2 * i] -= axis_cross(f.s, c.position - f.mount).dot(force);
      loads.joint_torques[2 * i + 1] -= axis_cross(f.s, c.position - f.knuckle).dot(force);
      loads.palm_fz -= force.z();
    } else if (c.body == ContactBody::kPalm) {
      loads.palm_fz -= force.z();
    }
  }
  return loads;
}

std::array<double, kNumJoints> gravity_torques(const SimState& state, const Model& model) {
  const HandParams& hand = model.hand;
  const double weight = 0.5 * hand.finger_mass * model.config.gravity;
  std::array<double, kNumJoints> tau{};
  for (int i = 0; i < kNumFingers; ++i) {
    const FingerFrames f = finger_frames(state, hand, static_cast<Finger>(i));
    const Vector3d com1 = 0.5 * (f.mount + f.knuckle);
    const Vector3d com2 = 0.5 * (f.knuckle + f.tip);
    // (axis x r) . (0, 0, -w) = s * w * r_x
    tau[2 * i] = f.s * weight * ((com1 - f.mount).x() + (com2 - f.mount).x());
    tau[2 * i + 1] = f.s * weight * (com2 - f.knuckle).x();
  }
  return tau;
}

ServoTargets map_action(const ActionCommand& action, const HandParams& hand) {
  const auto to_range = [](double a, const Range& r) {
    const double v = std::clamp(a, -1.0, 1.0);
    return r.lo + 0.5 * (v + 1.0) * r.span();
  };
  ServoTargets targets;
  for (int j = 0; j < kNumJoints; ++j) targets.q[j] = to_range(action.values[j], hand.joint_limits(j));
  targets.palm_z = to_range(action.values[kNumJoints], hand.palm_range());
  return targets;
}

TactileFrame tactile_readout(std::span<const ContactPoint> contacts, const SimState& state,
                             const HandParams& hand) {
  TactileFrame frame;
  for (const ContactPoint& c : contacts) {
    if (!is_finger(c.body) || !(c.normal_force > 0.0)) continue;
    const auto finger = static_cast<Finger>(c.body);
    const FingertipPose pose = fingertip_pose(state, hand, finger);
    if (c.normal.dot(pose.pad_normal) < 0.0) continue;  // back of the phalanx

    const Segment seg = distal_segment(state, hand, finger);
    const Vector3d along = (seg.b - seg.a).normalized();
    Vector3d t1 = along - along.dot(c.normal) * c.normal;
    if (t1.norm() < 1e-12) t1 = Vector3d::UnitY().cross(c.normal);
    t1.normalize();
    const Vector3d t2 = c.normal.cross(t1);
    const Vector3d force = c.normal_force * c.normal + c.tangential_force;

    TactileReading& r = frame.fingers[static_cast<int>(finger)];
    r.f_t1 += force.dot(t1);
    r.f_t2 += force.dot(t2);
    r.f_n += force.dot(c.normal);
  }
  return frame;
}

namespace {

// Generalised velocity: six joint rates, palm rate, ball x, z and spin.
constexpr int kDof = kNumJoints + 4;
constexpr int kPalmDof = kNumJoints;
constexpr int kBallX = kNumJoints + 1;
constexpr int kBallZ = kNumJoints + 2;
constexpr int kBallSpin = kNumJoints + 3;

using DofMatrix = Eigen::Matrix<double, kDof, kDof>;
using DofVector = Eigen::Matrix<double, kDof, 1>;
using ContactJacobian = Eigen::Matrix<double, 3, kDof>;

// Maps the generalised velocity to the ball-minus-body velocity at the
// contact point.
ContactJacobian relative_velocity_jacobian(const ContactPoint& c, const SimState& state,
                                           const HandParams& hand) {
  ContactJacobian g = ContactJacobian::Zero();
  const Vector3d r = c.position - ball_center(state);
  g(0, kBallX) = 1.0;
  g(2, kBallZ) = 1.0;
  g(0, kBallSpin) = r.z();
  g(2, kBallSpin) = -r.x();
  if (is_finger(c.body)) {
    const int i = static_cast<int>(c.body);
    const FingerFrames f = finger_frames(state, hand, static_cast<Finger>(i));
    g(2, kPalmDof) = -1.0;
    g.col(2 * i) = -axis_cross(f.s, c.position - f.mount);
    g.col(2 * i + 1) = -axis_cross(f.s, c.position - f.knuckle);
  } else if (c.body == ContactBody::kPalm) {
    g(2, kPalmDof) = -1.0;
  }
  return g;
}

}  // namespace

StepResult step(const Model& model, const SimState& start, const ActionCommand& action) {
  const HandParams& hand = model.hand;
  const ObjectParams& ball = model.object;
  const SimConfig& cfg = model.config;
  const double h = cfg.substep_dt();
  const ServoTargets targets = map_action(action, hand);
  const auto inertia = finger_joint_inertias(hand);
  const Range palm_range = hand.palm_range();

  DofVector mass;
  for (int j = 0; j < kNumJoints; ++j) mass[j] = inertia[j % 2];
  mass[kPalmDof] = hand.total_mass();
  mass[kBallX] = ball.mass;
  mass[kBallZ] = ball.mass;
  mass[kBallSpin] = ball.inertia();

  // Velocity-proportional and position-proportional diagonal terms that are
  // integrated implicitly.
  DofVector damping = DofVector::Zero();
  DofVector stiffness = DofVector::Zero();
  for (int j = 0; j < kNumJoints; ++j) {
    damping[j] = hand.servo_kd + hand.joint_damping;
    stiffness[j] = hand.servo_kp;
  }
  damping[kBallX] = ball.damping_x;
  damping[kBallZ] = ball.damping_z;
  damping[kBallSpin] = ball.damping_rot;
  stiffness[kBallX] = ball.stiffness_x;

  SimState s = start;
  std::vector<ContactPoint> contacts;
  std::vector<ContactJacobian> jacobians;
  std::vector<Eigen::Matrix3d> resistances;
  std::vector<char> active;
  for (int k = 0; k < cfg.physics_substeps; ++k) {
    contacts = detect_contacts(s, model);
    contact_forces(contacts, s, model);
    const auto tau_g = gravity_torques(s, model);

    DofVector u;
    for (int j = 0; j < kNumJoints; ++j) u[j] = s.q_dot[j];
    u[kPalmDof] = s.palm_z_dot;
    u[kBallX] = s.ball_x_dot;
    u[kBallZ] = s.ball_z_dot;
    u[kBallSpin] = s.ball_theta_dot;

    // Forces kept explicit: servo springs toward the target, gravity, the
    // force-limited palm servo (which carries the hand's weight) and the
    // ball's x-spring.
    DofVector force = DofVector::Zero();
    for (int j = 0; j < kNumJoints; ++j) force[j] = hand.servo_kp * (targets.q[j] - s.q[j]) + tau_g[j];
    force[kPalmDof] = std::clamp(hand.palm_kp * (targets.palm_z - s.palm_z) - hand.palm_kd * s.palm_z_dot,
                                 -hand.palm_force_limit, hand.palm_force_limit);
    force[kBallX] = -ball.stiffness_x * s.ball_x;
    force[kBallZ] = -ball.mass * cfg.gravity;

    // Contact damping and friction are linearised about the current slip and
    // solved together with the servo and ball dampers. Contacts whose
    // implicit normal force would pull are dropped and the system re-solved.
    jacobians.clear();
    resistances.clear();
    active.assign(contacts.size(), 0);
    for (std::size_t c = 0; c < contacts.size(); ++c) {
      const ContactPoint& cp = contacts[c];
      jacobians.push_back(relative_velocity_jacobian(cp, s, hand));
      const double slip = cp.slip_velocity.norm();
      const double secant = slip > 1e-12 ? std::tanh(slip / cfg.slip_velocity) / slip : 1.0 / cfg.slip_velocity;
      const Eigen::Matrix3d nn = cp.normal * cp.normal.transpose();
      resistances.push_back(cfg.contact_damping * nn +
                            cfg.friction * cp.normal_force * secant * (Eigen::Matrix3d::Identity() - nn));
      active[c] = cp.normal_force > 0.0;
    }
    DofVector u_next = u;
    for (int pass = 0; pass < 4; ++pass) {
      DofMatrix a = DofMatrix::Zero();
      a.diagonal() = mass + h * damping + h * h * stiffness;
      DofVector rhs = mass.cwiseProduct(u) + h * force;
      for (std::size_t c = 0; c < contacts.size(); ++c) {
        if (!active[c]) continue;
        a.noalias() += h * jacobians[c].transpose() * resistances[c] * jacobians[c];
        rhs.noalias() += h * jacobians[c].transpose() *
                         (cfg.contact_stiffness * contacts[c].penetration * contacts[c].normal);
      }
      u_next = a.ldlt().solve(rhs);
      bool changed = false;
      for (std::size_t c = 0; c < contacts.size(); ++c) {
        if (!active[c]) continue;
        const double rate = -contacts[c].normal.dot(jacobians[c] * u_next);
        if (cfg.contact_stiffness * contacts[c].penetration + cfg.contact_damping * rate < 0.0) {
          active[c] = 0;
          changed = true;
        }
      }
      if (!changed) break;
    }

    for (int j = 0; j < kNumJoints; ++j) {
      double v = u_next[j];
      double q = s.q[j] + h * v;
      const Range& lim = hand.joint_limits(j);
      if (q < lim.lo || q > lim.hi) {
        q = lim.clamp(q);
        v = 0.0;
      }
      s.q[j] = q;
      s.q_dot[j] = v;
    }
    double vz = u_next[kPalmDof];
    double z = s.palm_z + h * vz;
    if (z < palm_range.lo || z > palm_range.hi) {
      z = palm_range.clamp(z);
      vz = 0.0;
    }
    s.palm_z = z;
    s.palm_z_dot = vz;
    s.ball_x_dot = u_next[kBallX];
    s.ball_z_dot = u_next[kBallZ];
    s.ball_theta_dot = u_next[kBallSpin];
    s.ball_x += h * s.ball_x_dot;
    s.ball_z += h * s.ball_z_dot;
    s.ball_theta += h * s.ball_theta_dot;
  }
  s.steps = start.steps + 1;
  s.time = static_cast<double>(s.steps) * cfg.control_dt;

  if (!s.all_finite()) {
    throw SimulationDiverged("simulation state became non-finite", s.steps);
  }
  contacts = detect_contacts(s, model);
  contact_forces(contacts, s, model);
  return {s, tactile_readout(contacts, s, hand)};
}

std::vector<double> observe(const SimState& state, const TactileFrame& tactile, TactileMode mode) {
  std::vector<double> obs;
  obs.reserve(static_cast<std::size_t>(observation_dim(mode)));
  obs.insert(obs.end(), state.q.begin(), state.q.end());
  obs.insert(obs.end(), state.q_dot.begin(), state.q_dot.end());
  obs.push_back(state.palm_z);
  obs.push_back(state.palm_z_dot);
  if (mode == TactileMode::kForce3d) {
    for (const TactileReading& r : tactile.fingers) {
      obs.push_back(r.f_t1);
      obs.push_back(r.f_t2);
      obs.push_back(r.f_n);
    }
  }
  return obs;
}

double mechanical_energy(const SimState& state, const Model& model) {
  const auto inertia = finger_joint_inertias(model.hand);
  double e = 0.0;
  for (int j = 0; j < kNumJoints; ++j) e += 0.5 * inertia[j % 2] * state.q_dot[j] * state.q_dot[j];
  e += 0.5 * model.hand.total_mass() * state.palm_z_dot * state.palm_z_dot;
  const ObjectParams& ball = model.object;
  e += 0.5 * ball.mass * (state.ball_x_dot * state.ball_x_dot + state.ball_z_dot * state.ball_z_dot);
  e += 0.5 * ball.inertia() * state.ball_theta_dot * state.ball_theta_dot;
  e += 0.5 * ball.stiffness_x * state.ball_x * state.ball_x;
  for (const ContactPoint& c : detect_contacts(state, model)) {
    e += 0.5 * model.config.contact_stiffness * c.penetration * c.penetration;
  }
  return e;
}

}  // namespace handrl::sim
