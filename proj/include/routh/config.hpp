#pragma once

#include "routh/integrate.hpp"
#include "routh/rigidbody.hpp"
#include "routh/system.hpp"

#include <optional>
#include <string>

namespace routh {

enum class SystemKind { RigidBody, CentralForce, CustomMatrix };

struct PotentialSpec {
  std::string type = "none";  // none | heavy | harmonic
  double coefficient = 0.0;
};

struct CustomSpec {
  int n = 1, k = 0, l = 0;
  Mat matrix;
  double potential_constant = 0.0;
};

struct RunConfig {
  SystemKind system = SystemKind::RigidBody;
  double A = 1.0, B = 2.0, C = 3.0;
  PotentialSpec potential;
  MomentumValue momentum;
  std::optional<double> energy_target;
  double t_end = 10.0;
  IntegratorConfig integrator;
  Vec q, qdot, x, psi;
  CustomSpec custom;
  std::string output = "trajectory.csv";
};

/// Parses and validates a JSON run configuration. Throws Config.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// The rigid-body parameters of a rigid-body config.
rigidbody::RigidBodyParams rigid_body_params(const RunConfig& cfg);

/// System described by the config. central-force: q = r, psi = polar angle,
/// K = diag(1, r^2), V = coefficient r^2 / 2 for "harmonic".
SymmetricSystem make_system(const RunConfig& cfg);

/// Initial reduced state, with qdot rescaled onto energy_target when that is
/// set and the velocity is nonzero.
ReducedState initial_reduced(const SymmetricSystem& sys, const RunConfig& cfg);

/// Column names in FullState layout.
std::vector<std::string> full_columns(const RunConfig& cfg);
std::vector<std::string> reduced_columns(const RunConfig& cfg);

}  // namespace routh
