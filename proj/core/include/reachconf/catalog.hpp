#pragma once

#include "reachconf/models.hpp"

#include <cstdint>

namespace reachconf {

/// Cascade of n_x tanks, Euler step dt, with one inflow input per tank
/// (n_u = n_x); every level is measured (n_y = n_x). The experiments feed
/// only tanks 1, 4, 7, ... (see SystemSetup::active_inputs).
StateSpaceModel water_tanks(int nx, double dt = 0.1);

/// Linear pedestrian model, p = (1, 0.01, 5e-5, 0.01).
StateSpaceModel pedestrian_ss();

/// Pedestrian model in ARX form with n_p = 2, p = (2, -2, 5e-5, -1).
NarxModel pedestrian_arx();

/// Lorenz system with parametric input perturbations, p = (10, 28, 8/3),
/// Euler step dt; outputs are the first two states.
StateSpaceModel lorenz(double dt = 0.01);

/// Second-order rational NARX benchmark, p = (0.8, 1.2).
NarxModel narx1();

/// Kinematic single-track vehicle with process and measurement noise inputs.
/// State [p_x, p_y, delta_f, v, psi], inputs [steer rate, accel, w(5), v(4)],
/// p = (r_delta, l, l_r).
StateSpaceModel kinematic_vehicle(double dt = 0.01);

/// Look up a catalog model by id: water_tanks<N>, pedestrian_ss,
/// pedestrian_arx, lorenz, narx1, vehicle.
Model catalog_model(const std::string& id);

/// Number of times a negative tank level was clamped before taking a root.
std::uint64_t sqrt_clamp_events();

} // namespace reachconf
