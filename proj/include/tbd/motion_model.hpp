#pragma once

#include "tbd/rfs_core.hpp"
#include "tbd/rng.hpp"

#include <Eigen/Core>

namespace tbd {

using Matrix5 = Eigen::Matrix<double, 5, 5>;

/// Nearly-constant-velocity model with a random-walk power state.
struct MotionParams {
    double dt = 0.07;                                ///< s
    double sigma_ax2 = (5.0 / 3.0) * (5.0 / 3.0);   ///< m^2 s^-4
    double sigma_ay2 = (5.0 / 3.0) * (5.0 / 3.0);   ///< m^2 s^-4
    double sigma_theta_dot2 = 1e-3;                  ///< s^-2

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    bool operator==(const MotionParams&) const = default;
};

/// diag(Abar, Abar, 1) with Abar = [[1, dt], [0, 1]].
Matrix5 transition_matrix(const MotionParams& params);

/// diag(sigma_ax2 Qbar, sigma_ay2 Qbar, sigma_theta_dot2 dt^2),
/// Qbar = [[dt^4/4, dt^3/2], [dt^3/2, dt^2]].
Matrix5 process_noise_cov(const MotionParams& params);

/// x <- A x + v, v ~ N(0, Q) independently per particle. theta is clamped at 0.
/// Weights and label are untouched.
LabeledParticleTrack propagate_particles(LabeledParticleTrack track, const MotionParams& params, Rng& rng);

} // namespace tbd
