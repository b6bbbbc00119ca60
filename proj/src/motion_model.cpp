#include "tbd/motion_model.hpp"

#include <cmath>
#include <stdexcept>

namespace tbd {

void MotionParams::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("motion.dt must be > 0");
    if (!(sigma_ax2 >= 0.0)) throw std::invalid_argument("motion.sigma_ax2 must be >= 0");
    if (!(sigma_ay2 >= 0.0)) throw std::invalid_argument("motion.sigma_ay2 must be >= 0");
    if (!(sigma_theta_dot2 >= 0.0)) throw std::invalid_argument("motion.sigma_theta_dot2 must be >= 0");
}

Matrix5 transition_matrix(const MotionParams& params) {
    Matrix5 a = Matrix5::Identity();
    a(kX, kXDot) = params.dt;
    a(kY, kYDot) = params.dt;
    return a;
}

Matrix5 process_noise_cov(const MotionParams& params) {
    const double dt = params.dt;
    const double q11 = dt * dt * dt * dt / 4.0;
    const double q12 = dt * dt * dt / 2.0;
    const double q22 = dt * dt;
    Matrix5 q = Matrix5::Zero();
    q(kX, kX) = params.sigma_ax2 * q11;
    q(kX, kXDot) = q(kXDot, kX) = params.sigma_ax2 * q12;
    q(kXDot, kXDot) = params.sigma_ax2 * q22;
    q(kY, kY) = params.sigma_ay2 * q11;
    q(kY, kYDot) = q(kYDot, kY) = params.sigma_ay2 * q12;
    q(kYDot, kYDot) = params.sigma_ay2 * q22;
    q(kTheta, kTheta) = params.sigma_theta_dot2 * dt * dt;
    return q;
}

namespace {

// Lower Cholesky factor of a PSD 2x2 block [[a, b], [b, c]].
struct Chol2 {
    double l11, l21, l22;
};

Chol2 chol2(double a, double b, double c) {
    const double l11 = std::sqrt(std::max(a, 0.0));
    const double l21 = l11 > 0.0 ? b / l11 : 0.0;
    const double l22 = std::sqrt(std::max(c - l21 * l21, 0.0));
    return {l11, l21, l22};
}

} // namespace

LabeledParticleTrack propagate_particles(LabeledParticleTrack track, const MotionParams& params, Rng& rng) {
    const Matrix5 q = process_noise_cov(params);
    const Chol2 cx = chol2(q(kX, kX), q(kX, kXDot), q(kXDot, kXDot));
    const Chol2 cy = chol2(q(kY, kY), q(kY, kYDot), q(kYDot, kYDot));
    const double sth = std::sqrt(q(kTheta, kTheta));
    const bool noisy_x = cx.l11 > 0.0 || cx.l22 > 0.0;
    const bool noisy_y = cy.l11 > 0.0 || cy.l22 > 0.0;
    const double dt = params.dt;

    std::normal_distribution<double> n01;
    for (State& s : track.states) {
        s(kX) += dt * s(kXDot);
        s(kY) += dt * s(kYDot);
        if (noisy_x) {
            const double e1 = n01(rng);
            const double e2 = n01(rng);
            s(kX) += cx.l11 * e1;
            s(kXDot) += cx.l21 * e1 + cx.l22 * e2;
        }
        if (noisy_y) {
            const double e1 = n01(rng);
            const double e2 = n01(rng);
            s(kY) += cy.l11 * e1;
            s(kYDot) += cy.l21 * e1 + cy.l22 * e2;
        }
        if (sth > 0.0) s(kTheta) = std::max(0.0, s(kTheta) + sth * n01(rng));
    }
    return track;
}

} // namespace tbd
