#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "lsc/errors.hpp"

namespace lsc {

enum class ProcessKind { JumpDiffusion, CompoundPoisson };

/**
 * Lévy process X_t = drift*t + sigma*B_t + sum of up-jumps - sum of down-jumps,
 * with Exp(eta_up) up-jumps at rate lambda_up and Exp(eta_down) down-jumps at
 * rate lambda_down. Drift is the natural (uncompensated) drift; E X_1 is mean().
 *
 * The characteristic exponent phi(z) = log E exp(z X_1) is finite on the open
 * interval (-eta_down, eta_up). A side without jumps has no pole, so its bound
 * is infinite.
 */
class LevyModel {
public:
    LevyModel(ProcessKind kind, double drift, double sigma, double lambda_up, double lambda_down,
              double eta_up, double eta_down)
        : kind_(kind), drift_(drift), sigma_(sigma), lambda_up_(lambda_up), lambda_down_(lambda_down),
          eta_up_(eta_up), eta_down_(eta_down) {
        validate();
    }

    static LevyModel jump_diffusion(double drift, double sigma, double lambda_up, double eta_up,
                                    double lambda_down, double eta_down) {
        return {ProcessKind::JumpDiffusion, drift, sigma, lambda_up, lambda_down, eta_up, eta_down};
    }

    static LevyModel brownian(double drift, double sigma) {
        return {ProcessKind::JumpDiffusion, drift, sigma, 0.0, 0.0, 1.0, 1.0};
    }

    static LevyModel compound_poisson(double lambda_up, double eta_up, double lambda_down, double eta_down) {
        return {ProcessKind::CompoundPoisson, 0.0, 0.0, lambda_up, lambda_down, eta_up, eta_down};
    }

    [[nodiscard]] ProcessKind kind() const noexcept { return kind_; }
    [[nodiscard]] double drift() const noexcept { return drift_; }
    [[nodiscard]] double sigma() const noexcept { return sigma_; }
    [[nodiscard]] double lambda_up() const noexcept { return lambda_up_; }
    [[nodiscard]] double lambda_down() const noexcept { return lambda_down_; }
    [[nodiscard]] double eta_up() const noexcept { return eta_up_; }
    [[nodiscard]] double eta_down() const noexcept { return eta_down_; }

    [[nodiscard]] bool has_up_jumps() const noexcept { return lambda_up_ > 0.0; }
    [[nodiscard]] bool has_down_jumps() const noexcept { return lambda_down_ > 0.0; }
    [[nodiscard]] bool unbounded_variation() const noexcept { return sigma_ > 0.0; }

    /// Non-trivial in the sense of the fluctuation identities: not a pure drift.
    [[nodiscard]] bool is_nontrivial() const noexcept {
        return sigma_ > 0.0 || lambda_up_ + lambda_down_ > 0.0;
    }

    /// Right end of the domain of phi (exclusive).
    [[nodiscard]] double upper_domain() const noexcept {
        return has_up_jumps() ? eta_up_ : std::numeric_limits<double>::infinity();
    }
    /// Left end of the domain of phi (exclusive).
    [[nodiscard]] double lower_domain() const noexcept {
        return has_down_jumps() ? -eta_down_ : -std::numeric_limits<double>::infinity();
    }
    [[nodiscard]] bool in_domain(double z) const noexcept { return z > lower_domain() && z < upper_domain(); }

    [[nodiscard]] double characteristic_exponent(double z) const {
        if (!in_domain(z)) {
            std::ostringstream os;
            os << "characteristic_exponent: z=" << z << " outside (" << lower_domain() << ", "
               << upper_domain() << ")";
            throw DomainError(os.str());
        }
        return unchecked_exponent(z);
    }

    /// phi without the domain check; beyond a pole this is the rational continuation.
    [[nodiscard]] double unchecked_exponent(double z) const noexcept {
        double value = 0.5 * sigma_ * sigma_ * z * z + drift_ * z;
        if (has_up_jumps()) value += lambda_up_ * z / (eta_up_ - z);
        if (has_down_jumps()) value -= lambda_down_ * z / (eta_down_ + z);
        return value;
    }

    [[nodiscard]] double exponent_derivative(double z) const noexcept {
        double value = sigma_ * sigma_ * z + drift_;
        if (has_up_jumps()) value += lambda_up_ * eta_up_ / ((eta_up_ - z) * (eta_up_ - z));
        if (has_down_jumps()) value -= lambda_down_ * eta_down_ / ((eta_down_ + z) * (eta_down_ + z));
        return value;
    }

    /// E X_1.
    [[nodiscard]] double mean() const noexcept { return cumulant(1); }

    /// Var X_1 (sigma^2 plus the second moment of the jump measure).
    [[nodiscard]] double variance_rate() const noexcept { return cumulant(2); }

    /// k-th cumulant of X_1, i.e. the k-th Taylor coefficient of phi at 0 times k!.
    [[nodiscard]] double cumulant(int k) const noexcept {
        double factorial = 1.0;
        for (int i = 2; i <= k; ++i) factorial *= i;
        double value = 0.0;
        if (k == 1) value += drift_;
        if (k == 2) value += sigma_ * sigma_;
        if (has_up_jumps()) value += lambda_up_ * factorial / std::pow(eta_up_, k);
        if (has_down_jumps()) value += (k % 2 == 0 ? 1.0 : -1.0) * lambda_down_ * factorial / std::pow(eta_down_, k);
        return value;
    }

private:
    void validate() const {
        if (!(sigma_ >= 0.0) || !std::isfinite(sigma_)) throw ParameterError("LevyModel: sigma must be >= 0");
        if (!std::isfinite(drift_)) throw ParameterError("LevyModel: drift must be finite");
        if (!(lambda_up_ >= 0.0) || !(lambda_down_ >= 0.0) || !std::isfinite(lambda_up_) ||
            !std::isfinite(lambda_down_)) {
            throw ParameterError("LevyModel: jump intensities must be >= 0");
        }
        if (!(eta_up_ > 0.0) || !(eta_down_ > 0.0) || !std::isfinite(eta_up_) || !std::isfinite(eta_down_)) {
            throw ParameterError("LevyModel: jump rates eta must be > 0");
        }
        if (kind_ == ProcessKind::CompoundPoisson) {
            if (sigma_ != 0.0 || drift_ != 0.0) {
                throw ParameterError("LevyModel: compound Poisson requires sigma = 0 and drift = 0");
            }
            if (lambda_up_ + lambda_down_ <= 0.0) {
                throw ParameterError("LevyModel: compound Poisson requires a positive jump intensity");
            }
        }
    }

    ProcessKind kind_;
    double drift_;
    double sigma_;
    double lambda_up_;
    double lambda_down_;
    double eta_up_;
    double eta_down_;
};

/// Outcome of the exponential-moment check max(phi(theta), phi(-theta)) < delta.
struct ValidationReport {
    bool passed = false;
    bool theta_in_domain = false;
    double theta = 0.0;
    double delta = 0.0;
    double phi_plus = std::numeric_limits<double>::quiet_NaN();
    double phi_minus = std::numeric_limits<double>::quiet_NaN();
    std::string reason;
};

inline ValidationReport check_assumption1(const LevyModel& model, double delta, double theta) {
    ValidationReport report;
    report.theta = theta;
    report.delta = delta;
    if (!(delta > 0.0) || !(theta > 0.0)) {
        report.reason = "delta and theta must be positive";
        return report;
    }
    report.theta_in_domain = model.in_domain(theta) && model.in_domain(-theta);
    if (!report.theta_in_domain) {
        report.reason = "θ outside domain of φ";
        return report;
    }
    report.phi_plus = model.characteristic_exponent(theta);
    report.phi_minus = model.characteristic_exponent(-theta);
    report.passed = std::max(report.phi_plus, report.phi_minus) < delta;
    if (!report.passed) report.reason = "max(φ(θ), φ(−θ)) ≥ δ";
    return report;
}

}  // namespace lsc
