#pragma once

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <vector>

namespace lsc {

/// One term coef * x^power * exp(rate * x).
struct ExpPolyTerm {
    double coef = 0.0;
    int power = 0;
    double rate = 0.0;
};

/**
 * Finite sum of exponential-polynomial terms.
 *
 * Every cost transform of the supported families (f', r, H, Q and the OSP value
 * on each side of the barrier) lives in this class, which is closed under
 * differentiation, shifting and expectation against atom-plus-exponential laws.
 */
class ExpPoly {
public:
    ExpPoly() = default;
    ExpPoly(std::initializer_list<ExpPolyTerm> terms) : terms_(terms) { normalize(); }
    explicit ExpPoly(std::vector<ExpPolyTerm> terms) : terms_(std::move(terms)) { normalize(); }

    static ExpPoly constant(double c) { return ExpPoly{{c, 0, 0.0}}; }
    static ExpPoly monomial(double coef, int power) { return ExpPoly{{coef, power, 0.0}}; }
    static ExpPoly exponential(double coef, double rate) { return ExpPoly{{coef, 0, rate}}; }

    [[nodiscard]] double operator()(double x) const {
        double sum = 0.0;
        for (const auto& t : terms_) {
            sum += t.coef * std::pow(x, t.power) * (t.rate == 0.0 ? 1.0 : std::exp(t.rate * x));
        }
        return sum;
    }

    [[nodiscard]] ExpPoly derivative() const {
        std::vector<ExpPolyTerm> out;
        out.reserve(2 * terms_.size());
        for (const auto& t : terms_) {
            if (t.rate != 0.0) out.push_back({t.coef * t.rate, t.power, t.rate});
            if (t.power > 0) out.push_back({t.coef * t.power, t.power - 1, t.rate});
        }
        return ExpPoly(std::move(out));
    }

    /// Sum of |term| at x; used as a cancellation scale for tolerances.
    [[nodiscard]] double magnitude(double x) const {
        double sum = 0.0;
        for (const auto& t : terms_) {
            sum += std::fabs(t.coef * std::pow(x, t.power) * std::exp(t.rate * x));
        }
        return sum;
    }

    [[nodiscard]] const std::vector<ExpPolyTerm>& terms() const noexcept { return terms_; }
    [[nodiscard]] bool empty() const noexcept { return terms_.empty(); }

    [[nodiscard]] int max_power() const noexcept {
        int p = 0;
        for (const auto& t : terms_) p = std::max(p, t.power);
        return p;
    }

    friend ExpPoly operator+(ExpPoly a, const ExpPoly& b) {
        a.terms_.insert(a.terms_.end(), b.terms_.begin(), b.terms_.end());
        a.normalize();
        return a;
    }
    friend ExpPoly operator*(double s, ExpPoly a) {
        for (auto& t : a.terms_) t.coef *= s;
        a.normalize();
        return a;
    }
    friend ExpPoly operator-(const ExpPoly& a, const ExpPoly& b) { return a + (-1.0) * b; }

private:
    void normalize() {
        std::sort(terms_.begin(), terms_.end(), [](const ExpPolyTerm& a, const ExpPolyTerm& b) {
            return a.rate != b.rate ? a.rate < b.rate : a.power < b.power;
        });
        std::vector<ExpPolyTerm> merged;
        for (const auto& t : terms_) {
            if (!merged.empty() && merged.back().rate == t.rate && merged.back().power == t.power) {
                merged.back().coef += t.coef;
            } else {
                merged.push_back(t);
            }
        }
        std::erase_if(merged, [](const ExpPolyTerm& t) { return t.coef == 0.0; });
        terms_ = std::move(merged);
    }

    std::vector<ExpPolyTerm> terms_;
};

}  // namespace lsc
