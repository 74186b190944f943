#include "funcint/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "funcint/errors.hpp"

namespace funcint {

namespace {

// Newton iteration on the normalized three-term recurrence; the classic
// scheme for e^{-x^2} rules.  Roots come out symmetric about zero.
GaussHermiteRule compute_rule(int n) {
    constexpr double kPiQuarterInv = 0.7511255444649424828587030047762;  // pi^{-1/4}
    constexpr int kMaxNewton = 200;

    GaussHermiteRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);

    const int half = (n + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * rule.nodes[n - 1];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * rule.nodes[n - 2];
        } else {
            z = 2.0 * z - rule.nodes[n - i + 1];
        }

        double pp = 0.0;
        bool converged = false;
        for (int it = 0; it < kMaxNewton; ++it) {
            double p1 = kPiQuarterInv;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw ResolutionError("gauss_hermite: Newton iteration did not converge");
        }

        rule.nodes[n - 1 - i] = z;
        rule.nodes[i] = -z;
        rule.weights[n - 1 - i] = 2.0 / (pp * pp);
        rule.weights[i] = rule.weights[n - 1 - i];
    }
    if (n % 2 == 1) {
        rule.nodes[n / 2] = 0.0;
    }
    return rule;
}

} // namespace

const GaussHermiteRule& gauss_hermite(int order) {
    if (order < 1) {
        throw DomainError("gauss_hermite: order must be positive");
    }
    static std::mutex mutex;
    static std::map<int, GaussHermiteRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(order);
    if (it == cache.end()) {
        it = cache.emplace(order, compute_rule(order)).first;
    }
    return it->second;
}

namespace {

template <typename T>
T hermite_impl(int n, T x) {
    if (n == 0) {
        return T(1.0);
    }
    T prev = T(1.0);
    T cur = 2.0 * x;
    for (int k = 2; k <= n; ++k) {
        const T next = 2.0 * x * cur - 2.0 * (k - 1.0) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

} // namespace

double hermite_value(int n, double x) {
    return hermite_impl(n, x);
}

std::complex<double> hermite_value(int n, std::complex<double> x) {
    return hermite_impl(n, x);
}

void gauss_hermite_tensor(int dim, int order,
                          const std::function<void(const Eigen::VectorXd&, double)>& visit) {
    if (dim < 1) {
        throw DomainError("gauss_hermite_tensor: dimension must be positive");
    }
    const GaussHermiteRule& rule = gauss_hermite(order);
    std::vector<int> idx(dim, 0);
    Eigen::VectorXd x(dim);
    for (;;) {
        double w = 1.0;
        for (int a = 0; a < dim; ++a) {
            x[a] = rule.nodes[idx[a]];
            w *= rule.weights[idx[a]];
        }
        visit(x, w);
        int a = 0;
        while (a < dim && ++idx[a] == order) {
            idx[a] = 0;
            ++a;
        }
        if (a == dim) {
            break;
        }
    }
}

} // namespace funcint
