#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace funcint {

/// Nodes and weights for the weight function e^{-x^2} on the real line.
/// Sum of weights equals sqrt(pi).
struct GaussHermiteRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

/// Rule of the given order (number of nodes).  Rules are computed once and
/// cached; the returned reference stays valid for the process lifetime.
const GaussHermiteRule& gauss_hermite(int order);

/// Physicists' Hermite polynomial H_n: H_0 = 1, H_1 = 2x,
/// H_{n+1} = 2 x H_n - 2 n H_{n-1}.
double hermite_value(int n, double x);
std::complex<double> hermite_value(int n, std::complex<double> x);

/// Visit every node of the `dim`-fold tensor rule of the given order.
/// The callback receives the node coordinates and the product weight.
void gauss_hermite_tensor(int dim, int order,
                          const std::function<void(const Eigen::VectorXd&, double)>& visit);

} // namespace funcint
