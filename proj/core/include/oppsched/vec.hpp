#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace oppsched {

// A point or direction in R^m. Dimension is fixed per model and checked at
// module boundaries, not here.
using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
double distance(std::span<const double> a, std::span<const double> b);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

Vec add(std::span<const double> a, std::span<const double> b);
Vec sub(std::span<const double> a, std::span<const double> b);
Vec scaled(std::span<const double> a, double s);
Vec negated(std::span<const double> a);

bool all_finite(std::span<const double> a);

}  // namespace oppsched
