#ifndef KMLAB_GEOMETRY_HPP
#define KMLAB_GEOMETRY_HPP

#include <cstddef>
#include <vector>

namespace kmlab {

/// A point in d-dimensional space. Used for data points, cluster centers
/// and lattice points alike; the dimension is whatever the containing
/// dataset says it is.
struct Vec {
    std::vector<double> x;

    Vec() = default;
    explicit Vec(std::vector<double> coords) : x(std::move(coords)) {}
    Vec(std::initializer_list<double> coords) : x(coords) {}

    int dim() const { return static_cast<int>(x.size()); }
    double& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }

    bool operator==(const Vec&) const = default;
};

Vec operator+(const Vec& a, const Vec& b);
Vec operator-(const Vec& a, const Vec& b);
Vec operator*(double s, const Vec& a);
Vec zeros(int d);

double dot(const Vec& a, const Vec& b);
double squared_norm(const Vec& a);
double norm(const Vec& a);
double squared_distance(const Vec& a, const Vec& b);
double distance(const Vec& a, const Vec& b);

bool all_finite(const Vec& a);

/// Hyperplane {y : y.normal = offset} in Hesse normal form; the normal is
/// kept at unit length so point-to-plane distance is a single dot product.
struct Hyperplane {
    Vec normal;
    double offset = 0.0;
};

/// Coordinate-wise mean of a nonempty point set, accumulated in the order
/// given (keeps results bit-reproducible across calls with equal input).
Vec centroid(const std::vector<Vec>& points);
Vec centroid(const std::vector<Vec>& points, const std::vector<int>& indices);

/// Perpendicular bisector of the segment ab; every point of the plane is
/// equidistant from a and b. Requires a != b exactly.
Hyperplane bisector(const Vec& a, const Vec& b);

double distance_to_hyperplane(const Vec& p, const Hyperplane& h);

} // namespace kmlab

#endif
