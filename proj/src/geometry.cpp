#include "kmlab/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace kmlab {

namespace {

void require_same_dim(const Vec& a, const Vec& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("dimension mismatch");
}

} // namespace

Vec operator+(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    Vec r = a;
    for (int i = 0; i < r.dim(); ++i) r[i] += b[i];
    return r;
}

Vec operator-(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    Vec r = a;
    for (int i = 0; i < r.dim(); ++i) r[i] -= b[i];
    return r;
}

Vec operator*(double s, const Vec& a) {
    Vec r = a;
    for (int i = 0; i < r.dim(); ++i) r[i] *= s;
    return r;
}

Vec zeros(int d) { return Vec(std::vector<double>(static_cast<std::size_t>(d), 0.0)); }

double dot(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

double squared_norm(const Vec& a) { return dot(a, a); }

double norm(const Vec& a) { return std::sqrt(squared_norm(a)); }

double squared_distance(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

double distance(const Vec& a, const Vec& b) { return std::sqrt(squared_distance(a, b)); }

bool all_finite(const Vec& a) {
    for (int i = 0; i < a.dim(); ++i)
        if (!std::isfinite(a[i])) return false;
    return true;
}

Vec centroid(const std::vector<Vec>& points) {
    if (points.empty()) throw std::invalid_argument("empty point set");
    Vec sum = zeros(points.front().dim());
    for (const Vec& p : points) {
        require_same_dim(sum, p);
        for (int i = 0; i < sum.dim(); ++i) sum[i] += p[i];
    }
    const double inv = 1.0 / static_cast<double>(points.size());
    for (int i = 0; i < sum.dim(); ++i) sum[i] *= inv;
    return sum;
}

Vec centroid(const std::vector<Vec>& points, const std::vector<int>& indices) {
    if (indices.empty()) throw std::invalid_argument("empty point set");
    Vec sum = zeros(points.front().dim());
    for (int idx : indices) {
        const Vec& p = points[static_cast<std::size_t>(idx)];
        for (int i = 0; i < sum.dim(); ++i) sum[i] += p[i];
    }
    const double inv = 1.0 / static_cast<double>(indices.size());
    for (int i = 0; i < sum.dim(); ++i) sum[i] *= inv;
    return sum;
}

Hyperplane bisector(const Vec& a, const Vec& b) {
    require_same_dim(a, b);
    if (a == b) throw std::invalid_argument("degenerate bisector");
    Vec n = b - a;
    const double len = norm(n);
    n = (1.0 / len) * n;
    const Vec mid = 0.5 * (a + b);
    return Hyperplane{n, dot(n, mid)};
}

double distance_to_hyperplane(const Vec& p, const Hyperplane& h) {
    return std::abs(dot(p, h.normal) - h.offset);
}

} // namespace kmlab
