#pragma once

#include <vector>

#include "bcc/errors.hpp"
#include "bcc/rational.hpp"

namespace bcc {

// Point in d-dimensional space with exact rational coordinates, d in {1,2}.
struct Point {
    std::vector<Rational> coords;

    Point() = default;
    explicit Point(std::vector<Rational> c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
    const Rational& operator[](int i) const { return coords[static_cast<std::size_t>(i)]; }
};

Point make_point1(const Rational& x);
Point make_point2(const Rational& x, const Rational& y);

int compare(const Point& a, const Point& b);  // lexicographic
bool operator==(const Point& a, const Point& b);
bool operator!=(const Point& a, const Point& b);
bool operator<(const Point& a, const Point& b);

Point operator+(const Point& a, const Point& b);
Point operator-(const Point& a, const Point& b);
Point scale(const Point& p, const Rational& c);
Rational dot(const Point& a, const Point& b);
Rational distance_squared(const Point& a, const Point& b);

// Convex polytope in vertex representation. The vertex list is canonical:
// extreme points only, sorted ascending for d=1, counter-clockwise from the
// lexicographic minimum for d=2. An empty vertex list is the empty polytope.
// Canonical form makes operator== decide set equality.
struct Polytope {
    int d = 1;
    std::vector<Point> vertices;

    bool empty() const { return vertices.empty(); }
    bool operator==(const Polytope& o) const { return d == o.d && vertices == o.vertices; }
    bool operator!=(const Polytope& o) const { return !(*this == o); }
};

bool operator<(const Polytope& a, const Polytope& b);  // for ordered containers

Polytope empty_polytope(int d);

// Stochastic weight vector: entries in [0,1] summing to exactly 1.
struct WeightVector {
    std::vector<Rational> weights;

    static WeightVector uniform(std::size_t k);
    void validate() const;  // throws WeightMismatch
};

// Convex hull of a point multiset. Empty input yields the empty polytope.
Polytope hull(int d, const std::vector<Point>& points);

// Weighted combination sum_{i in Q} c_i h_i over Q = {i | c_i != 0}.
// Every polytope with a non-zero weight must be non-empty.
Polytope linear_combination(const std::vector<Polytope>& polytopes, const WeightVector& weights);

// Set intersection of the given polytopes (half-plane clipping for d=2).
Polytope intersect(const std::vector<Polytope>& polytopes);

// Intersection of the hulls of all sub-multisets of size |points|-f.
// Requires |points| >= f+1; non-empty whenever |points| >= (d+1)f+1.
Polytope safe_area(int d, const std::vector<Point>& points, int f);

bool contains_point(const Polytope& h, const Point& p);
bool contains_polytope(const Polytope& outer, const Polytope& inner);

// Exact squared Euclidean distance from a point to a non-empty polytope.
Rational distance_squared_to_polytope(const Point& p, const Polytope& h);

// Hausdorff distance. The squared form is exact; the plain form takes the
// square root last.
Rational hausdorff_squared(const Polytope& h1, const Polytope& h2);
double hausdorff(const Polytope& h1, const Polytope& h2);

}  // namespace bcc
