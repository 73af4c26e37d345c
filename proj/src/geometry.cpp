#include "bcc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace bcc {

namespace {

void require_dim(int d) {
    if (d != 1 && d != 2) throw Error(Errc::UnsupportedDimension, "dimension must be 1 or 2");
}

void require_same_dim(int d, const Point& p) {
    if (p.dim() != d) throw Error(Errc::MixedDimension, "point dimension mismatch");
}

// z-component of (b-a) x (c-a); sign gives the turn direction.
Rational cross(const Point& a, const Point& b, const Point& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

std::vector<Point> sorted_unique(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a == b; }),
              pts.end());
    return pts;
}

// Andrew's monotone chain on deduplicated, lexicographically sorted input.
// Collinear points are dropped, so the result is strictly convex and runs
// counter-clockwise starting at the lexicographic minimum.
std::vector<Point> hull2d(std::vector<Point> pts) {
    pts = sorted_unique(std::move(pts));
    const std::size_t m = pts.size();
    if (m <= 2) return pts;

    std::vector<Point> out(2 * m);
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {  // lower hull
        while (k >= 2 && cross(out[k - 2], out[k - 1], pts[i]) <= 0) --k;
        out[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = m - 1; i-- > 0;) {  // upper hull
        while (k >= lower && cross(out[k - 2], out[k - 1], pts[i]) <= 0) --k;
        out[k++] = pts[i];
    }
    out.resize(k - 1);  // last point equals the first
    return out;
}

struct HalfPlane {  // a*x + b*y <= c
    Rational a, b, c;

    bool inside(const Point& p) const { return a * p[0] + b * p[1] <= c; }
    Rational eval(const Point& p) const { return a * p[0] + b * p[1]; }
};

// Half-planes whose intersection is exactly the (non-empty) polytope.
std::vector<HalfPlane> to_halfplanes(const Polytope& h) {
    const auto& vs = h.vertices;
    std::vector<HalfPlane> planes;
    if (vs.size() == 1) {
        const Point& u = vs[0];
        planes.push_back({Rational(1), Rational(0), u[0]});
        planes.push_back({Rational(-1), Rational(0), -u[0]});
        planes.push_back({Rational(0), Rational(1), u[1]});
        planes.push_back({Rational(0), Rational(-1), -u[1]});
    } else if (vs.size() == 2) {
        const Point& u = vs[0];
        const Point& v = vs[1];
        Rational tx = v[0] - u[0], ty = v[1] - u[1];
        // supporting line from both sides, then end caps along the direction
        planes.push_back({-ty, tx, -ty * u[0] + tx * u[1]});
        planes.push_back({ty, -tx, ty * u[0] - tx * u[1]});
        planes.push_back({tx, ty, tx * v[0] + ty * v[1]});
        planes.push_back({-tx, -ty, -(tx * u[0] + ty * u[1])});
    } else {
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const Point& u = vs[i];
            const Point& v = vs[(i + 1) % vs.size()];
            Rational dx = v[0] - u[0], dy = v[1] - u[1];
            planes.push_back({dy, -dx, dy * u[0] - dx * u[1]});
        }
    }
    return planes;
}

// Clips a convex vertex list (closed-polygon semantics, works for any size)
// by one half-plane; the output is re-canonicalized by the caller.
std::vector<Point> clip(const std::vector<Point>& subject, const HalfPlane& hp) {
    std::vector<Point> out;
    const std::size_t k = subject.size();
    for (std::size_t i = 0; i < k; ++i) {
        const Point& u = subject[i];
        const Point& v = subject[(i + 1) % k];
        const bool in_u = hp.inside(u);
        const bool in_v = hp.inside(v);
        if (in_u) out.push_back(u);
        if (in_u != in_v) {
            // intersection of segment u-v with a*x+b*y = c
            Rational fu = hp.eval(u), fv = hp.eval(v);
            Rational t = (hp.c - fu) / (fv - fu);
            out.push_back(u + scale(v - u, t));
        }
    }
    return out;
}

Rational point_segment_distance_squared(const Point& p, const Point& u, const Point& v) {
    Point w = v - u;
    Rational den = dot(w, w);
    if (den == 0) return distance_squared(p, u);
    Rational num = dot(p - u, w);
    if (num <= 0) return distance_squared(p, u);
    if (num >= den) return distance_squared(p, v);
    Point foot = u + scale(w, num / den);
    return distance_squared(p, foot);
}

Rational directed_hausdorff_squared(const Polytope& from, const Polytope& to) {
    Rational best(0);
    for (const Point& p : from.vertices) {
        Rational dsq = distance_squared_to_polytope(p, to);
        if (dsq > best) best = dsq;
    }
    return best;
}

}  // namespace

Point make_point1(const Rational& x) { return Point({x}); }
Point make_point2(const Rational& x, const Rational& y) { return Point({x, y}); }

int compare(const Point& a, const Point& b) {
    if (a.dim() != b.dim()) return a.dim() < b.dim() ? -1 : 1;
    for (int i = 0; i < a.dim(); ++i) {
        int c = cmp(a[i], b[i]);
        if (c != 0) return c;
    }
    return 0;
}

bool operator==(const Point& a, const Point& b) { return compare(a, b) == 0; }
bool operator!=(const Point& a, const Point& b) { return compare(a, b) != 0; }
bool operator<(const Point& a, const Point& b) { return compare(a, b) < 0; }

Point operator+(const Point& a, const Point& b) {
    Point r = a;
    for (int i = 0; i < a.dim(); ++i) r.coords[static_cast<std::size_t>(i)] += b[i];
    return r;
}

Point operator-(const Point& a, const Point& b) {
    Point r = a;
    for (int i = 0; i < a.dim(); ++i) r.coords[static_cast<std::size_t>(i)] -= b[i];
    return r;
}

Point scale(const Point& p, const Rational& c) {
    Point r = p;
    for (auto& x : r.coords) x *= c;
    return r;
}

Rational dot(const Point& a, const Point& b) {
    Rational s(0);
    for (int i = 0; i < a.dim(); ++i) s += a[i] * b[i];
    return s;
}

Rational distance_squared(const Point& a, const Point& b) {
    Point diff = a - b;
    return dot(diff, diff);
}

bool operator<(const Polytope& a, const Polytope& b) {
    if (a.d != b.d) return a.d < b.d;
    return std::lexicographical_compare(a.vertices.begin(), a.vertices.end(), b.vertices.begin(),
                                        b.vertices.end());
}

Polytope empty_polytope(int d) {
    require_dim(d);
    return Polytope{d, {}};
}

WeightVector WeightVector::uniform(std::size_t k) {
    WeightVector w;
    w.weights.assign(k, make_rational(1, static_cast<long>(k)));
    return w;
}

void WeightVector::validate() const {
    Rational sum(0);
    for (const Rational& c : weights) {
        if (c < 0 || c > 1) throw Error(Errc::WeightMismatch, "weight outside [0,1]");
        sum += c;
    }
    if (sum != 1) throw Error(Errc::WeightMismatch, "weights must sum to 1");
}

Polytope hull(int d, const std::vector<Point>& points) {
    require_dim(d);
    for (const Point& p : points) require_same_dim(d, p);
    if (points.empty()) return empty_polytope(d);

    if (d == 1) {
        Point lo = points[0], hi = points[0];
        for (const Point& p : points) {
            if (p < lo) lo = p;
            if (hi < p) hi = p;
        }
        if (lo == hi) return Polytope{1, {lo}};
        return Polytope{1, {lo, hi}};
    }
    return Polytope{2, hull2d(points)};
}

Polytope linear_combination(const std::vector<Polytope>& polytopes, const WeightVector& weights) {
    if (polytopes.size() != weights.weights.size())
        throw Error(Errc::WeightMismatch, "polytope/weight list length mismatch");
    weights.validate();

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < polytopes.size(); ++i) {
        if (weights.weights[i] == 0) continue;
        if (polytopes[i].empty())
            throw Error(Errc::EmptyOperand, "non-zero weight on empty polytope");
        active.push_back(i);
    }
    const int d = polytopes[active.front()].d;
    for (std::size_t i : active)
        if (polytopes[i].d != d) throw Error(Errc::MixedDimension, "mixed polytope dimensions");

    // Fold as pairwise Minkowski sums of the scaled operands; hulling after
    // each step keeps the intermediate vertex count linear.
    std::vector<Point> acc;
    for (const Point& v : polytopes[active[0]].vertices)
        acc.push_back(scale(v, weights.weights[active[0]]));
    acc = hull(d, acc).vertices;
    for (std::size_t j = 1; j < active.size(); ++j) {
        const std::size_t i = active[j];
        std::vector<Point> sums;
        sums.reserve(acc.size() * polytopes[i].vertices.size());
        for (const Point& a : acc)
            for (const Point& b : polytopes[i].vertices) sums.push_back(a + scale(b, weights.weights[i]));
        acc = hull(d, sums).vertices;
    }
    return Polytope{d, acc};
}

Polytope intersect(const std::vector<Polytope>& polytopes) {
    if (polytopes.empty()) throw Error(Errc::EmptyOperand, "intersect: empty polytope list");
    const int d = polytopes[0].d;
    require_dim(d);
    for (const Polytope& h : polytopes)
        if (h.d != d) throw Error(Errc::MixedDimension, "intersect: mixed dimensions");

    for (const Polytope& h : polytopes)
        if (h.empty()) return empty_polytope(d);

    if (d == 1) {
        Rational lo = polytopes[0].vertices.front()[0];
        Rational hi = polytopes[0].vertices.back()[0];
        for (const Polytope& h : polytopes) {
            lo = std::max(lo, h.vertices.front()[0]);
            hi = std::min(hi, h.vertices.back()[0]);
        }
        if (lo > hi) return empty_polytope(1);
        if (lo == hi) return Polytope{1, {make_point1(lo)}};
        return Polytope{1, {make_point1(lo), make_point1(hi)}};
    }

    std::vector<Point> subject = polytopes[0].vertices;
    for (std::size_t i = 1; i < polytopes.size() && !subject.empty(); ++i) {
        for (const HalfPlane& hp : to_halfplanes(polytopes[i])) {
            subject = hull(2, clip(subject, hp)).vertices;
            if (subject.empty()) break;
        }
    }
    return Polytope{2, subject};
}

Polytope safe_area(int d, const std::vector<Point>& points, int f) {
    require_dim(d);
    const int m = static_cast<int>(points.size());
    if (m <= f) throw Error(Errc::TooFewPoints, "safe_area: need more than f points");
    if (f == 0) return hull(d, points);

    // Enumerate the f-element index sets to drop; each complement is one
    // sub-multiset C with |C| = |points| - f.
    std::vector<int> drop(static_cast<std::size_t>(f));
    for (int i = 0; i < f; ++i) drop[static_cast<std::size_t>(i)] = i;
    std::vector<Polytope> hulls;
    while (true) {
        std::vector<Point> subset;
        subset.reserve(static_cast<std::size_t>(m - f));
        int di = 0;
        for (int i = 0; i < m; ++i) {
            if (di < f && drop[static_cast<std::size_t>(di)] == i) {
                ++di;
                continue;
            }
            subset.push_back(points[static_cast<std::size_t>(i)]);
        }
        hulls.push_back(hull(d, subset));

        int pos = f - 1;
        while (pos >= 0 && drop[static_cast<std::size_t>(pos)] == m - f + pos) --pos;
        if (pos < 0) break;
        ++drop[static_cast<std::size_t>(pos)];
        for (int i = pos + 1; i < f; ++i)
            drop[static_cast<std::size_t>(i)] = drop[static_cast<std::size_t>(i - 1)] + 1;
    }
    return intersect(hulls);
}

bool contains_point(const Polytope& h, const Point& p) {
    require_same_dim(h.d, p);
    const auto& vs = h.vertices;
    if (vs.empty()) return false;
    if (h.d == 1) return vs.front()[0] <= p[0] && p[0] <= vs.back()[0];

    if (vs.size() == 1) return p == vs[0];
    if (vs.size() == 2) {
        if (cross(vs[0], vs[1], p) != 0) return false;
        Point w = vs[1] - vs[0];
        Rational num = dot(p - vs[0], w);
        return num >= 0 && num <= dot(w, w);
    }
    for (std::size_t i = 0; i < vs.size(); ++i)
        if (cross(vs[i], vs[(i + 1) % vs.size()], p) < 0) return false;
    return true;
}

bool contains_polytope(const Polytope& outer, const Polytope& inner) {
    if (outer.d != inner.d) throw Error(Errc::MixedDimension, "containment: mixed dimensions");
    if (inner.empty()) return true;
    if (outer.empty()) return false;
    for (const Point& v : inner.vertices)
        if (!contains_point(outer, v)) return false;
    return true;
}

Rational distance_squared_to_polytope(const Point& p, const Polytope& h) {
    require_same_dim(h.d, p);
    if (h.empty()) throw Error(Errc::EmptyPolytope, "distance to empty polytope");
    if (contains_point(h, p)) return Rational(0);

    const auto& vs = h.vertices;
    if (vs.size() == 1) return distance_squared(p, vs[0]);
    if (h.d == 1) {
        // outside the interval: nearest endpoint
        return std::min(distance_squared(p, vs.front()), distance_squared(p, vs.back()));
    }
    Rational best = point_segment_distance_squared(p, vs[0], vs[1 % vs.size()]);
    for (std::size_t i = 1; i < vs.size(); ++i) {
        Rational dsq = point_segment_distance_squared(p, vs[i], vs[(i + 1) % vs.size()]);
        if (dsq < best) best = dsq;
    }
    return best;
}

Rational hausdorff_squared(const Polytope& h1, const Polytope& h2) {
    if (h1.empty() || h2.empty()) throw Error(Errc::EmptyPolytope, "hausdorff of empty polytope");
    if (h1.d != h2.d) throw Error(Errc::MixedDimension, "hausdorff: mixed dimensions");
    return std::max(directed_hausdorff_squared(h1, h2), directed_hausdorff_squared(h2, h1));
}

double hausdorff(const Polytope& h1, const Polytope& h2) {
    return std::sqrt(to_double(hausdorff_squared(h1, h2)));
}

}  // namespace bcc
