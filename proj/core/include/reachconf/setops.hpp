#pragma once

#include "reachconf/deadline.hpp"
#include "reachconf/types.hpp"

namespace reachconf {

/// Zonotope <c, G> = { c + G*lambda | lambda in [-1, 1]^eta }.
///
/// A zonotope with zero generator columns is the point set {c}. Values are
/// immutable after construction.
class Zonotope {
public:
    Zonotope() = default;
    explicit Zonotope(Vec center);
    Zonotope(Vec center, Mat generators);

    static Zonotope point(const Vec& c) { return Zonotope(c); }

    const Vec& center() const { return center_; }
    const Mat& generators() const { return generators_; }

    Eigen::Index dim() const { return center_.size(); }
    Eigen::Index num_generators() const { return generators_.cols(); }

private:
    Vec center_;
    Mat generators_;
};

/// Polytope { x | normals * x <= offsets }.
struct HalfspacePoly {
    Mat normals;
    Vec offsets;

    Eigen::Index num_facets() const { return normals.rows(); }
    bool contains(const Vec& p, double tol = 1e-9) const;
};

Zonotope minkowski_sum(const Zonotope& a, const Zonotope& b);
Zonotope cartesian_product(const Zonotope& a, const Zonotope& b);
Zonotope linear_map(const Mat& A, const Zonotope& z);

/// Sum of absolute generator entries, 1^T |G| 1.
double interval_norm(const Zonotope& z);

/// Unit facet normals of the zonotope spanned by the columns of `generators`.
///
/// Zero columns are dropped and parallel columns merged before the
/// (n-1)-subset enumeration, so the result depends only on generator
/// directions. Both orientations of each normal are returned; duplicates are
/// removed with a 1e-10 tolerance. Throws DegenerateSetError if the
/// generators do not have full row rank.
Mat facet_normals(const Mat& generators, const Deadline& deadline = {});

/// Halfspace form of a full-rank zonotope.
HalfspacePoly to_halfspace(const Zonotope& z, const Deadline& deadline = {});

/// True iff p = c + G*lambda for some |lambda| <= 1 + tol, where the
/// equality may additionally be violated by at most tol per coordinate.
/// Decided with a feasibility LP, so degenerate zonotopes are supported.
bool contains(const Zonotope& z, const Vec& p, double tol = 0.0);

/// Smallest t with p in c + t*Z (the zonotope gauge of p - c), or +inf when p
/// is outside the affine hull.
double gauge(const Zonotope& z, const Vec& p, double tol = 1e-9);

} // namespace reachconf
