#include "graspforge/geometry.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <numbers>
#include <random>

using namespace graspforge;
using namespace graspforge::geometry;
namespace gt = graspforge::testing;
using gt::brute_force_closest;
using gt::bumpy_sphere;
using gt::random_soup;
using gt::ray_parity_inside;

namespace {

// Distance to a triangle by dense barycentric search; independent of the
// Voronoi-region closest point routine.
double dense_triangle_distance(const Vec3& q, const Vec3& a, const Vec3& b, const Vec3& c) {
  double best = std::numeric_limits<double>::infinity();
  const int n = 400;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; i + j <= n; ++j) {
      const double u = double(i) / n, v = double(j) / n;
      best = std::min(best, (a + u * (b - a) + v * (c - a) - q).norm());
    }
  return best;
}

}  // namespace

// Loading ---------------------------------------------------------------

TEST(LoadMesh, UnitCube) {
  const auto dir = gt::temp_dir("cube");
  gt::write_text(dir / "cube.obj", gt::kUnitCubeObj);
  const TriangleMesh m = load_mesh((dir / "cube.obj").string(), 1.0);
  EXPECT_EQ(m.vertices.size(), 8u);
  EXPECT_EQ(m.triangles.size(), 12u);
  EXPECT_TRUE(m.watertight);
}

TEST(LoadMesh, ScaledCubeBounds) {
  const auto dir = gt::temp_dir("cube_scaled");
  gt::write_text(dir / "cube.obj", gt::kUnitCubeObj);
  const TriangleMesh m = load_mesh((dir / "cube.obj").string(), 0.1);
  const auto box = m.bounds();
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(box.min()[i], -0.05);
    EXPECT_EQ(box.max()[i], 0.05);
  }
  EXPECT_EQ(m.scale, 0.1);
}

TEST(LoadMesh, ZeroAreaTriangleOnlyIsEmpty) {
  const auto dir = gt::temp_dir("degenerate");
  gt::write_text(dir / "flat.obj", "v 0 0 0\nv 1 0 0\nv 2 0 0\nf 1 2 3\n");
  try {
    load_mesh((dir / "flat.obj").string(), 1.0);
    FAIL() << "expected EmptyMesh";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyMesh);
  }
}

TEST(LoadMesh, MalformedIsParseError) {
  const auto dir = gt::temp_dir("malformed");
  gt::write_text(dir / "bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
  gt::write_text(dir / "bad.off", "OFF\n3 1 0\n0 0 0\n1 0\n");
  for (const char* name : {"bad.obj", "bad.off"}) {
    try {
      load_mesh((dir / name).string(), 1.0);
      FAIL() << "expected ParseError for " << name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError) << name;
    }
  }
}

TEST(LoadMesh, OffWithQuadsAndDuplicates) {
  const auto dir = gt::temp_dir("off");
  // Tetrahedron where one face repeats a vertex position under a new index.
  gt::write_text(dir / "tet.off",
                 "OFF\n5 4 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1e-12 0 0\n"
                 "3 0 2 1\n3 4 1 3\n3 1 2 3\n3 0 3 2\n");
  const TriangleMesh m = load_mesh((dir / "tet.off").string(), 1.0);
  EXPECT_EQ(m.vertices.size(), 4u);
  EXPECT_EQ(m.triangles.size(), 4u);
  EXPECT_TRUE(m.watertight);
}

TEST(LoadMesh, OpenMeshNotWatertight) {
  TriangleMesh cube = make_box(Vec3(1, 1, 1));
  cube.triangles.pop_back();
  EXPECT_FALSE(compute_watertight(cube.triangles));
  EXPECT_TRUE(make_icosphere(1.0, 2).watertight);
  EXPECT_TRUE(make_cylinder(0.03, 0.2).watertight);
}

// Sampling --------------------------------------------------------------

TEST(SampleSurface, IcosphereMeanNorm) {
  const TriangleMesh sphere = make_icosphere(1.0, 4);
  // Oracle: area-weighted mean of |p| over the discretized surface, by quadrature.
  double weighted = 0.0, area = 0.0;
  const int n = 12;
  for (std::size_t t = 0; t < sphere.triangles.size(); ++t) {
    const Vec3 a = sphere.corner(t, 0), b = sphere.corner(t, 1), c = sphere.corner(t, 2);
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; i + j < n; ++j) {
        const double u = (i + 1.0 / 3.0) / n, v = (j + 1.0 / 3.0) / n;
        sum += (a + u * (b - a) + v * (c - a)).norm();
        ++count;
      }
    const double tri_area = sphere.triangle_area(t);
    weighted += tri_area * sum / count;
    area += tri_area;
  }
  const double expected = weighted / area;
  EXPECT_GT(expected, 0.99);

  const SurfaceSamples s = sample_surface(sphere, 3000, 7);
  double mean = 0.0;
  for (const auto& p : s.points) mean += p.norm();
  mean /= s.size();
  EXPECT_NEAR(mean, expected, 1e-2);
}

TEST(SampleSurface, PointsLieOnSourceTriangles) {
  const TriangleMesh m = make_cylinder(0.03, 0.2);
  const SurfaceSamples s = sample_surface(m, 2000, 3);
  ASSERT_EQ(s.size(), 2000u);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto t = static_cast<std::size_t>(s.source_triangle[i]);
    const Vec3 cp = closest_point_on_triangle(s.points[i], m.corner(t, 0), m.corner(t, 1), m.corner(t, 2));
    EXPECT_LT((cp - s.points[i]).norm(), 1e-9);
  }
}

TEST(SampleSurface, EmptyAndDeterministic) {
  const TriangleMesh m = make_box(Vec3(0.1, 0.2, 0.3));
  EXPECT_TRUE(sample_surface(m, 0, 1).empty());
  const auto a = sample_surface(m, 500, 42);
  const auto b = sample_surface(m, 500, 42);
  const auto c = sample_surface(m, 500, 43);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a.points[i], b.points[i]);
    EXPECT_EQ(a.source_triangle[i], b.source_triangle[i]);
  }
  EXPECT_NE(a.points[0], c.points[0]);
}

// Closest point ---------------------------------------------------------

TEST(ClosestPoint, TriangleRoutineMatchesDenseSearch) {
  std::mt19937_64 gen(11);
  for (int k = 0; k < 30; ++k) {
    const Vec3 a = gt::random_point(gen, -1, 1), b = gt::random_point(gen, -1, 1), c = gt::random_point(gen, -1, 1);
    const Vec3 q = gt::random_point(gen, -2, 2);
    const double d = (closest_point_on_triangle(q, a, b, c) - q).norm();
    const double dense = dense_triangle_distance(q, a, b, c);
    EXPECT_LE(d, dense + 1e-12);
    EXPECT_NEAR(d, dense, 5e-3);
  }
}

TEST(ClosestPoint, VertexQueryIsZero) {
  const ProximityIndex index(make_icosphere(1.0, 3));
  for (std::size_t i = 0; i < index.mesh().vertices.size(); i += 37) {
    const auto cp = closest_surface_point(index.mesh().vertices[i], index);
    EXPECT_EQ(cp.distance, 0.0);
  }
}

TEST(ClosestPoint, CenterOfIcosphereIsInradius) {
  const TriangleMesh sphere = make_icosphere(1.0, 4);
  double inradius = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < sphere.triangles.size(); ++t) {
    const Vec3 n = (sphere.corner(t, 1) - sphere.corner(t, 0)).cross(sphere.corner(t, 2) - sphere.corner(t, 0)).normalized();
    inradius = std::min(inradius, std::abs(n.dot(sphere.corner(t, 0))));
  }
  const ProximityIndex index(sphere);
  EXPECT_NEAR(closest_surface_point(Vec3::Zero(), index).distance, inradius, 1e-12);
  EXPECT_NEAR(signed_distance(Vec3::Zero(), index), -inradius, 1e-12);
}

TEST(ClosestPoint, IndexMatchesBruteForceOnRandomMeshes) {
  std::mt19937_64 gen(2024);
  int checked = 0;
  for (int m = 0; m < 10; ++m) {
    const TriangleMesh mesh = m % 2 == 0 ? random_soup(gen, 200) : bumpy_sphere(gen);
    const ProximityIndex index(mesh);
    for (int q = 0; q < 100; ++q) {
      const Vec3 query = gt::random_point(gen, -1.5, 1.5);
      const auto fast = closest_surface_point(query, index);
      const auto slow = brute_force_closest(mesh, query);
      EXPECT_EQ(fast.triangle, slow.triangle);
      EXPECT_EQ(fast.distance, slow.distance);
      EXPECT_LT(std::abs((fast.point - query).norm() - fast.distance), 1e-12);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 1000);
}

// Inside / signed distance ----------------------------------------------

TEST(ClassifyInside, IcosphereBasics) {
  const TriangleMesh sphere = make_icosphere(1.0, 3);
  const auto mask = classify_inside(Points3{Vec3::Zero(), Vec3(2, 0, 0)}, sphere);
  EXPECT_FALSE(mask.approximate);
  EXPECT_EQ(mask.inside[0], 1);
  EXPECT_EQ(mask.inside[1], 0);
}

TEST(ClassifyInside, CubeMatchesRayParity) {
  const TriangleMesh cube = make_box(Vec3(1, 1, 1));
  const ProximityIndex index(cube);
  std::mt19937_64 gen(5);
  Points3 pts;
  for (int i = 0; i < 500; ++i) pts.push_back(gt::random_point(gen, -1.0, 1.0));
  const auto mask = classify_inside(pts, index);
  for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(mask.inside[i] == 1, ray_parity_inside(cube, pts[i]));
}

TEST(ClassifyInside, OpenMeshUsesWindingNumber) {
  TriangleMesh sphere = make_icosphere(1.0, 3);
  sphere.triangles.erase(sphere.triangles.begin(), sphere.triangles.begin() + 3);
  sphere.watertight = compute_watertight(sphere.triangles);
  ASSERT_FALSE(sphere.watertight);
  const auto mask = classify_inside(Points3{Vec3(0.1, 0.0, 0.0), Vec3(0.0, 0.0, 3.0)}, sphere);
  EXPECT_TRUE(mask.approximate);
  EXPECT_EQ(mask.inside[0], 1);
  EXPECT_EQ(mask.inside[1], 0);
}

TEST(SignedDistance, OutsideIcosphereNearAnalytic) {
  const ProximityIndex index(make_icosphere(1.0, 4));
  EXPECT_NEAR(signed_distance(Vec3(2, 0, 0), index), 1.0, 2e-2);
  EXPECT_GT(signed_distance(Vec3(2, 0, 0), index), 0.0);
}

TEST(SignedDistance, SurfaceSamplesAreZero) {
  const TriangleMesh m = make_box(Vec3(0.2, 0.1, 0.05));
  const ProximityIndex index(m);
  const auto s = sample_surface(m, 200, 9);
  for (const auto& p : s.points) EXPECT_LT(std::abs(signed_distance(p, index)), 1e-9);
}

TEST(SignedDistance, SignChangesAtSurface) {
  const ProximityIndex index(make_icosphere(0.5, 3));
  std::mt19937_64 gen(77);
  for (int k = 0; k < 20; ++k) {
    const Vec3 dir = gt::random_unit(gen);
    double lo = 0.0, hi = 1.0;  // sdf(lo * dir) < 0 < sdf(hi * dir)
    ASSERT_LT(signed_distance(lo * dir, index), 0.0);
    ASSERT_GT(signed_distance(hi * dir, index), 0.0);
    while (hi - lo > 1e-8) {
      const double mid = 0.5 * (lo + hi);
      (signed_distance(mid * dir, index) < 0.0 ? lo : hi) = mid;
    }
    EXPECT_LT(hi - lo, 1e-7);
    EXPECT_LT(closest_surface_point(lo * dir, index).distance, 1e-7);
  }
}

TEST(SignedDistance, ScaleCovariance) {
  const auto dir = gt::temp_dir("scale");
  write_obj(make_icosphere(1.0, 2), (dir / "s.obj").string());
  const double s = 0.037;
  const ProximityIndex unit(load_mesh((dir / "s.obj").string(), 1.0));
  const ProximityIndex scaled(load_mesh((dir / "s.obj").string(), s));
  std::mt19937_64 gen(8);
  for (int k = 0; k < 50; ++k) {
    const Vec3 q = gt::random_point(gen, -1.5, 1.5);
    const double a = signed_distance(q, unit) * s;
    const double b = signed_distance(s * q, scaled);
    EXPECT_NEAR(a, b, 1e-9 * std::abs(a));
  }
}

// Furthest point --------------------------------------------------------

TEST(FurthestPoint, CubeFace) {
  const TriangleMesh cube = make_box(Vec3(1, 1, 1));
  const auto s = sample_surface(cube, 3000, 1);
  const auto fp = furthest_point_along(s, Vec3::Zero(), Vec3::UnitX());
  EXPECT_NEAR(fp.projected_distance, 0.5, 1e-3);
}

TEST(FurthestPoint, TieGoesToLowestIndex) {
  const Points3 pts = {Vec3(0, 0, 0), Vec3(1, 5, 0), Vec3(1, -5, 0)};
  const auto fp = furthest_point_along(pts, Vec3::Zero(), Vec3::UnitX());
  EXPECT_EQ(fp.index, 1u);
}

TEST(FurthestPoint, MatchesMaxDotScan) {
  std::mt19937_64 gen(3);
  Points3 pts;
  for (int i = 0; i < 1000; ++i) pts.push_back(gt::random_point(gen, -1, 1));
  for (int k = 0; k < 20; ++k) {
    const Vec3 dir = gt::random_unit(gen);
    const Vec3 c = gt::random_point(gen, -0.1, 0.1);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
      if ((pts[i] - c).dot(dir) > (pts[best] - c).dot(dir)) best = i;
    EXPECT_EQ(furthest_point_along(pts, c, dir).index, best);
  }
}

TEST(FurthestPoint, Errors) {
  EXPECT_THROW(furthest_point_along(Points3{}, Vec3::Zero(), Vec3::UnitX()), Error);
  EXPECT_THROW(furthest_point_along(Points3{Vec3::Zero()}, Vec3::Zero(), Vec3(2, 0, 0)), Error);
}

// Planar projection and principal axes ---------------------------------

namespace {

Points2 rectangle_samples(double w, double h, int n) {
  Points2 pts;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) pts.emplace_back((i + 0.5) / n * w - w / 2, (j + 0.5) / n * h - h / 2);
  return pts;
}

Eigen::Matrix2d rotation2(double a) {
  Eigen::Matrix2d r;
  r << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  return r;
}

}  // namespace

TEST(PrincipalAxes, RectangleMinorAlongShortSide) {
  const auto axes = principal_axes_2d(rectangle_samples(2.0, 1.0, 40));
  EXPECT_NEAR(std::abs(axes.minor.y()), 1.0, 1e-12);
  EXPECT_FALSE(axes.degenerate);
  EXPECT_GE(axes.major_variance, axes.minor_variance);
}

TEST(PrincipalAxes, RotatedRectangle) {
  const double a = std::numbers::pi / 6.0;
  Points2 pts = rectangle_samples(2.0, 1.0, 40);
  for (auto& p : pts) p = rotation2(a) * p;
  const auto axes = principal_axes_2d(pts);
  const Vec2 expected = rotation2(a) * Vec2(0, 1);
  EXPECT_NEAR(std::abs(axes.minor.dot(expected)), 1.0, 1e-6);
  EXPECT_GT(axes.minor.x(), 0.0);  // sign convention: first nonzero coordinate positive
}

TEST(PrincipalAxes, CircleIsDegenerate) {
  Points2 pts;
  for (int i = 0; i < 360; ++i) pts.emplace_back(std::cos(i * std::numbers::pi / 180), std::sin(i * std::numbers::pi / 180));
  EXPECT_TRUE(principal_axes_2d(pts).degenerate);
}

TEST(PrincipalAxes, CollinearThrows) {
  Points2 pts = {Vec2(0, 0), Vec2(1, 1), Vec2(2, 2), Vec2(3, 3)};
  EXPECT_THROW(principal_axes_2d(pts), Error);
  EXPECT_THROW(principal_axes_2d(Points2{Vec2(1, 1), Vec2(1, 1), Vec2(1, 1)}), Error);
}

TEST(PrincipalAxes, MatchesEigenSolverAndIsRotationEquivariant) {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Points2 pts;
    const double sx = 0.2 + std::abs(n(gen)), sy = 0.2 + std::abs(n(gen));
    for (int i = 0; i < 300; ++i) pts.emplace_back(sx * n(gen), sy * n(gen) + 0.3 * n(gen));
    const auto axes = principal_axes_2d(pts);

    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    Vec2 mean = Vec2::Zero();
    for (const auto& p : pts) mean += p;
    mean /= pts.size();
    for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
    cov /= pts.size();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    EXPECT_NEAR(axes.minor_variance, es.eigenvalues()[0], 1e-9);
    EXPECT_NEAR(axes.major_variance, es.eigenvalues()[1], 1e-9);
    EXPECT_NEAR(std::abs(axes.minor.dot(es.eigenvectors().col(0))), 1.0, 1e-9);

    const double angle = std::uniform_real_distribution<double>(0, 2 * std::numbers::pi)(gen);
    Points2 rotated = pts;
    for (auto& p : rotated) p = rotation2(angle) * p;
    const auto raxes = principal_axes_2d(rotated);
    EXPECT_NEAR(raxes.major_variance, axes.major_variance, 1e-9);
    EXPECT_NEAR(raxes.minor_variance, axes.minor_variance, 1e-9);
    EXPECT_NEAR(std::abs(raxes.minor.dot(rotation2(angle) * axes.minor)), 1.0, 1e-9);
    EXPECT_NEAR(std::abs(raxes.major.dot(rotation2(angle) * axes.major)), 1.0, 1e-9);
  }
}

TEST(ProjectToPlane, IsometryAndLift) {
  std::mt19937_64 gen(4);
  const Vec3 normal = gt::random_unit(gen);
  const auto [e1, e2] = plane_basis(normal);
  Points3 pts;
  for (int i = 0; i < 50; ++i) pts.push_back(Vec3(0.3, -0.2, 0.1) + gt::random_point(gen, -1, 1).x() * e1 + gt::random_point(gen, -1, 1).y() * e2);
  const auto proj = project_to_plane(pts, normal);
  EXPECT_NEAR(proj.e1.cross(proj.e2).dot(normal), 1.0, 1e-12);
  EXPECT_NEAR(proj.e1.dot(proj.e2), 0.0, 1e-12);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); j += 7)
      EXPECT_NEAR((proj.points[i] - proj.points[j]).norm(), (pts[i] - pts[j]).norm(), 1e-12);
    const Vec3 lifted = proj.lift(proj.points[i]);
    EXPECT_NEAR((lifted - proj.origin).dot(normal), 0.0, 1e-12);
    EXPECT_NEAR((lifted - pts[i]).norm(), 0.0, 1e-12);
  }
}

TEST(ProjectToPlane, ZNormalDropsZ) {
  const Points3 pts = {Vec3(1, 2, 3), Vec3(-1, 0.5, -7), Vec3(0, 0, 10)};
  const auto proj = project_to_plane(pts, Vec3::UnitZ());
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = 0; j < pts.size(); ++j)
      EXPECT_NEAR((proj.points[i] - proj.points[j]).norm(), (pts[i] - pts[j]).head<2>().norm(), 1e-12);
}
