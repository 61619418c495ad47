#include <gtest/gtest.h>

#include <numeric>

#include "circlestab/complexes.hpp"
#include "circlestab/error.hpp"
#include "circlestab/field.hpp"
#include "circlestab/linalg.hpp"
#include "fixtures.hpp"

using namespace circlestab;

namespace {

AbelianGroup Z(std::size_t rank = 1) { return free_abelian(rank); }
AbelianGroup zero() { return {}; }
AbelianGroup with_torsion(std::size_t rank, std::vector<std::int64_t> t) { return {rank, std::move(t)}; }

}  // namespace

TEST(Smith, IdentityAndDiagonal) {
  const auto id = smith_normal_form(IntMatrix::identity(3));
  EXPECT_EQ(id.D, IntMatrix::identity(3));
  const auto f = smith_normal_form(IntMatrix::from_rows({{2, 0}, {0, 3}}));
  EXPECT_EQ(f.D, IntMatrix::from_rows({{1, 0}, {0, 6}}));
  EXPECT_TRUE(verify_smith_form(IntMatrix::from_rows({{2, 0}, {0, 3}}), f));
}

TEST(Smith, RandomRectangular) {
  KeyedRng rng(11, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t r = 1 + rng.below(8), c = 1 + rng.below(8);
    const IntMatrix a = fixtures::random_matrix(rng, r, c);
    const auto f = smith_normal_form(a);
    ASSERT_TRUE(verify_smith_form(a, f));
    // Invariant factors agree with the diagonal of the tracked form.
    std::vector<std::int64_t> diag;
    for (std::size_t i = 0; i < std::min(r, c); ++i)
      if (f.D(i, i) != 0) diag.push_back(f.D(i, i));
    EXPECT_EQ(invariant_factors(a), diag);
  }
}

TEST(Smith, DeterminantMatchesCofactorExpansion) {
  auto cofactor = [](const IntMatrix& m) {
    // 3x3 rule of Sarrus.
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  };
  KeyedRng rng(12, 0);
  for (int i = 0; i < 50; ++i) {
    const IntMatrix m = fixtures::random_matrix(rng, 3, 3);
    EXPECT_EQ(determinant(m), cofactor(m));
  }
}

TEST(Smith, OverflowIsReported) {
  const std::int64_t big = std::int64_t{1} << 62;
  EXPECT_THROW(
      {
        try {
          multiply(IntMatrix::from_rows({{big, big}}), IntMatrix::from_rows({{4}, {4}}));
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::Overflow);
          throw;
        }
      },
      Error);
}

TEST(Coefficients, Parse) {
  EXPECT_EQ(Coefficients::parse("Z"), Coefficients::integers());
  EXPECT_EQ(Coefficients::parse("Q"), Coefficients::rationals());
  EXPECT_EQ(Coefficients::parse("Fp"), Coefficients::prime_field(2));
  EXPECT_EQ(Coefficients::parse("F3"), Coefficients::prime_field(3));
  EXPECT_THROW(Coefficients::parse("F4"), Error);
  EXPECT_THROW(Coefficients::parse("R"), Error);
}

TEST(FlagComplex, Examples) {
  const auto tri = flag_complex({{0, 1, 2}, {{0, 1}, {1, 2}, {0, 2}}});
  EXPECT_EQ(tri.f_vector(), (std::vector<std::size_t>{3, 3, 1}));
  const auto cycle = flag_complex({{0, 1, 2, 3}, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}});
  EXPECT_EQ(cycle.f_vector(), (std::vector<std::size_t>{4, 4}));
  const auto empty = flag_complex({{0, 1, 2, 3, 4}, {}});
  EXPECT_EQ(empty.f_vector(), (std::vector<std::size_t>{5}));
}

TEST(InjectiveWords, Unordered) {
  const std::vector<Vertex> one{7};
  EXPECT_EQ(injective_words(one).f_vector(), (std::vector<std::size_t>{1}));
  const std::vector<Vertex> three{0, 1, 2};
  EXPECT_EQ(injective_words(three).f_vector(), (std::vector<std::size_t>{3, 3, 1}));
  const std::vector<Vertex> five{0, 1, 2, 3, 4};
  for (const auto& g : homology(injective_words(five), -1, 4, Coefficients::integers(), true))
    EXPECT_TRUE(g.is_zero());
}

TEST(InjectiveWords, Ordered) {
  const std::vector<Vertex> two{0, 1};
  const auto x2 = ordered_injective_words(two);
  EXPECT_EQ(x2.count(0), 2u);
  EXPECT_EQ(x2.count(1), 2u);
  for (int m = 3; m <= 4; ++m) {
    std::vector<Vertex> s(static_cast<std::size_t>(m));
    std::iota(s.begin(), s.end(), 0);
    const auto x = ordered_injective_words(s);
    const auto h = homology(x, -1, m - 1, Coefficients::integers(), true);
    for (int d = -1; d < m - 1; ++d) EXPECT_TRUE(h[static_cast<std::size_t>(d + 1)].is_zero()) << m << " " << d;
    EXPECT_EQ(h.back(), Z(static_cast<std::size_t>(fixtures::derangements(m))));
    // Brute-force rank over Q from the raw face data.
    const auto chains = chain_complex(x, true);
    const std::size_t top = chains.dim(m - 1);
    const std::size_t rk = matrix_rank(*chains.d(m - 1), Coefficients::rationals());
    EXPECT_EQ(top - rk, static_cast<std::size_t>(fixtures::derangements(m)));
  }
}

TEST(Link, BoundaryOfTetrahedron) {
  const auto k = fixtures::boundary_of_simplex(3);
  EXPECT_EQ(link(k, {0}).f_vector(), (std::vector<std::size_t>{3, 3}));
  EXPECT_EQ(link(k, {0, 1}).f_vector(), (std::vector<std::size_t>{2}));
  EXPECT_TRUE(link(k, {0, 1, 2}).empty());
  EXPECT_THROW(link(k, {0, 1, 2, 3}), Error);
}

TEST(Homology, Regressions) {
  const auto triangle = fixtures::boundary_of_simplex(2);
  EXPECT_EQ(homology(triangle, 0, 1), (std::vector<AbelianGroup>{Z(), Z()}));
  EXPECT_EQ(homology(fixtures::boundary_of_simplex(3), 0, 2), (std::vector<AbelianGroup>{Z(), zero(), Z()}));
  const auto rp2 = fixtures::projective_plane_6();
  ASSERT_TRUE(fixtures::is_closed_surface(rp2));
  EXPECT_EQ(homology(rp2, 0, 2), (std::vector<AbelianGroup>{Z(), with_torsion(0, {2}), zero()}));
  // Over F2 the torsion turns into a class in degrees 1 and 2.
  const auto f2 = homology(rp2, 0, 2, Coefficients::prime_field(2));
  EXPECT_EQ(f2[1].rank, 1u);
  EXPECT_EQ(f2[2].rank, 1u);
  // Over Q it disappears.
  EXPECT_EQ(homology(rp2, 0, 2, Coefficients::rationals())[1].rank, 0u);
}

TEST(Connectivity, Examples) {
  for (int n = -1; n <= 4; ++n) EXPECT_TRUE(connectivity_bound(fixtures::full_simplex(2), n).passed());
  const auto sphere = connectivity_bound(fixtures::boundary_of_simplex(3), 2);
  EXPECT_FALSE(sphere.passed());
  EXPECT_EQ(sphere.achieved, 1);
  EXPECT_EQ(sphere.failing_degree, 2);
  const auto points = connectivity_bound(SimplicialComplex({{0}, {1}}), 0);
  EXPECT_FALSE(points.passed());
  EXPECT_EQ(points.failing_degree, 0);
}

TEST(WeaklyCM, Examples) {
  const std::vector<Vertex> s{0, 1, 2, 3};
  EXPECT_TRUE(is_weakly_cm(injective_words(s), 3).passed());
  EXPECT_TRUE(is_weakly_cm(fixtures::boundary_of_simplex(3), 2).passed());
  EXPECT_FALSE(is_weakly_cm(SimplicialComplex({{0, 1}, {2, 3}}), 1).passed());
}

TEST(SimplexwiseInjective, Examples) {
  const SimplicialComplex edge({{0, 1}});
  EXPECT_TRUE(simplexwise_injective_check(edge, edge, {{0, 0}, {1, 1}}));
  EXPECT_FALSE(simplexwise_injective_check(edge, edge, {{0, 0}, {1, 0}}));
  EXPECT_THROW(simplexwise_injective_check(edge, SimplicialComplex({{0}, {1}}), {{0, 0}, {1, 1}}), Error);
}

TEST(Flagify, Examples) {
  const OrderedFlagSpace total({0, 1, 2}, {{0, 1}, {1, 2}, {0, 2}});
  const auto f = flagify(total);
  EXPECT_EQ(f.complex.f_vector(), (std::vector<std::size_t>{3, 3, 1}));
  EXPECT_EQ(homology(total.to_semisimplicial(), 0, 2), homology(f.complex, 0, 2));

  const OrderedFlagSpace one({0, 1, 2}, {{0, 1}});
  const auto g = flagify(one);
  EXPECT_EQ(g.complex.f_vector(), (std::vector<std::size_t>{3, 1}));
  for (const auto& level : one.cells())
    for (const auto& tuple : level) EXPECT_EQ(g.back.at(make_simplex(tuple)), tuple);

  EXPECT_THROW(OrderedFlagSpace({0, 1}, {{0, 1}, {1, 0}}), Error);
  EXPECT_THROW(OrderedFlagSpace({0, 1}, {{0, 0}}), Error);
}

TEST(Lift, Examples) {
  // Disk: a triangle fan around interior vertex 3 with boundary 0, 1, 2.
  const SimplicialComplex disk({{0, 1, 3}, {1, 2, 3}, {0, 2, 3}});
  const SimplicialComplex base = fixtures::full_simplex(3);
  // Y: two copies of every vertex over X (labels 10 + x and 20 + x) forming
  // a full simplex on the first copy only.
  SimplicialComplex total({{10, 11, 12, 13}, {20}, {21}, {22}, {23}});
  VertexMap proj{{10, 0}, {11, 1}, {12, 2}, {13, 3}, {20, 0}, {21, 1}, {22, 2}, {23, 3}};
  LiftProblem problem{disk, {{0, 0}, {1, 1}, {2, 2}, {3, 3}}, {{0, 10}, {1, 11}, {2, 12}}, {3}, total, base, proj};

  auto good = [](std::span<const Vertex>, Vertex x) -> std::optional<Vertex> { return 10 + x; };
  const auto ok = inductive_lift(problem, good);
  EXPECT_TRUE(ok.ok);
  EXPECT_EQ(ok.lift.at(3), 13);

  auto none = [](std::span<const Vertex>, Vertex) -> std::optional<Vertex> { return std::nullopt; };
  const auto bad = inductive_lift(problem, none);
  EXPECT_FALSE(bad.ok);
  EXPECT_EQ(bad.failed_vertex, 3);

  LiftProblem boundary_only{SimplicialComplex({{0, 1}}), {{0, 0}, {1, 1}}, {{0, 10}, {1, 11}}, {}, total, base, proj};
  const auto same = inductive_lift(boundary_only, none);
  EXPECT_TRUE(same.ok);
  EXPECT_EQ(same.lift, boundary_only.boundary_lift);
}

TEST(Abelianize, Examples) {
  EXPECT_EQ(abelianize({1, {{1, 1}}}), with_torsion(0, {2}));
  EXPECT_EQ(abelianize({2, {}}), Z(2));
  const auto s4 = symmetric_group_presentation(4);
  EXPECT_TRUE(fixtures::satisfies(s4, fixtures::symmetric_generators(4), 4));
  EXPECT_EQ(abelianize(s4), with_torsion(0, {2}));
  const auto b3 = hyperoctahedral_presentation(3);
  EXPECT_TRUE(fixtures::satisfies(b3, fixtures::hyperoctahedral_generators(3), 6));
  EXPECT_EQ(fixtures::closure(fixtures::hyperoctahedral_generators(3), 6).size(), 48u);
  EXPECT_EQ(abelianize(b3), with_torsion(0, {2, 2}));
  EXPECT_THROW(abelianize({1, {{2}}}), Error);
}

TEST(FieldAlgebra, NullspaceAndRank) {
  RationalField q;
  auto m = to_field(q, IntMatrix::from_rows({{1, 2, 3}, {2, 4, 6}}));
  EXPECT_EQ(rank(q, m), 1u);
  const auto null = nullspace(q, m);
  ASSERT_EQ(null.rows, 2u);
  const auto prod = multiply(q, m, [&] {
    DenseMatrix<RationalField::Elem> t(3, 2, 0);
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 3; ++j) t(j, i) = null(i, j);
    return t;
  }());
  for (const auto& x : prod.data) EXPECT_EQ(x, 0);
  PrimeField f2(2);
  EXPECT_EQ(sparse_rank(f2, IntMatrix::from_rows({{2, 0}, {0, 1}})), 1u);
  EXPECT_EQ(sparse_rank(q, IntMatrix::from_rows({{2, 0}, {0, 1}})), 2u);
  EXPECT_THROW(PrimeField(4), Error);
}
