#include <gtest/gtest.h>

#include <functional>

#include "circlestab/error.hpp"
#include "circlestab/specseq.hpp"
#include "fixtures.hpp"

using namespace circlestab;

namespace {

const Coefficients kQ = Coefficients::rationals();
const Coefficients kF2 = Coefficients::prime_field(2);

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

Diagram single_column(const SimplicialComplex& k) {
  Diagram d;
  d.columns = {SimplicialComplex{}, k};
  d.faces = {{}};
  return d;
}

DiagramMap vertex_identity(const Diagram& d) { return fixtures::identity_map(d); }

}  // namespace

TEST(Diagram, Validation) {
  EXPECT_NO_THROW(validate(fixtures::interval_diagram()));
  auto bad = fixtures::interval_diagram();
  // d_0 and d_1 with the same target break nothing, but a missing vertex does.
  bad.faces[1][0] = {};
  EXPECT_EQ(code_of([&] { validate(bad); }), ErrorCode::NotSimplicial);

  // Augmentation must equalize d_0 and d_1.
  Diagram two;
  two.columns = {SimplicialComplex({{0}, {1}}), SimplicialComplex({{0}, {1}}), SimplicialComplex({{0}})};
  two.faces = {{VertexMap{{0, 0}, {1, 1}}}, {VertexMap{{0, 1}}, VertexMap{{0, 0}}}};
  EXPECT_EQ(code_of([&] { validate(two); }), ErrorCode::InvalidArgument);

  // A face map that is not simplicial: an edge onto two points.
  Diagram edge;
  edge.columns = {SimplicialComplex{}, SimplicialComplex({{0}, {1}}), SimplicialComplex({{0, 1}})};
  edge.faces = {{}, {VertexMap{{0, 0}, {1, 1}}, VertexMap{{0, 0}, {1, 1}}}};
  EXPECT_EQ(code_of([&] { validate(edge); }), ErrorCode::NotSimplicial);
}

TEST(TotalComplex, Examples) {
  const auto tor = single_column(fixtures::seven_vertex_torus());
  const auto t = total_complex(tor);
  EXPECT_TRUE(t.chains.is_valid());
  const auto h = homology(t.chains, 0, 2, kQ);
  EXPECT_EQ(h[0].rank, 1u);
  EXPECT_EQ(h[1].rank, 2u);
  EXPECT_EQ(h[2].rank, 1u);

  const auto interval = total_complex(fixtures::interval_diagram());
  for (const auto& g : homology(interval.chains, -1, 2, kQ)) EXPECT_TRUE(g.is_zero());
  EXPECT_EQ(interval.filtration_dim(0, -1), 0u);
  EXPECT_EQ(interval.filtration_dim(0, 0), 2u);
  EXPECT_EQ(interval.filtration_dim(-1, -1), 1u);

  // Every column a point with identity faces: the pair (point, point) again.
  Diagram points;
  points.columns = {SimplicialComplex({{0}}), SimplicialComplex({{0}}), SimplicialComplex({{0}}),
                    SimplicialComplex({{0}})};
  const VertexMap id{{0, 0}};
  points.faces = {{id}, {id, id}, {id, id, id}};
  for (const auto& g : homology(total_complex(points).chains, -1, 3, kQ)) EXPECT_TRUE(g.is_zero());
}

TEST(E1, Interval) {
  const auto page = e1(fixtures::interval_diagram(), kQ);
  EXPECT_EQ(page.dim(-1, 0), 1u);
  EXPECT_EQ(page.dim(0, 0), 2u);
  EXPECT_EQ(page.dim(1, 0), 1u);
  EXPECT_EQ(page.dim(0, 1), 0u);
  const auto conv = converge(fixtures::interval_diagram(), kQ);
  ASSERT_GE(conv.pages.size(), 2u);
  EXPECT_TRUE(conv.pages[1].is_zero());
  EXPECT_TRUE(conv.match);
  for (auto v : conv.target) EXPECT_EQ(v, 0u);
}

TEST(E1, SphereColumn) {
  const auto d = single_column(fixtures::boundary_of_simplex(3));
  const auto page = e1(d, kQ);
  EXPECT_EQ(page.dim(0, 2), 1u);
  EXPECT_EQ(page.dim(0, 0), 1u);
  EXPECT_EQ(page.dim(0, 1), 0u);
  EXPECT_TRUE(page.differential_zero());
  const auto conv = converge(d, kQ);
  EXPECT_EQ(conv.stabilized_at, 1);
  EXPECT_TRUE(conv.match);
  EXPECT_EQ(conv.e_infinity().dims, page.dims);
}

TEST(E1, IntegersAreRejected) {
  EXPECT_EQ(code_of([] { e1(fixtures::interval_diagram(), Coefficients::integers()); }), ErrorCode::FieldOnly);
}

TEST(TurnPage, ZeroDifferentialsKeepDimensions) {
  const auto d = single_column(fixtures::boundary_of_simplex(3));
  const auto page = e1(d, kQ);
  const auto next = turn_page(page, total_complex(d));
  EXPECT_EQ(next.r, 2);
  EXPECT_EQ(next.dims, page.dims);
}

TEST(Converge, RandomDiagramsAgainstDirectTotalHomology) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto recipe = fixtures::random_diagram(seed);
    const Diagram& d = recipe.diagram;
    for (const auto& field : {kQ, kF2}) {
      const auto conv = converge(d, field);
      EXPECT_TRUE(conv.match) << seed << " " << field.name();
      bool square_zero = false;
      const auto direct = fixtures::total_homology(d, field, &square_zero);
      EXPECT_TRUE(square_zero);
      for (const auto& [n, dim] : direct) {
        EXPECT_EQ(conv.e_infinity().total(n), dim) << "seed " << seed << " n " << n;
        const auto idx = static_cast<std::size_t>(n - conv.n_min);
        if (idx < conv.target.size()) EXPECT_EQ(conv.target[idx], dim) << "seed " << seed << " n " << n;
      }
      for (std::size_t r = 1; r < conv.pages.size(); ++r)
        for (const auto& [pq, dim] : conv.pages[r].dims) EXPECT_LE(dim, conv.pages[r - 1].dim(pq.first, pq.second));
    }
  }
}

TEST(MappingCone, Examples) {
  const auto interval = fixtures::interval_diagram();
  const auto cone = mapping_cone(interval, interval, vertex_identity(interval));
  const auto conv = converge(cone, kQ);
  for (const auto& page : conv.pages) EXPECT_TRUE(page.is_zero());
  EXPECT_TRUE(conv.match);

  // A point into an edge in the single column.
  const auto pt = single_column(SimplicialComplex({{0}}));
  const auto edge = single_column(SimplicialComplex({{0, 1}}));
  DiagramMap incl{{VertexMap{}, VertexMap{{0, 0}}}};
  EXPECT_TRUE(e1(mapping_cone(pt, edge, incl), kQ).is_zero());

  const auto boundary = single_column(fixtures::boundary_of_simplex(2));
  const auto disk = single_column(fixtures::full_simplex(2));
  DiagramMap fill{{VertexMap{}, VertexMap{{0, 0}, {1, 1}, {2, 2}}}};
  const auto page = e1(mapping_cone(boundary, disk, fill), kQ);
  EXPECT_EQ(page.dim(0, 2), 1u);
  EXPECT_EQ(page.total(2), 1u);
  EXPECT_EQ(page.total(1), 0u);
  EXPECT_EQ(page.total(0), 0u);
}

TEST(MappingCone, NotCommuting) {
  const auto interval = fixtures::interval_diagram();
  auto swap = vertex_identity(interval);
  swap.columns[1] = {{0, 1}, {1, 0}};
  EXPECT_EQ(code_of([&] { mapping_cone(interval, interval, swap); }), ErrorCode::NotCommuting);
}

TEST(MappingCone, RandomIdentityCones) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const auto d = fixtures::random_diagram(seed).diagram;
    const auto conv = converge(mapping_cone(d, d, vertex_identity(d)), kF2);
    for (const auto& page : conv.pages) EXPECT_TRUE(page.is_zero()) << seed;
  }
}

TEST(Ladder, ConstantFamily) {
  const auto d = fixtures::interval_diagram();
  const auto rows = stability_ladder({d, d, d}, {vertex_identity(d), vertex_identity(d)}, 4, half_floor, kQ);
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    EXPECT_TRUE(row.region_vanishes());
    EXPECT_TRUE(row.iso_below);
    EXPECT_TRUE(row.surjective_at);
  }
  EXPECT_EQ(rows[0].k, 4);
  EXPECT_EQ(rows[1].k, 5);
  EXPECT_EQ(rows[0].bound, 2);
}

TEST(Ladder, FlagsTheOneRelativeClass) {
  const auto boundary = single_column(fixtures::boundary_of_simplex(2));
  const auto disk = single_column(fixtures::full_simplex(2));
  DiagramMap fill{{VertexMap{}, VertexMap{{0, 0}, {1, 1}, {2, 2}}}};
  const auto rows = stability_ladder({boundary, disk}, {fill}, 5, half_floor, kQ);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].nonvanishing, (std::vector<std::pair<int, int>>{{0, 2}}));
  // With a smaller k the class sits above the checked region.
  const auto low = stability_ladder({boundary, disk}, {fill}, 3, half_floor, kQ);
  EXPECT_TRUE(low[0].region_vanishes());
}

TEST(Ladder, WordFamilyGrows) {
  std::vector<Diagram> family;
  std::vector<fixtures::WordDiagram> words;
  for (int m = 1; m <= 4; ++m) words.push_back(fixtures::word_diagram(m, 3));
  for (const auto& w : words) family.push_back(w.diagram);
  std::vector<DiagramMap> maps;
  for (std::size_t i = 0; i + 1 < words.size(); ++i) {
    DiagramMap t;
    t.columns.push_back({{0, 0}});
    for (const auto& codes : words[i].codes) {
      VertexMap m;
      for (const auto& [word, c] : codes) m[c] = c;
      t.columns.push_back(m);
    }
    maps.push_back(t);
  }
  const auto rows = stability_ladder(family, maps, 1, half_floor, kQ);
  ASSERT_EQ(rows.size(), 3u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i].vanishing_through, rows[i - 1].vanishing_through);
  EXPECT_GT(rows.back().vanishing_through, rows.front().vanishing_through);
}

TEST(PageCsv, Header) {
  const auto conv = converge(fixtures::interval_diagram(), kQ);
  const auto csv = page_csv(conv.pages);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,p,q,dim");
  EXPECT_NE(csv.find("1,0,0,2"), std::string::npos);
}
