#include <gtest/gtest.h>

#include "circlestab/error.hpp"
#include "circlestab/io.hpp"
#include "fixtures.hpp"

using namespace circlestab;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(Io, FormatDouble) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2), "2");
}

TEST(Io, ConfigurationRoundTrip) {
  GeneratorParams params;
  params.jitter_moves = 30;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto cfg = random_unlinked(7, seed, params);
    const auto text = write_configuration(cfg);
    const auto back = read_configuration(text);
    EXPECT_EQ(back, cfg);
    EXPECT_EQ(write_configuration(back), text);
  }
  Tolerances tol;
  tol.shell = 1e-8;
  const Configuration custom({Circle({0.5, 0.5, 0.5}, 0.1, Vec3::UnitZ(), tol)}, tol);
  const auto text = write_configuration(custom);
  EXPECT_NE(text.find("tolerances"), std::string::npos);
  EXPECT_EQ(read_configuration(text).tolerances().shell, 1e-8);
}

TEST(Io, ConfigurationErrors) {
  EXPECT_EQ(code_of([] { read_configuration("{"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { read_configuration(R"({"circles": [], "extra": 1})"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { read_configuration(R"({"circles": [{"center": [0.5, 0.5], "radius": 0.1, "normal": [0, 0, 1]}]})"); }),
            ErrorCode::ParseError);
  EXPECT_EQ(code_of([] { read_configuration(R"({"circles": [{"center": [0.05, 0.5, 0.5], "radius": 0.1, "normal": [0, 0, 1]}]})"); }),
            ErrorCode::InvalidConfiguration);
}

TEST(Io, SimplexRoundTrip) {
  const auto cfg = random_unlinked(3, 1);
  const auto simplex = resolve(cfg, good_circles(cfg));
  const auto text = write_simplex(simplex);
  const auto back = read_simplex(text);
  ASSERT_EQ(back.arcs.size(), simplex.arcs.size());
  for (std::size_t i = 0; i < back.arcs.size(); ++i) {
    EXPECT_EQ(back.arcs[i].t, simplex.arcs[i].t);
    EXPECT_EQ(back.arcs[i].lambda, simplex.arcs[i].lambda);
    EXPECT_EQ(back.arcs[i].eta, simplex.arcs[i].eta);
    EXPECT_EQ(back.arcs[i].target, simplex.arcs[i].target);
    EXPECT_EQ(back.arcs[i].polyline, simplex.arcs[i].polyline);
  }
  EXPECT_EQ(write_simplex(back), text);
  EXPECT_EQ(read_arc(write_arc(simplex.arcs[0])).polyline, simplex.arcs[0].polyline);
  EXPECT_EQ(code_of([] { read_arc(R"({"t": 0.5})"); }), ErrorCode::ParseError);
}

TEST(Io, ComplexAndSets) {
  const auto k = fixtures::klein_bottle();
  EXPECT_EQ(read_complex(write_complex(k)), k);
  const SimplicialComplex iso({{0, 1}}, {7});
  EXPECT_EQ(read_complex(write_complex(iso)), iso);

  const std::vector<Vertex> s{0, 1, 2};
  const auto x = ordered_injective_words(s);
  const auto y = read_semisimplicial(write_semisimplicial(x));
  EXPECT_EQ(y.cells(), x.cells());
  EXPECT_EQ(y.faces(), x.faces());

  const auto b = hyperoctahedral_presentation(3);
  const auto pb = read_presentation(write_presentation(b));
  EXPECT_EQ(pb.generators, b.generators);
  EXPECT_EQ(pb.relators, b.relators);
  EXPECT_THROW(read_presentation(R"({"generators": 1, "relators": [[3]]})"), Error);
}

TEST(Io, DiagramRoundTrip) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto d = fixtures::random_diagram(seed).diagram;
    const auto back = read_diagram(write_diagram(d));
    EXPECT_EQ(back.columns, d.columns);
    EXPECT_EQ(back.faces, d.faces);
  }
  EXPECT_EQ(code_of([] { read_diagram(R"({"columns": []})"); }), ErrorCode::ParseError);
  EXPECT_EQ(code_of([] {
              read_diagram(R"({"columns": [{"maximal": [[0]]}, {"maximal": [[0], [1]]}], "faces": {"0": [[[0, 0]]]}})");
            }),
            ErrorCode::NotSimplicial);
}
