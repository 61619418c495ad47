#pragma once

// Text file formats. Every writer emits floats with 17 significant digits so
// that reading a written file gives back identical values. Readers reject
// unknown keys and raise ErrorCode::ParseError on malformed input.

#include <string>
#include <string_view>

#include "circlestab/arcs.hpp"
#include "circlestab/complexes.hpp"
#include "circlestab/geometry.hpp"
#include "circlestab/specseq.hpp"

namespace circlestab {

std::string write_configuration(const Configuration& cfg);
Configuration read_configuration(std::string_view text);

std::string write_arc(const Arc& arc);
Arc read_arc(std::string_view text);
std::string write_simplex(const ArcSimplex& simplex);
ArcSimplex read_simplex(std::string_view text);

std::string write_complex(const SimplicialComplex& complex);
SimplicialComplex read_complex(std::string_view text);

std::string write_semisimplicial(const SemiSimplicialSet& set);
SemiSimplicialSet read_semisimplicial(std::string_view text);

std::string write_presentation(const Presentation& presentation);
Presentation read_presentation(std::string_view text);

std::string write_diagram(const Diagram& diagram);
Diagram read_diagram(std::string_view text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// A number with 17 significant digits.
std::string format_double(double x);

}  // namespace circlestab
