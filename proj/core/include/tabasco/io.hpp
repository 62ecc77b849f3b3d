#pragma once

#include "tabasco/matrix.hpp"
#include "tabasco/templates.hpp"

#include <map>
#include <string>
#include <vector>

namespace tabasco {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that round-trips the exact double.
std::string format_double(double v);

std::string matrix_to_csv(const RealMatrix& m);
/// Complex matrices are written as consecutive (re, im) column pairs.
std::string matrix_to_csv(const ComplexMatrix& m);

RealMatrix csv_to_matrix(const std::string& text);
ComplexMatrix csv_to_complex_matrix(const std::string& text);

RealMatrix read_csv_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Flat key = value configuration, '#' comments, whitespace-insensitive keys.
std::map<std::string, std::string> parse_config(const std::string& text);

/// Index list grammar: comma-separated entries, each a value or a..b range;
/// values may be numbers, `p` or `p-<number>` once p is known.
std::vector<double> parse_index_list(const std::string& text, int p);

struct FamilySpec {
  TemplateKind kind = TemplateKind::Banding;
  std::vector<double> indices;
};

/// e.g. "banding:1..30,p-30..p", "minimax:1..30,p-30..p", "sinc:0.1,0.2".
FamilySpec parse_family_spec(const std::string& text, int p);

TemplateKind template_kind_from_string(const std::string& name);

}  // namespace tabasco
