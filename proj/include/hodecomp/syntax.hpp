#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "hodecomp/ast.hpp"

namespace hodecomp {

struct ParseError : std::runtime_error {
  int line = 0;
  int col = 0;
  ParseError(const std::string& msg, int l, int c)
      : std::runtime_error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), col(c) {}
};

struct PrintOptions {
  bool annotations = true;
};

std::string print_name(const Name& n);
std::string print(const ValP& v, const PrintOptions& o = {});
std::string print(const ProcP& p, const PrintOptions& o = {});
// Multi-line layout with one parallel component per line.
std::string print_pretty(const ProcP& p, const PrintOptions& o = {});

struct ParseOptions {
  bool allow_reserved = false;
  // Rename binders that clash with earlier binders or free names.
  bool barendregt = true;
};

ProcP parse_process(const std::string& text, const ParseOptions& o = {});
ValP parse_value(const std::string& text, const ParseOptions& o = {});
TypeP parse_type(const std::string& text);

struct Expectation {
  enum class Kind { Degree, SourceSteps, SourceInert, DecompSteps, Encodes, Minimal, GDecomp, RsDecomp, FIndex } kind;
  std::string target; // Degree: macro name or "main"
  long number = 0;
  ProcP term; // SourceSteps / DecompSteps / Encodes
  int line = 0;
  TypeP type;              // GDecomp / RsDecomp / FIndex argument
  std::vector<TypeP> types; // GDecomp / RsDecomp result
};

struct SourceFile {
  std::vector<std::pair<std::string, TypeP>> aliases;
  std::vector<std::pair<Name, TypeP>> free_names;
  std::vector<std::pair<std::string, ValP>> values;
  std::vector<std::pair<std::string, ProcP>> procs;
  ProcP main; // null in a types-only file
  bool namepass = false; // main is a name-passing term to be encoded
  std::vector<Expectation> expected;
};

SourceFile parse_source(const std::string& text);

} // namespace hodecomp
