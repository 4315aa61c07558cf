#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "calcap/capacity.hpp"
#include "calcap/errors.hpp"
#include "calcap/geometry.hpp"
#include "calcap/kernels.hpp"
#include "calcap/measures.hpp"
#include "calcap/variational.hpp"
#include "calcap/whitney.hpp"

namespace calcap {

inline constexpr std::string_view kVersion = "0.1.0";

/// A file could not be read or written.
class OutputError : public Error {
 public:
  using Error::Error;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);

/// Everything a command may depend on. Unused fields keep their defaults and still enter the hash.
struct RunConfig {
  std::string command;
  std::string set_path;
  std::string mu0_path;
  std::string out_path;
  int generation = 4;
  int grid_x = 101;
  int grid_t = 101;
  double tau0 = 0.0;
  double safety = 0.1;
  double gap = 0.02;
  std::uint64_t seed = 1;
  int iterations = 100;
  bool both_kernels = false;
  bool p4_hypothesis = false;
  // command specific
  double lx = 1.0;
  double lt = 1.0;
  double r = 0.5;
  std::string kernel = "P";
  std::vector<double> point;
  double tau = 0.0;
  std::string suite = "all";

  /// Throws InputError naming the first parameter out of range.
  void validate() const;
  /// Sorted-key JSON of every field.
  std::string canonical() const;
  /// fnv1a64 of canonical(), 16 hex digits.
  std::string hash() const;
};

/// {"n": 1, "boxes": [{"min": [x, t], "max": [x, t]}, ...]}. Errors carry "source:line:column" for syntax
/// problems and a JSON pointer for structural ones.
BoxUnionSet parse_set_json(std::string_view text, const std::string& source = "<input>");
BoxUnionSet read_set_json(const std::string& path);
std::string set_to_json(const BoxUnionSet& set);

struct MeasureFile {
  CellMeasure measure;
  double tau0 = 0.0;  // 0 when absent
};

/// {"n": 1, "cells": [{"min": [...], "max": [...], "density": d}, ...], "tau0": t}
MeasureFile parse_measure_json(std::string_view text, const std::string& source = "<input>");
MeasureFile read_measure_json(const std::string& path);

/// Artifact writers; each document carries "tool", "version" and "config_hash".
std::string measure_artifact(const CellMeasure& mu, double tau0, const RunConfig& config, const AscentResult* ascent);
std::string bracket_artifact(const CapacityBracket& bracket, const RunConfig& config);
std::string cover_artifact(const WhitneyCover& cover, const RunConfig& config);
std::string rect_artifact(double lx, double lt, const RunConfig& config);

/// Values on a tensor grid, x slowest.
struct SurfaceGrid {
  std::vector<double> xs;
  std::vector<double> ts;
  std::vector<double> values;
  double at(std::size_t i, std::size_t j) const { return values[i * ts.size() + j]; }
};

/// P*μ (kind P) or P_sym*μ (kind P_SYM) for Lebesgue measure on [0, r] x [0, 1], sampled on [-2r, 3r] x [-2, 3].
SurfaceGrid rect_surface(double r, int nx, int nt, KernelKind kind);

/// CSV "x,t,value" with %.17g fields in lexicographic (x, t) order; the provenance goes to `path + ".meta.json"`.
/// Throws OutputError when a file cannot be written.
void export_surface(const SurfaceGrid& surface, const std::string& path, const RunConfig& config);

std::string read_text_file(const std::string& path);
/// Truncates and writes; OutputError on failure.
void write_text_file(const std::string& path, std::string_view text);

}  // namespace calcap
