#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "surfsig/dgf.hpp"
#include "surfsig/holder.hpp"
#include "surfsig/path_signature.hpp"

namespace surfsig {

enum class Candidate { section, zero };

// Level-(n+1) candidate: extended path components and, on each rectangle,
// the section of the level-(n+1) boundary loop added to f (zero candidate:
// nothing added). Grid-backed path components are extended exactly by their
// line signatures, others through lyons_value.
DGF pathwise_extend(const DGF& f, Candidate c = Candidate::section, const ExtensionOptions& path_opt = {});

// Depth-m composite over the 2^m x 2^m dyadic subdivision of r: each 2x2
// block composes horizontally, then vertically (v_first swaps the order).
Square grid_multiply(const DGF& f, const Rect& r, int m, bool v_first = false);

struct SewingOptions {
  int m_min = 1;
  int m_max = 7;
  double tol = 1e-6;          // on the level-(n+1) Cauchy gap of the full domain
  int extrapolation = 2;      // Romberg steps with ratios r, r^2, ... (r the theoretical ratio)
  bool throw_on_fail = true;
  Candidate candidate = Candidate::section;
  int local_depth = 2;        // extra depth for rectangles outside the dyadic table
  int jobs = 1;
  ExtensionOptions path;
};

struct LevelTrace {
  int level = 0;                         // the new level n+1
  std::vector<int> depths;
  std::vector<double> gaps;              // raw |G_m - G_(m-1)| for depths[1..]
  std::vector<double> extrapolated_gaps;
  double ratio = 0.0;                    // 2^(2(1 - (n+1) sigma))
  double slope = 0.0;                    // fitted log2 slope of the raw gaps
  int depth = 0;
  bool converged = false;
  bool regime_warning = false;           // (n+1) sigma <= 1
  bool section_fallback = false;
};

DGF extend_one_level(const DGF& f, const SewingOptions& opt = {}, LevelTrace* trace = nullptr);
DGF extend_to_level(const DGF& f, int target, const SewingOptions& opt = {},
                    std::vector<LevelTrace>* traces = nullptr);
// full-domain square of the extension
Square signature_of_rough_surface(const DGF& f, int target, const SewingOptions& opt = {},
                                  std::vector<LevelTrace>* traces = nullptr);

// CSV with header level,depth,gap
void write_trace_csv(std::ostream& os, const std::vector<LevelTrace>& traces);

enum class RegularityMode { standard, rectangular };

struct RegularityRow {
  std::string name;
  int level = 0;
  double ratio = 0.0;  // worst measured / bound
};

struct RegularityReport {
  std::vector<RegularityRow> rows;
  double beta = 0.0;
  double beta_rp = 0.0;
  double beta_rs = 0.0;
  double holder_norm = 0.0;  // sampled |X|_rho of the grid, when present
  double worst = 0.0;
};

// Ratios over dyadic intervals and rectangles up to the given depth.
RegularityReport regularity_report(const DGF& f, RegularityMode mode = RegularityMode::standard, int depth = 3);

// rho-Hoelder distance d^h + d^v + d^s sampled over dyadic data to depth
double dgf_metric(const DGF& f, const DGF& g, double rho, int depth = 3);

}  // namespace surfsig
