#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aitk/continuation.hpp"
#include "aitk/words.hpp"

namespace aitk::sweep {

/// Worker cap: AI_TOOLKIT_THREADS when set, hardware parallelism otherwise.
int worker_count();

/// Runs fn(i) for i in [0, count) on the worker pool.
void parallel_for(int count, const std::function<void(int)>& fn);

struct WordRun {
  SymbolSequence word;
  BranchRecord branch;  // events filled by detect_bifurcations
};

/// Continues every word and detects its events, fanned out over workers;
/// results are ordered like the input.
std::vector<WordRun> run_words(const StructuralParams& p, double sigma,
                               double delta,
                               const std::vector<SymbolSequence>& ws,
                               const BranchOptions& opts);

struct PdRow {
  SymbolSequence parent;
  std::optional<SymbolSequence> child;
  double epsilon = 0.0;
  /// Child equals the doubled parent with exactly one flipped symbol.
  bool child_consistent = false;
};

struct SnRow {
  std::vector<SymbolSequence> pair;  // canonical labels; 2 when paired
  double epsilon = 0.0;
  int hamming = -1;  // cyclic distance between the pair, -1 when unpaired
  OrbitSequence orbit;
};

struct BifTable {
  StructuralParams p;
  double sigma = 0.0, delta = 0.0;
  int max_period = 0;
  std::vector<WordRun> runs;
  std::vector<PdRow> pd_rows;
  std::vector<SnRow> sn_rows;
  std::vector<std::string> notes;

  /// Smallest event eps among branches with period <= period_cap.
  double min_event_epsilon(int period_cap) const;
};

/// Enumerates all necklaces up to max_period, continues each branch, pairs
/// saddle-node folds by (eps, fold orbit), merges period-doubling sightings
/// with the apex folds of the doubled-period branches, and reports one row
/// per physical event.
BifTable bifurcation_table(const StructuralParams& p, double sigma,
                           double delta, int max_period,
                           const BranchOptions& opts);

/// Display form of a saddle-node pair: the shared word with the single
/// differing slot marked, or both words when they differ in more than one.
std::string pair_pattern(const SymbolSequence& a, const SymbolSequence& b);

}  // namespace aitk::sweep
