#pragma once

#include <optional>
#include <vector>

#include "aitk/core.hpp"

namespace aitk::words {

/// Cyclic rotation: result[t] = word[t + k].
SymbolSequence rotated(const SymbolSequence& s, int k);

/// Lexicographically smallest rotation (with -1 < +1).
SymbolSequence canonical(const SymbolSequence& s);

/// True when no proper rotation reproduces the word (the period is exact).
bool is_aperiodic(const SymbolSequence& s);

/// Smallest q dividing the period with word[t] == word[t+q] for all t.
int fundamental_period(const SymbolSequence& s);

/// Word repeated twice.
SymbolSequence doubled(const SymbolSequence& s);

/// Minimum Hamming distance over all cyclic alignments; the words must have
/// equal periods.
int cyclic_hamming(const SymbolSequence& a, const SymbolSequence& b);

/// True when the two words are rotations of each other.
bool same_necklace(const SymbolSequence& a, const SymbolSequence& b);

/// All aperiodic necklaces of exactly the given period, canonical and sorted.
std::vector<SymbolSequence> necklaces(int period);

/// All aperiodic necklaces with period between 1 and max_period.
std::vector<SymbolSequence> necklaces_up_to(int max_period);

/// Minimum over rotations of the sup distance between the orbits (equal
/// periods required).
double cyclic_orbit_distance(const OrbitSequence& a, const OrbitSequence& b);

/// Smallest q dividing the period with |xi[t] - xi[t+q]| <= tol for all t.
int orbit_sub_period(const OrbitSequence& xi, double tol);

}  // namespace aitk::words
